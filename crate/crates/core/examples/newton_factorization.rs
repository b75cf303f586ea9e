//! The Newton matrix, its two-factor form, and the block-encoding
//! parameters that feed the cost ledger.
//!
//! Run with `cargo run --release --example newton_factorization`.

use qipm::instance::generate_random_sdp;
use qipm::ipm::find_initial_point;
use qipm::ipm::RunConfig;
use qipm::lifted::{assemble_newton_matrix, factorize};
use qipm::newton::{kappa_pipeline, solve_dense, solve_exact};

fn main() -> qipm::Result<()> {
    let inst = generate_random_sdp(4, 5, 2)?;
    let state = find_initial_point(&inst, &RunConfig::default())?;
    let m = assemble_newton_matrix(&state, &inst);
    let f = factorize(&state, &inst)?;
    println!("M is {}x{}", m.nrows(), m.ncols());
    println!("||M1 M2 - M||_F / ||M||_F = {:.2e}", (&f.m1 * &f.m2 - &m).norm() / m.norm());
    println!("mu(M1) = {:.4}, mu(M2) = {:.4}, mu(M3) = {:.4}", f.mu_m1, f.mu_m2, f.mu_m3);
    println!("kappa(M3 M^-1) = {:.4}", kappa_pipeline(&state, &inst)?);

    let nu = 0.9 * state.nu;
    let a = solve_exact(&state, &inst, nu)?;
    let b = solve_dense(&state, &inst, nu)?;
    println!("factored vs dense solve: {:.2e}", (a.stacked() - b.stacked()).norm());
    println!("linearised residual {:.2e}", a.residual);
    // the raw dual step need not be symmetric; the iterate uses its symmetric part
    println!("dY asymmetry {:.2e}, ||dS (+) dY||_F = {:.4}", a.asymmetry, a.norm_dsdy);
    Ok(())
}
