//! Exact path following on a random SDP, with the cost ledger.
//!
//! Run with `cargo run --release --example exact_sdp`.

use qipm::instance::{dual_residual, generate_random_sdp, primal_residual};
use qipm::ipm::{run, RunConfig};

fn main() -> qipm::Result<()> {
    let inst = generate_random_sdp(6, 8, 11)?;
    let cfg = RunConfig {
        eps: 1e-6,
        ..RunConfig::default()
    };
    let res = run(&inst, &cfg)?;

    println!("n = {}, m = {}", inst.n(), inst.m());
    println!(
        "{} iterations, planned {} (ceil(10 sqrt(n) ln(gap0/eps)))",
        res.trace.len(),
        res.planned_iterations
    );
    println!("gap {:.3e} -> {:.3e}", res.initial_gap, res.final_gap());
    let rate = 1.0 - cfg.chi / (inst.n() as f64).sqrt();
    let worst = res
        .trace
        .windows(2)
        .map(|w| (w[1].gap / w[0].gap - rate).abs())
        .fold(0.0, f64::max);
    println!("per-step contraction {rate:.6}, worst deviation {worst:.2e}");
    let dmax = res.trace.iter().map(|r| r.distance).fold(0.0, f64::max);
    println!("max distance to the central path {dmax:.3e}");
    println!(
        "residuals: primal {:.2e}, dual {:.2e}",
        primal_residual(&res.state, &inst),
        dual_residual(&res.state, &inst)
    );

    println!("\nfirst and last ledger rows:");
    for row in [res.ledger.rows.first(), res.ledger.rows.last()].into_iter().flatten() {
        println!(
            "  iter {:>4}: mu = ({:.3}, {:.3}, {:.3}), kappa(M3 M^-1) = {:.3e}, kappa_yy = {:.3e}",
            row.iter, row.mu_m1, row.mu_m2, row.mu_m3, row.kappa_pipeline, row.kappa_yy
        );
    }
    println!(
        "ledger total {:.3e} = n^2/xi^2 * gamma^2 * {:.3e}",
        res.ledger.total, res.ledger.weighted_sum
    );
    Ok(())
}
