//! Starting from a strictly feasible primal point only: the inflation phase
//! walks to the analytic centre and anchors a dual point there.
//!
//! Run with `cargo run --release --example initial_point`.

use nalgebra::DVector;
use qipm::instance::{primal_residual, SdpInstance};
use qipm::ipm::{find_initial_point, run_from, RunConfig};
use qipm::matspace::{central_path_distance, SymMatrix};

fn main() -> qipm::Result<()> {
    // every constraint matrix is traceless, so I is orthogonal to their span
    // and the primal slice is bounded
    let n = 4;
    let mut mats = Vec::new();
    for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)] {
        mats.push(SymMatrix::from_upper_fn(n, |a, b| if (a, b) == (i, j) { 1.0 } else { 0.0 }));
    }
    mats.push(SymMatrix::from_diagonal(&[1.0, -1.0, 0.0, 0.0]));
    let x = DVector::from_vec(vec![0.2, -0.1, 0.3, 0.0, 0.1, 0.5]);
    let t = SymMatrix::from_diagonal(&[2.0, 1.0, 1.5, 0.5]);
    let span = SdpInstance::new(mats.clone(), t.clone(), SymMatrix::identity(n), None, None)?.combine(&x);
    let c = SymMatrix::from_diagonal(&[1.0, 2.0, 1.0, 3.0]);
    let inst = SdpInstance::new(mats, &span - &t, c, Some(x), None)?;

    let cfg = RunConfig {
        eps: 1e-6,
        diagnostics: false,
        ..RunConfig::default()
    };
    let start = find_initial_point(&inst, &cfg)?;
    println!(
        "anchored start: nu = {:.4}, d = {:.3e}, lambda_min(S) = {:.3e}, lambda_min(Y) = {:.3e}",
        start.nu,
        central_path_distance(&start.s, &start.y, start.nu)?,
        start.s.min_eigenvalue(),
        start.y.min_eigenvalue()
    );
    println!("dual violation {:.2e}", inst.dual_violation(&start.y));
    let res = run_from(start, &inst, &cfg)?;
    println!(
        "solved in {} iterations: gap {:.3e}, primal residual {:.2e}",
        res.trace.len(),
        res.final_gap(),
        primal_residual(&res.state, &inst)
    );
    println!("optimal value Tr(BY) = {:.6}", inst.rhs_mat().dot(&res.state.y));
    Ok(())
}
