//! Path following with the simulated quantum Newton step: exact solve,
//! tomography of the normalised step, and the resulting constraint drift.
//!
//! Run with `cargo run --release --example quantum_sim_sdp`.

use qipm::instance::generate_random_sdp;
use qipm::ipm::{run, Mode, RunConfig};

fn main() -> qipm::Result<()> {
    let inst = generate_random_sdp(6, 6, 3)?;
    let mut cfg = RunConfig {
        mode: Mode::QuantumSim,
        eps: 1e-3,
        xi: 0.01,
        diagnostics: false,
        ..RunConfig::default()
    };
    cfg.noise.rng_seed = 7;
    let res = run(&inst, &cfg)?;

    let t = &res.trace;
    println!("{} iterations, gamma = {:.2}", t.len(), res.gamma);
    println!("final gap {:.3e}", res.final_gap());
    println!(
        "drift ||B-B' (+) C-C'||_F = {:.3e} (bound {:.1e}), re-summed {:.3e}",
        res.drift_norm,
        res.drift_bound,
        res.resummed_drift()
    );
    let (amin, amax) = t
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.alpha_observed), hi.max(r.alpha_observed)));
    println!("alpha_observed in [{amin:.5}, {amax:.5}]");
    let above = t.iter().filter(|r| r.alpha_observed > 0.1 + 1e-9).count();
    println!("steps with alpha above 0.1: {above} of {}", t.len());
    let dmax = t.iter().map(|r| r.distance).fold(0.0, f64::max);
    println!("max distance {dmax:.3e}");
    let within = t.iter().filter(|r| r.tomography_within_bound).count();
    let capped = t.iter().filter(|r| r.capped_shots).count();
    println!("tomography within 2 delta ||v||: {within}/{}; steps above the shot cap: {capped}", t.len());
    for r in t.iter().step_by(t.len() / 5 + 1) {
        println!(
            "  iter {:>4}: gap {:.3e}, delta {:.2e}, step error {:.2e}",
            r.iter, r.gap, r.delta_used, r.step_error
        );
    }
    Ok(())
}
