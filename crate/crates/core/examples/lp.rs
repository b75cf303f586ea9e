//! Linear programs: the dedicated LP path against the diagonal SDP
//! embedding, then the same LP with simulated tomography.
//!
//! Run with `cargo run --release --example lp`.

use qipm::instance::{generate_random_lp, lp_embed};
use qipm::ipm::{run, run_lp, Mode, RunConfig};

fn main() -> qipm::Result<()> {
    let lp = generate_random_lp(10, 4, 5)?;
    let cfg = RunConfig {
        eps: 1e-6,
        diagnostics: false,
        ..RunConfig::default()
    };
    let direct = run_lp(&lp, &cfg)?;
    let embedded = run(&lp_embed(&lp), &cfg)?;
    let worst = direct
        .trace
        .iter()
        .zip(&embedded.trace)
        .map(|(a, b)| (a.nu - b.nu).abs() / a.nu)
        .fold(0.0, f64::max);
    println!(
        "exact: {} LP steps, {} SDP steps, worst relative nu mismatch {worst:.2e}",
        direct.trace.len(),
        embedded.trace.len()
    );
    let s: Vec<String> = direct.state.s.iter().map(|v| format!("{v:.4}")).collect();
    println!("optimal s = [{}]", s.join(", "));

    let mut q = RunConfig {
        mode: Mode::QuantumSim,
        eps: 1e-4,
        ..cfg
    };
    q.noise.rng_seed = 1;
    let noisy = run_lp(&lp, &q)?;
    let monotone = noisy.trace.windows(2).all(|w| w[1].gap < w[0].gap);
    println!(
        "qsim: {} steps, final gap {:.3e}, gap strictly decreasing: {monotone}, dual drift {:.2e}",
        noisy.trace.len(),
        noisy.final_gap(),
        noisy.drift_norm
    );
    Ok(())
}
