//! Vector-state tomography on a random unit vector, at a few precisions.
//!
//! Run with `cargo run --release --example tomography`.

use qipm::bench::random_unit_vector;
use qipm::qsim::{shot_count, tomography_estimate, NoiseConfig};
use qipm::rng::SeedTree;

fn main() -> qipm::Result<()> {
    let seeds = SeedTree::new(42);
    let d = 32;
    let x = random_unit_vector(d, &mut seeds.stream("state", 0));
    let cfg = NoiseConfig::default();

    println!("d = {d}");
    println!("{:>6} {:>12} {:>12} {:>12} {:>8}", "delta", "N/phase", "error", "bound", "signs");
    for (k, delta) in [0.4, 0.2, 0.1, 0.05].into_iter().enumerate() {
        let rep = tomography_estimate(&x, delta, &cfg, &mut seeds.stream("shots", k as u64))?;
        let wrong = rep
            .signs
            .iter()
            .zip(x.iter())
            .filter(|(s, xi)| (**s as f64) * xi.signum() < 0.0)
            .count();
        println!(
            "{delta:>6} {:>12} {:>12.4e} {:>12.4e} {:>5}/{d}",
            shot_count(d, delta, cfg.shot_constant),
            rep.achieved_error,
            7f64.sqrt() * delta,
            d - wrong
        );
    }

    // entries below the amplitude resolution may get either sign
    let rep = tomography_estimate(&x, 0.2, &cfg, &mut seeds.stream("shots", 99))?;
    println!("\n  i      x_i   estimate");
    for i in 0..8 {
        println!("{i:>3} {:>8.4} {:>10.4}", x[i], rep.estimate[i]);
    }
    Ok(())
}
