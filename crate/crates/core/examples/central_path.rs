//! Driving an iterate to a fixed point of the central path, where
//! `SY = νI`.
//!
//! Run with `cargo run --release --example central_path`.

use nalgebra::DMatrix;
use qipm::instance::generate_random_sdp;
use qipm::ipm::{drive_to_nu, find_initial_point, RunConfig};
use qipm::matspace::central_path_distance;

fn main() -> qipm::Result<()> {
    let inst = generate_random_sdp(4, 4, 8)?;
    let cfg = RunConfig::default();
    let start = find_initial_point(&inst, &cfg)?;
    let n = inst.n();
    println!("start: nu = {:.4}", start.nu);
    for frac in [0.5, 0.1, 0.01, 1e-4] {
        let target = frac * start.nu;
        let st = drive_to_nu(&inst, &start, target, &cfg)?;
        let dev = (st.s.as_matrix() * st.y.as_matrix() - DMatrix::identity(n, n) * target).norm();
        println!(
            "nu = {target:.3e}: ||SY - nu I||_F = {dev:.2e}, d = {:.2e}, Tr(SY)/(n nu) = {:.8}",
            central_path_distance(&st.s, &st.y, target)?,
            st.s.dot(&st.y) / (n as f64 * target)
        );
    }
    Ok(())
}
