//! The randomised identity battery that backs `qipm verify`.
//!
//! Run with `cargo run --release --example identity_battery`.

use qipm::verify::{run_identity_suite, VerifyOptions};

fn main() -> qipm::Result<()> {
    let report = run_identity_suite(&VerifyOptions::default())?;
    print!("{}", report.render());
    let faulty = run_identity_suite(&VerifyOptions {
        inject_fault: true,
        ..VerifyOptions::default()
    })?;
    println!("\nwith a perturbed M1 the battery reports all_passed = {}", faulty.all_passed());
    Ok(())
}
