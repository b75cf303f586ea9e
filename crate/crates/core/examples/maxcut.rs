//! MAXCUT relaxation of a small graph, compared with the brute-force cut.
//!
//! Run with `cargo run --release --example maxcut`.

use qipm::instance::{generate_maxcut_sdp, WeightedGraph};
use qipm::ipm::{run, RunConfig};

fn main() -> qipm::Result<()> {
    let graphs = [
        ("triangle", "0 1\n1 2\n0 2\n"),
        ("5-cycle", "0 1\n1 2\n2 3\n3 4\n4 0\n"),
        ("weighted K4", "0 1 1\n0 2 2\n0 3 1\n1 2 1\n1 3 3\n2 3 1\n"),
    ];
    let cfg = RunConfig {
        eps: 1e-7,
        diagnostics: false,
        ..RunConfig::default()
    };
    for (name, text) in graphs {
        let g = WeightedGraph::parse(text)?;
        let inst = generate_maxcut_sdp(&g)?;
        let res = run(&inst, &cfg)?;
        let sdp = inst.rhs_mat().dot(&res.state.y);
        let cut = g.brute_force_max_cut();
        println!(
            "{name:<12} n={} iters={:<4} sdp bound {sdp:.6}  max cut {cut:.1}  ratio {:.4}",
            g.n,
            res.trace.len(),
            cut / sdp
        );
    }
    Ok(())
}
