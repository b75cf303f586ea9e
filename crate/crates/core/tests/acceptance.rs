//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process fails only on an unexpected result; criteria listed in
//! `KNOWN_UNATTAINABLE` are expected to fail because the stated bound cannot
//! hold, and the suite also fails if one of them starts passing.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use qipm::bench::{run_cell, tomography_sweep, SweepSpec};
use qipm::instance::{generate_random_lp, generate_random_sdp, lp_embed, IterateState};
use qipm::ipm::{cost_ledger, drive_to_nu, find_initial_point, run, run_lp, LedgerWeights, Mode, RunConfig, RunResult};
use qipm::lifted::{assemble_newton_matrix, factorize, hat, tilde, tilde_dense};
use qipm::matspace::vec_row_major;
use qipm::newton::{solve_dense, solve_exact};
use qipm::rng::SeedTree;
use qipm::verify::{random_pd, random_symmetric};
use rand::Rng;

/// Criteria whose literal statement is false; see the printed detail lines.
const KNOWN_UNATTAINABLE: [&str; 2] = ["C2", "C5"];

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn report(o: &Outcome) {
    let within = o.elapsed <= o.budget;
    let verdict = if o.pass && within { "PASS" } else { "FAIL" };
    println!(
        "[{verdict}] {} {}: {} ({:.1}s, budget {}s)",
        o.id,
        o.title,
        o.detail,
        o.elapsed.as_secs_f64(),
        o.budget.as_secs()
    );
}

fn timed(
    id: &'static str,
    title: &'static str,
    budget_s: u64,
    f: impl FnOnce() -> (bool, String),
) -> Outcome {
    let t = Instant::now();
    let (pass, detail) = f();
    Outcome {
        id,
        title,
        pass,
        detail,
        elapsed: t.elapsed(),
        budget: Duration::from_secs(budget_s),
    }
}

fn random_state(n: usize, m: usize, rng: &mut impl Rng) -> IterateState {
    IterateState::new(random_pd(n, rng), random_pd(n, rng), DVector::zeros(m)).unwrap()
}

fn dims_grid() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in [2, 4, 8, 12] {
        for m in [1, n, (2 * n).min(n * (n + 1) / 2)] {
            out.push((n, m));
        }
    }
    out
}

fn c1_factorization() -> (bool, String) {
    let grid = dims_grid();
    let mut rng = SeedTree::new(1).stream("c1", 0);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let (n, m) = grid[k % grid.len()];
        let inst = generate_random_sdp(n, m, k as u64).unwrap();
        let st = random_state(n, m, &mut rng);
        let f = factorize(&st, &inst).unwrap();
        let mm = assemble_newton_matrix(&st, &inst);
        worst = worst.max((&f.m1 * &f.m2 - &mm).norm() / mm.norm());
    }
    (worst <= 1e-10, format!("50 iterates, worst ||M1M2-M||/||M|| = {worst:.2e} (<= 1e-10)"))
}

fn c2_lifted() -> (bool, String) {
    let mut rng = SeedTree::new(2).stream("c2", 0);
    let (mut vec_w, mut lit_w, mut rev_w, mut rc_w) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut lit_fail = 0;
    let mut pairs = 0;
    for n in [3, 5] {
        for _ in 0..100 {
            pairs += 1;
            let z = random_symmetric(n, &mut rng);
            let w = random_symmetric(n, &mut rng);
            let lhs = tilde(&z).apply(&vec_row_major(&w));
            vec_w = vec_w.max((lhs - vec_row_major(&(w.as_matrix() * z.as_matrix()))).norm());

            let prod = tilde(&z).mul(&tilde(&w)).entries;
            let lit = (&prod - tilde_dense(&(z.as_matrix() * w.as_matrix())).entries).norm();
            if lit > 1e-10 {
                lit_fail += 1;
            }
            lit_w = lit_w.max(lit);
            rev_w = rev_w.max((&prod - tilde_dense(&(w.as_matrix() * z.as_matrix())).entries).norm());

            let nm = tilde(&z).mul(&hat(&w)).entries;
            for i in 0..n {
                for j in 0..n {
                    let row = z.column(j).kronecker(&w.column(i));
                    rc_w = rc_w.max((nm.row(n * i + j).transpose() - row).norm());
                    let col = w.column(j).kronecker(&z.column(i));
                    rc_w = rc_w.max((nm.column(n * i + j) - col).norm());
                }
            }
        }
    }
    println!("       C2 vec action        tilde(Z)vec(W) = vec(WZ): worst {vec_w:.2e}");
    println!(
        "       C2 product (literal) tilde(Z)tilde(W) = tilde(ZW): {lit_fail}/{pairs} pairs fail, worst {lit_w:.2e}"
    );
    println!("       C2 product (reversed, informational) tilde(Z)tilde(W) = tilde(WZ): worst {rev_w:.2e}");
    println!("       C2 row/column formulas of tilde(Z)hat(W): worst {rc_w:.2e}");
    println!("       C2 note: with tilde(Z)vec(W) = vec(WZ), tilde(Z)tilde(W)vec(X) = vec(XWZ), so the literal product form holds only for commuting pairs");
    let pass = vec_w <= 1e-10 && lit_fail == 0 && rc_w <= 1e-10;
    (pass, format!("{pairs} pairs; literal product identity fails on {lit_fail}"))
}

fn c3_oracle() -> (bool, String) {
    let grid = dims_grid();
    let mut rng = SeedTree::new(3).stream("c3", 0);
    let (mut agree, mut inv) = (0.0f64, 0.0f64);
    for k in 0..50 {
        let (n, m) = grid[k % grid.len()];
        let inst = generate_random_sdp(n, m, 100 + k as u64).unwrap();
        let st = random_state(n, m, &mut rng);
        let nu = st.nu * rng.random_range(0.5..1.0);
        let a = solve_exact(&st, &inst, nu).unwrap();
        let b = solve_dense(&st, &inst, nu).unwrap();
        agree = agree.max((a.stacked() - b.stacked()).norm() / a.stacked().norm());
        let (_, perp) = inst.split_span(&a.ds);
        let rows = inst.constraint_rows();
        // relative to the whole step: when L is all of Sⁿ the dual step is pure roundoff
        let scale = rows.norm() * a.stacked().norm();
        let ortho_raw = (&rows * vec_row_major(&a.dy_raw)).norm() / scale;
        let ortho_sym = (&rows * a.dy.vec()).norm() / scale;
        let rhs = (DMatrix::identity(n, n) * nu - st.s.as_matrix() * st.y.as_matrix()).norm();
        inv = inv
            .max(perp.norm() / a.stacked().norm())
            .max(ortho_raw)
            .max(ortho_sym)
            .max(a.residual / rhs);
    }
    (
        agree <= 1e-8 && inv <= 1e-8,
        format!("50 iterates, factored vs dense {agree:.2e}, invariants {inv:.2e} (<= 1e-8)"),
    )
}

fn c4_c9_exact() -> ((bool, String), (bool, String)) {
    let cfg = RunConfig {
        eps: 1e-6,
        diagnostics: false,
        ..RunConfig::default()
    };
    let n = 8;
    let rate = 1.0 - 0.1 / (n as f64).sqrt();
    let (mut within_plan, mut worst_rate, mut worst_d) = (true, 0.0f64, 0.0f64);
    let mut max_ratio = 0.0f64;
    let (mut eq18_fail, mut rows) = (0, 0);
    for seed in 0..10 {
        let inst = generate_random_sdp(n, 8, 400 + seed).unwrap();
        let res = run(&inst, &cfg).unwrap();
        within_plan &= res.trace.len() <= res.planned_iterations && res.final_gap() <= cfg.eps;
        max_ratio = max_ratio.max(res.trace.len() as f64 / res.planned_iterations as f64);
        let mut prev = res.initial_gap;
        for r in &res.trace {
            worst_rate = worst_rate.max((r.gap / prev - rate).abs());
            prev = r.gap;
            worst_d = worst_d.max(r.distance);
            rows += 1;
            if !r.eq18_holds {
                eq18_fail += 1;
            }
        }
    }
    (
        (
            within_plan && worst_rate <= 1e-6 && worst_d <= 0.1,
            format!(
                "10 runs n=m=8 eps=1e-6: iterations/planned <= {max_ratio:.3}, contraction deviation {worst_rate:.2e} (<= 1e-6), max d {worst_d:.3e} (<= 0.1)"
            ),
        ),
        (eq18_fail == 0, format!("{rows} rows of the criterion-4 runs, {eq18_fail} violate the bound")),
    )
}

fn qsim_cfg(seed: u64) -> RunConfig {
    let mut cfg = RunConfig {
        mode: Mode::QuantumSim,
        eps: 1e-3,
        xi: 0.01,
        eta: 0.1,
        chi: 0.1,
        diagnostics: false,
        ..RunConfig::default()
    };
    cfg.noise.rng_seed = seed;
    cfg
}

fn qsim_runs(n: usize, runs: u64) -> Vec<RunResult> {
    (0..runs)
        .map(|k| {
            let inst = generate_random_sdp(n, n, 500 + 31 * n as u64 + k).unwrap();
            run(&inst, &qsim_cfg(k)).unwrap()
        })
        .collect()
}

fn c5_audit(runs: &[(usize, RunResult)]) -> (bool, String) {
    let total = runs.len();
    let mut clean = 0;
    let (mut pd, mut dist, mut lo, mut hi) = (0, 0, 0, 0);
    let (mut amin, mut amax, mut dmax) = (f64::INFINITY, 0.0f64, 0.0f64);
    let (mut steps, mut above) = (0, 0);
    for (_, r) in runs {
        let t = &r.trace;
        let all_pd = t.iter().all(|x| x.s_pd && x.y_pd);
        let all_d = t.iter().all(|x| x.distance <= 0.1 + 1e-9);
        let all_lo = t.iter().all(|x| x.alpha_observed >= 0.001 - 1e-9);
        let all_hi = t.iter().all(|x| x.alpha_observed <= 0.1 + 1e-9);
        pd += all_pd as usize;
        dist += all_d as usize;
        lo += all_lo as usize;
        hi += all_hi as usize;
        clean += (all_pd && all_d && all_lo && all_hi) as usize;
        for x in t {
            amin = amin.min(x.alpha_observed);
            amax = amax.max(x.alpha_observed);
            dmax = dmax.max(x.distance);
            steps += 1;
            above += (x.alpha_observed > 0.1 + 1e-9) as usize;
        }
    }
    println!("       C5 runs with S,Y > 0 throughout: {pd}/{total}");
    println!("       C5 runs with d <= 0.1 throughout: {dist}/{total} (max d {dmax:.3e})");
    println!("       C5 runs with alpha >= 0.001 throughout: {lo}/{total} (min alpha {amin:.5})");
    println!(
        "       C5 runs with alpha <= 0.1 throughout: {hi}/{total} (max alpha {amax:.5}; {above}/{steps} steps above 0.1)"
    );
    println!("       C5 note: an exact step contracts the gap by exactly 1 - chi/sqrt(n), so alpha = chi = 0.1 sits on the upper edge and symmetric tomography noise crosses it on about half the steps");
    let rate = clean as f64 / total as f64;
    (
        rate >= 0.95,
        format!("{total} runs (n in {{8, 12}}, xi=0.01, eta=chi=0.1): {clean} satisfy every clause ({:.0}%, need >= 95%)", 100.0 * rate),
    )
}

fn c6_tomography() -> (bool, String) {
    let spec = SweepSpec {
        seed: 6,
        ..SweepSpec::default()
    };
    let res = tomography_sweep(&spec).unwrap();
    let mut pass = true;
    for c in &res.cells {
        let need = c.required_rate - 0.02;
        let ok = c.success_rate >= need;
        pass &= ok;
        println!(
            "       C6 d={:<3} delta={} N={:<8} success {:.3} (need >= {:.3}) median error {:.3e}, max {:.3e}",
            c.d, c.delta, c.n_shots, c.success_rate, need, c.err_median, c.err_max
        );
    }
    (pass, format!("{} cells x {} trials", res.cells.len(), spec.trials))
}

fn c7_signs() -> (bool, String) {
    let spec = SweepSpec {
        dims: vec![64],
        deltas: vec![0.1],
        trials: 500,
        seed: 7,
        ..SweepSpec::default()
    };
    let (cell, _) = run_cell(64, 0.1, 0, &spec).unwrap();
    let p0 = 64f64.powf(-0.83);
    let k = cell.sign_checked as f64;
    let bound = p0 + 3.0 * (p0 * (1.0 - p0) / k).sqrt();
    let rate = cell.sign_errors as f64 / k;
    (
        rate <= bound,
        format!(
            "d=64 delta=0.1: {} wrong of {} checked entries, rate {rate:.2e} (<= {bound:.3e})",
            cell.sign_errors, cell.sign_checked
        ),
    )
}

fn c8_drift(runs: &[RunResult]) -> (bool, String) {
    let within = runs.iter().filter(|r| r.drift_norm <= 0.01).count();
    let resum = runs
        .iter()
        .map(|r| (r.drift_norm - r.resummed_drift()).abs())
        .fold(0.0, f64::max);
    let worst = runs.iter().map(|r| r.drift_norm).fold(0.0, f64::max);
    let frac = within as f64 / runs.len() as f64;
    (
        frac >= 0.9 && resum <= 1e-10,
        format!(
            "{} runs n=8 gamma=sqrt(T): {within} with drift <= xi (max {worst:.3e}); ledger vs re-summed {resum:.1e} (<= 1e-10)",
            runs.len()
        ),
    )
}

fn c10_lp() -> (bool, String) {
    let exact = RunConfig {
        eps: 1e-6,
        diagnostics: false,
        ..RunConfig::default()
    };
    let (mut worst, mut same_len, mut q_ok) = (0.0f64, true, 0);
    for seed in 0..10 {
        let lp = generate_random_lp(10, 4, 1000 + seed).unwrap();
        let a = run_lp(&lp, &exact).unwrap();
        let b = run(&lp_embed(&lp), &exact).unwrap();
        same_len &= a.trace.len() == b.trace.len();
        for (x, y) in a.trace.iter().zip(&b.trace) {
            worst = worst.max((x.nu - y.nu).abs() / x.nu);
        }
        let mut q = RunConfig {
            mode: Mode::QuantumSim,
            ..exact.clone()
        };
        q.noise.rng_seed = seed;
        let r = run_lp(&lp, &q).unwrap();
        let mut prev = r.initial_gap;
        let mono = r.trace.iter().all(|t| {
            let ok = t.gap < prev;
            prev = t.gap;
            ok
        });
        if mono && r.final_gap() <= q.eps {
            q_ok += 1;
        }
    }
    (
        same_len && worst <= 1e-6 && q_ok == 10,
        format!("10 LPs n=10 m=4: nu mismatch {worst:.2e} (<= 1e-6), equal lengths {same_len}, qsim monotone and converged {q_ok}/10"),
    )
}

fn c11_central() -> (bool, String) {
    let cfg = RunConfig {
        diagnostics: false,
        ..RunConfig::default()
    };
    let mut worst = 0.0f64;
    let mut cases = 0;
    for seed in 0..5 {
        let inst = generate_random_sdp(4, 4, 1100 + seed).unwrap();
        let start = find_initial_point(&inst, &cfg).unwrap();
        for frac in [0.5, 0.1, 0.01] {
            let nu = frac * start.nu;
            let st = drive_to_nu(&inst, &start, nu, &cfg).unwrap();
            let dev = (st.s.as_matrix() * st.y.as_matrix() - DMatrix::identity(4, 4) * nu).norm();
            worst = worst.max(dev / (1e-4 * nu * 4.0));
            cases += 1;
        }
    }
    (
        worst <= 1.0,
        format!("{cases} targets on n=4 instances: worst ||SY - nu I||_F / (1e-4 nu n) = {worst:.2e} (<= 1)"),
    )
}

fn ledger_checks() -> (bool, String) {
    let cfg = RunConfig {
        eps: 1e-2,
        ..RunConfig::default()
    };
    let inst = generate_random_sdp(6, 6, 1200).unwrap();
    let a = run(&inst, &cfg).unwrap();
    let b = run(&inst, &cfg).unwrap();
    let resum: f64 = a
        .trace
        .iter()
        .map(|r| (r.mu_m1.unwrap() + r.mu_m2.unwrap() + r.mu_m3.unwrap()) * r.kappa_pipeline.unwrap())
        .sum();
    let rel = (resum - a.ledger.aggregate).abs() / a.ledger.aggregate;
    let rebuilt = cost_ledger(&a.trace, &LedgerWeights::sdp(6, cfg.xi, a.gamma));
    let finite = a
        .ledger
        .rows
        .iter()
        .all(|r| [r.mu_m1, r.mu_m2, r.mu_m3, r.kappa_pipeline, r.kappa_yy].iter().all(|v| v.is_finite()));
    let same = a.ledger == b.ledger && rebuilt == a.ledger;
    (
        rel <= 1e-12 && finite && same,
        format!(
            "{} rows: aggregate vs re-summation {rel:.1e}, finite {finite}, reproducible {same}",
            a.ledger.rows.len()
        ),
    )
}

fn scaling() -> (bool, String) {
    let cfg = RunConfig {
        eps: 1e-2,
        ..RunConfig::default()
    };
    let mut aggs = Vec::new();
    for n in [4, 8, 12, 16] {
        let inst = generate_random_sdp(n, n, 1300).unwrap();
        aggs.push(run(&inst, &cfg).unwrap().ledger.aggregate);
    }
    let mono = aggs.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = aggs.iter().map(|a| format!("{a:.3e}")).collect();
    (mono, format!("aggregate over n = 4, 8, 12, 16 (m = n): [{}]", shown.join(", ")))
}

fn main() {
    // the libtest-style filter arguments are ignored; `--list` must print nothing
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut outcomes = Vec::new();
    let mut push = |o: Outcome| {
        report(&o);
        outcomes.push(o);
    };
    push(timed("C1", "Newton factorization identity", 10, c1_factorization));
    push(timed("C2", "lifted-algebra suite", 5, c2_lifted));
    push(timed("C3", "exact-solver oracle equivalence", 20, c3_oracle));

    let t = Instant::now();
    let (c4, c9) = c4_c9_exact();
    let el = t.elapsed();
    for (id, title, (pass, detail)) in [("C4", "exact IPM convergence", c4), ("C9", "per-row step-norm bound", c9)] {
        push(Outcome {
            id,
            title,
            pass,
            detail,
            elapsed: el,
            budget: Duration::from_secs(60),
        });
    }

    let t = Instant::now();
    let mut tagged: Vec<(usize, RunResult)> = Vec::new();
    for n in [8, 12] {
        tagged.extend(qsim_runs(n, 20).into_iter().map(|r| (n, r)));
    }
    let shared = t.elapsed();
    let mut c5 = timed("C5", "approximate-IPM audit", 900, || c5_audit(&tagged));
    c5.elapsed += shared;
    push(c5);
    push(timed("C6", "tomography bound", 600, c6_tomography));
    push(timed("C7", "sign recovery", 120, c7_signs));
    let n8: Vec<RunResult> = tagged.iter().filter(|(n, _)| *n == 8).map(|(_, r)| r.clone()).collect();
    let mut c8 = timed("C8", "residual accumulation", 600, || c8_drift(&n8));
    c8.elapsed += shared / 2;
    push(c8);
    push(timed("C10", "LP/SDP consistency", 120, c10_lp));
    push(timed("C11", "central-path characterization", 30, c11_central));
    push(timed("L1", "cost-ledger arithmetic", 120, ledger_checks));
    push(timed("L2", "ledger scaling sweep", 300, scaling));

    let ok = |o: &Outcome| o.pass && o.elapsed <= o.budget;
    let passed = outcomes.iter().filter(|o| ok(o)).count();
    println!("\nacceptance: {passed}/{} criteria pass", outcomes.len());
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_UNATTAINABLE.contains(&o.id);
        match (ok(o), known) {
            (false, true) => println!("  {} fails as documented (bound unattainable as stated)", o.id),
            (true, true) => unexpected.push(format!("{} passed but is listed as unattainable", o.id)),
            (false, false) => unexpected.push(format!("{} failed", o.id)),
            (true, false) => {}
        }
    }
    if !unexpected.is_empty() {
        for u in &unexpected {
            println!("  unexpected: {u}");
        }
        std::process::exit(1);
    }
}
