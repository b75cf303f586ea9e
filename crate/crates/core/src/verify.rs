//! Randomised identity battery.
//!
//! Each check draws fresh random data at every dimension in
//! [`VerifyOptions::dims`] and counts how many trials satisfy the identity.
//! Gating checks decide the overall verdict; probes report counts only.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::instance::{generate_random_sdp, IterateState, SdpInstance};
use crate::lifted::{assemble_newton_matrix, factorize, hat, tilde, tilde_dense};
use crate::matspace::{central_path_distance, inverse_pd, vec_row_major, SymMatrix};
use crate::newton::{solve_dense, solve_exact};
use crate::rng::SeedTree;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Perturb `M₁` before the factorization check (negative control).
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            dims: vec![2, 3, 5, 8],
            trials: 25,
            seed: 0,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub gating: bool,
    pub trials: usize,
    pub passed: usize,
    /// Largest observed violation, relative where the check is relative.
    pub worst: f64,
}

impl IdentityCheck {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<IdentityCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(IdentityCheck::ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = match (c.gating, c.ok()) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, _) => "INFO",
            };
            out.push_str(&format!(
                "{verdict} {:<28} {:>4}/{:<4} worst={:.3e}  {}\n",
                c.name, c.passed, c.trials, c.worst, c.statement
            ));
        }
        out.push_str(if self.all_passed() { "verify: all identities hold\n" } else { "verify: FAILED\n" });
        out
    }
}

struct Tally {
    check: IdentityCheck,
}

impl Tally {
    fn new(name: &'static str, statement: &'static str, gating: bool) -> Self {
        Tally {
            check: IdentityCheck {
                name,
                statement,
                gating,
                trials: 0,
                passed: 0,
                worst: 0.0,
            },
        }
    }

    /// Records a trial whose violation is `excess` (≤ 0 means it holds).
    fn record(&mut self, violation: f64, tol: f64) {
        self.check.trials += 1;
        if violation <= tol {
            self.check.passed += 1;
        }
        if violation.is_nan() || violation > self.check.worst {
            self.check.worst = violation;
        }
    }
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> SymMatrix {
    SymMatrix::from_upper_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// `GGᵀ + 0.1·I` with `G` uniform on `[−1, 1]`.
pub fn random_pd(n: usize, rng: &mut impl Rng) -> SymMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    SymMatrix::symmetrize(&(&g * g.transpose() + DMatrix::identity(n, n) * 0.1))
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

pub fn run_identity_suite(opts: &VerifyOptions) -> Result<VerifyReport> {
    let tree = SeedTree::new(opts.seed);
    let mut frob_sym = Tally::new("frobenius-symmetric-swap", "||AB||_F = ||BA||_F for symmetric A, B", true);
    let mut frob_band = Tally::new(
        "frobenius-eigen-band",
        "lmin(A)||B||_F <= ||AB||_F <= lmax(A)||B||_F for A > 0",
        true,
    );
    let mut loewner = Tally::new(
        "loewner-scaling-commuting",
        "Y' <= (1+r)Y, Y'Y = YY' => ||Y'B||_F <= (1+r)||YB||_F",
        true,
    );
    let mut loewner_general = Tally::new(
        "loewner-scaling-general",
        "same bound for non-commuting 0 <= Y' <= (1+r)Y (not a theorem)",
        false,
    );
    let mut central = Tally::new("central-path-product", "S = nu*Y^-1 => SY = nu*I, d = 0, Tr(SY) = n*nu", true);
    let mut sandwich = Tally::new(
        "gap-distance-sandwich",
        "nu(n - sqrt(n)d) <= Tr(SY) <= nu(n + sqrt(n)d)",
        true,
    );
    let mut lift_vec = Tally::new("lifted-vec-action", "tilde(Z) vec(W) = vec(WZ)", true);
    let mut lift_prod = Tally::new(
        "lifted-product",
        "tilde(Z)^T = tilde(Z^T), tilde(Z) tilde(W) = tilde(WZ)",
        true,
    );
    let mut lift_rows = Tally::new(
        "lifted-row-column",
        "row (i,j) of tilde(Z)hat(W) = Z_j (x) W_i, column (k,l) = W_l (x) Z_k",
        true,
    );
    let mut unique = Tally::new(
        "newton-uniqueness",
        "factored and dense Newton solves agree; dS in L, dY orthogonal to L",
        true,
    );
    let mut factor = Tally::new("newton-factorization", "M1 M2 = M", true);

    for (di, &n) in opts.dims.iter().enumerate() {
        let mut rng = tree.stream("verify", di as u64);
        for _ in 0..opts.trials {
            let a = random_symmetric(n, &mut rng);
            let b = random_symmetric(n, &mut rng);
            let ab = (a.as_matrix() * b.as_matrix()).norm();
            let ba = (b.as_matrix() * a.as_matrix()).norm();
            frob_sym.record(rel((ab - ba).abs(), ab), 1e-8);

            let p = random_pd(n, &mut rng);
            let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let spec = p.spectrum();
            let pg = (p.as_matrix() * &g).norm();
            let lo = spec.min() * g.norm();
            let hi = spec.max() * g.norm();
            frob_band.record(rel((lo - pg).max(pg - hi), pg), 1e-12);

            let rho = rng.random_range(0.0..0.5);
            let y = random_pd(n, &mut rng);
            let ys = y.spectrum();
            let shrink: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let u = &ys.eigenvectors;
            let scaled = SymMatrix::symmetrize(
                &(DMatrix::from_fn(n, n, |r, k| u[(r, k)] * ys.eigenvalues[k] * (1.0 + rho) * shrink[k])
                    * u.transpose()),
            );
            let lhs = (scaled.as_matrix() * &g).norm();
            let rhs = (1.0 + rho) * (y.as_matrix() * &g).norm();
            loewner.record(rel(lhs - rhs, rhs), 1e-12);

            // Y' = (1+ρ)Y − P with P ⪰ 0 scaled so that Y' stays PSD.
            let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let y_half_inv = inverse_pd(&crate::matspace::sqrt_pd(&y)?)?;
            let w = y_half_inv.as_matrix() * &v;
            let t = rng.random_range(0.0..1.0) * (1.0 + rho) / w.norm_squared();
            let yp = y.as_matrix() * (1.0 + rho) - &v * v.transpose() * t;
            let lhs = (&yp * &g).norm();
            loewner_general.record(rel(lhs - rhs, rhs), 1e-12);

            let nu = rng.random_range(0.1..10.0);
            let s = inverse_pd(&y)?.scale(nu);
            let sy = s.as_matrix() * y.as_matrix();
            let dev = (&sy - DMatrix::identity(n, n) * nu).norm() / (nu * n as f64);
            let d = central_path_distance(&s, &y, nu)?;
            let tr = (sy.trace() - nu * n as f64).abs() / (nu * n as f64);
            central.record(dev.max(d).max(tr), 1e-8);

            let s = random_pd(n, &mut rng);
            let nu = rng.random_range(0.1..10.0);
            let d = central_path_distance(&s, &y, nu)?;
            let tr = s.dot(&y);
            let nf = n as f64;
            let lo = nu * (nf - nf.sqrt() * d);
            let hi = nu * (nf + nf.sqrt() * d);
            sandwich.record(rel((lo - tr).max(tr - hi), tr), 1e-10);

            let z = random_symmetric(n, &mut rng);
            let w = random_symmetric(n, &mut rng);
            let lhs = tilde(&z).apply(&vec_row_major(&w));
            let rhs = vec_row_major(&(w.as_matrix() * z.as_matrix()));
            lift_vec.record((lhs - rhs).norm(), 1e-10);

            let zd = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let t1 = (tilde_dense(&zd).entries.transpose() - tilde_dense(&zd.transpose()).entries).norm();
            let prod = tilde(&z).mul(&tilde(&w)).entries;
            let t2 = (prod - tilde_dense(&(w.as_matrix() * z.as_matrix())).entries).norm();
            lift_prod.record(t1.max(t2), 1e-10);

            let nmat = tilde(&z).mul(&hat(&w)).entries;
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let row = z.column(j).kronecker(&w.column(i));
                    worst = worst.max((nmat.row(n * i + j).transpose() - row).norm());
                    let col = w.column(j).kronecker(&z.column(i));
                    worst = worst.max((nmat.column(n * i + j) - col).norm());
                }
            }
            lift_rows.record(worst, 1e-10);
        }
    }

    let mut idx = 0u64;
    for &n in &opts.dims {
        let max_m = n * (n + 1) / 2;
        for m in [1, n, (2 * n).min(max_m)] {
            let mut rng = tree.stream("verify-newton", idx);
            let inst = generate_random_sdp(n, m, opts.seed.wrapping_add(idx))?;
            idx += 1;
            for _ in 0..opts.trials.div_ceil(3) {
                let state = IterateState::new(random_pd(n, &mut rng), random_pd(n, &mut rng), DVector::zeros(m))?;
                let nu = state.nu * rng.random_range(0.5..1.0);
                uniqueness_trial(&mut unique, &state, &inst, nu)?;
                let f = factorize(&state, &inst)?;
                let mut m1 = f.m1;
                if opts.inject_fault {
                    m1[(0, 0)] += 1e-3 * (1.0 + m1[(0, 0)].abs());
                }
                let mm = assemble_newton_matrix(&state, &inst);
                factor.record(rel((&m1 * &f.m2 - &mm).norm(), mm.norm()), 1e-10);
            }
        }
    }

    Ok(VerifyReport {
        checks: [
            frob_sym,
            frob_band,
            loewner,
            loewner_general,
            central,
            sandwich,
            lift_vec,
            lift_prod,
            lift_rows,
            unique,
            factor,
        ]
        .into_iter()
        .map(|t| t.check)
        .collect(),
    })
}

fn uniqueness_trial(t: &mut Tally, state: &IterateState, inst: &SdpInstance, nu: f64) -> Result<()> {
    let a = solve_exact(state, inst, nu)?;
    let b = solve_dense(state, inst, nu)?;
    let scale = a.stacked().norm().max(1e-300);
    let agree = (a.stacked() - b.stacked()).norm() / scale;
    let rows = inst.constraint_rows();
    let ortho = (&rows * vec_row_major(&a.dy_raw)).norm() / (rows.norm() * scale);
    let (_, ds_perp) = inst.split_span(&a.ds);
    let in_span = ds_perp.norm() / scale;
    let resid = a.residual / (1.0 + crate::newton::newton_rhs(state, nu).norm());
    t.record(agree.max(ortho).max(in_span).max(resid), 1e-8);
    Ok(())
}
