//! Path following for LPs, with entrywise-positive iterates `(s, y)`.
//!
//! The quantum pipeline tomographs `dx ∘ dy` (dimension `m + n`). Because
//! `ds = Aᵀdx` is formed from the estimated `dx`, the primal iterate stays
//! exactly in `span(a) − b`; only the dual constraints drift.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{lp_dual_residual, lp_primal_residual, LpInstance, LpState};
use crate::matspace::{condition_number_dense, mu_factor, DEFAULT_P_GRID};
use crate::newton::{assemble_lp_matrix, solve_lp, LpNewtonStep};
use crate::qsim::{noisy_norm_estimate, tomography_estimate};
use crate::rng::SeedTree;

use super::{
    cost_ledger, planned_iterations, CostLedger, GammaRegime, IterationRecord, LedgerWeights, Mode, NuUpdate,
    RunConfig, Termination, AUDIT_SLACK,
};

#[derive(Clone, Debug)]
pub struct LpRunResult {
    pub state: LpState,
    pub trace: Vec<IterationRecord>,
    pub ledger: CostLedger,
    pub termination: Termination,
    pub initial_gap: f64,
    pub planned_iterations: usize,
    pub gamma: f64,
    /// Per-step `d̄y − dy`.
    pub dual_step_errors: Vec<DVector<f64>>,
    pub drift_norm: f64,
    pub drift_bound: f64,
}

impl LpRunResult {
    pub fn final_gap(&self) -> f64 {
        self.state.gap()
    }

    pub fn audit_passed(&self) -> bool {
        self.trace.iter().all(IterationRecord::audit_passed)
    }
}

#[derive(Clone, Debug, Serialize)]
struct LpDiagnostics {
    mu_m1: f64,
    mu_m2: f64,
    mu_m3: f64,
    kappa_pipeline: f64,
}

fn lp_m3(lp: &LpInstance) -> DMatrix<f64> {
    let (n, m) = (lp.n(), lp.m());
    let mut out = DMatrix::zeros(2 * n, m + n);
    out.view_mut((0, 0), (n, m)).copy_from(&lp.constraint_rows().transpose());
    for i in 0..n {
        out[(n + i, m + i)] = 1.0;
    }
    out
}

fn lp_diagnostics(state: &LpState, lp: &LpInstance, m3: &DMatrix<f64>, mu3: f64) -> Result<LpDiagnostics> {
    let (n, m) = (lp.n(), lp.m());
    let mut m1 = DMatrix::zeros(n + m, n + m);
    for i in 0..n {
        m1[(i, i)] = state.y[i];
    }
    for k in 0..m {
        m1[(n + k, n + k)] = 1.0;
    }
    let rows = lp.constraint_rows();
    let mut m2 = DMatrix::zeros(n + m, n + m);
    m2.view_mut((0, 0), (n, m)).copy_from(&rows.transpose());
    for i in 0..n {
        m2[(i, m + i)] = state.s[i] / state.y[i];
    }
    m2.view_mut((n, m), (m, n)).copy_from(&rows);
    let inv = assemble_lp_matrix(state, lp)
        .try_inverse()
        .ok_or(Error::SingularNewtonMatrix { ratio: 0.0 })?;
    let kappa = condition_number_dense(&(m3 * inv)).ok_or(Error::SingularNewtonMatrix { ratio: 0.0 })?;
    Ok(LpDiagnostics {
        mu_m1: mu_factor(&m1, &DEFAULT_P_GRID),
        mu_m2: m2.norm(),
        mu_m3: mu3,
        kappa_pipeline: kappa,
    })
}

/// Runs LP path following from the instance's seed pair.
pub fn run_lp(lp: &LpInstance, cfg: &RunConfig) -> Result<LpRunResult> {
    cfg.validate()?;
    lp.validate_seeds()?;
    let (x0, s0, y0) = lp
        .seed_pair()
        .ok_or_else(|| Error::NoFeasibleSeed("LP instance carries no seed pair".into()))?;
    let mut state = LpState::new(s0, y0, x0)?;
    let initial_distance = state.central_path_distance();
    if initial_distance > cfg.eta + AUDIT_SLACK {
        return Err(Error::PathDistanceViolation {
            distance: initial_distance,
            eta: cfg.eta,
        });
    }
    let n = lp.n();
    let rootn = (n as f64).sqrt();
    let initial_gap = state.gap();
    let planned = planned_iterations(n, initial_gap, cfg.eps);
    let gamma = match cfg.gamma {
        GammaRegime::Absolute => (planned as f64).sqrt(),
        GammaRegime::Relative => 1.0,
    };
    let sigma_a = lp.constraint_rows().singular_values().max().max(1.0);
    let m3 = lp_m3(lp);
    let mu3 = if cfg.diagnostics { mu_factor(&m3, &DEFAULT_P_GRID) } else { 0.0 };
    let tree = SeedTree::new(cfg.noise.rng_seed);

    let mut trace = Vec::new();
    let mut errors = Vec::new();
    let mut termination = Termination::Converged;
    while state.gap() > cfg.eps {
        if trace.len() >= cfg.max_iters {
            termination = Termination::MaxItersExceeded;
            break;
        }
        let iter = trace.len() + 1;
        let nu_target = (1.0 - cfg.chi / rootn) * state.nu;
        let exact = solve_lp(&state, lp, nu_target)?;
        let (ymin, ymax) = (state.y.min(), state.y.max());
        let norm_yy = ymax.max(1.0 / ymin);
        let kappa_direct_sum = norm_yy / ymin.min(1.0 / ymax);
        let norm_step = (exact.ds.norm_squared() + exact.dy.norm_squared()).sqrt();

        let (applied, delta_used, within, capped) = match cfg.mode {
            Mode::Exact => (exact.clone(), 0.0, true, false),
            Mode::QuantumSim => {
                let mut rng = tree.stream("lp-newton-step", iter as u64);
                let truth = exact.stacked();
                let norm = truth.norm();
                if norm == 0.0 {
                    (exact.clone(), 0.0, true, false)
                } else {
                    let delta = (cfg.xi / (2.0 * gamma * norm * norm_yy * sigma_a)).min(0.5);
                    let rep = tomography_estimate(&(&truth / norm), delta / 7f64.sqrt(), &cfg.noise, &mut rng)?;
                    let eta = noisy_norm_estimate(norm, cfg.noise.norm_rel_err.unwrap_or(delta), &mut rng);
                    let est = &rep.estimate * eta;
                    let err = (&est - &truth).norm();
                    let within = err <= 2.0 * delta * norm;
                    if !within {
                        if cfg.noise.strict {
                            return Err(Error::TomographyFailure {
                                error: err,
                                bound: 2.0 * delta * norm,
                            });
                        }
                        log::warn!("LP step {iter}: tomography error {err:e} above 2 delta bound");
                    }
                    let dx = est.rows(0, lp.m()).clone_owned();
                    let dy = est.rows(lp.m(), n).clone_owned();
                    let ds = lp.combine(&dx);
                    (
                        LpNewtonStep {
                            dx,
                            ds,
                            dy,
                            residual: f64::NAN,
                        },
                        delta,
                        within,
                        rep.capped_shots,
                    )
                }
            }
        };
        let err_y = &applied.dy - &exact.dy;
        let err_s = &applied.ds - &exact.ds;

        let diag = if cfg.diagnostics {
            Some(lp_diagnostics(&state, lp, &m3, mu3)?)
        } else {
            None
        };

        let gap_old = state.gap();
        let mut next = state.clone();
        next.s = &state.s + &applied.ds;
        next.y = &state.y + &applied.dy;
        next.x = &state.x + &applied.dx;
        next.drift_dual = &state.drift_dual + &err_y;
        let s_pd = next.s.min() > 0.0;
        let y_pd = next.y.min() > 0.0;
        let gap = next.s.dot(&next.y);
        let alpha = rootn * (1.0 - gap / gap_old);
        let mut record = IterationRecord {
            iter,
            nu: f64::NAN,
            gap,
            distance: f64::INFINITY,
            lambda_min_s: next.s.min(),
            lambda_min_y: next.y.min(),
            alpha_observed: alpha,
            delta_used,
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
            mu_m1: diag.as_ref().map(|d| d.mu_m1),
            mu_m2: diag.as_ref().map(|d| d.mu_m2),
            mu_m3: diag.as_ref().map(|d| d.mu_m3),
            kappa_pipeline: diag.as_ref().map(|d| d.kappa_pipeline),
            kappa_yy: ymax / ymin,
            norm_yy,
            norm_dsdy: norm_step,
            eq18_holds: norm_step * norm_yy <= kappa_direct_sum / 4.0,
            step_error: (err_s.norm_squared() + err_y.norm_squared()).sqrt(),
            tomography_within_bound: within,
            capped_shots: capped,
            drift_norm: next.drift_norm(),
            dy_asymmetry: 0.0,
            s_pd,
            y_pd,
            distance_ok: false,
            alpha_ok: (0.001 - AUDIT_SLACK..=0.1 + AUDIT_SLACK).contains(&alpha),
        };
        if s_pd && y_pd {
            next.refresh()?;
            if cfg.nu_update == NuUpdate::Nominal {
                next.nu = nu_target;
            }
            record.nu = next.nu;
            record.distance = next.central_path_distance();
            record.distance_ok = record.distance <= cfg.eta + AUDIT_SLACK;
            record.primal_residual = lp_primal_residual(&next, lp);
            record.dual_residual = lp_dual_residual(&next, lp);
        }
        if let Some(clause) = record.first_violation() {
            if cfg.audit {
                return Err(Error::AuditFailure { iteration: iter, clause });
            }
            log::warn!("LP iteration {iter}: {clause}");
            if !(s_pd && y_pd) {
                let what = if s_pd { "y" } else { "s" };
                let min_eigenvalue = if s_pd { record.lambda_min_y } else { record.lambda_min_s };
                return Err(Error::NotPositiveDefinite { what, min_eigenvalue });
            }
        }
        state = next;
        trace.push(record);
        errors.push(err_y);
    }
    let drift_bound = match cfg.gamma {
        GammaRegime::Absolute => cfg.xi,
        GammaRegime::Relative => cfg.xi * (lp.rhs_vec().norm_squared() + lp.dual_anchor().norm_squared()).sqrt(),
    };
    let ledger = cost_ledger(&trace, &LedgerWeights::lp(n, cfg.xi, gamma));
    Ok(LpRunResult {
        drift_norm: state.drift_norm(),
        state,
        trace,
        ledger,
        termination,
        initial_gap,
        planned_iterations: planned,
        gamma,
        dual_step_errors: errors,
        drift_bound,
    })
}
