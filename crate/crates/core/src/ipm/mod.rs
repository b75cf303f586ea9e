//! Primal-dual path following.
//!
//! Each step targets `ν′ = (1 − χ/√n)ν`, solves the Newton system, and moves
//! to `(S + dS, Y + dY)`. In [`Mode::QuantumSim`] the step first passes
//! through the simulated tomography pipeline at precision
//! `δ = ξ / (2γ‖dS ⊕ dY‖_F ‖Y ⊕ Y⁻¹‖₂)`, so the iterate leaves the exact
//! constraint sets; the resulting drift of `B` and `C` is tracked explicitly.

mod init;
mod ledger;
mod lp;

pub use init::{drive_to_nu, find_initial_point, initial_point_from_interior, inflation_budget};
pub use ledger::{cost_ledger, CostLedger, LedgerRow, LedgerWeights};
pub use lp::{run_lp, LpRunResult};

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{dual_residual, duality_gap, primal_residual, IterateState, SdpInstance};
use crate::lifted::{factorize, mu_m3};
use crate::matspace::{
    central_path_distance, direct_sum_inverse_condition, direct_sum_inverse_norm, SymMatrix,
};
use crate::newton::{kappa_pipeline, solve_exact, NewtonSolution};
use crate::qsim::{noisy_newton_step_from, noisy_norm_estimate, NoiseConfig};
use crate::rng::SeedTree;

/// Slack applied to the audit's interval checks.
pub const AUDIT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    QuantumSim,
}

/// How the per-step tomography budget is scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRegime {
    /// `γ = √T`: total drift bounded by `ξ` in absolute terms.
    Absolute,
    /// `γ = 1`: total drift bounded by `ξ‖B ⊕ C‖_F`.
    Relative,
}

/// Which `ν` the next Newton system starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NuUpdate {
    /// `ν ← Tr(SY)/n` after every step.
    Recomputed,
    /// `ν ← ν′`, the nominal target.
    Nominal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub eps: f64,
    pub xi: f64,
    pub eta: f64,
    pub chi: f64,
    pub gamma: GammaRegime,
    pub max_iters: usize,
    pub noise: NoiseConfig,
    /// Turn violated step guarantees into [`Error::AuditFailure`].
    pub audit: bool,
    /// Compute the per-iteration `μ` and `κ(M₃M⁻¹)` terms (dense SVDs).
    pub diagnostics: bool,
    pub nu_update: NuUpdate,
    /// Size `δ` from the noisy norm estimate instead of the exact norm.
    pub delta_from_estimate: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Exact,
            eps: 1e-6,
            xi: 0.01,
            eta: 0.1,
            chi: 0.1,
            gamma: GammaRegime::Absolute,
            max_iters: 100_000,
            noise: NoiseConfig::default(),
            audit: false,
            diagnostics: true,
            nu_update: NuUpdate::Recomputed,
            delta_from_estimate: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.chi > 0.0 && self.chi <= self.eta && self.eta <= 0.1) {
            return Err(Error::InvalidInput(format!(
                "need 0 < chi <= eta <= 0.1, got chi = {}, eta = {}",
                self.chi, self.eta
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        if !(self.xi > 0.0) && self.mode == Mode::QuantumSim {
            return Err(Error::InvalidInput("xi must be positive".into()));
        }
        if self.audit && self.xi > 0.01 {
            return Err(Error::InvalidInput(format!("audited runs need xi <= 0.01, got {}", self.xi)));
        }
        Ok(())
    }
}

/// One row of the trace. Step quantities (`delta_used`, `norm_dsdy`,
/// `kappa_yy`, the `μ`/`κ` terms) refer to the iterate the step started
/// from; state quantities (`nu`, `gap`, `distance`, residuals) to the
/// iterate it produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub nu: f64,
    pub gap: f64,
    pub distance: f64,
    pub lambda_min_s: f64,
    pub lambda_min_y: f64,
    pub alpha_observed: f64,
    pub delta_used: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub mu_m1: Option<f64>,
    pub mu_m2: Option<f64>,
    pub mu_m3: Option<f64>,
    pub kappa_pipeline: Option<f64>,
    pub kappa_yy: f64,
    pub norm_yy: f64,
    pub norm_dsdy: f64,
    /// `‖dS ⊕ dY‖_F · ‖Y ⊕ Y⁻¹‖₂ ≤ κ(Y ⊕ Y⁻¹)/4` for the exact step.
    pub eq18_holds: bool,
    /// `‖E_S ⊕ E_Y‖_F` for the applied step.
    pub step_error: f64,
    pub tomography_within_bound: bool,
    pub capped_shots: bool,
    pub drift_norm: f64,
    pub dy_asymmetry: f64,
    pub s_pd: bool,
    pub y_pd: bool,
    pub distance_ok: bool,
    pub alpha_ok: bool,
}

impl IterationRecord {
    pub fn audit_passed(&self) -> bool {
        self.s_pd && self.y_pd && self.distance_ok && self.alpha_ok
    }

    fn first_violation(&self) -> Option<String> {
        if !self.s_pd {
            Some(format!("updated S is not positive definite (lambda_min = {:e})", self.lambda_min_s))
        } else if !self.y_pd {
            Some(format!("updated Y is not positive definite (lambda_min = {:e})", self.lambda_min_y))
        } else if !self.distance_ok {
            Some(format!("central path distance {:e} exceeds eta", self.distance))
        } else if !self.alpha_ok {
            Some(format!("gap contraction alpha = {:e} outside [0.001, 0.1]", self.alpha_observed))
        } else {
            None
        }
    }
}

/// Ground truth retained for drift accounting: the applied step minus the
/// exact step, after symmetrisation.
#[derive(Clone, Debug)]
pub struct StepError {
    pub primal: SymMatrix,
    pub dual: SymMatrix,
}

/// Per-run values a step needs besides the state.
#[derive(Clone, Debug)]
pub struct StepContext {
    pub iteration: usize,
    /// `γ` as a number.
    pub gamma: f64,
    pub mu_m3: Option<f64>,
    pub seeds: SeedTree,
    /// Fail if the starting iterate is farther than `η` from the path.
    pub check_precondition: bool,
}

impl StepContext {
    pub fn new(iteration: usize, gamma: f64, seed: u64) -> Self {
        StepContext {
            iteration,
            gamma,
            mu_m3: None,
            seeds: SeedTree::new(seed),
            check_precondition: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: IterateState,
    pub record: IterationRecord,
    pub error: StepError,
    pub exact: NewtonSolution,
}

/// `⌈10√n·ln(Tr(S₀Y₀)/ε)⌉`, at least 1.
pub fn planned_iterations(n: usize, gap0: f64, eps: f64) -> usize {
    let t = 10.0 * (n as f64).sqrt() * (gap0 / eps).ln();
    if t.is_finite() && t > 1.0 {
        t.ceil() as usize
    } else {
        1
    }
}

fn gamma_value(regime: GammaRegime, planned: usize) -> f64 {
    match regime {
        GammaRegime::Absolute => (planned as f64).sqrt(),
        GammaRegime::Relative => 1.0,
    }
}

/// Draws the tomography precision and the applied step.
fn perturb<R: Rng>(
    exact: &NewtonSolution,
    norm_yy: f64,
    cfg: &RunConfig,
    ctx: &StepContext,
    rng: &mut R,
) -> Result<(SymMatrix, SymMatrix, f64, bool, bool)> {
    if exact.norm_dsdy == 0.0 {
        return Ok((exact.ds.clone(), exact.dy.clone(), 0.0, true, false));
    }
    let norm = if cfg.delta_from_estimate {
        noisy_norm_estimate(exact.norm_dsdy, cfg.noise.norm_rel_err.unwrap_or(0.1), rng)
    } else {
        exact.norm_dsdy
    };
    let delta = (cfg.xi / (2.0 * ctx.gamma * norm * norm_yy)).min(0.5);
    let noisy = noisy_newton_step_from(exact, delta, &cfg.noise, rng)?;
    let capped = noisy.report.as_ref().is_some_and(|r| r.capped_shots);
    Ok((noisy.ds, noisy.dy, delta, noisy.within_bound, capped))
}

/// One path-following step.
pub fn step(
    state: &IterateState,
    inst: &SdpInstance,
    cfg: &RunConfig,
    ctx: &StepContext,
) -> Result<StepOutcome> {
    let n = state.n();
    let eta = cfg.eta;
    if ctx.check_precondition {
        let d = central_path_distance(&state.s, &state.y, state.nu)?;
        if d > eta + AUDIT_SLACK {
            return Err(Error::PathDistanceViolation { distance: d, eta });
        }
    }
    let nu_target = (1.0 - cfg.chi / (n as f64).sqrt()) * state.nu;
    let exact = solve_exact(state, inst, nu_target)?;
    let spec_y = state.y.spectrum();
    let norm_yy = direct_sum_inverse_norm(&spec_y);
    let kappa_yy = direct_sum_inverse_condition(&spec_y);

    let (ds, dy, delta_used, within, capped) = match cfg.mode {
        Mode::Exact => (exact.ds.clone(), exact.dy.clone(), 0.0, true, false),
        Mode::QuantumSim => {
            let mut rng = ctx.seeds.stream("newton-step", ctx.iteration as u64);
            perturb(&exact, norm_yy, cfg, ctx, &mut rng)?
        }
    };
    let err_s = &ds - &exact.ds;
    let err_y = &dy - &exact.dy;

    let (mu_m1, mu_m2, kappa) = if cfg.diagnostics {
        let f = factorize(state, inst)?;
        (Some(f.mu_m1), Some(f.mu_m2), Some(kappa_pipeline(state, inst)?))
    } else {
        (None, None, None)
    };

    let new_s = &state.s + &ds;
    let new_y = &state.y + &dy;
    let spec_s = new_s.spectrum();
    let spec_new_y = new_y.spectrum();
    let s_pd = crate::matspace::check_pd_spectrum(&spec_s, "S").is_ok();
    let y_pd = crate::matspace::check_pd_spectrum(&spec_new_y, "Y").is_ok();

    let gap_old = duality_gap(state);
    let mut next = state.clone();
    next.s = new_s;
    next.y = new_y;
    next.x = &state.x + &exact.dx;
    next.drift_primal = &state.drift_primal - &err_s;
    next.drift_dual = &state.drift_dual + &err_y;

    let mut record = IterationRecord {
        iter: ctx.iteration,
        nu: f64::NAN,
        gap: next.s.dot(&next.y),
        distance: f64::INFINITY,
        lambda_min_s: spec_s.min(),
        lambda_min_y: spec_new_y.min(),
        alpha_observed: 0.0,
        delta_used,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        mu_m1,
        mu_m2,
        mu_m3: ctx.mu_m3,
        kappa_pipeline: kappa,
        kappa_yy,
        norm_yy,
        norm_dsdy: exact.norm_dsdy,
        eq18_holds: exact.norm_dsdy * norm_yy <= kappa_yy / 4.0,
        step_error: (err_s.norm_squared() + err_y.norm_squared()).sqrt(),
        tomography_within_bound: within,
        capped_shots: capped,
        drift_norm: next.drift_norm(),
        dy_asymmetry: exact.asymmetry,
        s_pd,
        y_pd,
        distance_ok: false,
        alpha_ok: false,
    };
    record.alpha_observed = (n as f64).sqrt() * (1.0 - record.gap / gap_old);
    record.alpha_ok = record.alpha_observed >= 0.001 - AUDIT_SLACK && record.alpha_observed <= 0.1 + AUDIT_SLACK;

    if s_pd && y_pd {
        next.refresh()?;
        if cfg.nu_update == NuUpdate::Nominal {
            next.nu = nu_target;
        }
        record.nu = next.nu;
        record.distance = central_path_distance(&next.s, &next.y, next.nu)?;
        record.distance_ok = record.distance <= eta + AUDIT_SLACK;
        record.primal_residual = primal_residual(&next, inst);
        record.dual_residual = dual_residual(&next, inst);
    }

    if let Some(clause) = record.first_violation() {
        if cfg.audit {
            return Err(Error::AuditFailure {
                iteration: ctx.iteration,
                clause,
            });
        }
        log::warn!("iteration {}: {clause}", ctx.iteration);
        if !(s_pd && y_pd) {
            let what = if s_pd { "Y" } else { "S" };
            let min_eigenvalue = if s_pd { record.lambda_min_y } else { record.lambda_min_s };
            return Err(Error::NotPositiveDefinite { what, min_eigenvalue });
        }
    }

    Ok(StepOutcome {
        state: next,
        record,
        error: StepError {
            primal: err_s,
            dual: err_y,
        },
        exact,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxItersExceeded,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub state: IterateState,
    pub trace: Vec<IterationRecord>,
    pub ledger: CostLedger,
    pub termination: Termination,
    pub initial_gap: f64,
    pub initial_distance: f64,
    pub planned_iterations: usize,
    pub gamma: f64,
    pub step_errors: Vec<StepError>,
    /// `‖(B′ − B) ⊕ (C′ − C)‖_F` at termination.
    pub drift_norm: f64,
    /// `ξ` (absolute regime) or `ξ‖B ⊕ C‖_F` (relative regime).
    pub drift_bound: f64,
}

impl RunResult {
    pub fn final_gap(&self) -> f64 {
        duality_gap(&self.state)
    }

    pub fn drift_within_bound(&self) -> bool {
        self.drift_norm <= self.drift_bound
    }

    pub fn audit_passed(&self) -> bool {
        self.trace.iter().all(IterationRecord::audit_passed)
    }

    /// Drift norm recomputed from the stored per-step errors.
    pub fn resummed_drift(&self) -> f64 {
        resum_drift(&self.step_errors, self.state.n())
    }
}

pub fn resum_drift(errors: &[StepError], n: usize) -> f64 {
    let mut p = SymMatrix::zeros(n);
    let mut d = SymMatrix::zeros(n);
    for e in errors {
        p = &p + &e.primal;
        d = &d + &e.dual;
    }
    (p.norm_squared() + d.norm_squared()).sqrt()
}

/// Runs path following from `start` until `Tr(SY) ≤ ε` or `max_iters`.
pub fn run_from(start: IterateState, inst: &SdpInstance, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let n = inst.n();
    let initial_gap = duality_gap(&start);
    let initial_distance = central_path_distance(&start.s, &start.y, start.nu)?;
    if initial_distance > cfg.eta + AUDIT_SLACK {
        return Err(Error::PathDistanceViolation {
            distance: initial_distance,
            eta: cfg.eta,
        });
    }
    let planned = planned_iterations(n, initial_gap, cfg.eps);
    let gamma = gamma_value(cfg.gamma, planned);
    let mu3 = if cfg.diagnostics { Some(mu_m3(inst)) } else { None };
    let tree = SeedTree::new(cfg.noise.rng_seed);

    let mut state = start;
    let mut trace = Vec::new();
    let mut errors = Vec::new();
    let mut termination = Termination::Converged;
    while duality_gap(&state) > cfg.eps {
        if trace.len() >= cfg.max_iters {
            termination = Termination::MaxItersExceeded;
            break;
        }
        let ctx = StepContext {
            iteration: trace.len() + 1,
            gamma,
            mu_m3: mu3,
            seeds: tree,
            check_precondition: cfg.audit,
        };
        let out = step(&state, inst, cfg, &ctx)?;
        state = out.state;
        trace.push(out.record);
        errors.push(out.error);
    }
    let bc = (inst.rhs_mat().norm_squared() + inst.dual_anchor().norm_squared()).sqrt();
    let drift_bound = match cfg.gamma {
        GammaRegime::Absolute => cfg.xi,
        GammaRegime::Relative => cfg.xi * bc,
    };
    let weights = LedgerWeights::sdp(n, cfg.xi, gamma);
    let ledger = cost_ledger(&trace, &weights);
    Ok(RunResult {
        drift_norm: state.drift_norm(),
        state,
        trace,
        ledger,
        termination,
        initial_gap,
        initial_distance,
        planned_iterations: planned,
        gamma,
        step_errors: errors,
        drift_bound,
    })
}

/// Finds a starting point and runs path following.
pub fn run(inst: &SdpInstance, cfg: &RunConfig) -> Result<RunResult> {
    let start = find_initial_point(inst, cfg)?;
    run_from(start, inst, cfg)
}

/// `x` coordinates for a state rebuilt from `S` alone.
pub(crate) fn coords_of(inst: &SdpInstance, s: &SymMatrix) -> DVector<f64> {
    inst.split_span(&(s + inst.rhs_mat())).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_random_sdp;

    fn exact_cfg() -> RunConfig {
        RunConfig {
            eps: 1e-4,
            diagnostics: false,
            ..RunConfig::default()
        }
    }

    #[test]
    fn exact_step_contracts_by_the_nominal_factor() {
        let inst = generate_random_sdp(5, 4, 1).unwrap();
        let st = find_initial_point(&inst, &exact_cfg()).unwrap();
        let out = step(&st, &inst, &exact_cfg(), &StepContext::new(1, 1.0, 0)).unwrap();
        assert!((out.record.alpha_observed - 0.1).abs() < 1e-6);
        assert!(out.record.audit_passed());
        assert!((out.state.nu - duality_gap(&out.state) / 5.0).abs() < 1e-12);
    }

    #[test]
    fn precondition_is_enforced() {
        let inst = generate_random_sdp(3, 2, 2).unwrap();
        let mut st = find_initial_point(&inst, &exact_cfg()).unwrap();
        st.nu *= 2.0;
        let err = step(&st, &inst, &exact_cfg(), &StepContext::new(1, 1.0, 0)).unwrap_err();
        assert!(matches!(err, Error::PathDistanceViolation { .. }));
    }

    #[test]
    fn exact_run_converges_with_monotone_gap() {
        let inst = generate_random_sdp(4, 4, 3).unwrap();
        let cfg = exact_cfg();
        let res = run(&inst, &cfg).unwrap();
        assert_eq!(res.termination, Termination::Converged);
        assert!(res.final_gap() <= cfg.eps);
        assert!(res.trace.len() <= res.planned_iterations);
        let mut prev = res.initial_gap;
        for r in &res.trace {
            assert!(r.gap < prev);
            prev = r.gap;
            assert!(r.primal_residual < 1e-6 && r.dual_residual < 1e-6);
        }
        assert_eq!(res.drift_norm, 0.0);
    }

    #[test]
    fn loose_eps_needs_no_iterations() {
        let inst = generate_random_sdp(3, 2, 4).unwrap();
        let cfg = RunConfig {
            eps: 1e6,
            ..exact_cfg()
        };
        assert!(run(&inst, &cfg).unwrap().trace.is_empty());
    }

    #[test]
    fn max_iters_is_reported_not_thrown() {
        let inst = generate_random_sdp(3, 2, 5).unwrap();
        let cfg = RunConfig {
            max_iters: 3,
            ..exact_cfg()
        };
        let res = run(&inst, &cfg).unwrap();
        assert_eq!(res.termination, Termination::MaxItersExceeded);
        assert_eq!(res.trace.len(), 3);
    }

    #[test]
    fn quantum_run_is_deterministic_and_tracks_drift() {
        let inst = generate_random_sdp(4, 3, 6).unwrap();
        let cfg = RunConfig {
            mode: Mode::QuantumSim,
            eps: 1e-2,
            ..exact_cfg()
        };
        let a = run(&inst, &cfg).unwrap();
        let b = run(&inst, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert!(a.drift_norm > 0.0);
        assert!((a.drift_norm - a.resummed_drift()).abs() <= 1e-10 * (1.0 + a.drift_norm));
    }

    #[test]
    fn config_validation() {
        let bad = RunConfig {
            chi: 0.2,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            audit: true,
            xi: 0.05,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
