//! CSV and JSON artifacts.
//!
//! `trace.csv` has one row per iteration with the columns of
//! [`IterationRecord`] in declaration order; `ledger.csv` one row per
//! [`LedgerRow`]. Empty cells mean "not computed" (diagnostics disabled).

use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::instance::{dual_residual, primal_residual, SdpInstance};
use crate::ipm::{CostLedger, IterationRecord, LpRunResult, Mode, RunConfig, RunResult, Termination};

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Header-only CSV for an empty table of `T`.
fn csv_or_header<T: Serialize>(rows: &[T], header: &str) -> Result<String> {
    if rows.is_empty() {
        Ok(format!("{header}\n"))
    } else {
        to_csv(rows)
    }
}

pub const TRACE_HEADER: &str = "iter,nu,gap,distance,lambda_min_s,lambda_min_y,alpha_observed,delta_used,\
primal_residual,dual_residual,mu_m1,mu_m2,mu_m3,kappa_pipeline,kappa_yy,norm_yy,norm_dsdy,eq18_holds,\
step_error,tomography_within_bound,capped_shots,drift_norm,dy_asymmetry,s_pd,y_pd,distance_ok,alpha_ok";

pub const LEDGER_HEADER: &str = "iter,mu_m1,mu_m2,mu_m3,kappa_pipeline,kappa_yy,base,weighted,eq18_holds";

pub fn trace_csv(trace: &[IterationRecord]) -> Result<String> {
    csv_or_header(trace, TRACE_HEADER)
}

pub fn ledger_csv(ledger: &CostLedger) -> Result<String> {
    csv_or_header(&ledger.rows, LEDGER_HEADER)
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerSummary {
    pub rows: usize,
    pub aggregate: f64,
    pub weighted_sum: f64,
    pub prefactor: f64,
    pub gamma: f64,
    pub total: f64,
    pub eq18_failures: usize,
    /// `κ(M₃M⁻¹)` is taken over the positive singular values only.
    pub kappa_convention: &'static str,
}

impl From<&CostLedger> for LedgerSummary {
    fn from(l: &CostLedger) -> Self {
        LedgerSummary {
            rows: l.rows.len(),
            aggregate: l.aggregate,
            weighted_sum: l.weighted_sum,
            prefactor: l.prefactor,
            gamma: l.gamma,
            total: l.total,
            eq18_failures: l.eq18_failures,
            kappa_convention: "positive singular values",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub problem: &'static str,
    pub mode: Mode,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub eps: f64,
    pub xi: f64,
    pub eta: f64,
    pub chi: f64,
    pub termination: Termination,
    pub iterations: usize,
    pub planned_iterations: usize,
    pub initial_gap: f64,
    pub final_gap: f64,
    pub final_nu: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub drift_norm: f64,
    pub drift_bound: f64,
    pub drift_within_bound: bool,
    pub audit_passed: bool,
    pub tomography_model_level: bool,
    pub ledger: LedgerSummary,
}

pub fn summarize_sdp(inst: &SdpInstance, cfg: &RunConfig, res: &RunResult) -> RunSummary {
    RunSummary {
        problem: "sdp",
        mode: cfg.mode,
        n: inst.n(),
        m: inst.m(),
        seed: cfg.noise.rng_seed,
        eps: cfg.eps,
        xi: cfg.xi,
        eta: cfg.eta,
        chi: cfg.chi,
        termination: res.termination,
        iterations: res.trace.len(),
        planned_iterations: res.planned_iterations,
        initial_gap: res.initial_gap,
        final_gap: res.final_gap(),
        final_nu: res.state.nu,
        primal_residual: primal_residual(&res.state, inst),
        dual_residual: dual_residual(&res.state, inst),
        drift_norm: res.drift_norm,
        drift_bound: res.drift_bound,
        drift_within_bound: res.drift_within_bound(),
        audit_passed: res.audit_passed(),
        tomography_model_level: cfg.mode == Mode::QuantumSim && cfg.noise.fast_mode,
        ledger: (&res.ledger).into(),
    }
}

pub fn summarize_lp(lp: &crate::instance::LpInstance, cfg: &RunConfig, res: &LpRunResult) -> RunSummary {
    RunSummary {
        problem: "lp",
        mode: cfg.mode,
        n: lp.n(),
        m: lp.m(),
        seed: cfg.noise.rng_seed,
        eps: cfg.eps,
        xi: cfg.xi,
        eta: cfg.eta,
        chi: cfg.chi,
        termination: res.termination,
        iterations: res.trace.len(),
        planned_iterations: res.planned_iterations,
        initial_gap: res.initial_gap,
        final_gap: res.final_gap(),
        final_nu: res.state.nu,
        primal_residual: crate::instance::lp_primal_residual(&res.state, lp),
        dual_residual: crate::instance::lp_dual_residual(&res.state, lp),
        drift_norm: res.drift_norm,
        drift_bound: res.drift_bound,
        drift_within_bound: res.drift_norm <= res.drift_bound,
        audit_passed: res.audit_passed(),
        tomography_model_level: cfg.mode == Mode::QuantumSim && cfg.noise.fast_mode,
        ledger: (&res.ledger).into(),
    }
}

pub fn summary_json(summary: &RunSummary) -> Result<String> {
    Ok(serde_json::to_string_pretty(summary).map_err(|e| crate::error::Error::Io(e.to_string()))? + "\n")
}

/// Writes `trace.csv`, `ledger.csv` and `summary.json` into `dir`.
pub fn write_run_artifacts(
    dir: &Path,
    trace: &[IterationRecord],
    ledger: &CostLedger,
    summary: &RunSummary,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trace.csv"), trace_csv(trace)?)?;
    std::fs::write(dir.join("ledger.csv"), ledger_csv(ledger)?)?;
    std::fs::write(dir.join("summary.json"), summary_json(summary)?)?;
    Ok(())
}
