//! Quantum running-time bookkeeping.
//!
//! The cost of one quantum Newton step is driven by
//! `(μ(M₁) + μ(M₂) + μ(M₃))·κ(M₃M⁻¹)` times the tomography overhead
//! `κ(Y ⊕ Y⁻¹)²`; the whole run multiplies the sum by `n²/ξ²` (SDP) or
//! `n/ξ²` (LP) and `γ²`.

use serde::Serialize;

use super::IterationRecord;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerRow {
    pub iter: usize,
    pub mu_m1: f64,
    pub mu_m2: f64,
    pub mu_m3: f64,
    pub kappa_pipeline: f64,
    pub kappa_yy: f64,
    /// `(μ₁ + μ₂ + μ₃)·κ(M₃M⁻¹)`.
    pub base: f64,
    /// `base · κ(Y ⊕ Y⁻¹)²`.
    pub weighted: f64,
    pub eq18_holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerWeights {
    /// `n²/ξ²` or `n/ξ²`.
    pub prefactor: f64,
    pub gamma: f64,
}

impl LedgerWeights {
    pub fn sdp(n: usize, xi: f64, gamma: f64) -> Self {
        LedgerWeights {
            prefactor: (n * n) as f64 / (xi * xi),
            gamma,
        }
    }

    pub fn lp(n: usize, xi: f64, gamma: f64) -> Self {
        LedgerWeights {
            prefactor: n as f64 / (xi * xi),
            gamma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostLedger {
    pub rows: Vec<LedgerRow>,
    /// `Σ_rows base`.
    pub aggregate: f64,
    /// `Σ_rows weighted`.
    pub weighted_sum: f64,
    pub prefactor: f64,
    pub gamma: f64,
    /// `prefactor · γ² · weighted_sum`.
    pub total: f64,
    /// Rows failing the `‖dS ⊕ dY‖_F·‖Y ⊕ Y⁻¹‖₂ ≤ κ(Y ⊕ Y⁻¹)/4` check.
    pub eq18_failures: usize,
    /// Trace rows without `μ`/`κ` diagnostics (not counted in the sums).
    pub skipped: usize,
}

/// Builds the ledger from the rows of `trace` that carry diagnostics.
pub fn cost_ledger(trace: &[IterationRecord], weights: &LedgerWeights) -> CostLedger {
    let mut rows = Vec::new();
    let mut skipped = 0;
    for r in trace {
        match (r.mu_m1, r.mu_m2, r.mu_m3, r.kappa_pipeline) {
            (Some(m1), Some(m2), Some(m3), Some(k)) => {
                let base = (m1 + m2 + m3) * k;
                rows.push(LedgerRow {
                    iter: r.iter,
                    mu_m1: m1,
                    mu_m2: m2,
                    mu_m3: m3,
                    kappa_pipeline: k,
                    kappa_yy: r.kappa_yy,
                    base,
                    weighted: base * r.kappa_yy * r.kappa_yy,
                    eq18_holds: r.eq18_holds,
                });
            }
            _ => skipped += 1,
        }
    }
    let aggregate = rows.iter().map(|r| r.base).sum();
    let weighted_sum: f64 = rows.iter().map(|r| r.weighted).sum();
    CostLedger {
        eq18_failures: trace.iter().filter(|r| !r.eq18_holds).count(),
        aggregate,
        weighted_sum,
        prefactor: weights.prefactor,
        gamma: weights.gamma,
        total: weights.prefactor * weights.gamma * weights.gamma * weighted_sum,
        rows,
        skipped,
    }
}
