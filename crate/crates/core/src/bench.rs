//! Tomography sweeps over a `(d, δ)` grid.
//!
//! Each trial draws a Haar-random real unit vector from its own sub-stream
//! and reconstructs it with [`tomography_estimate`], so any single cell can
//! be re-run in isolation with identical results.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{shot_count, tomography_estimate, NoiseConfig, TomographyRecord, TomographyReport};
use crate::rng::SeedTree;

pub const DEFAULT_DIMS: [usize; 4] = [4, 16, 64, 256];
pub const DEFAULT_DELTAS: [f64; 2] = [0.1, 0.2];
pub const DEFAULT_TRIALS: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub dims: Vec<usize>,
    pub deltas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub noise: NoiseConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            dims: DEFAULT_DIMS.to_vec(),
            deltas: DEFAULT_DELTAS.to_vec(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            noise: NoiseConfig::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.deltas.is_empty() || self.trials == 0 {
            return Err(Error::InvalidInput("sweep needs at least one dimension, delta and trial".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidInput(format!("dimension must be at least 2, got {d}")));
        }
        if let Some(x) = self.deltas.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {x}")));
        }
        self.noise.validate()
    }
}

/// Aggregate of one `(d, δ)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub d: usize,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n_shots: u64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// `1 − d^(−0.83)`.
    pub required_rate: f64,
    pub meets_bound: bool,
    pub err_median: f64,
    pub err_p90: f64,
    pub err_p99: f64,
    pub err_max: f64,
    /// Entries with `x_i² ≥ δ²/d` whose sign came out wrong.
    pub sign_errors: u64,
    pub sign_checked: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub trials: Vec<TomographyRecord>,
}

impl SweepResult {
    pub fn all_cells_meet_bound(&self) -> bool {
        self.cells.iter().all(|c| c.meets_bound)
    }
}

pub fn required_success_rate(d: usize) -> f64 {
    1.0 - (d as f64).powf(-0.83)
}

/// Haar-random point on the unit sphere in `ℝᵈ`.
pub fn random_unit_vector(d: usize, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// `(wrong, checked)` sign counts over entries with `x_i² ≥ δ²/d`.
pub fn sign_errors(x: &DVector<f64>, report: &TomographyReport) -> (u64, u64) {
    let d = x.len() as f64;
    let floor = report.delta * report.delta / d;
    let mut wrong = 0;
    let mut checked = 0;
    for (i, &xi) in x.iter().enumerate() {
        if xi * xi >= floor {
            checked += 1;
            let truth: i8 = if xi >= 0.0 { 1 } else { -1 };
            if report.signs[i] != truth {
                wrong += 1;
            }
        }
    }
    (wrong, checked)
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

pub fn run_cell(d: usize, delta: f64, cell_index: u64, spec: &SweepSpec) -> Result<(SweepCell, Vec<TomographyRecord>)> {
    let tree = SeedTree::new(spec.seed).child("tomo-bench", cell_index);
    let mut records = Vec::with_capacity(spec.trials);
    let mut errors = Vec::with_capacity(spec.trials);
    let (mut wrong, mut checked) = (0, 0);
    for t in 0..spec.trials as u64 {
        let x = random_unit_vector(d, &mut tree.stream("state", t));
        let report = tomography_estimate(&x, delta, &spec.noise, &mut tree.stream("shots", t))?;
        let (w, c) = sign_errors(&x, &report);
        wrong += w;
        checked += c;
        errors.push(report.achieved_error);
        records.push(report.record());
    }
    errors.sort_by(f64::total_cmp);
    let successes = records.iter().filter(|r| r.success).count();
    let success_rate = successes as f64 / spec.trials as f64;
    let required_rate = required_success_rate(d);
    let cell = SweepCell {
        d,
        delta,
        n_shots: shot_count(d, delta, spec.noise.shot_constant) as u64,
        trials: spec.trials,
        successes,
        success_rate,
        required_rate,
        meets_bound: success_rate >= required_rate,
        err_median: quantile(&errors, 0.5),
        err_p90: quantile(&errors, 0.9),
        err_p99: quantile(&errors, 0.99),
        err_max: errors[errors.len() - 1],
        sign_errors: wrong,
        sign_checked: checked,
    };
    Ok((cell, records))
}

/// Runs every cell of the grid, dimensions outermost.
pub fn tomography_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut cells = Vec::new();
    let mut trials = Vec::new();
    let mut idx = 0;
    for &d in &spec.dims {
        for &delta in &spec.deltas {
            let (cell, recs) = run_cell(d, delta, idx, spec)?;
            log::info!(
                "d = {d}, delta = {delta}: {}/{} within sqrt(7)*delta",
                cell.successes,
                cell.trials
            );
            cells.push(cell);
            trials.extend(recs);
            idx += 1;
        }
    }
    Ok(SweepResult { cells, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepSpec {
        SweepSpec {
            dims: vec![4, 16],
            deltas: vec![0.2],
            trials: 40,
            seed: 9,
            ..SweepSpec::default()
        }
    }

    #[test]
    fn quantiles_use_nearest_rank() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.0);
        assert_eq!(quantile(&v, 0.9), 4.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
    }

    #[test]
    fn random_unit_vectors_are_unit() {
        let mut rng = SeedTree::new(1).stream("x", 0);
        for d in [2, 7, 64] {
            assert!((random_unit_vector(d, &mut rng).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_sweep_is_deterministic_and_succeeds() {
        let a = tomography_sweep(&small()).unwrap();
        let b = tomography_sweep(&small()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 2);
        assert_eq!(a.trials.len(), 80);
        assert!(a.all_cells_meet_bound(), "{:?}", a.cells);
        assert_eq!(a.cells[0].n_shots, (36.0f64 * 4.0 * 4f64.ln() / 0.04).ceil() as u64);
    }

    #[test]
    fn zero_delta_is_rejected() {
        let spec = SweepSpec {
            deltas: vec![0.0],
            ..small()
        };
        assert!(matches!(tomography_sweep(&spec), Err(Error::InvalidInput(_))));
    }
}
