//! Statistical simulation of the quantum subroutines.
//!
//! Nothing here simulates gates. Each subroutine is replaced by its output
//! distribution: vector-state tomography by exact multinomial shot sampling,
//! norm estimation by bounded relative noise, and the Newton-step oracle by
//! an exact classical solve fed through both.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matspace::SymMatrix;
use crate::newton::NewtonSolution;

/// Shot counts above this only raise [`TomographyReport::capped_shots`];
/// sampling cost does not depend on the shot count.
pub const DEFAULT_SHOT_CAP: u64 = 100_000_000;

/// Hard ceiling on a single phase's shot count.
pub const MAX_SHOTS: f64 = 1e18;

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseConfig {
    /// Tomography precision `δ` for standalone use; the IPM sets it per step.
    pub delta: f64,
    /// `C` in `N = ⌈C·d·ln d / δ²⌉`.
    pub shot_constant: f64,
    /// A sign is `+` when `n(0, i) > threshold · p_i · N`.
    pub sign_threshold: f64,
    /// Norm estimates are `true · (1 + u)` with `u ~ U[−r, r]`. `None` means
    /// "use the step's `δ`".
    pub norm_rel_err: Option<f64>,
    pub rng_seed: u64,
    pub shot_cap: u64,
    /// Replace shot sampling by a Gaussian perturbation (model-level only).
    pub fast_mode: bool,
    /// Return [`Error::TomographyFailure`] instead of flagging it.
    pub strict: bool,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            delta: 0.1,
            shot_constant: 36.0,
            sign_threshold: 0.4,
            norm_rel_err: None,
            rng_seed: 0,
            shot_cap: DEFAULT_SHOT_CAP,
            fast_mode: false,
            strict: false,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.sign_threshold > 0.0 && self.sign_threshold < 0.5) {
            return Err(Error::InvalidInput(format!(
                "sign threshold must lie in (0, 0.5), got {}",
                self.sign_threshold
            )));
        }
        if !(self.shot_constant >= 1.0) {
            return Err(Error::InvalidInput("shot constant must be at least 1".into()));
        }
        if let Some(r) = self.norm_rel_err {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::InvalidInput("norm error must lie in [0, 1)".into()));
            }
        }
        Ok(())
    }
}

/// `N = ⌈C·d·ln d / δ²⌉`.
pub fn shot_count(d: usize, delta: f64, shot_constant: f64) -> f64 {
    let d = d as f64;
    (shot_constant * d * d.ln() / (delta * delta)).ceil()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomographyReport {
    pub estimate: DVector<f64>,
    pub shots_amplitude: u64,
    pub shots_sign: u64,
    /// `n_i / N` from the amplitude phase.
    pub p_hat: DVector<f64>,
    pub amplitude_counts: Vec<u64>,
    /// `n(0, i)` from the sign phase.
    pub sign_counts: Vec<u64>,
    pub signs: Vec<i8>,
    pub delta: f64,
    pub achieved_error: f64,
    /// `achieved_error ≤ √7·δ`.
    pub success: bool,
    pub capped_shots: bool,
    /// Produced by the Gaussian shortcut rather than shot sampling.
    pub model_level: bool,
}

/// One row of the tomography CSV: `d, N, delta, achieved_error, success`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TomographyRecord {
    pub d: usize,
    #[serde(rename = "N")]
    pub n_shots: u64,
    pub delta: f64,
    pub achieved_error: f64,
    pub success: bool,
}

impl TomographyReport {
    pub fn record(&self) -> TomographyRecord {
        TomographyRecord {
            d: self.estimate.len(),
            n_shots: self.shots_amplitude,
            delta: self.delta,
            achieved_error: self.achieved_error,
            success: self.success,
        }
    }
}

/// Multinomial draw of `total` shots over `probs`, via sequential
/// conditional binomials. Cost is `O(len)` regardless of `total`.
pub fn sample_multinomial(total: u64, probs: &[f64], rng: &mut impl Rng) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = total;
    let mut mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q).expect("valid binomial").sample(rng)
        };
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    counts
}

fn check_unit(x: &DVector<f64>) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::InvalidInput("tomography needs dimension d >= 2".into()));
    }
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("state must be a unit vector, has norm {norm}")));
    }
    Ok(())
}

/// Simulates vector-state tomography of the real unit vector `x_true`.
///
/// Phase one draws `N` standard-basis shots (`P(i) = x_i²`), giving
/// `p_i = n_i / N`. Phase two draws `N` shots of the interference state,
/// outcome `(b, i)` having probability `(x_i + (−1)ᵇ √p_i)² / 4`; the sign of
/// entry `i` is `+` when `n(0, i) > threshold · p_i · N`. The estimate is
/// `x̃_i = σ_i √p_i`.
pub fn tomography_estimate(
    x_true: &DVector<f64>,
    delta: f64,
    cfg: &NoiseConfig,
    rng: &mut impl Rng,
) -> Result<TomographyReport> {
    check_unit(x_true)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
    }
    let d = x_true.len();
    let n_f = shot_count(d, delta, cfg.shot_constant);
    if n_f > MAX_SHOTS {
        return Err(Error::InvalidInput(format!("delta = {delta:e} needs {n_f:e} shots, above {MAX_SHOTS:e}")));
    }
    let n_shots = n_f as u64;
    let capped_shots = n_shots > cfg.shot_cap;
    if capped_shots {
        log::debug!("tomography at d = {d}, delta = {delta:e} uses {n_shots} shots per phase (cap {})", cfg.shot_cap);
    }
    if cfg.fast_mode {
        return Ok(gaussian_estimate(x_true, delta, n_shots, capped_shots, rng));
    }

    let probs: Vec<f64> = x_true.iter().map(|v| v * v).collect();
    let amplitude_counts = sample_multinomial(n_shots, &probs, rng);
    let p_hat = DVector::from_iterator(d, amplitude_counts.iter().map(|&c| c as f64 / n_f));

    let mut probs2 = Vec::with_capacity(2 * d);
    for i in 0..d {
        probs2.push((x_true[i] + p_hat[i].sqrt()).powi(2) / 4.0);
    }
    for i in 0..d {
        probs2.push((x_true[i] - p_hat[i].sqrt()).powi(2) / 4.0);
    }
    let outcome_counts = sample_multinomial(n_shots, &probs2, rng);
    let sign_counts: Vec<u64> = outcome_counts[..d].to_vec();

    let signs: Vec<i8> = (0..d)
        .map(|i| {
            if sign_counts[i] as f64 > cfg.sign_threshold * p_hat[i] * n_f {
                1
            } else {
                -1
            }
        })
        .collect();
    let estimate = DVector::from_fn(d, |i, _| f64::from(signs[i]) * p_hat[i].sqrt());
    let achieved_error = (&estimate - x_true).norm();
    Ok(TomographyReport {
        estimate,
        shots_amplitude: n_shots,
        shots_sign: n_shots,
        p_hat,
        amplitude_counts,
        sign_counts,
        signs,
        delta,
        achieved_error,
        success: achieved_error <= 7f64.sqrt() * delta,
        capped_shots,
        model_level: false,
    })
}

/// Model-level shortcut: `x̃ = normalise(x + g)` with `g ~ N(0, δ²/(2d)·I)`.
fn gaussian_estimate(
    x_true: &DVector<f64>,
    delta: f64,
    n_shots: u64,
    capped_shots: bool,
    rng: &mut impl Rng,
) -> TomographyReport {
    let d = x_true.len();
    let sd = delta / (2.0 * d as f64).sqrt();
    let noisy = DVector::from_fn(d, |i, _| {
        let g: f64 = StandardNormal.sample(rng);
        x_true[i] + sd * g
    });
    let estimate = &noisy / noisy.norm();
    let achieved_error = (&estimate - x_true).norm();
    TomographyReport {
        p_hat: estimate.map(|v| v * v),
        signs: estimate.iter().map(|v| if *v >= 0.0 { 1 } else { -1 }).collect(),
        estimate,
        shots_amplitude: n_shots,
        shots_sign: n_shots,
        amplitude_counts: Vec::new(),
        sign_counts: Vec::new(),
        delta,
        achieved_error,
        success: achieved_error <= 7f64.sqrt() * delta,
        capped_shots,
        model_level: true,
    }
}

/// `true_norm · (1 + u)`, `u ~ U[−rel_err, rel_err]`.
pub fn noisy_norm_estimate(true_norm: f64, rel_err: f64, rng: &mut impl Rng) -> f64 {
    if rel_err == 0.0 {
        return true_norm;
    }
    let u: f64 = rng.random_range(-rel_err..=rel_err);
    true_norm * (1.0 + u)
}

/// The normalised concatenation `a ∘ b`, assembled from `(1 ± δ)` estimates
/// of `‖a‖` and `‖b‖`.
pub fn concat_state(
    a: &DVector<f64>,
    b: &DVector<f64>,
    norm_err: f64,
    rng: &mut impl Rng,
) -> Result<DVector<f64>> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ea = noisy_norm_estimate(na, norm_err, rng);
    let eb = noisy_norm_estimate(nb, norm_err, rng);
    let mut out = DVector::zeros(a.len() + b.len());
    out.rows_mut(0, a.len()).copy_from(&(a * (ea / na)));
    out.rows_mut(a.len(), b.len()).copy_from(&(b * (eb / nb)));
    let norm = out.norm();
    Ok(out / norm)
}

/// Result of one simulated quantum Newton step.
#[derive(Clone, Debug)]
pub struct NoisyStep {
    pub ds: SymMatrix,
    pub dy: SymMatrix,
    /// The reconstructed `d̄S ∘ d̄Y` before symmetrisation.
    pub stacked: DVector<f64>,
    pub norm_estimate: f64,
    /// `‖(d̄S ∘ d̄Y) − (dS ∘ dY)‖₂`.
    pub error: f64,
    /// `2δ‖dS ∘ dY‖₂`.
    pub bound: f64,
    pub within_bound: bool,
    pub report: Option<TomographyReport>,
}

/// Feeds an exact Newton solution through tomography and norm estimation.
///
/// Tomography runs at precision `δ/√7` so that its guarantee is `δ`; together
/// with a norm estimate of relative error at most `δ` the reconstructed step
/// is within `2δ` of the exact one.
pub fn noisy_newton_step_from(
    exact: &NewtonSolution,
    delta: f64,
    cfg: &NoiseConfig,
    rng: &mut impl Rng,
) -> Result<NoisyStep> {
    let n = exact.ds.dim();
    let n2 = n * n;
    let truth = exact.stacked();
    let norm = truth.norm();
    if norm == 0.0 {
        return Ok(NoisyStep {
            ds: SymMatrix::zeros(n),
            dy: SymMatrix::zeros(n),
            stacked: truth,
            norm_estimate: 0.0,
            error: 0.0,
            bound: 0.0,
            within_bound: true,
            report: None,
        });
    }
    let unit = &truth / norm;
    let report = tomography_estimate(&unit, delta / 7f64.sqrt(), cfg, rng)?;
    let norm_estimate = noisy_norm_estimate(norm, cfg.norm_rel_err.unwrap_or(delta), rng);
    let stacked = &report.estimate * norm_estimate;
    let error = (&stacked - &truth).norm();
    let bound = 2.0 * delta * norm;
    let within_bound = error <= bound;
    if !within_bound {
        if cfg.strict {
            return Err(Error::TomographyFailure { error, bound });
        }
        log::warn!("noisy Newton step error {error:e} exceeds 2 delta bound {bound:e}");
    }
    let ds_raw = DMatrix::from_row_slice(n, n, stacked.rows(0, n2).as_slice());
    let dy_raw = DMatrix::from_row_slice(n, n, stacked.rows(n2, n2).as_slice());
    Ok(NoisyStep {
        ds: SymMatrix::symmetrize(&ds_raw),
        dy: SymMatrix::symmetrize(&dy_raw),
        stacked,
        norm_estimate,
        error,
        bound,
        within_bound,
        report: Some(report),
    })
}

/// Exact solve followed by [`noisy_newton_step_from`].
pub fn noisy_newton_step(
    state: &crate::instance::IterateState,
    inst: &crate::instance::SdpInstance,
    nu_target: f64,
    delta: f64,
    cfg: &NoiseConfig,
    rng: &mut impl Rng,
) -> Result<(NewtonSolution, NoisyStep)> {
    let exact = crate::newton::solve_exact(state, inst, nu_target)?;
    let noisy = noisy_newton_step_from(&exact, delta, cfg, rng)?;
    Ok((exact, noisy))
}
