//! Dense symmetric matrices and the spectral quantities the solver is built on.
//!
//! Everything here is a pure function of its inputs. Eigendecompositions go
//! through `nalgebra::SymmetricEigen`; square roots and inverses of positive
//! definite matrices are taken through the spectrum rather than iteratively.

use std::ops::{Add, Deref, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative eigenvalue floor used by every positive-definiteness test.
pub const PD_TOLERANCE: f64 = 1e-12;

/// Grid of exponents scanned when minimising over `p` in the block-encoding
/// factor.
pub const DEFAULT_P_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// A dense real symmetric matrix. Symmetry is exact: `a[(i, j)] == a[(j, i)]`
/// bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Wraps `m`, rejecting non-square, empty or asymmetric input.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch("matrix dimension must be >= 1".into()));
        }
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymMatrix(m))
    }

    /// `(m + mᵀ) / 2`.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrize needs a square matrix");
        let n = m.nrows();
        SymMatrix(DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Builds a matrix from a function evaluated on the upper triangle.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Frobenius inner product `Tr(self · other)`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix(&self.0 * s)
    }

    /// Row-major vectorisation, index `(i, j) -> n * i + j`.
    pub fn vec(&self) -> DVector<f64> {
        vec_row_major(&self.0)
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().min()
    }
}

impl Deref for SymMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;

    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;

    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &SymMatrix {
    type Output = DMatrix<f64>;

    fn mul(self, rhs: &SymMatrix) -> DMatrix<f64> {
        &self.0 * &rhs.0
    }
}

/// Row-major vectorisation of a square matrix.
pub fn vec_row_major(m: &DMatrix<f64>) -> DVector<f64> {
    let (r, c) = m.shape();
    DVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

/// Inverse of [`vec_row_major`] for an `n x n` matrix.
pub fn unvec_row_major(v: &[f64], n: usize) -> DMatrix<f64> {
    assert_eq!(v.len(), n * n);
    DMatrix::from_fn(n, n, |i, j| v[n * i + j])
}

/// Eigen-decomposition `A = Σ λᵢ uᵢuᵢᵀ` with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn of(a: &SymMatrix) -> Self {
        let eig = a.0.clone().symmetric_eigen();
        let n = a.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = DVector::from_fn(n, |k, _| eig.eigenvalues[order[k]]);
        let eigenvectors = DMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
        Spectrum {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `U f(Λ) Uᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let u = &self.eigenvectors;
        let scaled = DMatrix::from_fn(u.nrows(), u.ncols(), |r, k| u[(r, k)] * f(self.eigenvalues[k]));
        SymMatrix::symmetrize(&(scaled * u.transpose()))
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|l| l)
    }
}

pub fn frobenius_norm(a: &SymMatrix) -> f64 {
    a.0.norm()
}

/// Largest singular value; for a symmetric matrix the largest `|λ|`.
pub fn spectral_norm(a: &SymMatrix) -> f64 {
    let s = a.spectrum();
    s.min().abs().max(s.max().abs())
}

/// `σ_max / σ_min`, failing when `σ_min <= 1e-12 σ_max`.
pub fn condition_number(a: &SymMatrix) -> Result<f64> {
    let s = a.spectrum();
    let abs: Vec<f64> = s.eigenvalues.iter().map(|l| l.abs()).collect();
    let smax = abs.iter().cloned().fold(0.0, f64::max);
    let smin = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin <= PD_TOLERANCE * smax {
        return Err(Error::SingularMatrix {
            ratio: if smax == 0.0 { 0.0 } else { smin / smax },
        });
    }
    Ok(smax / smin)
}

/// Condition number of a general dense matrix from its singular values.
/// Singular values below `1e-12 σ_max` are treated as zero and excluded.
pub fn condition_number_dense(a: &DMatrix<f64>) -> Option<f64> {
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return None;
    }
    let smin = sv
        .iter()
        .cloned()
        .filter(|&s| s > PD_TOLERANCE * smax)
        .fold(f64::INFINITY, f64::min);
    Some(smax / smin)
}

/// `s_p(A) = max_i Σ_j |A_ij|^p`, with zero entries contributing nothing
/// for every `p` (so `s_0` counts nonzeros per row).
fn row_power_sum(a: &DMatrix<f64>, p: f64) -> f64 {
    (0..a.nrows())
        .map(|i| {
            a.row(i)
                .iter()
                .filter(|v| **v != 0.0)
                .map(|v| v.abs().powf(p))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Block-encoding scale factor
/// `min(‖A‖_F, min_p √(s_{2p}(|A|) · s_{1-2p}(|A|ᵀ)))` over `p_grid`.
///
/// Works for rectangular matrices; the result never exceeds `‖A‖_F`.
pub fn mu_factor(a: &DMatrix<f64>, p_grid: &[f64]) -> f64 {
    assert!(!p_grid.is_empty(), "p_grid must be nonempty");
    let fro = a.norm();
    let at = a.transpose();
    p_grid
        .iter()
        .map(|&p| (row_power_sum(a, 2.0 * p) * row_power_sum(&at, 1.0 - 2.0 * p)).sqrt())
        .fold(fro, f64::min)
}

/// `K(X) = -log det X = -Σ log λᵢ`.
pub fn log_barrier(x: &SymMatrix) -> Result<f64> {
    let s = x.spectrum();
    check_pd_spectrum(&s, "barrier argument")?;
    Ok(-s.eigenvalues.iter().map(|l| l.ln()).sum::<f64>())
}

/// `λ_min(A) > 1e-12 · max(1, ‖A‖₂)`.
pub fn is_positive_definite(a: &SymMatrix) -> bool {
    check_pd_spectrum(&a.spectrum(), "").is_ok()
}

pub(crate) fn check_pd_spectrum(s: &Spectrum, what: &'static str) -> Result<()> {
    let scale = s.min().abs().max(s.max().abs()).max(1.0);
    if s.min() > PD_TOLERANCE * scale {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite {
            what,
            min_eigenvalue: s.min(),
        })
    }
}

pub fn require_pd(a: &SymMatrix, what: &'static str) -> Result<Spectrum> {
    let s = a.spectrum();
    check_pd_spectrum(&s, what)?;
    Ok(s)
}

/// Principal square root of a positive definite matrix.
pub fn sqrt_pd(a: &SymMatrix) -> Result<SymMatrix> {
    Ok(require_pd(a, "square-root argument")?.map(f64::sqrt))
}

/// Inverse of a positive definite matrix, polished by one step of iterative
/// refinement `X ← X + X(I − AX)`.
pub fn inverse_pd(a: &SymMatrix) -> Result<SymMatrix> {
    let x = require_pd(a, "inverse argument")?.map(|l| 1.0 / l);
    let n = a.dim();
    let resid = DMatrix::identity(n, n) - a.as_matrix() * x.as_matrix();
    let refined = x.as_matrix() + x.as_matrix() * resid;
    Ok(SymMatrix::symmetrize(&refined))
}

/// Distance to the central path `‖I − ν⁻¹ S^{1/2} Y S^{1/2}‖_F`.
pub fn central_path_distance(s: &SymMatrix, y: &SymMatrix, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::InvalidInput(format!("nu must be positive, got {nu}")));
    }
    require_pd(y, "Y")?;
    let half = sqrt_pd(s)?;
    let w = half.as_matrix() * y.as_matrix() * half.as_matrix();
    let n = s.dim();
    Ok((DMatrix::identity(n, n) - w / nu).norm())
}

/// `‖Y ⊕ Y⁻¹‖₂ = max(λ_max(Y), 1/λ_min(Y))` for `Y ≻ 0`.
pub fn direct_sum_inverse_norm(spec: &Spectrum) -> f64 {
    spec.max().max(1.0 / spec.min())
}

/// `κ(Y ⊕ Y⁻¹)` from the spectrum of `Y ≻ 0`.
pub fn direct_sum_inverse_condition(spec: &Spectrum) -> f64 {
    let (lo, hi) = (spec.min(), spec.max());
    hi.max(1.0 / lo) / lo.min(1.0 / hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut impl Rng) -> SymMatrix {
        SymMatrix::from_upper_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_pd(n: usize, rng: &mut impl Rng) -> SymMatrix {
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        SymMatrix::symmetrize(&(&g * g.transpose() + DMatrix::identity(n, n) * 0.5))
    }

    fn power_iteration(a: &DMatrix<f64>) -> f64 {
        // power iteration on A² converges to the dominant |λ|²
        let a2 = a * a;
        let mut v = DVector::from_fn(a.nrows(), |i, _| 1.0 + i as f64 * 0.37);
        let mut lam = 0.0;
        for _ in 0..5000 {
            let w = &a2 * &v;
            lam = w.norm() / v.norm();
            v = w.normalize();
        }
        lam.sqrt()
    }

    #[test]
    fn construction_rejects_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-15, 1.0]);
        assert_eq!(SymMatrix::new(m), Err(Error::NotSymmetric { row: 0, col: 1 }));
        assert!(SymMatrix::new(DMatrix::zeros(0, 0)).is_err());
        assert!(SymMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert!((frobenius_norm(&SymMatrix::identity(3)) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(frobenius_norm(&SymMatrix::zeros(4)), 0.0);
        assert!((frobenius_norm(&SymMatrix::from_diagonal(&[3.0, 4.0])) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&SymMatrix::identity(5)) - 1.0).abs() < 1e-12);
        assert!((spectral_norm(&SymMatrix::from_diagonal(&[-7.0, 2.0])) - 7.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = random_sym(4, &mut rng);
            assert!((spectral_norm(&a) - power_iteration(&a)).abs() < 1e-8);
        }
    }

    #[test]
    fn condition_number_examples() {
        assert!((condition_number(&SymMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-12);
        assert!((condition_number(&SymMatrix::from_diagonal(&[10.0, 1.0])).unwrap() - 10.0).abs() < 1e-12);
        let rank_def = SymMatrix::from_upper_fn(2, |_, _| 1.0);
        assert!(matches!(condition_number(&rank_def), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn mu_factor_examples() {
        for n in 1..6 {
            let id = SymMatrix::identity(n);
            assert!((mu_factor(&id, &[0.0, 0.5, 1.0]) - 1.0).abs() < 1e-15);
        }
        let ones = DMatrix::from_element(2, 2, 1.0);
        assert!((mu_factor(&ones, &[0.5]) - 2.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_sym(5, &mut rng);
            assert!(mu_factor(&a, &DEFAULT_P_GRID) <= a.norm() + 1e-15);
        }
    }

    #[test]
    fn log_barrier_examples() {
        assert_eq!(log_barrier(&SymMatrix::identity(3)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((log_barrier(&SymMatrix::from_diagonal(&[e, e])).unwrap() + 2.0).abs() < 1e-14);
        assert!(log_barrier(&SymMatrix::from_diagonal(&[1.0, -1.0])).is_err());
        assert!(log_barrier(&SymMatrix::from_diagonal(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn distance_examples() {
        let i2 = SymMatrix::identity(2);
        assert!(central_path_distance(&i2, &i2, 1.0).unwrap().abs() < 1e-15);
        let s = SymMatrix::from_diagonal(&[2.0, 1.0]);
        assert!((central_path_distance(&s, &i2, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let s = random_pd(4, &mut rng);
            let y = random_pd(4, &mut rng);
            let nu = s.dot(&y) / 4.0;
            let d1 = central_path_distance(&s, &y, nu).unwrap();
            let d2 = central_path_distance(&y, &s, nu).unwrap();
            assert!((d1 - d2).abs() <= 1e-8 * d1.max(1.0));
        }
        assert!(central_path_distance(&i2, &i2, 0.0).is_err());
    }

    #[test]
    fn positive_definite_examples() {
        assert!(is_positive_definite(&SymMatrix::identity(3)));
        assert!(!is_positive_definite(&SymMatrix::from_diagonal(&[1.0, -1e-6])));
        assert!(!is_positive_definite(&SymMatrix::from_diagonal(&[1.0, 1e-13])));
        assert!(is_positive_definite(&SymMatrix::from_diagonal(&[1.0, 1e-11])));
    }

    #[test]
    fn spectrum_reconstructs_and_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..9 {
            let a = random_sym(n, &mut rng);
            let s = a.spectrum();
            let err = (s.reconstruct().as_matrix() - a.as_matrix()).norm();
            assert!(err <= 1e-10 * a.norm().max(1.0));
            let q = &s.eigenvectors;
            assert!((q.transpose() * q - DMatrix::identity(n, n)).norm() < 1e-10);
            assert!(s.eigenvalues.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn inverse_and_sqrt() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_pd(6, &mut rng);
        let inv = inverse_pd(&a).unwrap();
        assert!((a.as_matrix() * inv.as_matrix() - DMatrix::identity(6, 6)).norm() < 1e-12);
        let r = sqrt_pd(&a).unwrap();
        assert!((r.as_matrix() * r.as_matrix() - a.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn direct_sum_quantities() {
        let y = SymMatrix::from_diagonal(&[0.5, 4.0]);
        let s = y.spectrum();
        // Y ⊕ Y⁻¹ has eigenvalues {0.5, 4, 2, 0.25}
        assert!((direct_sum_inverse_norm(&s) - 4.0).abs() < 1e-14);
        assert!((direct_sum_inverse_condition(&s) - 16.0).abs() < 1e-12);
    }
}
