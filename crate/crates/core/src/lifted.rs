//! Lifted `n² × n²` matrices acting on vectorised `n × n` matrices, and the
//! Newton matrix built from them.
//!
//! Vectorisation is row-major throughout: entry `(i, j)` of an `n × n`
//! matrix sits at position `n·i + j`. With that convention
//!
//! * `tilde(Z)` has row `(i, j)` equal to `e_i ⊗ Z_j` (`Z_j` the j-th column),
//!   so `tilde(Z)·vec(W) = vec(WZ)`; it is block diagonal with `n` copies of
//!   `Zᵀ`.
//! * `hat(Z)` has row `(i, j)` equal to `e_j ⊗ Z_i`; for symmetric `Z`, `W`,
//!   `hat(Z)·vec(W) = vec(ZW)`.
//!
//! Note that `tilde(Z)·tilde(W) = tilde(WZ)`: the product reverses order, as
//! right-multiplications compose.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::instance::{IterateState, SdpInstance};
use crate::matspace::{frobenius_norm, mu_factor, SymMatrix, DEFAULT_P_GRID};

/// Largest base dimension for which lifted matrices are materialised.
pub const MAX_LIFTED_DIM: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftedKind {
    Tilde,
    Hat,
    Product,
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedMatrix {
    pub base_dim: usize,
    pub entries: DMatrix<f64>,
    pub kind: LiftedKind,
}

impl LiftedMatrix {
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.entries * v
    }

    pub fn mul(&self, other: &LiftedMatrix) -> LiftedMatrix {
        assert_eq!(self.base_dim, other.base_dim);
        LiftedMatrix {
            base_dim: self.base_dim,
            entries: &self.entries * &other.entries,
            kind: LiftedKind::Product,
        }
    }

    pub fn transpose(&self) -> LiftedMatrix {
        LiftedMatrix {
            base_dim: self.base_dim,
            entries: self.entries.transpose(),
            kind: LiftedKind::General,
        }
    }
}

fn check_cap(n: usize) {
    assert!(
        n <= MAX_LIFTED_DIM,
        "lifted matrices are only materialised for n <= {MAX_LIFTED_DIM} (got {n})"
    );
}

/// `tilde(Z)[(i,j), (a,b)] = δ_ia · Z_bj`. Works for any square `Z`.
///
/// # Panics
/// If `n > MAX_LIFTED_DIM`.
pub fn tilde_dense(z: &DMatrix<f64>) -> LiftedMatrix {
    let n = z.nrows();
    check_cap(n);
    let mut out = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for b in 0..n {
                out[(n * i + j, n * i + b)] = z[(b, j)];
            }
        }
    }
    LiftedMatrix {
        base_dim: n,
        entries: out,
        kind: LiftedKind::Tilde,
    }
}

/// `hat(Z)[(i,j), (a,b)] = δ_ja · Z_bi`.
///
/// # Panics
/// If `n > MAX_LIFTED_DIM`.
pub fn hat_dense(z: &DMatrix<f64>) -> LiftedMatrix {
    let n = z.nrows();
    check_cap(n);
    let mut out = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for b in 0..n {
                out[(n * i + j, n * j + b)] = z[(b, i)];
            }
        }
    }
    LiftedMatrix {
        base_dim: n,
        entries: out,
        kind: LiftedKind::Hat,
    }
}

pub fn tilde(z: &SymMatrix) -> LiftedMatrix {
    tilde_dense(z.as_matrix())
}

pub fn hat(z: &SymMatrix) -> LiftedMatrix {
    hat_dense(z.as_matrix())
}

/// `tilde(Z)·v` without materialising `tilde(Z)`: reshapes `v` to `W` and
/// returns `vec(WZ)`.
pub fn apply_tilde(z: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = z.nrows();
    let w = DMatrix::from_row_slice(n, n, v.as_slice());
    let wz = w * z;
    DVector::from_iterator(n * n, wz.transpose().iter().copied())
}

/// The Newton matrix `M`, of size `(n² + m) × (n² + m)`.
///
/// Columns are `[dx (m) | u (n²)]`, rows `[(i,j) pairs (n²) | constraints (m)]`.
/// Top-left column `k` is `vec(A⁽ᵏ⁾Y)`, top-right row `(i,j)` is
/// `(e_j ⊗ S_i)ᵀ`, bottom-right row `k` is `vec(A⁽ᵏ⁾)ᵀ`.
///
/// Solving `M·(dx ∘ u) = vec(ν′I − SY) ∘ 0` yields `u = vec(dYᵀ)`, i.e. the
/// unknown block holds the transpose of the dual step (see
/// [`crate::newton::solve_exact`]).
pub fn assemble_newton_matrix(state: &IterateState, inst: &SdpInstance) -> DMatrix<f64> {
    let n = inst.n();
    let m = inst.m();
    check_cap(n);
    let n2 = n * n;
    let mut out = DMatrix::zeros(n2 + m, n2 + m);
    for (k, a) in inst.constraint_mats().iter().enumerate() {
        let ay = a.as_matrix() * state.y.as_matrix();
        for i in 0..n {
            for j in 0..n {
                out[(n * i + j, k)] = ay[(i, j)];
                out[(n2 + k, m + n * i + j)] = a[(i, j)];
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for b in 0..n {
                out[(n * i + j, m + n * j + b)] = state.s[(b, i)];
            }
        }
    }
    out
}

/// `M = M₁·M₂` with `M₁ = blockdiag(tilde(Y), I_m)` and
/// `M₂ = [[𝒜ᵀ, tilde(Y⁻¹)·hat(S)], [0, 𝒜]]`; `M₃ = [[𝒜ᵀ, 0], [0, I_{n²}]]`.
#[derive(Clone, Debug)]
pub struct NewtonFactors {
    pub m1: DMatrix<f64>,
    pub m2: DMatrix<f64>,
    pub m3: DMatrix<f64>,
    pub constraint_rows: DMatrix<f64>,
    pub mu_m1: f64,
    pub mu_m2: f64,
    pub mu_m3: f64,
}

/// `M₂` built directly from `Y⁻¹`, `S` and the constraints.
///
/// Entry `[(i,j), (a,b)]` of `tilde(Y⁻¹)·hat(S)` is `Y⁻¹_aj · S_bi`.
pub fn assemble_m2(state: &IterateState, rows: &DMatrix<f64>) -> DMatrix<f64> {
    let n = state.n();
    let m = rows.nrows();
    check_cap(n);
    let n2 = n * n;
    let yinv = state.y_inv.as_matrix();
    let s = state.s.as_matrix();
    let mut out = DMatrix::zeros(n2 + m, n2 + m);
    out.view_mut((0, 0), (n2, m)).copy_from(&rows.transpose());
    out.view_mut((n2, m), (m, n2)).copy_from(rows);
    for i in 0..n {
        for j in 0..n {
            let r = n * i + j;
            for a in 0..n {
                let ya = yinv[(a, j)];
                if ya == 0.0 {
                    continue;
                }
                for b in 0..n {
                    out[(r, m + n * a + b)] = ya * s[(b, i)];
                }
            }
        }
    }
    out
}

/// `M₃ = [[𝒜ᵀ, 0], [0, I_{n²}]]`, size `2n² × (m + n²)`.
pub fn assemble_m3(rows: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let m = rows.nrows();
    let n2 = n * n;
    let mut out = DMatrix::zeros(2 * n2, m + n2);
    out.view_mut((0, 0), (n2, m)).copy_from(&rows.transpose());
    for t in 0..n2 {
        out[(n2 + t, m + t)] = 1.0;
    }
    out
}

/// Builds `M₁`, `M₂`, `M₃` and their block-encoding factors
/// `μ(M₁) = μ(tilde(Y))`, `μ(M₂) = ‖M₂‖_F`, `μ(M₃)`.
pub fn factorize(state: &IterateState, inst: &SdpInstance) -> Result<NewtonFactors> {
    let n = inst.n();
    let m = inst.m();
    let n2 = n * n;
    crate::matspace::require_pd(&state.y, "Y")?;
    let rows = inst.constraint_rows();
    let ty = tilde(&state.y);
    let mu_m1 = mu_factor(&ty.entries, &DEFAULT_P_GRID);
    let mut m1 = DMatrix::zeros(n2 + m, n2 + m);
    m1.view_mut((0, 0), (n2, n2)).copy_from(&ty.entries);
    for k in 0..m {
        m1[(n2 + k, n2 + k)] = 1.0;
    }
    let m2 = assemble_m2(state, &rows);
    let mu_m2 = m2.norm();
    let m3 = assemble_m3(&rows, n);
    let mu_m3 = mu_factor(&m3, &DEFAULT_P_GRID);
    Ok(NewtonFactors {
        m1,
        m2,
        m3,
        constraint_rows: rows,
        mu_m1,
        mu_m2,
        mu_m3,
    })
}

/// `vec(Σ_k dx_k A⁽ᵏ⁾) ∘ vec(dY)`.
pub fn m3_expand(dx: &DVector<f64>, dy: &DMatrix<f64>, inst: &SdpInstance) -> DVector<f64> {
    let n = inst.n();
    let n2 = n * n;
    let ds = inst.combine(dx);
    let mut out = DVector::zeros(2 * n2);
    for i in 0..n {
        for j in 0..n {
            out[n * i + j] = ds[(i, j)];
            out[n2 + n * i + j] = dy[(i, j)];
        }
    }
    out
}

/// `μ(M₃)` depends only on the instance.
pub fn mu_m3(inst: &SdpInstance) -> f64 {
    mu_factor(&assemble_m3(&inst.constraint_rows(), inst.n()), &DEFAULT_P_GRID)
}

/// `‖tilde(Z)‖_F = √n·‖Z‖_F`, a cheap upper bound for `μ(tilde(Z))`.
pub fn tilde_frobenius(z: &SymMatrix) -> f64 {
    (z.dim() as f64).sqrt() * frobenius_norm(z)
}
