//! Exact solution of the Newton system
//!
//! ```text
//! dS ∈ L,  dY ⊥ L,  dS·Y + S·dY = ν′I − SY
//! ```
//!
//! through the factorisation `M = M₁M₂`: apply `M₁⁻¹ = blockdiag(tilde(Y⁻¹), I)`
//! implicitly, then solve with `M₂` by dense LU.
//!
//! The `dY` satisfying the linearised equation exactly is in general not
//! symmetric (only `dS` is forced symmetric by `dS ∈ L`). [`NewtonSolution`]
//! keeps that raw step and also its symmetric part, which is what the solver
//! applies; the symmetric part stays orthogonal to `L` and keeps
//! `Tr(dS·dY) = 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::instance::{IterateState, LpInstance, LpState, SdpInstance};
use crate::lifted::{apply_tilde, assemble_m2, assemble_m3, assemble_newton_matrix};
use crate::matspace::{condition_number_dense, SymMatrix};

/// Pivot-ratio floor below which a Newton matrix counts as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct NewtonSolution {
    pub dx: DVector<f64>,
    pub ds: SymMatrix,
    /// Symmetric part of the dual step.
    pub dy: SymMatrix,
    /// Dual step exactly solving the linearised equation.
    pub dy_raw: DMatrix<f64>,
    /// `‖dS·Y + S·dY_raw − (ν′I − SY)‖_F`.
    pub residual: f64,
    /// `‖dY_raw − dY_rawᵀ‖_F / 2`.
    pub asymmetry: f64,
    /// `‖dS ⊕ dY_raw‖_F`, the norm of the vector the quantum pipeline outputs.
    pub norm_dsdy: f64,
    pub kappa_pipeline: Option<f64>,
}

impl NewtonSolution {
    /// `vec(dS) ∘ vec(dY_raw)`.
    pub fn stacked(&self) -> DVector<f64> {
        let n = self.ds.dim();
        let n2 = n * n;
        let mut out = DVector::zeros(2 * n2);
        for i in 0..n {
            for j in 0..n {
                out[n * i + j] = self.ds[(i, j)];
                out[n2 + n * i + j] = self.dy_raw[(i, j)];
            }
        }
        out
    }

    pub fn zero(n: usize, m: usize) -> Self {
        NewtonSolution {
            dx: DVector::zeros(m),
            ds: SymMatrix::zeros(n),
            dy: SymMatrix::zeros(n),
            dy_raw: DMatrix::zeros(n, n),
            residual: 0.0,
            asymmetry: 0.0,
            norm_dsdy: 0.0,
            kappa_pipeline: None,
        }
    }
}

/// `ν′I − SY` as a dense (generally non-symmetric) matrix.
pub fn newton_rhs(state: &IterateState, nu_target: f64) -> DMatrix<f64> {
    let n = state.n();
    DMatrix::identity(n, n) * nu_target - state.s.as_matrix() * state.y.as_matrix()
}

/// `σ_min/σ_max` of `mat`, or [`Error::SingularNewtonMatrix`] when it is not
/// above [`SINGULAR_TOLERANCE`].
pub fn check_invertible(mat: &DMatrix<f64>) -> Result<f64> {
    let sv = mat.clone().singular_values();
    let ratio = sv.min() / sv.max();
    if ratio > SINGULAR_TOLERANCE {
        Ok(ratio)
    } else {
        Err(Error::SingularNewtonMatrix { ratio })
    }
}

fn lu_solve(mat: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    mat.lu().solve(rhs).ok_or(Error::SingularNewtonMatrix { ratio: 0.0 })
}

fn finish(
    state: &IterateState,
    inst: &SdpInstance,
    nu_target: f64,
    z: &DVector<f64>,
) -> NewtonSolution {
    let n = inst.n();
    let m = inst.m();
    let dx = z.rows(0, m).clone_owned();
    let u = DMatrix::from_row_slice(n, n, z.rows(m, n * n).as_slice());
    let dy_raw = u.transpose();
    let ds = inst.combine(&dx);
    let rhs = newton_rhs(state, nu_target);
    let residual = (ds.as_matrix() * state.y.as_matrix() + state.s.as_matrix() * &dy_raw - rhs).norm();
    let asymmetry = (&dy_raw - dy_raw.transpose()).norm() / 2.0;
    let dy = SymMatrix::symmetrize(&dy_raw);
    let norm_dsdy = (ds.norm_squared() + dy_raw.norm_squared()).sqrt();
    NewtonSolution {
        dx,
        ds,
        dy,
        dy_raw,
        residual,
        asymmetry,
        norm_dsdy,
        kappa_pipeline: None,
    }
}

/// Solves the Newton system through `M = M₁M₂`.
pub fn solve_exact(state: &IterateState, inst: &SdpInstance, nu_target: f64) -> Result<NewtonSolution> {
    let n = inst.n();
    let m = inst.m();
    let n2 = n * n;
    check_invertible(&assemble_newton_matrix(state, inst))?;
    let rows = inst.constraint_rows();
    let rhs = newton_rhs(state, nu_target);
    // M₁⁻¹·(vec(R) ∘ 0) = vec(R·Y⁻¹) ∘ 0
    let top = apply_tilde(state.y_inv.as_matrix(), &DVector::from_row_slice(rhs.transpose().as_slice()));
    let mut b = DVector::zeros(n2 + m);
    b.rows_mut(0, n2).copy_from(&top);
    let m2 = assemble_m2(state, &rows);
    let z = lu_solve(m2, &b)?;
    Ok(finish(state, inst, nu_target, &z))
}

/// Reference path: dense LU directly on the assembled `M`.
pub fn solve_dense(state: &IterateState, inst: &SdpInstance, nu_target: f64) -> Result<NewtonSolution> {
    let n2 = inst.n() * inst.n();
    let rhs = newton_rhs(state, nu_target);
    let mut b = DVector::zeros(n2 + inst.m());
    b.rows_mut(0, n2).copy_from(&DVector::from_row_slice(rhs.transpose().as_slice()));
    let mm = assemble_newton_matrix(state, inst);
    check_invertible(&mm)?;
    let z = lu_solve(mm, &b)?;
    Ok(finish(state, inst, nu_target, &z))
}

/// `κ(M₃M⁻¹)` over the positive singular values (those above
/// `1e-12·σ_max`).
pub fn kappa_pipeline(state: &IterateState, inst: &SdpInstance) -> Result<f64> {
    let mm = assemble_newton_matrix(state, inst);
    let ratio = check_invertible(&mm)?;
    let inv = mm.try_inverse().ok_or(Error::SingularNewtonMatrix { ratio })?;
    let m3 = assemble_m3(&inst.constraint_rows(), inst.n());
    condition_number_dense(&(m3 * inv)).ok_or(Error::SingularNewtonMatrix { ratio: 0.0 })
}

/// LP Newton step: `(dx, ds, dy)` with `ds = Σ dx_k a_k`, `⟨a_k, dy⟩ = 0`.
#[derive(Clone, Debug)]
pub struct LpNewtonStep {
    pub dx: DVector<f64>,
    pub ds: DVector<f64>,
    pub dy: DVector<f64>,
    /// Max-norm residual of the `n + m` equations.
    pub residual: f64,
}

impl LpNewtonStep {
    /// `dx ∘ dy`, the vector the LP pipeline tomographs.
    pub fn stacked(&self) -> DVector<f64> {
        let m = self.dx.len();
        let n = self.dy.len();
        let mut out = DVector::zeros(m + n);
        out.rows_mut(0, m).copy_from(&self.dx);
        out.rows_mut(m, n).copy_from(&self.dy);
        out
    }
}

/// The LP Newton matrix `[[diag(y)·Aᵀ, diag(s)], [0, A]]`, columns `[dx | dy]`.
pub fn assemble_lp_matrix(state: &LpState, lp: &LpInstance) -> DMatrix<f64> {
    let n = lp.n();
    let m = lp.m();
    let rows = lp.constraint_rows();
    let mut out = DMatrix::zeros(n + m, n + m);
    for i in 0..n {
        for k in 0..m {
            out[(i, k)] = state.y[i] * rows[(k, i)];
        }
        out[(i, m + i)] = state.s[i];
    }
    out.view_mut((n, m), (m, n)).copy_from(&rows);
    out
}

/// Solves `ds ⊙ y + dy ⊙ s = ν′·1 − s ⊙ y`, `ds = Aᵀdx`, `A·dy = 0` through
/// the factorisation `diag(y, 1)·[[Aᵀ, diag(s/y)], [0, A]]`.
pub fn solve_lp(state: &LpState, lp: &LpInstance, nu_target: f64) -> Result<LpNewtonStep> {
    check_invertible(&assemble_lp_matrix(state, lp))?;
    let n = lp.n();
    let m = lp.m();
    let rows = lp.constraint_rows();
    let mut m2 = DMatrix::zeros(n + m, n + m);
    m2.view_mut((0, 0), (n, m)).copy_from(&rows.transpose());
    for i in 0..n {
        m2[(i, m + i)] = state.s[i] / state.y[i];
    }
    m2.view_mut((n, m), (m, n)).copy_from(&rows);
    let mut b = DVector::zeros(n + m);
    for i in 0..n {
        b[i] = (nu_target - state.s[i] * state.y[i]) / state.y[i];
    }
    let z = lu_solve(m2, &b)?;
    let dx = z.rows(0, m).clone_owned();
    let dy = z.rows(m, n).clone_owned();
    let ds = rows.transpose() * &dx;
    let mut residual = 0.0f64;
    for i in 0..n {
        let r = ds[i] * state.y[i] + dy[i] * state.s[i] - (nu_target - state.s[i] * state.y[i]);
        residual = residual.max(r.abs());
    }
    residual = residual.max((&rows * &dy).amax());
    Ok(LpNewtonStep { dx, ds, dy, residual })
}
