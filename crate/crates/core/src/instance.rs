//! Primal-dual SDP and LP instances in symmetric form.
//!
//! An SDP pair is stored as
//!
//! ```text
//! min  Tr(CS) + Tr(BC)   s.t.  S ∈ L − B,  S ⪰ 0
//! max  Tr(BY)            s.t.  Y ∈ L⊥ + C, Y ⪰ 0
//! ```
//!
//! with `L = span(A⁽¹⁾, …, A⁽ᵐ⁾)` and `C` any point with `Tr(C A⁽ᵏ⁾) = c_k`.
//! LPs are the diagonal special case.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matspace::{
    inverse_pd, require_pd, spectral_norm, vec_row_major, SymMatrix,
};
use crate::rng::SeedTree;

/// Gram-matrix floor below which constraint matrices count as dependent.
pub const GRAM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SdpInstance {
    constraint_mats: Vec<SymMatrix>,
    rhs_mat: SymMatrix,
    cost_vec: DVector<f64>,
    dual_anchor: SymMatrix,
    seed_primal_x: Option<DVector<f64>>,
    seed_dual_y: Option<SymMatrix>,
}

impl SdpInstance {
    /// Builds and validates an instance; `c_k = Tr(C A⁽ᵏ⁾)` is derived from
    /// the dual anchor.
    pub fn new(
        constraint_mats: Vec<SymMatrix>,
        rhs_mat: SymMatrix,
        dual_anchor: SymMatrix,
        seed_primal_x: Option<DVector<f64>>,
        seed_dual_y: Option<SymMatrix>,
    ) -> Result<Self> {
        let n = rhs_mat.dim();
        let m = constraint_mats.len();
        if m == 0 {
            return Err(Error::DimensionMismatch("at least one constraint matrix is required".into()));
        }
        if m > n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "m = {m} exceeds n(n+1)/2 = {} for n = {n}",
                n * (n + 1) / 2
            )));
        }
        for (k, a) in constraint_mats.iter().enumerate() {
            if a.dim() != n {
                return Err(Error::DimensionMismatch(format!("A[{k}] is {0}x{0}, expected {n}x{n}", a.dim())));
            }
        }
        if dual_anchor.dim() != n {
            return Err(Error::DimensionMismatch("dual anchor C has the wrong dimension".into()));
        }
        let cost_vec = DVector::from_iterator(m, constraint_mats.iter().map(|a| a.dot(&dual_anchor)));
        let inst = SdpInstance {
            constraint_mats,
            rhs_mat,
            cost_vec,
            dual_anchor,
            seed_primal_x,
            seed_dual_y,
        };
        let sigma_min = inst.gram().singular_values().min();
        if sigma_min <= GRAM_TOLERANCE {
            return Err(Error::DependentConstraints { sigma_min });
        }
        if let Some(x) = &inst.seed_primal_x {
            if x.len() != m {
                return Err(Error::DimensionMismatch("seed x has the wrong length".into()));
            }
        }
        if let Some(y) = &inst.seed_dual_y {
            if y.dim() != n {
                return Err(Error::DimensionMismatch("seed Y has the wrong dimension".into()));
            }
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.rhs_mat.dim()
    }

    pub fn m(&self) -> usize {
        self.constraint_mats.len()
    }

    pub fn constraint_mats(&self) -> &[SymMatrix] {
        &self.constraint_mats
    }

    pub fn rhs_mat(&self) -> &SymMatrix {
        &self.rhs_mat
    }

    pub fn cost_vec(&self) -> &DVector<f64> {
        &self.cost_vec
    }

    pub fn dual_anchor(&self) -> &SymMatrix {
        &self.dual_anchor
    }

    pub fn seed_primal_x(&self) -> Option<&DVector<f64>> {
        self.seed_primal_x.as_ref()
    }

    pub fn seed_dual_y(&self) -> Option<&SymMatrix> {
        self.seed_dual_y.as_ref()
    }

    /// Replaces the dual anchor (and hence the cost vector).
    pub fn with_dual_anchor(&self, c: SymMatrix) -> Result<Self> {
        SdpInstance::new(self.constraint_mats.clone(), self.rhs_mat.clone(), c, None, None)
    }

    pub fn with_seeds(mut self, x: DVector<f64>, y: SymMatrix) -> Self {
        self.seed_primal_x = Some(x);
        self.seed_dual_y = Some(y);
        self
    }

    /// The `m × n²` matrix whose rows are `vec(A⁽ᵏ⁾)ᵀ`.
    pub fn constraint_rows(&self) -> DMatrix<f64> {
        let n2 = self.n() * self.n();
        let mut out = DMatrix::zeros(self.m(), n2);
        for (k, a) in self.constraint_mats.iter().enumerate() {
            out.row_mut(k).copy_from(&vec_row_major(a).transpose());
        }
        out
    }

    /// `G_kl = Tr(A⁽ᵏ⁾ A⁽ˡ⁾)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.m();
        DMatrix::from_fn(m, m, |k, l| self.constraint_mats[k].dot(&self.constraint_mats[l]))
    }

    /// `Σ_k x_k A⁽ᵏ⁾`.
    pub fn combine(&self, x: &DVector<f64>) -> SymMatrix {
        let n = self.n();
        let mut out = DMatrix::zeros(n, n);
        for (k, a) in self.constraint_mats.iter().enumerate() {
            out += a.as_matrix() * x[k];
        }
        SymMatrix::new(out).expect("sum of symmetric matrices is symmetric")
    }

    /// Least-squares split `v = Σ z_k A⁽ᵏ⁾ + r` with `r ⊥ L`.
    pub fn split_span(&self, v: &SymMatrix) -> (DVector<f64>, SymMatrix) {
        let at = self.constraint_rows().transpose();
        let qr = at.clone().qr();
        let q = qr.q();
        let r = qr.r();
        let vv = vec_row_major(v);
        let qtv = q.transpose() * &vv;
        let z = r
            .solve_upper_triangular(&qtv)
            .unwrap_or_else(|| DVector::zeros(self.m()));
        let proj = self.combine(&z);
        (z, v - &proj)
    }

    /// Strictly feasible starting pair `(Σ x₀A − B, Y₀)` when both seeds exist.
    pub fn seed_pair(&self) -> Option<(DVector<f64>, SymMatrix, SymMatrix)> {
        let x = self.seed_primal_x.clone()?;
        let y = self.seed_dual_y.clone()?;
        let s = &self.combine(&x) - &self.rhs_mat;
        Some((x, s, y))
    }

    /// Checks the seed pair: `S₀ ≻ 0`, `Y₀ ≻ 0`, `Tr((Y₀ − C)A⁽ᵏ⁾) = 0`.
    pub fn validate_seeds(&self) -> Result<()> {
        let (_, s, y) = self
            .seed_pair()
            .ok_or_else(|| Error::NoFeasibleSeed("instance carries no seed pair".into()))?;
        require_pd(&s, "seed S0").map_err(|e| Error::NoFeasibleSeed(e.to_string()))?;
        require_pd(&y, "seed Y0").map_err(|e| Error::NoFeasibleSeed(e.to_string()))?;
        let resid = self.dual_violation(&y);
        if resid > 1e-8 * (1.0 + self.cost_vec.norm()) {
            return Err(Error::NoFeasibleSeed(format!("seed Y0 violates Tr(Y A_k) = c_k by {resid:e}")));
        }
        Ok(())
    }

    /// `‖(Tr(Y A⁽ᵏ⁾) − c_k)_k‖₂`.
    pub fn dual_violation(&self, y: &SymMatrix) -> f64 {
        self.constraint_mats
            .iter()
            .zip(self.cost_vec.iter())
            .map(|(a, c)| (a.dot(y) - c).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Solver iterate `(S, Y, x, ν)` together with the cached `Y⁻¹` and the
/// accumulated constraint drift `B′ − B`, `C′ − C` of inexact steps.
#[derive(Clone, Debug)]
pub struct IterateState {
    pub s: SymMatrix,
    pub y: SymMatrix,
    pub x: DVector<f64>,
    pub nu: f64,
    pub y_inv: SymMatrix,
    pub drift_primal: SymMatrix,
    pub drift_dual: SymMatrix,
}

impl IterateState {
    pub fn new(s: SymMatrix, y: SymMatrix, x: DVector<f64>) -> Result<Self> {
        if s.dim() != y.dim() {
            return Err(Error::DimensionMismatch("S and Y differ in dimension".into()));
        }
        let n = s.dim();
        let mut st = IterateState {
            y_inv: SymMatrix::identity(n),
            drift_primal: SymMatrix::zeros(n),
            drift_dual: SymMatrix::zeros(n),
            nu: 0.0,
            s,
            y,
            x,
        };
        st.refresh()?;
        Ok(st)
    }

    /// Recomputes `Y⁻¹` and `ν = Tr(SY)/n` after `S`, `Y` change.
    pub fn refresh(&mut self) -> Result<()> {
        require_pd(&self.s, "S")?;
        self.y_inv = inverse_pd(&self.y)?;
        self.nu = self.s.dot(&self.y) / self.n() as f64;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.s.dim()
    }

    /// `‖(B′ − B) ⊕ (C′ − C)‖_F`.
    pub fn drift_norm(&self) -> f64 {
        (self.drift_primal.norm_squared() + self.drift_dual.norm_squared()).sqrt()
    }
}

/// `Tr(SY)`.
pub fn duality_gap(state: &IterateState) -> f64 {
    state.s.dot(&state.y)
}

/// `Tr(CS) + Tr(BC) − Tr(BY)`, the objective-value form of the gap. Equal to
/// `Tr(SY)` for exactly feasible pairs.
pub fn objective_gap(state: &IterateState, inst: &SdpInstance) -> f64 {
    let c = inst.dual_anchor();
    let b = inst.rhs_mat();
    c.dot(&state.s) + b.dot(c) - b.dot(&state.y)
}

/// `Tr(SY)`, cross-checked against the objective form when the state carries
/// no drift.
pub fn duality_gap_checked(state: &IterateState, inst: &SdpInstance) -> Result<f64> {
    let gap = duality_gap(state);
    if state.drift_norm() == 0.0 {
        let obj = objective_gap(state, inst);
        if (gap - obj).abs() > 1e-6 * (1.0 + gap.abs()) {
            return Err(Error::InvalidInput(format!(
                "duality gap identity violated: Tr(SY) = {gap:e}, objective gap = {obj:e}"
            )));
        }
    }
    Ok(gap)
}

pub fn dual_residual(state: &IterateState, inst: &SdpInstance) -> f64 {
    inst.dual_violation(&state.y)
}

/// `min_z ‖S + B − Σ z_k A⁽ᵏ⁾‖_F`.
pub fn primal_residual(state: &IterateState, inst: &SdpInstance) -> f64 {
    let v = &state.s + inst.rhs_mat();
    inst.split_span(&v).1.norm()
}

fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    g.qr().q()
}

fn random_unit_spectral_sym(n: usize, rng: &mut impl Rng) -> SymMatrix {
    let a = SymMatrix::from_upper_fn(n, |_, _| StandardNormal.sample(rng));
    let norm = spectral_norm(&a);
    a.scale(1.0 / norm)
}

/// Random SDP with `‖A⁽ᵏ⁾‖₂ = 1`, `‖B‖₂ ≤ 1`, and a seed pair on the central
/// path (`S₀Y₀ = I`, so `ν₀ = 1`). The dual anchor is the seed itself.
pub fn generate_random_sdp(n: usize, m: usize, seed: u64) -> Result<SdpInstance> {
    if n == 0 || m == 0 || m > n * (n + 1) / 2 {
        return Err(Error::DimensionMismatch(format!(
            "need 1 <= m <= n(n+1)/2, got n = {n}, m = {m}"
        )));
    }
    let mut rng = SeedTree::new(seed).stream("instance", 0);
    let mut mats = Vec::with_capacity(m);
    while mats.len() < m {
        let cand = random_unit_spectral_sym(n, &mut rng);
        mats.push(cand);
        let g = DMatrix::from_fn(mats.len(), mats.len(), |k, l| mats[k].dot(&mats[l]));
        if g.singular_values().min() <= GRAM_TOLERANCE {
            mats.pop();
        }
    }
    let q = random_orthogonal(n, &mut rng);
    let eig: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..1.5)).collect();
    let y0 = SymMatrix::symmetrize(&(&q * DMatrix::from_diagonal(&DVector::from_vec(eig)) * q.transpose()));
    let s0 = inverse_pd(&y0)?;
    let x0 = DVector::from_fn(m, |_, _| rng.random_range(-0.5..0.5) / (m as f64).sqrt());
    let (mut x0, mut s0, mut y0) = (x0, s0, y0);
    let bn = spectral_norm(&(&combine(&mats, &x0, n) - &s0));
    if bn > 1.0 {
        x0 /= bn;
        s0 = s0.scale(1.0 / bn);
        y0 = y0.scale(bn);
    }
    // keep the stored B exactly consistent with the seeds
    let b = SymMatrix::symmetrize(&(combine(&mats, &x0, n).as_matrix() - s0.as_matrix()));
    let c = y0.clone();
    SdpInstance::new(mats, b, c, Some(x0), Some(y0))
}

fn combine(mats: &[SymMatrix], x: &DVector<f64>, n: usize) -> SymMatrix {
    let mut out = DMatrix::zeros(n, n);
    for (k, a) in mats.iter().enumerate() {
        out += a.as_matrix() * x[k];
    }
    SymMatrix::symmetrize(&out)
}

/// Simple weighted undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v, w) in &edges {
            if u == v {
                return Err(Error::InvalidInput(format!("self loop at vertex {u}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) has non-finite weight")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(WeightedGraph { n, edges })
    }

    /// Parses `u v [w]` lines (0-based vertices, weight defaults to 1).
    pub fn parse(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |message: String| Error::Parse { line: ln + 1, message };
            if toks.len() < 2 || toks.len() > 3 {
                return Err(err(format!("expected `u v [w]`, got `{line}`")));
            }
            let u = toks[0].parse().map_err(|_| err(format!("bad vertex `{}`", toks[0])))?;
            let v = toks[1].parse().map_err(|_| err(format!("bad vertex `{}`", toks[1])))?;
            let w = match toks.get(2) {
                Some(t) => t.parse().map_err(|_| err(format!("bad weight `{t}`")))?,
                None => 1.0,
            };
            edges.push((u, v, w));
        }
        WeightedGraph::new(edges)
    }

    pub fn laplacian(&self) -> SymMatrix {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            l[(u, u)] += w;
            l[(v, v)] += w;
            l[(u, v)] -= w;
            l[(v, u)] -= w;
        }
        SymMatrix::new(l).expect("laplacian is symmetric")
    }

    /// Exhaustive maximum cut, for small graphs.
    pub fn brute_force_max_cut(&self) -> f64 {
        assert!(self.n <= 24, "brute force is exponential in n");
        (0u32..(1 << self.n))
            .map(|mask| {
                self.edges
                    .iter()
                    .filter(|&&(u, v, _)| ((mask >> u) & 1) != ((mask >> v) & 1))
                    .map(|e| e.2)
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// MAXCUT relaxation `max Tr(L/4 · Y)` s.t. `Y_kk = 1`, `Y ⪰ 0`.
///
/// `A⁽ᵏ⁾ = e_k e_kᵀ`, `B = L/4`, `C = I`. The seed is `Y₀ = I` and
/// `S₀ = tI − L/4` with `t` chosen so that `d(S₀, I, ν₀) = 0.05`.
pub fn generate_maxcut_sdp(graph: &WeightedGraph) -> Result<SdpInstance> {
    if graph.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = graph.n;
    let b = graph.laplacian().scale(0.25);
    let mats: Vec<SymMatrix> = (0..n)
        .map(|k| {
            let mut d = vec![0.0; n];
            d[k] = 1.0;
            SymMatrix::from_diagonal(&d)
        })
        .collect();
    let mean = b.trace() / n as f64;
    let dev = (b.as_matrix() - DMatrix::identity(n, n) * mean).norm();
    let nu0 = (dev / 0.05).max(1.0);
    let t = nu0 + mean;
    let x0 = DVector::from_element(n, t);
    SdpInstance::new(mats, b, SymMatrix::identity(n), Some(x0), Some(SymMatrix::identity(n)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpInstance {
    constraint_vecs: Vec<DVector<f64>>,
    rhs_vec: DVector<f64>,
    cost: DVector<f64>,
    dual_anchor: DVector<f64>,
    seed_x: Option<DVector<f64>>,
    seed_y: Option<DVector<f64>>,
}

impl LpInstance {
    /// Builds an LP `min cᵀx s.t. Σ xᵢaᵢ ≥ b`. The dual anchor is `seed_y`
    /// when present, otherwise the minimum-norm solution of `⟨a_k, y⟩ = c_k`.
    pub fn new(
        constraint_vecs: Vec<DVector<f64>>,
        rhs_vec: DVector<f64>,
        cost: DVector<f64>,
        seed_x: Option<DVector<f64>>,
        seed_y: Option<DVector<f64>>,
    ) -> Result<Self> {
        let n = rhs_vec.len();
        let m = constraint_vecs.len();
        if n == 0 || m == 0 || m > n {
            return Err(Error::DimensionMismatch(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
        }
        if cost.len() != m || constraint_vecs.iter().any(|a| a.len() != n) {
            return Err(Error::DimensionMismatch("LP vectors have inconsistent lengths".into()));
        }
        let amat = DMatrix::from_fn(m, n, |k, i| constraint_vecs[k][i]);
        let gram = &amat * amat.transpose();
        let sigma_min = gram.singular_values().min();
        if sigma_min <= GRAM_TOLERANCE {
            return Err(Error::DependentConstraints { sigma_min });
        }
        let dual_anchor = match &seed_y {
            Some(y) => {
                if y.len() != n {
                    return Err(Error::DimensionMismatch("seed y has the wrong length".into()));
                }
                y.clone()
            }
            None => {
                let w = gram
                    .clone()
                    .lu()
                    .solve(&cost)
                    .ok_or(Error::DependentConstraints { sigma_min })?;
                amat.transpose() * w
            }
        };
        if let Some(x) = &seed_x {
            if x.len() != m {
                return Err(Error::DimensionMismatch("seed x has the wrong length".into()));
            }
        }
        Ok(LpInstance {
            constraint_vecs,
            rhs_vec,
            cost,
            dual_anchor,
            seed_x,
            seed_y,
        })
    }

    pub fn n(&self) -> usize {
        self.rhs_vec.len()
    }

    pub fn m(&self) -> usize {
        self.constraint_vecs.len()
    }

    pub fn constraint_vecs(&self) -> &[DVector<f64>] {
        &self.constraint_vecs
    }

    pub fn rhs_vec(&self) -> &DVector<f64> {
        &self.rhs_vec
    }

    pub fn cost(&self) -> &DVector<f64> {
        &self.cost
    }

    pub fn dual_anchor(&self) -> &DVector<f64> {
        &self.dual_anchor
    }

    pub fn seed_x(&self) -> Option<&DVector<f64>> {
        self.seed_x.as_ref()
    }

    pub fn seed_y(&self) -> Option<&DVector<f64>> {
        self.seed_y.as_ref()
    }

    /// `m × n` matrix with rows `a_kᵀ`.
    pub fn constraint_rows(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m(), self.n(), |k, i| self.constraint_vecs[k][i])
    }

    pub fn combine(&self, x: &DVector<f64>) -> DVector<f64> {
        self.constraint_rows().transpose() * x
    }

    pub fn seed_pair(&self) -> Option<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        let x = self.seed_x.clone()?;
        let y = self.seed_y.clone()?;
        let s = self.combine(&x) - &self.rhs_vec;
        Some((x, s, y))
    }

    pub fn validate_seeds(&self) -> Result<()> {
        let (_, s, y) = self
            .seed_pair()
            .ok_or_else(|| Error::NoFeasibleSeed("instance carries no seed pair".into()))?;
        if s.iter().any(|v| *v <= 0.0) {
            return Err(Error::NoFeasibleSeed("seed s0 is not entrywise positive".into()));
        }
        if y.iter().any(|v| *v <= 0.0) {
            return Err(Error::NoFeasibleSeed("seed y0 is not entrywise positive".into()));
        }
        let resid = self.dual_violation(&y);
        if resid > 1e-8 * (1.0 + self.cost.norm()) {
            return Err(Error::NoFeasibleSeed(format!("seed y0 violates <a_k, y> = c_k by {resid:e}")));
        }
        Ok(())
    }

    pub fn dual_violation(&self, y: &DVector<f64>) -> f64 {
        (self.constraint_rows() * y - &self.cost).norm()
    }

    /// `min_z ‖v − Σ z_k a_k‖₂`.
    pub fn span_residual(&self, v: &DVector<f64>) -> f64 {
        let at = self.constraint_rows().transpose();
        let q = at.qr().q();
        (v - &q * (q.transpose() * v)).norm()
    }
}

/// Random LP with `‖a_k‖_∞ ≤ 1`, `‖b‖_∞ ≤ 1` and an on-path seed
/// (`s₀ ⊙ y₀ = 1`).
pub fn generate_random_lp(n: usize, m: usize, seed: u64) -> Result<LpInstance> {
    if n == 0 || m == 0 || m > n {
        return Err(Error::DimensionMismatch(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    let mut rng = SeedTree::new(seed).stream("lp-instance", 0);
    let vecs: Vec<DVector<f64>> = (0..m)
        .map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)))
        .collect();
    let mut y0 = DVector::from_fn(n, |_, _| rng.random_range(1.0..1.5));
    let mut x0 = DVector::from_fn(m, |_, _| rng.random_range(-0.5..0.5) / (m as f64).sqrt());
    let amat = DMatrix::from_fn(m, n, |k, i| vecs[k][i]);
    let mut s0 = y0.map(|v| 1.0 / v);
    let b = amat.transpose() * &x0 - &s0;
    let bn = b.amax();
    if bn > 1.0 {
        x0 /= bn;
        s0 /= bn;
        y0 *= bn;
    }
    let b = amat.transpose() * &x0 - &s0;
    let c = &amat * &y0;
    LpInstance::new(vecs, b, c, Some(x0), Some(y0))
}

/// The LP as a diagonal SDP: `A⁽ᵏ⁾ = diag(a_k)`, `B = diag(b)`, `C = diag(anchor)`.
pub fn lp_embed(lp: &LpInstance) -> SdpInstance {
    let diag = |v: &DVector<f64>| SymMatrix::from_diagonal(v.as_slice());
    let mats = lp.constraint_vecs.iter().map(diag).collect();
    let seed_y = lp.seed_y.as_ref().map(diag);
    SdpInstance::new(
        mats,
        diag(&lp.rhs_vec),
        diag(&lp.dual_anchor),
        lp.seed_x.clone(),
        seed_y,
    )
    .expect("diagonal embedding of a valid LP is a valid SDP")
}

/// LP iterate: entrywise positive `s`, `y` with `ν = ⟨s, y⟩ / n`.
#[derive(Clone, Debug)]
pub struct LpState {
    pub s: DVector<f64>,
    pub y: DVector<f64>,
    pub x: DVector<f64>,
    pub nu: f64,
    pub drift_primal: DVector<f64>,
    pub drift_dual: DVector<f64>,
}

impl LpState {
    pub fn new(s: DVector<f64>, y: DVector<f64>, x: DVector<f64>) -> Result<Self> {
        if s.len() != y.len() {
            return Err(Error::DimensionMismatch("s and y differ in length".into()));
        }
        let n = s.len();
        let mut st = LpState {
            s,
            y,
            x,
            nu: 0.0,
            drift_primal: DVector::zeros(n),
            drift_dual: DVector::zeros(n),
        };
        st.refresh()?;
        Ok(st)
    }

    pub fn refresh(&mut self) -> Result<()> {
        for (what, v) in [("s", &self.s), ("y", &self.y)] {
            let min = v.min();
            if !(min > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    what: if what == "s" { "s" } else { "y" },
                    min_eigenvalue: min,
                });
            }
        }
        self.nu = self.s.dot(&self.y) / self.s.len() as f64;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn gap(&self) -> f64 {
        self.s.dot(&self.y)
    }

    pub fn drift_norm(&self) -> f64 {
        (self.drift_primal.norm_squared() + self.drift_dual.norm_squared()).sqrt()
    }

    /// `√Σ(sᵢyᵢ/ν − 1)²`, the diagonal case of the central-path distance.
    pub fn central_path_distance(&self) -> f64 {
        self.s
            .iter()
            .zip(self.y.iter())
            .map(|(s, y)| (1.0 - s * y / self.nu).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// The matching diagonal SDP iterate.
    pub fn embed(&self) -> Result<IterateState> {
        IterateState::new(
            SymMatrix::from_diagonal(self.s.as_slice()),
            SymMatrix::from_diagonal(self.y.as_slice()),
            self.x.clone(),
        )
    }
}

pub fn lp_dual_residual(state: &LpState, lp: &LpInstance) -> f64 {
    lp.dual_violation(&state.y)
}

pub fn lp_primal_residual(state: &LpState, lp: &LpInstance) -> f64 {
    lp.span_residual(&(&state.s + lp.rhs_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matspace::{central_path_distance, is_positive_definite};

    fn seed_state(inst: &SdpInstance) -> IterateState {
        let (x, s, y) = inst.seed_pair().unwrap();
        IterateState::new(s, y, x).unwrap()
    }

    #[test]
    fn generator_satisfies_invariants() {
        let inst = generate_random_sdp(4, 3, 7).unwrap();
        assert_eq!((inst.n(), inst.m()), (4, 3));
        inst.validate_seeds().unwrap();
        for (k, a) in inst.constraint_mats().iter().enumerate() {
            assert!(spectral_norm(a) <= 1.0 + 1e-12);
            assert!((a.dot(inst.dual_anchor()) - inst.cost_vec()[k]).abs() < 1e-10);
        }
        assert!(spectral_norm(inst.rhs_mat()) <= 1.0 + 1e-9);
        let st = seed_state(&inst);
        assert!(is_positive_definite(&st.s) && is_positive_definite(&st.y));
        assert!(dual_residual(&st, &inst) <= 1e-10);
        assert!(central_path_distance(&st.s, &st.y, st.nu).unwrap() < 1e-8);
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(generate_random_sdp(5, 6, 99).unwrap(), generate_random_sdp(5, 6, 99).unwrap());
        assert_ne!(generate_random_sdp(5, 6, 99).unwrap(), generate_random_sdp(5, 6, 100).unwrap());
    }

    #[test]
    fn generator_rejects_too_many_constraints() {
        assert!(matches!(generate_random_sdp(3, 7, 1), Err(Error::DimensionMismatch(_))));
        assert!(generate_random_sdp(3, 6, 1).is_ok());
    }

    #[test]
    fn duality_gap_examples() {
        let i3 = SymMatrix::identity(3);
        let st = IterateState::new(i3.clone(), i3, DVector::zeros(1)).unwrap();
        assert_eq!(duality_gap(&st), 3.0);

        let inst = generate_random_sdp(5, 4, 3).unwrap();
        let st = seed_state(&inst);
        // seeds sit on the central path with ν = 1
        assert!((duality_gap(&st) - st.nu * 5.0).abs() < 1e-8);
        let brute: f64 = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .map(|(i, j)| st.s[(i, j)] * st.y[(i, j)])
            .sum();
        assert!((duality_gap(&st) - brute).abs() < 1e-12);
        let checked = duality_gap_checked(&st, &inst).unwrap();
        assert!((checked - objective_gap(&st, &inst)).abs() <= 1e-6 * (1.0 + checked));
    }

    #[test]
    fn dual_residual_examples() {
        let inst = generate_random_sdp(4, 3, 11).unwrap();
        let mut st = seed_state(&inst);
        st.y = inst.dual_anchor().clone();
        assert!(dual_residual(&st, &inst) <= 1e-10);
        st.y = inst.dual_anchor() + &inst.constraint_mats()[0];
        let g = inst.gram();
        let expected = g.column(0).norm();
        assert!((dual_residual(&st, &inst) - expected).abs() < 1e-12);
    }

    #[test]
    fn primal_residual_examples() {
        let inst = generate_random_sdp(4, 3, 12).unwrap();
        let st = seed_state(&inst);
        assert!(primal_residual(&st, &inst) < 1e-8);
        // a unit direction orthogonal to L
        let (_, perp) = inst.split_span(&SymMatrix::from_upper_fn(4, |i, j| (i * 4 + j) as f64 * 0.1 + 0.3));
        let e = perp.scale(0.01 / perp.norm());
        let mut shifted = st.clone();
        shifted.s = &st.s + &e;
        assert!((primal_residual(&shifted, &inst) - 0.01).abs() < 1e-8);
    }

    #[test]
    fn maxcut_instances() {
        let tri = WeightedGraph::new(vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let inst = generate_maxcut_sdp(&tri).unwrap();
        assert_eq!((inst.n(), inst.m()), (3, 3));
        inst.validate_seeds().unwrap();
        let st = seed_state(&inst);
        assert!(central_path_distance(&st.s, &st.y, st.nu).unwrap() <= 0.05 + 1e-12);
        assert_eq!(tri.brute_force_max_cut(), 2.0);
        assert_eq!(generate_maxcut_sdp(&WeightedGraph::new(vec![]).unwrap()), Err(Error::EmptyGraph));
        assert!(WeightedGraph::new(vec![(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::parse("0 1\n1 0 2\n").is_err());
    }

    #[test]
    fn lp_generator_and_embedding() {
        let lp = generate_random_lp(5, 3, 4).unwrap();
        lp.validate_seeds().unwrap();
        let sdp = lp_embed(&lp);
        sdp.validate_seeds().unwrap();
        let (x, s, y) = lp.seed_pair().unwrap();
        let lst = LpState::new(s, y, x).unwrap();
        let est = lst.embed().unwrap();
        assert!((lst.gap() - duality_gap(&est)).abs() < 1e-10);
        assert!(lst.central_path_distance() < 1e-10);

        let lp1 = LpInstance::new(
            vec![DVector::from_element(1, 1.0)],
            DVector::from_element(1, -1.0),
            DVector::from_element(1, 1.0),
            Some(DVector::from_element(1, 0.0)),
            Some(DVector::from_element(1, 1.0)),
        )
        .unwrap();
        assert_eq!(lp_embed(&lp1).n(), 1);
    }

    #[test]
    fn lp_anchor_defaults_to_min_norm() {
        let lp = generate_random_lp(6, 2, 8).unwrap();
        let bare = LpInstance::new(
            lp.constraint_vecs().to_vec(),
            lp.rhs_vec().clone(),
            lp.cost().clone(),
            None,
            None,
        )
        .unwrap();
        assert!(bare.dual_violation(bare.dual_anchor()) < 1e-10);
    }
}
