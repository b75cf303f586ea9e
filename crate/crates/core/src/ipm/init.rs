//! Starting points.
//!
//! With a seed pair the iterate is taken as is. With only a strictly
//! feasible primal point `T ∈ L − B`, the pair `(T, T⁻¹)` is on the central
//! path (at `ν = 1`) of the auxiliary problem whose dual anchor is `T⁻¹`.
//! Following that path towards `ν → ∞` pulls `S` to the analytic centre,
//! where `S⁻¹ ⊥ L`; then `Y = C + ν·Π_{L⊥}(S⁻¹)` is dual feasible for the
//! real problem and close to the central path.
//!
//! The analytic centre exists only when the primal slice `{S ⪰ 0, S ∈ L − B}`
//! is bounded, i.e. when `L⊥` contains a positive definite matrix. Otherwise
//! the inflation phase gives up with [`Error::NoFeasibleSeed`] once its step
//! budget is spent.

use crate::error::{Error, Result};
use crate::instance::{IterateState, SdpInstance};
use crate::matspace::{
    central_path_distance, check_pd_spectrum, inverse_pd, require_pd, SymMatrix,
};
use crate::newton::solve_exact;

use super::{coords_of, RunConfig};

/// Maximum number of inflation steps for dimension `n`:
/// `⌈100·√n·ln(n + 1)⌉`.
pub fn inflation_budget(n: usize) -> usize {
    (100.0 * (n as f64).sqrt() * ((n + 1) as f64).ln()).ceil() as usize
}

/// Seeded instances start from their seeds; instances with only a primal
/// seed go through the inflation phase.
pub fn find_initial_point(inst: &SdpInstance, cfg: &RunConfig) -> Result<IterateState> {
    if let Some((x, s, y)) = inst.seed_pair() {
        inst.validate_seeds()?;
        let state = IterateState::new(s, y, x)?;
        let d = central_path_distance(&state.s, &state.y, state.nu)?;
        if d > cfg.eta + super::AUDIT_SLACK {
            return Err(Error::PathDistanceViolation {
                distance: d,
                eta: cfg.eta,
            });
        }
        return Ok(state);
    }
    if let Some(x) = inst.seed_primal_x() {
        let t = &inst.combine(x) - inst.rhs_mat();
        return initial_point_from_interior(inst, &t, cfg);
    }
    Err(Error::NoFeasibleSeed("instance has neither a seed pair nor a primal seed".into()))
}

fn pd_or_seed_error(s: &SymMatrix, what: &'static str) -> Result<()> {
    require_pd(s, what).map(|_| ()).map_err(|e| Error::NoFeasibleSeed(e.to_string()))
}

/// Inflation phase from a strictly feasible `T ∈ L − B`.
pub fn initial_point_from_interior(inst: &SdpInstance, t: &SymMatrix, cfg: &RunConfig) -> Result<IterateState> {
    pd_or_seed_error(t, "interior point T")?;
    let (x, resid) = inst.split_span(&(t + inst.rhs_mat()));
    if resid.norm() > 1e-8 * (1.0 + t.norm()) {
        return Err(Error::NoFeasibleSeed(format!(
            "T is not in L - B (residual {:e})",
            resid.norm()
        )));
    }
    let t_inv = inverse_pd(t)?;
    let aux = inst.with_dual_anchor(t_inv.clone())?;
    let mut state = IterateState::new(t.clone(), t_inv, x)?;
    let n = inst.n();
    let grow = 1.0 + cfg.chi / (n as f64).sqrt();
    for _ in 0..=inflation_budget(n) {
        if let Some(anchored) = try_anchor(inst, &state, cfg.eta / 2.0)? {
            return Ok(anchored);
        }
        let sol = solve_exact(&state, &aux, grow * state.nu)?;
        state.s = &state.s + &sol.ds;
        state.y = &state.y + &sol.dy;
        state.x = &state.x + &sol.dx;
        state.refresh()?;
    }
    Err(Error::NoFeasibleSeed(format!(
        "inflation did not reach a point within {} of the central path in {} steps",
        cfg.eta / 2.0,
        inflation_budget(n)
    )))
}

/// `Y = C + ν_a·Π_{L⊥}(S⁻¹)` for growing `ν_a`, accepted once `Y ≻ 0` and
/// `d(S, Y, Tr(SY)/n) ≤ tol`.
fn try_anchor(inst: &SdpInstance, state: &IterateState, tol: f64) -> Result<Option<IterateState>> {
    let s_inv = inverse_pd(&state.s)?;
    let (_, perp) = inst.split_span(&s_inv);
    if perp.norm() <= 1e-8 * s_inv.norm() {
        return Ok(None);
    }
    let n = state.n() as f64;
    let mut prev = f64::INFINITY;
    let mut scale = state.nu;
    for _ in 0..32 {
        let y = inst.dual_anchor() + &perp.scale(scale);
        scale *= 2.0;
        if check_pd_spectrum(&y.spectrum(), "Y").is_err() {
            continue;
        }
        let nu = state.s.dot(&y) / n;
        let d = central_path_distance(&state.s, &y, nu)?;
        if d <= tol && inst.dual_violation(&y) <= 1e-8 * (1.0 + y.norm()) {
            let x = coords_of(inst, &state.s);
            return Ok(Some(IterateState::new(state.s.clone(), y, x)?));
        }
        if d >= prev {
            break;
        }
        prev = d;
    }
    Ok(None)
}

/// Follows the central path from `start` to the point with parameter
/// `nu_target`, then applies centring steps at that fixed `ν`.
pub fn drive_to_nu(
    inst: &SdpInstance,
    start: &IterateState,
    nu_target: f64,
    cfg: &RunConfig,
) -> Result<IterateState> {
    if !(nu_target > 0.0) {
        return Err(Error::InvalidInput("target nu must be positive".into()));
    }
    let n = inst.n();
    let rate = cfg.chi / (n as f64).sqrt();
    let mut state = start.clone();
    let apply = |state: &mut IterateState, nu_next: f64| -> Result<()> {
        let sol = solve_exact(state, inst, nu_next)?;
        state.s = &state.s + &sol.ds;
        state.y = &state.y + &sol.dy;
        state.x = &state.x + &sol.dx;
        state.refresh()
    };
    loop {
        let next = if nu_target < state.nu {
            (1.0 - rate) * state.nu
        } else {
            (1.0 + rate) * state.nu
        };
        let overshoots = (nu_target < state.nu && next <= nu_target) || (nu_target >= state.nu && next >= nu_target);
        if overshoots {
            break;
        }
        apply(&mut state, next)?;
    }
    for _ in 0..50 {
        let before = (state.s.as_matrix() * state.y.as_matrix()
            - nalgebra::DMatrix::identity(n, n) * nu_target)
            .norm();
        if before <= 1e-13 * nu_target * n as f64 {
            break;
        }
        apply(&mut state, nu_target)?;
        let after = (state.s.as_matrix() * state.y.as_matrix()
            - nalgebra::DMatrix::identity(n, n) * nu_target)
            .norm();
        if after >= before {
            break;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_random_sdp, SdpInstance};
    use nalgebra::DVector;

    fn cfg() -> RunConfig {
        RunConfig {
            diagnostics: false,
            ..RunConfig::default()
        }
    }

    #[test]
    fn seeded_instances_start_on_the_path() {
        let inst = generate_random_sdp(5, 6, 1).unwrap();
        let st = find_initial_point(&inst, &cfg()).unwrap();
        assert!(central_path_distance(&st.s, &st.y, st.nu).unwrap() <= 0.1);
    }

    #[test]
    fn infeasible_seed_is_rejected() {
        let inst = generate_random_sdp(3, 2, 2).unwrap();
        let x = inst.seed_primal_x().unwrap().clone();
        let y = inst.seed_dual_y().unwrap().clone();
        // make S₀ = Σ x A − B indefinite by shifting B
        let big = SdpInstance::new(
            inst.constraint_mats().to_vec(),
            inst.rhs_mat() + &SymMatrix::identity(3).scale(100.0),
            inst.dual_anchor().clone(),
            Some(x),
            Some(y),
        )
        .unwrap();
        assert!(matches!(find_initial_point(&big, &cfg()), Err(Error::NoFeasibleSeed(_))));
    }

    #[test]
    fn interior_point_with_matching_anchor_is_centred() {
        let inst = generate_random_sdp(4, 3, 3).unwrap();
        let (_, t, _) = inst.seed_pair().unwrap();
        let t_inv = inverse_pd(&t).unwrap();
        let aux = inst.with_dual_anchor(t_inv.clone()).unwrap();
        let st = IterateState::new(t.clone(), t_inv, DVector::zeros(3)).unwrap();
        assert!(central_path_distance(&st.s, &st.y, st.nu).unwrap() < 1e-10);
        assert!((st.nu - 1.0).abs() < 1e-12);
        let found = initial_point_from_interior(&aux, &t, &cfg()).unwrap();
        assert!(central_path_distance(&found.s, &found.y, found.nu).unwrap() <= 0.05);
    }

    #[test]
    fn inflation_from_primal_seed_only() {
        // traceless constraints put I in L⊥, so the primal slice is bounded
        let base = generate_random_sdp(4, 5, 4).unwrap();
        let mats: Vec<SymMatrix> = base
            .constraint_mats()
            .iter()
            .map(|a| a - &SymMatrix::identity(4).scale(a.trace() / 4.0))
            .collect();
        let x = DVector::from_vec(vec![0.3, -0.2, 0.1, 0.4, -0.1]);
        let t = SymMatrix::from_diagonal(&[1.0, 2.0, 0.5, 1.5]);
        let lin = SdpInstance::new(mats.clone(), t.clone(), SymMatrix::identity(4), None, None)
            .unwrap()
            .combine(&x);
        let bare = SdpInstance::new(mats, &lin - &t, SymMatrix::identity(4).scale(0.3), Some(x), None).unwrap();
        let st = find_initial_point(&bare, &cfg()).unwrap();
        assert!(central_path_distance(&st.s, &st.y, st.nu).unwrap() <= 0.05);
        assert!(bare.dual_violation(&st.y) < 1e-8 * (1.0 + st.y.norm()));
        assert!(crate::instance::primal_residual(&st, &bare) < 1e-8 * (1.0 + st.s.norm()));
    }

    #[test]
    fn inflation_gives_up_on_unbounded_slices() {
        // S = (x + 1)I is feasible for every x ≥ −1
        let id = SymMatrix::identity(3);
        let c = SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let unb = SdpInstance::new(vec![id.clone()], id.scale(-1.0), c, Some(DVector::zeros(1)), None).unwrap();
        let r = find_initial_point(&unb, &cfg());
        assert!(matches!(r, Err(Error::NoFeasibleSeed(_))), "{r:?}");
    }

    #[test]
    fn drive_to_fixed_nu_centres() {
        let inst = generate_random_sdp(4, 4, 5).unwrap();
        let st = find_initial_point(&inst, &cfg()).unwrap();
        let target = 0.05 * st.nu;
        let out = drive_to_nu(&inst, &st, target, &cfg()).unwrap();
        let dev = (out.s.as_matrix() * out.y.as_matrix() - nalgebra::DMatrix::identity(4, 4) * target).norm();
        assert!(dev <= 1e-4 * target * 4.0, "{dev}");
    }
}
