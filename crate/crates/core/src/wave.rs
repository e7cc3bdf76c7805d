//! Local travelling waves of the regularised equation, built by shooting.
//!
//! A wave `u(x,t) = w(x − ct)` solves
//!
//! ```text
//! −c w′ = (ε + Φ_ε(w)²) w″ + Φ_ε(w)(1 − Φ_ε(w)²)√(ε + Φ_ε(w)²).
//! ```
//!
//! Starting from `w(0) = 0, w′(0) = (A+B)/2` with `c = (B−A)/(2 log ε)` the
//! right branch approaches the closed-form state with slope `B` and the left
//! branch the one with slope `A`. While `w` is monotone the same wave can be
//! written in the phase plane as `p(w) = w′`, which gives an independent
//! route to the profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, Flow, StepControl};
use crate::transform::EpsModel;

/// Slope level at which a branch is considered to have stopped increasing.
pub const DEFAULT_SLOPE_FLOOR: f64 = 1e-6;
pub const DEFAULT_X_MAX: f64 = 6.0;
pub const DEFAULT_STEP_TOL: f64 = 1e-9;
pub const DEFAULT_STEP_INIT: f64 = 1e-6;
/// Upper bound on the spacing of stored profile nodes.
pub const DEFAULT_MAX_STEP: f64 = 1e-2;

/// Interface velocity `c_ε = (B − A)/(2 log ε)` of the merged wave.
pub fn velocity(model: &EpsModel, a: f64, b: f64) -> Result<f64> {
    let eps = model.eps();
    if eps >= 1.0 {
        return Err(Error::DomainError {
            what: "wave velocity (requires eps < 1)",
            x: eps,
        });
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "slopes must be positive, got A = {a}, B = {b}"
        )));
    }
    Ok((b - a) / (2.0 * eps.ln()))
}

/// Parameters of a shooting run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingSpec {
    pub model: EpsModel,
    pub a_slope: f64,
    pub b_slope: f64,
    pub x_max: f64,
    pub step_init: f64,
    pub step_tol: f64,
    pub max_step: f64,
    pub slope_floor: f64,
    /// `|w|` beyond which a branch stops with `HeightExceeded`.
    pub height_cap: f64,
}

impl ShootingSpec {
    pub fn new(model: EpsModel, a_slope: f64, b_slope: f64) -> Result<Self> {
        if !(a_slope > 0.0 && b_slope > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "slopes must be positive, got A = {a_slope}, B = {b_slope}"
            )));
        }
        Ok(Self {
            model,
            a_slope,
            b_slope,
            x_max: DEFAULT_X_MAX,
            step_init: DEFAULT_STEP_INIT,
            step_tol: DEFAULT_STEP_TOL,
            max_step: DEFAULT_MAX_STEP,
            slope_floor: DEFAULT_SLOPE_FLOOR,
            height_cap: 10.0 * model.u1(),
        })
    }

    pub fn with_x_max(mut self, x_max: f64) -> Self {
        self.x_max = x_max;
        self
    }

    pub fn with_step_tol(mut self, tol: f64) -> Self {
        self.step_tol = tol;
        self
    }

    pub fn with_height_cap(mut self, cap: f64) -> Self {
        self.height_cap = cap;
        self
    }

    /// Shared initial slope `(A + B)/2` of the two branches.
    pub fn shoot_slope(&self) -> f64 {
        0.5 * (self.a_slope + self.b_slope)
    }

    pub fn velocity(&self) -> Result<f64> {
        velocity(&self.model, self.a_slope, self.b_slope)
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_max >= 0.0
            && self.step_init > 0.0
            && self.step_tol > 0.0
            && self.max_step > 0.0)
        {
            return Err(Error::InvalidParameter(
                "x_max must be nonnegative and step parameters positive".into(),
            ));
        }
        Ok(())
    }
}

/// Why a branch stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ReachedHorizon,
    /// The slope dropped to the floor; the branch was then continued past
    /// its crest until it returned to zero or reached the horizon.
    SlopeVanished,
    HeightExceeded,
}

/// End state of one branch of a wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchEnd {
    pub reason: Termination,
    /// Signed position of the last node.
    pub x_end: f64,
    /// Signed position where the slope first reached the floor.
    pub slope_vanished_at: Option<f64>,
}

/// A sampled wave profile, pinned to `w(0) = 0` at the node `x = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub xs: Vec<f64>,
    pub ws: Vec<f64>,
    /// `w′` at each node.
    pub slopes: Vec<f64>,
    pub velocity: f64,
    pub left: Option<BranchEnd>,
    pub right: Option<BranchEnd>,
}

impl WaveProfile {
    /// Termination of the branch this profile was shot along; for merged
    /// waves the right branch.
    pub fn terminated_reason(&self) -> Termination {
        self.right
            .or(self.left)
            .map(|b| b.reason)
            .unwrap_or(Termination::ReachedHorizon)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Index of the origin node.
    pub fn origin_index(&self) -> usize {
        self.xs
            .iter()
            .position(|&x| x == 0.0)
            .expect("profile contains the origin")
    }

    /// Range `[x_lo, x_hi]` on which the profile is strictly increasing.
    pub fn monotone_range(&self) -> (f64, f64) {
        let (lo, hi) = self.x_range();
        let lo = self.left.and_then(|b| b.slope_vanished_at).unwrap_or(lo);
        let hi = self.right.and_then(|b| b.slope_vanished_at).unwrap_or(hi);
        (lo, hi)
    }

    /// Cubic Hermite interpolation of `w` using the stored slopes.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return Err(Error::DomainError {
                what: "wave profile",
                x,
            });
        }
        let k = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(k) => return Ok(self.ws[k]),
            Err(k) => k - 1,
        };
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        Ok(hermite(
            x0,
            x1,
            self.ws[k],
            self.ws[k + 1],
            self.slopes[k],
            self.slopes[k + 1],
            x,
        ))
    }

    pub fn sample(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

struct Outward {
    s: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
    reason: Termination,
    slope_vanished_at: Option<f64>,
}

/// Integrate `g″ = (−c g′ − R(g))/D(g)` from `g(0) = 0, g′(0) = slope0` for
/// `s ∈ [0, x_max]`. The right branch is `w = g`; the left branch is the
/// mirror image of the same problem with `c` replaced by `−c`.
fn shoot_outward(spec: &ShootingSpec, c: f64, slope0: f64) -> Result<Outward> {
    spec.validate()?;
    if !(slope0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "initial slope must be positive, got {slope0}"
        )));
    }
    let model = spec.model;
    let mut out = Outward {
        s: vec![0.0],
        g: vec![0.0],
        dg: vec![slope0],
        reason: Termination::ReachedHorizon,
        slope_vanished_at: None,
    };
    if spec.x_max == 0.0 {
        return Ok(out);
    }

    let mut phi_guess = 0.0_f64;
    let mut newton_failure: Option<Error> = None;
    let rhs = |_s: f64, y: &[f64; 2]| -> [f64; 2] {
        let phi = match model.phi_from_u_with_guess(y[0], phi_guess.abs()) {
            Ok(p) => p,
            Err(e) => {
                newton_failure.get_or_insert(e);
                return [f64::NAN, f64::NAN];
            }
        };
        phi_guess = phi;
        let d = model.diffusivity_from_phi(phi);
        let r = model.reaction_from_phi(phi);
        [y[1], (-c * y[1] - r) / d]
    };

    let ctrl = StepControl {
        rtol: spec.step_tol,
        atol: spec.step_tol,
        h_init: spec.step_init.min(spec.x_max),
        h_max: spec.max_step,
        h_min: 1e-14 * spec.x_max,
    };
    let cap = spec.height_cap;
    let floor = spec.slope_floor;
    let result = integrate(rhs, 0.0, [0.0, slope0], spec.x_max, &ctrl, |s, y, dy| {
        if out.slope_vanished_at.is_some() && y[0] <= 0.0 {
            // back at the nodal level: close the branch at the crossing
            let k = out.s.len() - 1;
            let (s0, g0, d0) = (out.s[k], out.g[k], out.dg[k]);
            let root = hermite_root(s0, s, g0, y[0], d0, y[1]);
            out.s.push(root.0);
            out.g.push(0.0);
            out.dg.push(root.1);
            out.reason = Termination::SlopeVanished;
            return Flow::Stop;
        }
        out.s.push(s);
        out.g.push(y[0]);
        out.dg.push(y[1]);
        let _ = dy;
        if y[0].abs() > cap {
            out.reason = Termination::HeightExceeded;
            return Flow::Stop;
        }
        if out.slope_vanished_at.is_none() && y[1] <= floor {
            out.slope_vanished_at = Some(s);
            out.reason = Termination::SlopeVanished;
        }
        Flow::Continue
    });
    if let Some(e) = newton_failure {
        return Err(e);
    }
    result?;
    Ok(out)
}

/// Zero of the Hermite cubic on `[s0, s1]` (values `g0 > 0 ≥ g1`), found by
/// bisection; returns the crossing and the interpolated slope there.
fn hermite_root(s0: f64, s1: f64, g0: f64, g1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (s0, s1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hermite(s0, s1, g0, g1, d0, d1, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let e = 1e-7 * (s1 - s0);
    let slope = (hermite(s0, s1, g0, g1, d0, d1, (root + e).min(s1))
        - hermite(s0, s1, g0, g1, d0, d1, (root - e).max(s0)))
        / ((root + e).min(s1) - (root - e).max(s0));
    (root, slope)
}

/// Shoot to the right of the interface with velocity `c` and `w′(0) = slope0`.
pub fn shoot_right(spec: &ShootingSpec, c: f64, slope0: f64) -> Result<WaveProfile> {
    let o = shoot_outward(spec, c, slope0)?;
    let end = BranchEnd {
        reason: o.reason,
        x_end: *o.s.last().unwrap(),
        slope_vanished_at: o.slope_vanished_at,
    };
    Ok(WaveProfile {
        xs: o.s,
        ws: o.g,
        slopes: o.dg,
        velocity: c,
        left: None,
        right: Some(end),
    })
}

/// Shoot to the left of the interface; the branch is nonpositive while it
/// is monotone.
pub fn shoot_left(spec: &ShootingSpec, c: f64, slope0: f64) -> Result<WaveProfile> {
    let o = shoot_outward(spec, -c, slope0)?;
    let end = BranchEnd {
        reason: o.reason,
        x_end: -*o.s.last().unwrap(),
        slope_vanished_at: o.slope_vanished_at.map(|s| -s),
    };
    let xs =
        o.s.iter()
            .rev()
            .map(|&s| if s == 0.0 { 0.0 } else { -s })
            .collect();
    let ws = o.g.iter().rev().map(|&g| -g).collect();
    let slopes = o.dg.iter().rev().copied().collect();
    Ok(WaveProfile {
        xs,
        ws,
        slopes,
        velocity: c,
        left: Some(end),
        right: None,
    })
}

/// Merge the two branches with the shared slope `(A+B)/2` and the shared
/// velocity `(B−A)/(2 log ε)` into one wave through the origin.
pub fn build_wave(spec: &ShootingSpec) -> Result<WaveProfile> {
    let c = spec.velocity()?;
    let slope0 = spec.shoot_slope();
    let left = shoot_left(spec, c, slope0)?;
    let right = shoot_right(spec, c, slope0)?;
    let mut xs = left.xs;
    let mut ws = left.ws;
    let mut slopes = left.slopes;
    xs.extend_from_slice(&right.xs[1..]);
    ws.extend_from_slice(&right.ws[1..]);
    slopes.extend_from_slice(&right.slopes[1..]);
    Ok(WaveProfile {
        xs,
        ws,
        slopes,
        velocity: c,
        left: left.left,
        right: right.right,
    })
}

/// A point of the phase-plane trajectory `p(w)`, with the position
/// `x(w) = ∫ dw/p` recovered along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub w: f64,
    pub p: f64,
    pub x: f64,
}

/// Integrate `p′(w) = −c/(ε+Φ²) − Φ(1−Φ²)/(p√(ε+Φ²))` from `p(0) = slope0`
/// up to `w_max` or until `p` drops to the slope floor.
///
/// The right-hand side is finite at `w = 0` but varies on the scale `ε`, so
/// the integration starts at `w = min(1e−8, 1e−2·ε)` with the first-order
/// start value `p = slope0 − c·A_ε(w)`. The first returned point is the
/// exact initial condition `(0, slope0, 0)`.
pub fn phase_shoot(
    model: &EpsModel,
    c: f64,
    slope0: f64,
    w_max: f64,
    step_tol: f64,
) -> Result<Vec<PhasePoint>> {
    if !(slope0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "initial slope must be positive, got {slope0}"
        )));
    }
    let mut out = vec![PhasePoint {
        w: 0.0,
        p: slope0,
        x: 0.0,
    }];
    if !(w_max > 0.0) {
        return Ok(out);
    }
    let w_start = (1e-8_f64).min(1e-2 * model.eps()).min(0.5 * w_max);
    let p_start = slope0 - c * model.a_transform(w_start)?;
    let x_start = w_start / slope0;

    let m = *model;
    let mut phi_guess = 0.0_f64;
    let mut newton_failure: Option<Error> = None;
    let rhs = |w: f64, y: &[f64; 2]| -> [f64; 2] {
        let phi = match m.phi_from_u_with_guess(w, phi_guess.abs()) {
            Ok(p) => p,
            Err(e) => {
                newton_failure.get_or_insert(e);
                return [f64::NAN, f64::NAN];
            }
        };
        phi_guess = phi;
        let d = m.diffusivity_from_phi(phi);
        let p = y[0];
        [-c / d - phi * (1.0 - phi * phi) / (p * d.sqrt()), 1.0 / p]
    };
    let ctrl = StepControl {
        rtol: step_tol,
        atol: step_tol,
        h_init: w_start,
        h_max: DEFAULT_MAX_STEP,
        h_min: 1e-14 * w_max.max(1e-300),
    };
    let result = integrate(rhs, w_start, [p_start, x_start], w_max, &ctrl, |w, y, _| {
        out.push(PhasePoint {
            w,
            p: y[0],
            x: y[1],
        });
        if y[0] <= DEFAULT_SLOPE_FLOOR {
            Flow::Stop
        } else {
            Flow::Continue
        }
    });
    if let Some(e) = newton_failure {
        return Err(e);
    }
    result?;
    Ok(out)
}

/// `q(w) = p(w) + c·A_ε(w)`, the slope with the near-interface drift removed.
pub fn q_diagnostic(model: &EpsModel, c: f64, phase: &[PhasePoint]) -> Result<Vec<(f64, f64)>> {
    if phase.is_empty() {
        return Err(Error::InvalidParameter("phase trajectory is empty".into()));
    }
    phase
        .iter()
        .map(|pt| Ok((pt.w, pt.p + c * model.a_transform(pt.w)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::SteadySpec;
    use approx::assert_relative_eq;

    fn model(eps: f64) -> EpsModel {
        EpsModel::new(eps).unwrap()
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(velocity(&model(1e-3), 1.0, 1.0).unwrap(), 0.0);
        let c = velocity(&model(1e-3), 2.0, 1.0).unwrap();
        assert_relative_eq!(c, -1.0 / (2.0 * 1e-3f64.ln()), max_relative = 1e-15);
        assert!((c - 0.07238).abs() < 1e-5);
        let c = velocity(&model(1e-2), 1.0, 3.0).unwrap();
        assert!((c + 0.21715).abs() < 1e-5);
        assert!(matches!(
            velocity(&model(1.0), 1.0, 2.0),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn right_branch_matches_closed_form_for_unit_slope() {
        let spec = ShootingSpec::new(model(1e-4), 1.0, 1.0)
            .unwrap()
            .with_x_max(3.0);
        let w = shoot_right(&spec, 0.0, 1.0).unwrap();
        let err =
            w.xs.iter()
                .zip(&w.ws)
                .map(|(&x, &v)| (v - (1.0 - (-x).exp())).abs())
                .fold(0.0, f64::max);
        assert!(err <= 0.02, "sup error {err}");
        assert_eq!(w.ws[0], 0.0);
    }

    #[test]
    fn right_branch_with_finite_support_stops_near_its_edge() {
        let spec = ShootingSpec::new(model(1e-2), 0.5, 0.5).unwrap();
        let w = shoot_right(&spec, 0.0, 0.5).unwrap();
        assert_eq!(w.terminated_reason(), Termination::SlopeVanished);
        let end = w.right.unwrap().x_end;
        assert!((end - 3f64.ln()).abs() <= 0.15, "end {end}");
    }

    #[test]
    fn zero_horizon_gives_origin_only() {
        let spec = ShootingSpec::new(model(1e-2), 1.0, 1.0)
            .unwrap()
            .with_x_max(0.0);
        for w in [
            shoot_right(&spec, 0.0, 1.0).unwrap(),
            shoot_left(&spec, 0.0, 1.0).unwrap(),
        ] {
            assert_eq!(w.xs, vec![0.0]);
            assert_eq!(w.ws, vec![0.0]);
            assert_eq!(w.terminated_reason(), Termination::ReachedHorizon);
        }
    }

    #[test]
    fn left_branch_matches_closed_form_for_unit_slope() {
        let spec = ShootingSpec::new(model(1e-4), 1.0, 1.0)
            .unwrap()
            .with_x_max(3.0);
        let w = shoot_left(&spec, 0.0, 1.0).unwrap();
        let err =
            w.xs.iter()
                .zip(&w.ws)
                .map(|(&x, &v)| (v - (x.exp() - 1.0)).abs())
                .fold(0.0, f64::max);
        assert!(err <= 0.02, "sup error {err}");
        assert_eq!(*w.xs.last().unwrap(), 0.0);
        assert!(w.ws.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn left_branch_with_finite_support() {
        let spec = ShootingSpec::new(model(1e-2), 0.5, 0.5).unwrap();
        let w = shoot_left(&spec, 0.0, 0.5).unwrap();
        assert_eq!(w.terminated_reason(), Termination::SlopeVanished);
        let end = w.left.unwrap().x_end;
        assert!((end + 3f64.ln()).abs() <= 0.15, "end {end}");
    }

    /// The merged wave approaches the glued steady state only at the rate
    /// `1/|log ε|`: the slope keeps drifting by `c·A_ε(w)` away from the
    /// interface.
    #[test]
    fn merged_wave_converges_to_steady_state() {
        let target = SteadySpec::new(2.0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for &eps in &[1e-2, 1e-3, 1e-4, 1e-6] {
            let spec = ShootingSpec::new(model(eps), 2.0, 1.0)
                .unwrap()
                .with_x_max(1.5);
            let w = build_wave(&spec).unwrap();
            let err =
                w.xs.iter()
                    .zip(&w.ws)
                    .map(|(&x, &v)| (v - target.w_ab(x)).abs())
                    .fold(0.0, f64::max);
            let scaled = err * eps.ln().abs();
            assert!(err < prev, "eps {eps}: {err} not below {prev}");
            assert!(
                (1.0..=1.4).contains(&scaled),
                "eps {eps}: sup·|log ε| = {scaled}"
            );
            assert!(w.velocity > 0.0);
            assert_eq!(w.ws[w.origin_index()], 0.0);
            prev = err;
        }
    }

    #[test]
    fn symmetric_wave_is_odd() {
        let spec = ShootingSpec::new(model(1e-2), 1.0, 1.0)
            .unwrap()
            .with_x_max(3.0);
        let w = build_wave(&spec).unwrap();
        for &x in &[0.1, 0.7, 1.9, 2.8] {
            assert!((w.eval(x).unwrap() + w.eval(-x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn finite_support_wave_covers_the_limit_interval() {
        let spec = ShootingSpec::new(model(1e-2), 0.5, 0.5).unwrap();
        let w = build_wave(&spec).unwrap();
        assert_eq!(w.left.unwrap().reason, Termination::SlopeVanished);
        assert_eq!(w.right.unwrap().reason, Termination::SlopeVanished);
        let (lo, hi) = w.x_range();
        assert!(lo <= -0.9 * 3f64.ln() && hi >= 0.9 * 3f64.ln());
    }

    #[test]
    fn velocity_sign_follows_slope_order() {
        let m = model(1e-3);
        let fast = build_wave(&ShootingSpec::new(m, 2.0, 1.0).unwrap().with_x_max(1.0)).unwrap();
        let slow = build_wave(&ShootingSpec::new(m, 1.0, 2.0).unwrap().with_x_max(1.0)).unwrap();
        assert!(fast.velocity > 0.0 && slow.velocity < 0.0);
    }

    #[test]
    fn phase_plane_slope_matches_closed_form() {
        let pts = phase_shoot(&model(1e-4), 0.0, 1.0, 0.3, 1e-9).unwrap();
        // 1 − e^{−x} = w  ⇒  w′ = 1 − w
        let at = pts
            .iter()
            .min_by(|a, b| (a.w - 0.25).abs().total_cmp(&(b.w - 0.25).abs()))
            .unwrap();
        assert!((at.p - (1.0 - at.w)).abs() <= 0.02);
    }

    #[test]
    fn phase_shoot_zero_height() {
        let pts = phase_shoot(&model(1e-3), 0.3, 1.5, 0.0, 1e-9).unwrap();
        assert_eq!(
            pts,
            vec![PhasePoint {
                w: 0.0,
                p: 1.5,
                x: 0.0
            }]
        );
    }

    #[test]
    fn phase_slope_relaxes_to_the_outer_slope() {
        let m = model(1e-3);
        let c = velocity(&m, 2.0, 1.0).unwrap();
        let pts = phase_shoot(&m, c, 1.5, 0.05, 1e-9).unwrap();
        let last = pts.last().unwrap();
        assert!((last.w - 0.05).abs() < 1e-12);
        assert!((last.p - 1.0).abs() <= 0.25, "p(0.05) = {}", last.p);

        let q = q_diagnostic(&m, c, &pts).unwrap();
        assert_eq!(q[0], (0.0, 1.5));
        let dev = q
            .iter()
            .skip(1)
            .map(|&(_, v)| (v - 1.5).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 0.2, "max |q − 1.5| = {dev}");
    }

    #[test]
    fn q_equals_p_for_standing_waves() {
        let m = model(1e-2);
        let pts = phase_shoot(&m, 0.0, 1.0, 0.5, 1e-9).unwrap();
        let q = q_diagnostic(&m, 0.0, &pts).unwrap();
        assert!(q.iter().zip(&pts).all(|(&(_, qv), pt)| qv == pt.p));
        assert!(q_diagnostic(&m, 0.0, &[]).is_err());
    }
}
