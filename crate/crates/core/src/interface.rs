//! The free boundary of monotone solutions and the quantities that govern
//! its motion.
//!
//! For a strictly increasing profile the zero level `ζ(t)` and the inverse
//! `X(u, t)` with `u(X(u, t), t) = u` are read off one piecewise cubic per
//! cell, so both agree to rounding. The interface velocity is measured
//! either by differencing `X` in time and averaging over `|u| < δ` with the
//! weight `1/(ε + Φ_ε²(u))`, or through the flux identity obtained by
//! integrating the equation for `X` against the same weight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::PdeSolution;
use crate::quad::integrate_graded;
use crate::transform::EpsModel;

/// Relative tolerance of the internal weight-normalisation cross-check.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Jumps at or below this size are treated as zero.
pub const JUMP_TOL: f64 = 1e-9;
const QUAD_TOL: f64 = 1e-11;

/// Default averaging half-width `δ_ε = 1/log(1/ε)`.
pub fn default_delta(eps: f64) -> f64 {
    1.0 / (1.0 / eps).ln()
}

/// A cubic `c₀ + c₁s + c₂s² + c₃s³` in the cell coordinate `s = (x − x₀)/h`.
#[derive(Debug, Clone, Copy)]
struct CellCubic {
    x0: f64,
    h: f64,
    c: [f64; 4],
}

impl CellCubic {
    fn value(&self, s: f64) -> f64 {
        self.c[0] + s * (self.c[1] + s * (self.c[2] + s * self.c[3]))
    }

    /// `du/dx` at cell coordinate `s`.
    fn slope(&self, s: f64) -> f64 {
        (self.c[1] + s * (2.0 * self.c[2] + 3.0 * s * self.c[3])) / self.h
    }

    fn increasing(&self) -> bool {
        let g = |s: f64| self.c[1] + s * (2.0 * self.c[2] + 3.0 * s * self.c[3]);
        if !(g(0.0) > 0.0 && g(1.0) > 0.0) {
            return false;
        }
        if self.c[3] != 0.0 {
            let v = -self.c[2] / (3.0 * self.c[3]);
            if v > 0.0 && v < 1.0 && !(g(v) > 0.0) {
                return false;
            }
        }
        true
    }

    /// `s ∈ [0, 1]` with `value(s) = target`, assuming the cubic is
    /// increasing on the cell and brackets the target.
    fn solve(&self, target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let (flo, fhi) = (self.value(0.0) - target, self.value(1.0) - target);
        if flo >= 0.0 {
            return 0.0;
        }
        if fhi <= 0.0 {
            return 1.0;
        }
        let mut s = -flo / (fhi - flo);
        for _ in 0..100 {
            let f = self.value(s) - target;
            if f == 0.0 {
                return s;
            }
            if f < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let d = self.c[1] + s * (2.0 * self.c[2] + 3.0 * s * self.c[3]);
            let mut next = s - f / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 4.0 * f64::EPSILON || hi - lo <= 4.0 * f64::EPSILON {
                return next;
            }
            s = next;
        }
        s
    }
}

/// Monomial coefficients of the cubic through `(o_i, v_i)`, `i = 0..4`.
fn cubic_through(o: [f64; 4], v: [f64; 4]) -> [f64; 4] {
    // Newton divided differences, then expansion of the nested form.
    let mut d = v;
    for level in 1..4 {
        for i in (level..4).rev() {
            d[i] = (d[i] - d[i - 1]) / (o[i] - o[i - level]);
        }
    }
    let mut c = [d[3], 0.0, 0.0, 0.0];
    for (deg, k) in (0..3).rev().enumerate() {
        // c ← c·(s − o_k) + d_k
        let mut next = [0.0; 4];
        for i in 0..=deg {
            next[i + 1] += c[i];
            next[i] -= o[k] * c[i];
        }
        next[0] += d[k];
        c = next;
    }
    c
}

/// The cubic used on cell `[x_j, x_{j+1}]` of an increasing profile: the
/// four-point interpolant when it is increasing on the cell, otherwise the
/// monotone (Fritsch–Carlson) Hermite cubic.
fn cell_cubic(xs: &[f64], u: &[f64], j: usize) -> CellCubic {
    let n = u.len();
    let h = xs[j + 1] - xs[j];
    let x0 = xs[j];
    if n >= 4 {
        let start = j.saturating_sub(1).min(n - 4);
        let mut o = [0.0; 4];
        let mut v = [0.0; 4];
        for i in 0..4 {
            o[i] = (xs[start + i] - x0) / h;
            v[i] = u[start + i];
        }
        let cub = CellCubic {
            x0,
            h,
            c: cubic_through(o, v),
        };
        if cub.increasing() {
            return cub;
        }
    }
    let secant = |k: usize| (u[k + 1] - u[k]) / (xs[k + 1] - xs[k]);
    let node_slope = |k: usize| -> f64 {
        if k == 0 {
            secant(0)
        } else if k == n - 1 {
            secant(n - 2)
        } else {
            let (a, b) = (secant(k - 1), secant(k));
            if a * b <= 0.0 {
                0.0
            } else {
                2.0 / (1.0 / a + 1.0 / b)
            }
        }
    };
    let (u0, u1) = (u[j], u[j + 1]);
    let (d0, d1) = (node_slope(j) * h, node_slope(j + 1) * h);
    CellCubic {
        x0,
        h,
        c: [
            u0,
            d0,
            3.0 * (u1 - u0) - 2.0 * d0 - d1,
            2.0 * (u0 - u1) + d0 + d1,
        ],
    }
}

fn check_increasing(sol: &PdeSolution, k: usize) -> Result<()> {
    let u = &sol.profiles[k];
    if let Some(j) = (0..u.len() - 1).find(|&j| !(u[j + 1] > u[j])) {
        return Err(Error::NotMonotone {
            t: sol.times[k],
            x: sol.grid.x(j),
        });
    }
    Ok(())
}

/// `X(u, t_k)` on an increasing profile.
fn inverse_at(xs: &[f64], prof: &[f64], target: f64) -> Result<(f64, CellCubic, f64)> {
    let n = prof.len();
    let (min, max) = (prof[0], prof[n - 1]);
    if !(target >= min && target <= max) {
        return Err(Error::OutOfRange {
            u: target,
            min,
            max,
        });
    }
    // last node with value ≤ target
    let j = prof
        .partition_point(|&v| v <= target)
        .saturating_sub(1)
        .min(n - 2);
    let cub = cell_cubic(xs, prof, j);
    if prof[j] == target {
        return Ok((xs[j], cub, 0.0));
    }
    if prof[j + 1] == target {
        return Ok((xs[j + 1], cub, 1.0));
    }
    let s = cub.solve(target);
    Ok((cub.x0 + s * cub.h, cub, s))
}

/// Interface position and its rate of change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceTrace {
    pub times: Vec<f64>,
    pub zeta: Vec<f64>,
    pub zeta_rate: Vec<f64>,
}

impl InterfaceTrace {
    /// Least-squares slope of `ζ` over stored times in `[t_from, t_to]`.
    pub fn fitted_velocity(&self, t_from: f64, t_to: f64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.zeta)
            .filter(|(t, _)| **t >= t_from - 1e-12 && **t <= t_to + 1e-12)
            .map(|(&t, &z)| (t, z))
            .collect();
        if pts.len() < 2 {
            return Err(Error::NeedsTwoTimes { t0: t_from });
        }
        let m = pts.len() as f64;
        let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let zm = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let num: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - zm)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
        Ok(num / den)
    }

    /// `max |ζ(t) − x1|` over the stored times up to `t_to`.
    pub fn max_displacement(&self, x1: f64, t_to: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.zeta)
            .filter(|(t, _)| **t <= t_to + 1e-12)
            .map(|(_, z)| (z - x1).abs())
            .fold(0.0, f64::max)
    }
}

/// Zero level of every stored profile.
pub fn track(sol: &PdeSolution) -> Result<InterfaceTrace> {
    let xs = sol.grid.nodes();
    let mut zeta = Vec::with_capacity(sol.times.len());
    for (k, prof) in sol.profiles.iter().enumerate() {
        check_increasing(sol, k)?;
        if !(prof[0] <= 0.0 && prof[prof.len() - 1] >= 0.0) {
            return Err(Error::NoSignChange { t: sol.times[k] });
        }
        zeta.push(inverse_at(&xs, prof, 0.0)?.0);
    }
    let m = zeta.len();
    let times = sol.times.clone();
    let zeta_rate = (0..m)
        .map(|k| {
            if m < 2 {
                0.0
            } else {
                let (lo, hi) = (k.saturating_sub(1), (k + 1).min(m - 1));
                (zeta[hi] - zeta[lo]) / (times[hi] - times[lo])
            }
        })
        .collect();
    Ok(InterfaceTrace {
        times,
        zeta,
        zeta_rate,
    })
}

/// `X(u, t)` for each requested level.
pub fn x_of_u(sol: &PdeSolution, t: f64, u_values: &[f64]) -> Result<Vec<f64>> {
    let k = sol.time_index(t)?;
    check_increasing(sol, k)?;
    let xs = sol.grid.nodes();
    u_values
        .iter()
        .map(|&u| Ok(inverse_at(&xs, &sol.profiles[k], u)?.0))
        .collect()
}

fn neighbours(sol: &PdeSolution, t: f64) -> Result<(usize, usize)> {
    let k = sol.time_index(t)?;
    if k == 0 || k + 1 >= sol.times.len() {
        return Err(Error::TimeBoundary { t });
    }
    for kk in [k - 1, k + 1] {
        check_increasing(sol, kk)?;
    }
    Ok((k - 1, k + 1))
}

/// `∫_{−δ}^{δ} f(u)/(ε + Φ_ε²(u)) du` by graded quadrature.
fn weighted_integral<F>(model: &EpsModel, delta: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_graded(
        |u| Ok(f(u)? / model.diffusivity(u)?),
        -delta,
        delta,
        0.0,
        model.eps(),
        QUAD_TOL,
    )
}

/// `∫_{−δ}^{δ} du/(ε + Φ_ε²)` by quadrature, checked against `2·A_ε(δ)`.
pub fn weight_normalization(model: &EpsModel, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let quad = weighted_integral(model, delta, |_| Ok(1.0))?;
    let exact = 2.0 * model.a_transform(delta)?;
    if (quad - exact).abs() > NORMALIZATION_TOL * exact {
        return Err(Error::NotApplicable(format!(
            "weight normalisation {quad} differs from 2·A(δ) = {exact}"
        )));
    }
    Ok(exact)
}

/// Weighted average of `X_t(u, t)` over `|u| < δ` with weight
/// `1/(ε + Φ_ε²(u))`; `X_t` by centred differences between the stored
/// neighbours of `t`.
pub fn weighted_velocity(sol: &PdeSolution, t: f64, delta: f64, model: &EpsModel) -> Result<f64> {
    let (km, kp) = neighbours(sol, t)?;
    let norm = weight_normalization(model, delta)?;
    let xs = sol.grid.nodes();
    let (pm, pp) = (&sol.profiles[km], &sol.profiles[kp]);
    let span = sol.times[kp] - sol.times[km];
    let num = weighted_integral(model, delta, |u| {
        Ok((inverse_at(&xs, pp, u)?.0 - inverse_at(&xs, pm, u)?.0) / span)
    })?;
    Ok(num / norm)
}

/// The same average evaluated at a single time through the flux identity
/// `−(B + u_x(X(δ)) − u_x(X(−δ)))/(2A_ε(δ))` with
/// `B = ∫_{−δ}^{δ} Φ(1−Φ²)/√(ε+Φ²) · X_u du`.
pub fn flux_velocity(sol: &PdeSolution, t: f64, delta: f64, model: &EpsModel) -> Result<f64> {
    let k = sol.time_index(t)?;
    check_increasing(sol, k)?;
    let norm = weight_normalization(model, delta)?;
    let xs = sol.grid.nodes();
    let prof = &sol.profiles[k];
    let slope_at = |u: f64| -> Result<f64> {
        let (_, cub, s) = inverse_at(&xs, prof, u)?;
        Ok(cub.slope(s))
    };
    let b = integrate_graded(
        |u| {
            let phi = model.phi_from_u(u)?;
            let d = model.diffusivity_from_phi(phi);
            Ok(phi * (1.0 - phi * phi) / d.sqrt() / slope_at(u)?)
        },
        -delta,
        delta,
        0.0,
        model.eps(),
        QUAD_TOL,
    )?;
    Ok(-(b + slope_at(delta)? - slope_at(-delta)?) / norm)
}

/// One-sided limits `u_x(x₁∓, t)` at a zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopePair {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

impl SlopePair {
    pub fn jump(&self) -> f64 {
        self.right - self.left
    }
}

/// Value at `0` of the least-squares line through `(d_i, q_i)`.
fn extrapolate_to_zero(d: &[f64; 3], q: &[f64; 3]) -> f64 {
    let dm = d.iter().sum::<f64>() / 3.0;
    let qm = q.iter().sum::<f64>() / 3.0;
    let num: f64 = (0..3).map(|i| (d[i] - dm) * (q[i] - qm)).sum();
    let den: f64 = (0..3).map(|i| (d[i] - dm) * (d[i] - dm)).sum();
    qm - num / den * dm
}

/// Slopes from the difference quotient `q = u/(x − x₁)` at the three interior
/// nodes nearest `x₁` on each side, extrapolated linearly to `x₁`.
pub fn one_sided_slopes(sol: &PdeSolution, t: f64, x1: f64) -> Result<SlopePair> {
    let k = sol.time_index(t)?;
    slopes_at(sol, k, x1)
}

fn slopes_at(sol: &PdeSolution, k: usize, x1: f64) -> Result<SlopePair> {
    let g = &sol.grid;
    let prof = &sol.profiles[k];
    let tol = 1e-9 * g.h();
    let interior = 1..g.n_cells;
    let right: Vec<usize> = interior
        .clone()
        .filter(|&j| g.x(j) > x1 + tol)
        .take(3)
        .collect();
    let left: Vec<usize> = interior
        .rev()
        .filter(|&j| g.x(j) < x1 - tol)
        .take(3)
        .collect();
    let side = |idx: &[usize], name: &'static str| -> Result<f64> {
        if idx.len() < 3 {
            return Err(Error::TooCoarse { side: name, x1 });
        }
        let mut d = [0.0; 3];
        let mut q = [0.0; 3];
        for (i, &j) in idx.iter().enumerate() {
            d[i] = g.x(j) - x1;
            q[i] = prof[j] / d[i];
        }
        Ok(extrapolate_to_zero(&d, &q))
    };
    Ok(SlopePair {
        t: sol.times[k],
        left: side(&left, "left")?,
        right: side(&right, "right")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl SlopePair {
    pub fn on(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }
}

/// Slack allowed in the lower bound `q(t) ≥ (t₀/t)·q(t₀)`.
pub const MONOTONE_BOUND_SLACK: f64 = 0.1;

/// Result of [`waiting_time`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitingTime {
    /// First stored time with slope above the threshold, `∞` if none.
    pub tau: f64,
    /// Slope at every stored time `t > 0`.
    pub slopes: Vec<(f64, f64)>,
    /// Times after `tau` at which `t·slope` fell below `(1 − slack)` times
    /// its value at `tau`.
    pub bound_violations: Vec<f64>,
}

/// First stored time at which the one-sided slope at `x1` exceeds
/// `threshold`, with the monotone lower bound checked afterwards.
pub fn waiting_time(sol: &PdeSolution, x1: f64, side: Side, threshold: f64) -> Result<WaitingTime> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let mut slopes = Vec::new();
    for k in 0..sol.times.len() {
        if sol.times[k] > 0.0 {
            slopes.push((sol.times[k], slopes_at(sol, k, x1)?.on(side)));
        }
    }
    let first = slopes.iter().position(|&(_, s)| s > threshold);
    let (tau, bound_violations) = match first {
        None => (f64::INFINITY, Vec::new()),
        Some(i) => {
            let (t0, s0) = slopes[i];
            let floor = (1.0 - MONOTONE_BOUND_SLACK) * t0 * s0;
            let v = slopes[i + 1..]
                .iter()
                .filter(|&&(t, s)| t * s < floor)
                .map(|&(t, _)| t)
                .collect();
            (t0, v)
        }
    };
    Ok(WaitingTime {
        tau,
        slopes,
        bound_violations,
    })
}

/// `min (t·q(t))/(t₀·q(t₀))` over stored `t₀ < t` with `t₀ ≥ t_from` and
/// `q(t₀) > floor`; `1` if there is no such pair. Values below one measure
/// the failure of `t·q(t)` to be nondecreasing.
pub fn monotone_bound_ratio(
    sol: &PdeSolution,
    x1: f64,
    side: Side,
    t_from: f64,
    floor: f64,
) -> Result<f64> {
    let mut tq = Vec::new();
    for k in 0..sol.times.len() {
        let t = sol.times[k];
        if t >= t_from - 1e-12 && t > 0.0 {
            tq.push((t, t * slopes_at(sol, k, x1)?.on(side)));
        }
    }
    let mut best_prior = f64::NEG_INFINITY;
    let mut worst: f64 = 1.0;
    for &(t, v) in &tq {
        if best_prior > 0.0 {
            worst = worst.min(v / best_prior);
        }
        if v > floor * t {
            best_prior = best_prior.max(v);
        }
    }
    Ok(worst)
}

/// Both sides of the weak velocity law at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjectureGap {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Weighted velocity of the regularised run against `(u_x(x₁⁺) − u_x(x₁⁻))/(2 log ε)`
/// from the limit solution.
pub fn conjecture_gap(
    sol: &PdeSolution,
    limit_sol: &PdeSolution,
    t: f64,
    delta: f64,
    model: &EpsModel,
    x1: f64,
) -> Result<ConjectureGap> {
    let slopes = one_sided_slopes(limit_sol, t, x1)?;
    let jump = slopes.jump();
    if jump.abs() <= JUMP_TOL {
        return Err(Error::DegenerateJump { jump });
    }
    let lhs = weighted_velocity(sol, t, delta, model)?;
    let rhs = jump / (2.0 * model.eps().ln());
    Ok(ConjectureGap {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}
