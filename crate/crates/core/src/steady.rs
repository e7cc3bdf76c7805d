//! Closed-form steady states of the degenerate limit equation
//! `u_t = |u|u_xx + u(1 − |u|)`.
//!
//! On `x ≥ 0` the nonnegative state with slope `B` at the origin is
//! `max{B sinh x − cosh x + 1, 0}`; on `x ≤ 0` the nonpositive state with
//! slope `A` is `min{A sinh x + cosh x − 1, 0}`. Gluing the two at the origin
//! gives a sign-changing steady state with a slope jump `B − A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default threshold below which `|u|` is treated as part of the nodal set
/// when evaluating residuals.
pub const DEFAULT_POSITIVITY_THRESHOLD: f64 = 1e-6;

/// One-sided slopes `(A, B)` at the interface of a steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadySpec {
    a_slope: f64,
    b_slope: f64,
}

impl SteadySpec {
    pub fn new(a_slope: f64, b_slope: f64) -> Result<Self> {
        if !(a_slope > 0.0 && b_slope > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "slopes must be positive, got A = {a_slope}, B = {b_slope}"
            )));
        }
        Ok(Self { a_slope, b_slope })
    }

    pub fn a_slope(&self) -> f64 {
        self.a_slope
    }

    pub fn b_slope(&self) -> f64 {
        self.b_slope
    }

    /// Right end of the positive support, `log((1+B)/(1−B))`, or `None`
    /// when `B ≥ 1` and the support is unbounded.
    pub fn support_right(&self) -> Option<f64> {
        support_length(self.b_slope)
    }

    /// Left end of the negative support, `−log((1+A)/(1−A))`, or `None`
    /// when `A ≥ 1`.
    pub fn support_left(&self) -> Option<f64> {
        support_length(self.a_slope).map(|l| -l)
    }

    /// `max{B sinh x − cosh x + 1, 0}` for `x ≥ 0`.
    pub fn w_plus(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::DomainError { what: "w_plus", x });
        }
        Ok(w_plus_raw(self.b_slope, x).max(0.0))
    }

    /// `min{A sinh x + cosh x − 1, 0}` for `x ≤ 0`.
    pub fn w_minus(&self, x: f64) -> Result<f64> {
        if x > 0.0 {
            return Err(Error::DomainError { what: "w_minus", x });
        }
        Ok(w_minus_raw(self.a_slope, x).min(0.0))
    }

    /// The sign-changing steady state on the whole line.
    pub fn w_ab(&self, x: f64) -> f64 {
        if x <= 0.0 {
            w_minus_raw(self.a_slope, x).min(0.0)
        } else {
            w_plus_raw(self.b_slope, x).max(0.0)
        }
    }

    /// Analytic derivative of [`w_ab`](Self::w_ab). At the origin this
    /// returns the right slope `B`; outside the support it is zero.
    pub fn w_ab_derivative(&self, x: f64) -> f64 {
        if x < 0.0 {
            if w_minus_raw(self.a_slope, x) < 0.0 {
                self.a_slope * x.cosh() + x.sinh()
            } else {
                0.0
            }
        } else if x == 0.0 || w_plus_raw(self.b_slope, x) > 0.0 {
            self.b_slope * x.cosh() - x.sinh()
        } else {
            0.0
        }
    }

    /// Inflection point `x* = −½ log((A+1)/(A−1))` of the negative branch
    /// and the minimal slope `√(A²−1)` attained there. Only defined for
    /// `A > 1`; as `A ↓ 1` the point runs off to `−∞` and the slope to zero.
    pub fn inflection(&self) -> Result<(f64, f64)> {
        let a = self.a_slope;
        if a <= 1.0 {
            return Err(Error::NotApplicable(format!(
                "the negative branch has no inflection point for A = {a} ≤ 1"
            )));
        }
        let x_star = -0.5 * ((a + 1.0) / (a - 1.0)).ln();
        Ok((x_star, (a * a - 1.0).sqrt()))
    }

    /// Sample `w_ab` at the given nodes.
    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.w_ab(x)).collect()
    }
}

fn support_length(slope: f64) -> Option<f64> {
    (slope < 1.0).then(|| ((1.0 + slope) / (1.0 - slope)).ln())
}

fn w_plus_raw(b: f64, x: f64) -> f64 {
    // B sinh x − cosh x + 1, arranged to avoid cancellation for small x
    b * x.sinh() - (x.cosh() - 1.0)
}

fn w_minus_raw(a: f64, x: f64) -> f64 {
    a * x.sinh() + (x.cosh() - 1.0)
}

/// Pointwise residual `|u|u_xx + u(1 − |u|)` of the steady limit equation,
/// using centred second differences.
///
/// A node is evaluated only when it and both neighbours exceed `threshold`
/// in magnitude with a common sign, so stencils never straddle the nodal set
/// or a support edge. Other nodes (and the two end nodes) report zero.
pub fn residual_limit_equation(profile: &[f64], h: f64, threshold: f64) -> Result<Vec<f64>> {
    let n = profile.len();
    if n < 3 {
        return Err(Error::GridTooSmall {
            nodes: n,
            required: 3,
        });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    let inv_h2 = 1.0 / (h * h);
    let mut out = vec![0.0; n];
    for j in 1..n - 1 {
        let (l, c, r) = (profile[j - 1], profile[j], profile[j + 1]);
        let inside = c.abs() > threshold
            && l.abs() > threshold
            && r.abs() > threshold
            && l.signum() == c.signum()
            && r.signum() == c.signum();
        if inside {
            let uxx = (l - 2.0 * c + r) * inv_h2;
            out[j] = c.abs() * uxx + c * (1.0 - c.abs());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_nonpositive_slopes() {
        assert!(SteadySpec::new(0.0, 1.0).is_err());
        assert!(SteadySpec::new(1.0, -2.0).is_err());
    }

    #[test]
    fn w_plus_examples() {
        let s = SteadySpec::new(1.0, 0.5).unwrap();
        assert_eq!(s.w_plus(0.0).unwrap(), 0.0);
        assert!(s.w_plus(3f64.ln()).unwrap().abs() < 1e-15);
        let one = SteadySpec::new(1.0, 1.0).unwrap();
        assert_relative_eq!(
            one.w_plus(2.0).unwrap(),
            1.0 - (-2f64).exp(),
            max_relative = 1e-14
        );
        assert!(matches!(s.w_plus(-0.1), Err(Error::DomainError { .. })));
    }

    #[test]
    fn w_minus_examples() {
        let s = SteadySpec::new(2.0, 1.0).unwrap();
        assert_eq!(s.w_minus(0.0).unwrap(), 0.0);
        let half = SteadySpec::new(0.5, 1.0).unwrap();
        assert!(half.w_minus(-(3f64.ln())).unwrap().abs() < 1e-15);
        let one = SteadySpec::new(1.0, 1.0).unwrap();
        assert_relative_eq!(
            one.w_minus(-1.0).unwrap(),
            (-1f64).exp() - 1.0,
            max_relative = 1e-14
        );
        assert!(matches!(s.w_minus(0.1), Err(Error::DomainError { .. })));
    }

    #[test]
    fn w_ab_examples() {
        let s = SteadySpec::new(2.0, 1.0).unwrap();
        assert_eq!(s.w_ab(0.0), 0.0);
        let sym = SteadySpec::new(1.0, 1.0).unwrap();
        for &x in &[-3.0_f64, -0.4, 0.2, 1.7] {
            let expected = x.signum() * (1.0 - (-x.abs()).exp());
            assert_relative_eq!(sym.w_ab(x), expected, max_relative = 1e-13);
        }
        let s = SteadySpec::new(2.0, 0.5).unwrap();
        let expected = 2.0 * (-1f64).sinh() + 1f64.cosh() - 1.0;
        assert_relative_eq!(s.w_ab(-1.0), expected, max_relative = 1e-14);
        assert!((s.w_ab(-1.0) + 1.8073).abs() < 1e-4);
    }

    #[test]
    fn supports() {
        let s = SteadySpec::new(0.5, 0.5).unwrap();
        assert_relative_eq!(s.support_right().unwrap(), 3f64.ln());
        assert_relative_eq!(s.support_left().unwrap(), -(3f64.ln()));
        assert!(SteadySpec::new(1.0, 2.0).unwrap().support_right().is_none());
    }

    #[test]
    fn inflection_examples() {
        let (x, m) = SteadySpec::new(1.25, 1.0).unwrap().inflection().unwrap();
        assert_relative_eq!(x, -(3f64.ln()), max_relative = 1e-14);
        assert_relative_eq!(m, 0.75, max_relative = 1e-14);

        let r2 = 2f64.sqrt();
        let (x, m) = SteadySpec::new(r2, 1.0).unwrap().inflection().unwrap();
        assert_relative_eq!(
            x,
            -0.5 * ((r2 + 1.0) / (r2 - 1.0)).ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(m, 1.0, max_relative = 1e-14);

        assert!(matches!(
            SteadySpec::new(1.0, 1.0).unwrap().inflection(),
            Err(Error::NotApplicable(_))
        ));
        // approaching A = 1 from above the inflection point escapes to −∞
        let (x, m) = SteadySpec::new(1.0 + 1e-9, 1.0)
            .unwrap()
            .inflection()
            .unwrap();
        assert!(x < -10.0 && m < 1e-4);
    }

    #[test]
    fn derivative_matches_slopes_at_origin() {
        let s = SteadySpec::new(2.0, 0.5).unwrap();
        assert_eq!(s.w_ab_derivative(0.0), 0.5);
        assert_relative_eq!(s.w_ab_derivative(-1e-12), 2.0, max_relative = 1e-9);
        assert_eq!(s.w_ab_derivative(2.0), 0.0);
    }

    #[test]
    fn residual_of_exact_state_is_small() {
        let s = SteadySpec::new(2.0, 1.0).unwrap();
        let h = 1e-3;
        let xs: Vec<f64> = (0..=4000).map(|j| -2.0 + j as f64 * h).collect();
        let u = s.sample(&xs);
        let r = residual_limit_equation(&u, h, DEFAULT_POSITIVITY_THRESHOLD).unwrap();
        let max = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(max <= 1e-5, "max residual {max}");
    }

    #[test]
    fn residual_trivial_profiles() {
        let zero = vec![0.0; 50];
        assert!(residual_limit_equation(&zero, 0.1, 1e-6)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let one = vec![1.0; 50];
        assert!(residual_limit_equation(&one, 0.1, 1e-6)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        assert!(matches!(
            residual_limit_equation(&[1.0, 1.0], 0.1, 1e-6),
            Err(Error::GridTooSmall { .. })
        ));
    }
}
