//! The regularisation parameter ε and every closed-form function of it.
//!
//! The order parameter φ is replaced by `u = U_ε(φ) = 2∫₀^φ √(ε+s²) ds`, which
//! turns the phase-field equation into
//!
//! ```text
//! u_t = (ε + Φ_ε(u)²) u_xx + Φ_ε(u)(1 − Φ_ε(u)²)√(ε + Φ_ε(u)²)
//! ```
//!
//! with `Φ_ε = U_ε⁻¹`. As ε → 0 the diffusivity degenerates to `|u|` at the
//! interface `u = 0`.
//!
//! All maps are odd. They are evaluated on `|x|` and the sign is restored
//! afterwards so that `f(−x) = −f(x)` holds bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute/relative residual tolerance of the Newton inversion.
pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
/// Default iteration cap of the Newton inversion.
pub const DEFAULT_NEWTON_MAX_ITER: usize = 100;

/// `asinh(z)` for `z ≥ 0`, written through `ln_1p` so that small arguments
/// do not lose digits to cancellation.
fn asinh_pos(z: f64) -> f64 {
    if z > 1e150 {
        return (2.0 * z).ln();
    }
    let zz = z * z;
    (z + zz / (1.0 + (1.0 + zz).sqrt())).ln_1p()
}

/// The regularisation parameter together with its inversion settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsModel {
    eps: f64,
    sqrt_eps: f64,
    newton_tol: f64,
    newton_max_iter: usize,
}

impl EpsModel {
    /// Model with the default Newton settings. Requires `0 < eps ≤ 1`.
    pub fn new(eps: f64) -> Result<Self> {
        Self::with_newton(eps, DEFAULT_NEWTON_TOL, DEFAULT_NEWTON_MAX_ITER)
    }

    pub fn with_newton(eps: f64, newton_tol: f64, newton_max_iter: usize) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {eps}"
            )));
        }
        if !(newton_tol > 0.0) || newton_max_iter == 0 {
            return Err(Error::InvalidParameter(
                "newton_tol and newton_max_iter must be positive".into(),
            ));
        }
        Ok(Self {
            eps,
            sqrt_eps: eps.sqrt(),
            newton_tol,
            newton_max_iter,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn newton_tol(&self) -> f64 {
        self.newton_tol
    }

    pub fn newton_max_iter(&self) -> usize {
        self.newton_max_iter
    }

    /// `U_ε(φ) = φ√(ε+φ²) + ε·asinh(φ/√ε)`.
    pub fn u_from_phi(&self, phi: f64) -> f64 {
        let a = phi.abs();
        let v = a * (self.eps + a * a).sqrt() + self.eps * asinh_pos(a / self.sqrt_eps);
        v.copysign(phi)
    }

    /// `U_ε′(φ) = 2√(ε+φ²)`.
    pub fn u_from_phi_derivative(&self, phi: f64) -> f64 {
        2.0 * (self.eps + phi * phi).sqrt()
    }

    /// `Φ_ε(u)`, the inverse of [`u_from_phi`](Self::u_from_phi), from the
    /// initial guess `sgn(u)·√|u|`.
    pub fn phi_from_u(&self, u: f64) -> Result<f64> {
        self.phi_from_u_with_guess(u, u.abs().sqrt())
    }

    /// `Φ_ε(u)` started from a caller-supplied guess for `|Φ_ε(u)|`.
    ///
    /// Safeguarded Newton: each iterate is kept inside a bracket
    /// `[lo, hi]` with `U_ε(lo) ≤ |u| ≤ U_ε(hi)`, falling back to bisection
    /// when the Newton step leaves it. Iterates until the step is at the
    /// rounding level of the iterate.
    pub fn phi_from_u_with_guess(&self, u: f64, guess: f64) -> Result<f64> {
        let target = u.abs();
        if target == 0.0 || !target.is_finite() {
            return Ok(u);
        }
        // U_ε(φ) ≥ φ² and U_ε(φ) ≥ 2√ε φ, so both quantities bound the root from above.
        let mut lo = 0.0_f64;
        let mut hi = target.sqrt().min(target / (2.0 * self.sqrt_eps));
        while self.u_from_phi(hi) < target {
            hi *= 2.0;
        }
        let mut phi = if guess > lo && guess <= hi { guess } else { hi };
        for _ in 0..self.newton_max_iter {
            let f = self.u_from_phi(phi) - target;
            if f == 0.0 {
                return Ok(phi.copysign(u));
            }
            if f > 0.0 {
                hi = phi;
            } else {
                lo = phi;
            }
            let mut next = phi - f / self.u_from_phi_derivative(phi);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - phi).abs();
            phi = next;
            if step <= 2.0 * f64::EPSILON * phi || hi - lo <= 2.0 * f64::EPSILON * hi {
                return Ok(phi.copysign(u));
            }
        }
        let residual = (self.u_from_phi(phi) - target).abs();
        if residual <= self.newton_tol * (1.0 + target) {
            Ok(phi.copysign(u))
        } else {
            Err(Error::IterationLimit {
                u,
                iterations: self.newton_max_iter,
            })
        }
    }

    /// `u_{1ε} = U_ε(1)`, the transformed bulk phase.
    pub fn u1(&self) -> f64 {
        self.u_from_phi(1.0)
    }

    /// Diffusivity `ε + Φ_ε(u)²`.
    pub fn diffusivity(&self, u: f64) -> Result<f64> {
        let phi = self.phi_from_u(u)?;
        Ok(self.diffusivity_from_phi(phi))
    }

    /// Reaction `Φ(1 − Φ²)√(ε + Φ²)` with `Φ = Φ_ε(u)`.
    pub fn reaction(&self, u: f64) -> Result<f64> {
        let phi = self.phi_from_u(u)?;
        Ok(self.reaction_from_phi(phi))
    }

    #[inline]
    pub fn diffusivity_from_phi(&self, phi: f64) -> f64 {
        self.eps + phi * phi
    }

    #[inline]
    pub fn reaction_from_phi(&self, phi: f64) -> f64 {
        phi * (1.0 - phi * phi) * (self.eps + phi * phi).sqrt()
    }

    /// `A_ε(u) = ∫₀ᵘ ds / (ε + Φ_ε(s)²) = 2·asinh(Φ_ε(u)/√ε)`.
    pub fn a_transform(&self, u: f64) -> Result<f64> {
        let phi = self.phi_from_u(u.abs())?;
        Ok((2.0 * asinh_pos(phi / self.sqrt_eps)).copysign(u))
    }

    /// Inverse of [`a_transform`](Self::a_transform): `U_ε(√ε·sinh(p/2))`.
    pub fn a_transform_inverse(&self, p: f64) -> f64 {
        self.u_from_phi(self.sqrt_eps * (0.5 * p).sinh())
    }
}

/// Mobility coefficients `D(φ) = D₀ + D₂φ²` of the unscaled model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub d0: f64,
    pub d2: f64,
}

impl PhysicalParams {
    pub fn new(d0: f64, d2: f64) -> Result<Self> {
        if !(d0 > 0.0 && d2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mobilities must be positive, got d0 = {d0}, d2 = {d2}"
            )));
        }
        Ok(Self { d0, d2 })
    }

    pub fn eps(&self) -> f64 {
        self.d0 / self.d2
    }

    /// Factor multiplying physical lengths: `x = √(2/D₂)·x_phys`.
    pub fn length_factor(&self) -> f64 {
        (2.0 / self.d2).sqrt()
    }

    /// Factor multiplying physical times: `t = 2·t_phys`.
    pub fn time_factor(&self) -> f64 {
        2.0
    }
}

/// Map a physical point `(x_phys, t_phys)` to the rescaled variables in
/// which the diffusivity is `ε + φ²` and the reaction carries a factor ½.
pub fn rescale_physical(p: &PhysicalParams, x_phys: f64, t_phys: f64) -> (f64, f64, f64) {
    (
        p.eps(),
        x_phys * p.length_factor(),
        t_phys * p.time_factor(),
    )
}

/// Double-well potential `V(φ) = −φ²/2 + φ⁴/4`.
pub fn potential(phi: f64) -> f64 {
    let p2 = phi * phi;
    -0.5 * p2 + 0.25 * p2 * p2
}

/// Trapezoidal approximation of `F[φ] = ∫ V(φ) + ½D(φ)(φ′)² dx`.
///
/// `φ′` uses centred differences at interior nodes and second-order
/// one-sided differences at the two ends.
pub fn energy(p: &PhysicalParams, phi: &[f64], h: f64) -> Result<f64> {
    let n = phi.len();
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
    let derivative = |j: usize| -> f64 {
        if j == 0 {
            (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h)
        } else if j == n - 1 {
            (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * h)
        } else {
            (phi[j + 1] - phi[j - 1]) / (2.0 * h)
        }
    };
    let density = |j: usize| -> f64 {
        let v = phi[j];
        let dv = derivative(j);
        potential(v) + 0.5 * (p.d0 + p.d2 * v * v) * dv * dv
    };
    let mut total = 0.5 * (density(0) + density(n - 1));
    for j in 1..n - 1 {
        total += density(j);
    }
    Ok(total * h)
}
