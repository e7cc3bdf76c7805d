//! Adaptive quadrature for integrands that vary on a small scale near one
//! point (typically `u = 0`, where the weight `1/(ε + Φ_ε²)` peaks).

use std::cell::RefCell;

use crate::error::{Error, Result};

/// Double-exponential quadrature of a fallible integrand on `[a, b]`.
///
/// The first error raised by `f` aborts the result.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let out = quadrature::double_exponential::integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(out.integral)
}

/// Quadrature on `[a, b]` split at `center` and at `center ± scale·8^k`, so
/// that every panel sees the integrand on a single length scale.
pub fn integrate_graded<F>(f: F, a: f64, b: f64, center: f64, scale: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a <= b) || !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "graded quadrature needs a ≤ b and scale > 0, got [{a}, {b}], scale {scale}"
        )));
    }
    let mut cuts = vec![a, b];
    if center > a && center < b {
        cuts.push(center);
    }
    let mut d = scale;
    while center - d > a || center + d < b {
        for p in [center - d, center + d] {
            if p > a && p < b {
                cuts.push(p);
            }
        }
        d *= 8.0;
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let panels = (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(&f, w[0], w[1], tol / panels)?;
    }
    Ok(total)
}
