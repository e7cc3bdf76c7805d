//! Embedded Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! Small fixed-size systems only; the shooting problems here are two- or
//! three-dimensional.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Steps below this size abort the integration with `StepUnderflow`.
    pub h_min: f64,
}

/// Returned by the step observer to continue or stop the integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Integrate `y′ = f(t, y)` from `t0` towards `t_end`.
///
/// After every accepted step `observe(t, y, f(t, y))` is called; returning
/// [`Flow::Stop`] ends the integration. Returns the final time reached.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctrl: &StepControl,
    mut observe: O,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]) -> Flow,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = ctrl.h_init.min(ctrl.h_max);
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;

    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y_new);

        let mut err = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = ctrl.atol + ctrl.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / scale).powi(2);
        }
        let err = (err / N as f64).sqrt();

        if err.is_finite() && err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
            let flow = observe(t, &y, &k1);
            if flow == Flow::Stop {
                return Ok(t);
            }
            let mut fac = SAFETY * err.max(1e-10).powf(-ALPHA) * err_prev.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_prev = err.max(1e-4);
            h = (h * fac).min(ctrl.h_max);
            rejected_last = false;
        } else {
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-ALPHA)).max(FAC_MIN)
            } else {
                FAC_MIN
            };
            h *= fac;
            rejected_last = true;
        }
        if h < ctrl.h_min && t < t_end {
            return Err(Error::StepUnderflow {
                x: t,
                min_step: ctrl.h_min,
            });
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctrl(tol: f64) -> StepControl {
        StepControl {
            rtol: tol,
            atol: tol,
            h_init: 1e-3,
            h_max: 0.5,
            h_min: 1e-14,
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let mut last = [0.0; 2];
        let t = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            &ctrl(1e-10),
            |_, y, _| {
                last = *y;
                Flow::Continue
            },
        )
        .unwrap();
        assert_eq!(t, 10.0);
        assert!((last[0] - 10f64.sin()).abs() < 1e-8);
        assert!((last[1] - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn observer_can_stop() {
        let mut steps = 0;
        let t = integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            5.0,
            &ctrl(1e-8),
            |_, y, _| {
                steps += 1;
                if y[0] > 2.0 {
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            },
        )
        .unwrap();
        assert!(t < 5.0 && t > 2f64.ln());
        assert!(steps > 0);
    }

    #[test]
    fn underflow_is_reported() {
        // blows up at t = 1
        let res = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            &StepControl {
                h_min: 1e-6,
                ..ctrl(1e-10)
            },
            |_, _, _| Flow::Continue,
        );
        assert!(matches!(res, Err(Error::StepUnderflow { .. })));
    }
}
