use binfluid_core::steady::SteadySpec;
use binfluid_core::transform::EpsModel;
use binfluid_core::wave::{build_wave, phase_shoot, shoot_right, velocity, ShootingSpec};
use proptest::prelude::*;

/// Sup distance to the closed form on the central 90% of the common range.
fn standing_wave_error(b: f64, eps: f64) -> f64 {
    let spec = ShootingSpec::new(EpsModel::new(eps).unwrap(), b, b)
        .unwrap()
        .with_x_max(3.0);
    let w = build_wave(&spec).unwrap();
    let target = SteadySpec::new(b, b).unwrap();
    let reach = target
        .support_right()
        .unwrap_or(f64::INFINITY)
        .min(w.x_range().1);
    w.xs.iter()
        .zip(&w.ws)
        .filter(|(x, _)| x.abs() <= 0.9 * reach)
        .map(|(&x, &v)| (v - target.w_ab(x)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn standing_waves_converge_as_eps_decreases() {
    for &b in &[0.5, 2.0] {
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| standing_wave_error(b, e))
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= 1.1 * w[0], "B = {b}: {errs:?}");
        }
        assert!(errs[2] <= 0.05, "B = {b}: {errs:?}");
    }
}

#[test]
fn phase_plane_agrees_with_spatial_shooting() {
    for &b in &[0.5, 2.0] {
        for &eps in &[1e-2, 1e-3, 1e-4] {
            let model = EpsModel::new(eps).unwrap();
            let spec = ShootingSpec {
                max_step: 1e-3,
                ..ShootingSpec::new(model, b, b).unwrap().with_x_max(3.0)
            };
            let r = shoot_right(&spec, 0.0, b).unwrap();
            let (_, x_top) = r.monotone_range();
            let w_max = r.eval(0.95 * x_top).unwrap();
            // the oracle is integrated well below the tolerance under test
            let phase = phase_shoot(&model, 0.0, b, w_max, 1e-2 * spec.step_tol).unwrap();
            for pt in phase.iter().filter(|p| p.x < x_top) {
                let gap = (r.eval(pt.x).unwrap() - pt.w).abs();
                assert!(
                    gap <= 5.0 * spec.step_tol * (1.0 + pt.x),
                    "B = {b}, eps = {eps}: gap {gap:e} at x = {}",
                    pt.x
                );
            }
        }
    }
}

proptest! {
    #[test]
    fn velocity_is_antisymmetric_in_the_slopes(k in 1.0_f64..8.0, a in 0.1_f64..3.0, b in 0.1_f64..3.0) {
        let m = EpsModel::new(10f64.powf(-k)).unwrap();
        prop_assert_eq!(velocity(&m, a, b).unwrap(), -velocity(&m, b, a).unwrap());
        prop_assert!(velocity(&m, a, b).unwrap() * (a - b) >= 0.0);
    }
}
