use binfluid_core::experiments::{run, run_with_jobs, write_outputs, ScenarioConfig};

fn config(text: &str) -> ScenarioConfig {
    ScenarioConfig::from_json(text).unwrap()
}

#[test]
fn conjecture_sweep_tends_to_the_law() {
    let cfg = config(
        r#"{
        "name": "conjecture",
        "kind": "conjecture",
        "eps_list": [1e-2, 1e-3, 1e-4],
        "slopes": {"a": 2, "b": 1},
        "grid": {"a": -4, "b": 4, "h": 2e-3},
        "time": {"t_end": 1, "dt": 1e-4, "dt_out": 0.05},
        "params": {"t_eval": [0.25, 0.5, 0.75]}
    }"#,
    );
    let out = run_with_jobs(&cfg, 3).unwrap();
    assert!(out.summary.passed, "{:#?}", out.summary.checks);
    let table = &out.tables[0].1;
    assert!(
        table.starts_with("t,zeta,zeta_rate,left_slope,right_slope,weighted_velocity,rhs,ratio\n")
    );
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&out, dir.path()).unwrap();
    assert!(dir.path().join("ratios.csv").is_file());
}

#[test]
fn immobility_and_wave_speed_scenarios() {
    let imm = config(
        r#"{
        "name": "imm",
        "kind": "immobility",
        "eps_list": [1e-1, 1e-2, 1e-3],
        "grid": {"a": -1, "b": 1, "h": 5e-3},
        "time": {"t_end": 1, "dt": 2e-4, "dt_out": 0.05},
        "initial": {"kind": "monotone_tanh_like", "zeros": [0.2]}
    }"#,
    );
    let out = run(&imm).unwrap();
    assert!(out.summary.passed, "{:#?}", out.summary.checks);

    let ws = config(
        r#"{
        "name": "speed",
        "kind": "wave_speed",
        "eps_list": [1e-2],
        "slopes": {"a": 2, "b": 1},
        "grid": {"a": -3, "b": 3, "h": 5e-3},
        "time": {"t_end": 1, "dt": 2e-4, "dt_out": 0.05}
    }"#,
    );
    let out = run(&ws).unwrap();
    assert!(out.summary.passed, "{:#?}", out.summary.checks);
}

#[test]
fn limit_scenarios() {
    let wait = config(
        r#"{
        "name": "wait",
        "kind": "waiting_time",
        "grid": {"a": -1, "b": 1, "h": 1e-2},
        "time": {"t_end": 2, "dt": 1e-3, "dt_out": 0.05},
        "initial": {"kind": "flat_exponential", "zeros": [0]},
        "n_sequence": [1000000000000000000000000000000],
        "bounds": {"expect_infinite_wait": true}
    }"#,
    );
    let out = run(&wait).unwrap();
    assert!(out.summary.passed, "{:#?}", out.summary.checks);
    assert_eq!(out.summary.runs[0].values["tau_is_infinite"], 1.0);

    let approx = config(
        r#"{
        "name": "approx",
        "kind": "limit_approx",
        "grid": {"a": 0, "b": 1, "h": 5e-3},
        "time": {"t_end": 1, "dt": 5e-4, "dt_out": 0.02}
    }"#,
    );
    let out = run(&approx).unwrap();
    assert!(out.summary.passed, "{:#?}", out.summary.checks);
}
