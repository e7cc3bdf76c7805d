//! Scenario runner: one JSON document describes a sweep, the runner executes
//! it, applies the configured bounds and produces CSV tables, a summary and
//! a gnuplot script.
//!
//! Runs over `eps_list` are independent and may execute concurrently; their
//! results are always reported in configuration order. Nothing is written
//! until every run has finished, so an invalid configuration or a failed run
//! never leaves a partial output directory behind.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interface::{
    self, conjecture_gap, default_delta, flux_velocity, monotone_bound_ratio, track, waiting_time,
    Side,
};
use crate::pde::{
    aronson_benilan_check, energy_estimate, make_initial, solve_eps_with, solve_limit,
    solve_limit_interval, weak_residual, BoundaryData, EpsOptions, Grid, InitialData, LimitOptions,
    OutputTimes, PdeSolution, ProductBump,
};
use crate::steady::SteadySpec;
use crate::transform::EpsModel;
use crate::wave::{build_wave, ShootingSpec, WaveProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    TwConvergence,
    WaveSpeed,
    Immobility,
    Conjecture,
    WaitingTime,
    LimitApprox,
    Asymptotics,
}

impl ScenarioKind {
    /// Name of the CLI subcommand running this kind.
    pub fn command(&self) -> &'static str {
        match self {
            ScenarioKind::TwConvergence => "tw-converge",
            ScenarioKind::WaveSpeed => "wave-speed",
            ScenarioKind::Immobility => "immobility",
            ScenarioKind::Conjecture => "conjecture",
            ScenarioKind::WaitingTime => "waiting-time",
            ScenarioKind::LimitApprox => "limit-approx",
            ScenarioKind::Asymptotics => "asymptotics",
        }
    }

    fn uses_eps(&self) -> bool {
        !matches!(self, ScenarioKind::WaitingTime | ScenarioKind::LimitApprox)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slopes {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: f64,
    pub dt: f64,
    pub dt_out: f64,
}

/// Averaging half-width used for the weighted velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeltaRule {
    /// `1/log(1/ε)`
    #[default]
    InverseLog,
    /// `√ε`
    Sqrt,
    Fixed(f64),
}

impl DeltaRule {
    pub fn delta(&self, eps: f64) -> f64 {
        match self {
            DeltaRule::InverseLog => default_delta(eps),
            DeltaRule::Sqrt => eps.sqrt(),
            DeltaRule::Fixed(d) => *d,
        }
    }
}

fn d_x_max() -> f64 {
    3.0
}
fn d_fraction() -> f64 {
    0.9
}
fn d_fit_from() -> f64 {
    0.2
}
fn d_t_eval() -> Vec<f64> {
    vec![0.5]
}
fn d_threshold() -> f64 {
    0.05
}
fn d_side() -> Side {
    Side::Right
}
fn d_alpha() -> f64 {
    -0.5
}
fn d_ab_t0() -> f64 {
    0.2
}

/// Kind-specific settings; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Shooting horizon of the convergence sweep.
    #[serde(default = "d_x_max")]
    pub x_max: f64,
    /// Part of the closed-form support compared in the convergence sweep.
    #[serde(default = "d_fraction")]
    pub compact_fraction: f64,
    /// Start of the window for the least-squares interface velocity.
    #[serde(default = "d_fit_from")]
    pub fit_from: f64,
    /// Times at which the velocity law is evaluated.
    #[serde(default = "d_t_eval")]
    pub t_eval: Vec<f64>,
    #[serde(default = "d_threshold")]
    pub threshold: f64,
    #[serde(default = "d_side")]
    pub side: Side,
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    /// First time of the Aronson–Bénilan check.
    #[serde(default = "d_ab_t0")]
    pub ab_t0: f64,
}

impl Default for Params {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn d_slack() -> f64 {
    0.1
}
fn d_speed_band() -> [f64; 2] {
    [0.8, 1.2]
}
fn d_conj_band() -> [f64; 2] {
    [0.7, 1.3]
}
fn d_trend_slack() -> f64 {
    0.15
}
fn d_band_factor() -> f64 {
    3.0
}
fn d_n_slack() -> f64 {
    5e-3
}
fn d_energy_factor() -> f64 {
    2.0
}
fn d_weak_max() -> f64 {
    5e-3
}
fn d_steady_weak_max() -> f64 {
    1e-3
}
fn d_refine_gain() -> f64 {
    2.0
}
fn d_ab_slack() -> f64 {
    0.02
}
fn d_asym_band() -> [f64; 2] {
    [0.85, 1.0]
}

/// Acceptance bounds applied to the measured numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    /// Relative slack of "nonincreasing across the sweep" checks.
    #[serde(default = "d_slack")]
    pub monotone_slack: f64,
    #[serde(default)]
    pub max_final_error: Option<f64>,
    #[serde(default = "d_speed_band")]
    pub speed_ratio: [f64; 2],
    #[serde(default = "d_conj_band")]
    pub conjecture_ratio: [f64; 2],
    /// Relative agreement of the flux route with the direct route.
    #[serde(default = "d_slack")]
    pub flux_agreement: f64,
    /// Additive slack of the `|ratio − 1|` trend.
    #[serde(default = "d_trend_slack")]
    pub trend_slack: f64,
    #[serde(default = "d_band_factor")]
    pub band_factor: f64,
    #[serde(default = "d_n_slack")]
    pub n_slack: f64,
    #[serde(default = "d_energy_factor")]
    pub energy_factor: f64,
    #[serde(default = "d_weak_max")]
    pub weak_residual: f64,
    #[serde(default = "d_steady_weak_max")]
    pub steady_weak_residual: f64,
    #[serde(default = "d_refine_gain")]
    pub refinement_gain: f64,
    /// Lower bound of the Aronson–Bénilan quantity as a fraction of `max|u|`.
    #[serde(default = "d_ab_slack")]
    pub ab_slack: f64,
    /// Slack of the `t·q(t)` monotonicity.
    #[serde(default = "d_slack")]
    pub tq_slack: f64,
    /// `Some(true)`: slope must stay at or below the threshold (no waiting
    /// time is ever reached); `Some(false)`: slope must exceed it at the
    /// first output.
    #[serde(default)]
    pub expect_infinite_wait: Option<bool>,
    #[serde(default = "d_asym_band")]
    pub asymptotic_ratio: [f64; 2],
}

impl Default for Bounds {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

/// One scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub slopes: Option<Slopes>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub initial: Option<InitialData>,
    #[serde(default)]
    pub n_sequence: Option<Vec<u128>>,
    #[serde(default)]
    pub delta: DeltaRule,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub bounds: Bounds,
    /// Default output directory; the CLI's `--out` takes precedence.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn slopes(&self) -> Result<Slopes> {
        self.slopes
            .ok_or_else(|| cfg_err("`slopes` is required for this kind"))
    }

    fn grid(&self) -> Result<Grid> {
        let g = self
            .grid
            .ok_or_else(|| cfg_err("`grid` is required for this kind"))?;
        Grid::with_spacing(g.a, g.b, g.h).map_err(|e| cfg_err(format!("grid: {e}")))
    }

    fn time(&self) -> Result<TimeSpec> {
        self.time
            .ok_or_else(|| cfg_err("`time` is required for this kind"))
    }

    fn initial(&self) -> Result<&InitialData> {
        self.initial
            .as_ref()
            .ok_or_else(|| cfg_err("`initial` is required for this kind"))
    }

    fn limit_options(&self, t: &TimeSpec) -> LimitOptions {
        let mut o = LimitOptions::new(t.dt);
        o.output = OutputTimes::Every(t.dt_out);
        if let Some(n) = &self.n_sequence {
            o.n_sequence = n.clone();
        }
        o
    }

    /// Check every field the kind uses before anything runs.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(cfg_err("`name` must not be empty"));
        }
        if self.kind.uses_eps() && self.eps_list.is_empty() {
            return Err(cfg_err("`eps_list` must not be empty"));
        }
        if self.eps_list.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(cfg_err(format!(
                "`eps_list` entries must lie in (0, 1): {:?}",
                self.eps_list
            )));
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(cfg_err(format!(
                "`eps_list` must be strictly decreasing: {:?}",
                self.eps_list
            )));
        }
        if let Some(t) = &self.time {
            if !(t.t_end > 0.0 && t.dt > 0.0 && t.dt_out >= t.dt && t.dt_out <= t.t_end) {
                return Err(cfg_err(format!(
                    "`time` needs t_end > 0 and dt ≤ dt_out ≤ t_end: {t:?}"
                )));
            }
        }
        if let Some(n) = &self.n_sequence {
            if n.is_empty() || n[0] == 0 || n.windows(2).any(|w| w[0] >= w[1]) {
                return Err(cfg_err(format!(
                    "`n_sequence` must be positive and increasing: {n:?}"
                )));
            }
        }
        if let DeltaRule::Fixed(d) = self.delta {
            if !(d > 0.0) {
                return Err(cfg_err(format!("fixed delta must be positive, got {d}")));
            }
        }
        let p = &self.params;
        if !(p.compact_fraction > 0.0 && p.compact_fraction <= 1.0) || !(p.x_max > 0.0) {
            return Err(cfg_err(
                "`params.compact_fraction` must be in (0, 1] and `x_max` positive",
            ));
        }
        if !(p.threshold > 0.0) || !(p.alpha > -1.0) || !(p.ab_t0 > 0.0) {
            return Err(cfg_err(
                "`params` needs threshold > 0, alpha > −1 and ab_t0 > 0",
            ));
        }
        let bands = [
            self.bounds.speed_ratio,
            self.bounds.conjecture_ratio,
            self.bounds.asymptotic_ratio,
        ];
        if bands.iter().any(|b| !(b[0] <= b[1])) {
            return Err(cfg_err("ratio bands must be ordered [low, high]"));
        }
        let model_check = |eps: f64| EpsModel::new(eps).map_err(|e| cfg_err(e.to_string()));
        for &e in &self.eps_list {
            model_check(e)?;
        }
        match self.kind {
            ScenarioKind::TwConvergence => {
                let s = self.slopes()?;
                SteadySpec::new(s.a, s.b).map_err(|e| cfg_err(e.to_string()))?;
            }
            ScenarioKind::WaveSpeed | ScenarioKind::Conjecture => {
                let s = self.slopes()?;
                SteadySpec::new(s.a, s.b).map_err(|e| cfg_err(e.to_string()))?;
                self.grid()?;
                let t = self.time()?;
                if self.kind == ScenarioKind::WaveSpeed && !(p.fit_from < t.t_end) {
                    return Err(cfg_err("`params.fit_from` must be below `time.t_end`"));
                }
                if self.kind == ScenarioKind::Conjecture
                    && (p.t_eval.is_empty()
                        || p.t_eval.iter().any(|&te| !(te > 0.0 && te < t.t_end)))
                {
                    return Err(cfg_err(
                        "`params.t_eval` must be nonempty and inside (0, t_end)",
                    ));
                }
            }
            ScenarioKind::Immobility => {
                let g = self.grid()?;
                self.time()?;
                let m = EpsModel::new(self.eps_list[0]).map_err(|e| cfg_err(e.to_string()))?;
                make_initial(&m, self.initial()?, &g)
                    .map_err(|e| cfg_err(format!("initial: {e}")))?;
                if self.initial()?.zeros.len() != 1 {
                    return Err(cfg_err("immobility needs data with a single zero"));
                }
            }
            ScenarioKind::WaitingTime => {
                let g = self.grid()?;
                self.time()?;
                let data = self.initial()?;
                if data.zeros.len() != 1 {
                    return Err(cfg_err("waiting-time needs data with a single zero"));
                }
                crate::pde::limit_initial(&g, data)
                    .map_err(|e| cfg_err(format!("initial: {e}")))?;
            }
            ScenarioKind::LimitApprox => {
                self.grid()?;
                let t = self.time()?;
                if !(p.ab_t0 < t.t_end) {
                    return Err(cfg_err("`params.ab_t0` must be below `time.t_end`"));
                }
            }
            ScenarioKind::Asymptotics => {}
        }
        Ok(())
    }
}

/// Measured numbers of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub eps: Option<f64>,
    pub values: BTreeMap<String, f64>,
    pub csv: Option<String>,
}

/// A bound applied to the measured numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, bound: String, passed: bool) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub kind: ScenarioKind,
    pub runs: Vec<RunSummary>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Summary {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// A scenario's results held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub summary: Summary,
    /// `(file name, contents)` of every table.
    pub tables: Vec<(String, String)>,
}

/// A CSV table under construction. Numbers use the shortest decimal form
/// that reads back to the same `f64`.
struct Table {
    text: String,
}

impl Table {
    fn new(header: &str) -> Self {
        Self {
            text: format!("{header}\n"),
        }
    }

    fn row(&mut self, cells: &[f64]) {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            if c.is_nan() {
                continue;
            }
            push_number(&mut self.text, *c);
        }
        self.text.push('\n');
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
fn push_number(out: &mut String, v: f64) {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        let _ = write!(out, "{v}");
    } else {
        let _ = write!(out, "{v:e}");
    }
}

fn values(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Run a validated scenario on the global thread pool.
pub fn run(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    config.validate()?;
    let (runs, tables, checks) = match config.kind {
        ScenarioKind::TwConvergence => tw_convergence(config)?,
        ScenarioKind::WaveSpeed => wave_speed(config)?,
        ScenarioKind::Immobility => immobility(config)?,
        ScenarioKind::Conjecture => conjecture(config)?,
        ScenarioKind::WaitingTime => waiting(config)?,
        ScenarioKind::LimitApprox => limit_approx(config)?,
        ScenarioKind::Asymptotics => asymptotics(config)?,
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(ScenarioOutput {
        summary: Summary {
            name: config.name.clone(),
            kind: config.kind,
            runs,
            checks,
            passed,
        },
        tables,
    })
}

/// Run on a dedicated pool of `jobs` threads.
pub fn run_with_jobs(config: &ScenarioConfig, jobs: usize) -> Result<ScenarioOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| cfg_err(format!("thread pool: {e}")))?;
    pool.install(|| run(config))
}

type KindResult = Result<(Vec<RunSummary>, Vec<(String, String)>, Vec<Check>)>;

fn eps_label(i: usize, eps: f64) -> String {
    format!("eps{i}_{eps:e}")
}

/// `values[k+1] ≤ (1 + slack)·values[k]` for every step; returns the worst
/// ratio `values[k+1]/values[k]`.
fn nonincreasing(values: &[f64], slack: f64) -> (f64, bool) {
    let worst = values
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(0.0_f64, f64::max);
    (
        worst,
        values.windows(2).all(|w| w[1] <= (1.0 + slack) * w[0]),
    )
}

fn per_eps<T, F>(eps_list: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, f64) -> Result<T> + Sync,
{
    eps_list
        .par_iter()
        .enumerate()
        .map(|(i, &e)| f(i, e).map_err(|err| err.in_scenario(format!("eps = {e}"))))
        .collect()
}

fn tw_convergence(cfg: &ScenarioConfig) -> KindResult {
    let s = cfg.slopes()?;
    let target = SteadySpec::new(s.a, s.b)?;
    let p = &cfg.params;
    let results = per_eps(&cfg.eps_list, |i, eps| {
        let spec = ShootingSpec::new(EpsModel::new(eps)?, s.a, s.b)?.with_x_max(p.x_max);
        let w = build_wave(&spec)?;
        let (lo, hi) = w.x_range();
        let left = target.support_left().unwrap_or(f64::NEG_INFINITY).max(lo);
        let right = target.support_right().unwrap_or(f64::INFINITY).min(hi);
        let (lo_c, hi_c) = (p.compact_fraction * left, p.compact_fraction * right);
        let mut table = Table::new("x,w,w_closed");
        let mut err: f64 = 0.0;
        for (&x, &v) in w.xs.iter().zip(&w.ws) {
            let closed = target.w_ab(x);
            table.row(&[x, v, closed]);
            if x >= lo_c && x <= hi_c {
                err = err.max((v - closed).abs());
            }
        }
        let label = eps_label(i, eps);
        Ok((
            RunSummary {
                label: label.clone(),
                eps: Some(eps),
                values: values(&[
                    ("sup_error", err),
                    ("velocity", w.velocity),
                    ("x_lo", lo_c),
                    ("x_hi", hi_c),
                ]),
                csv: Some(format!("{label}.csv")),
            },
            (format!("{label}.csv"), table.text),
        ))
    })?;
    let (runs, tables): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let errs: Vec<f64> = runs.iter().map(|r| r.values["sup_error"]).collect();
    let slack = cfg.bounds.monotone_slack;
    let (worst, ok) = nonincreasing(&errs, slack);
    let mut checks = vec![Check::new(
        "sup_error_nonincreasing",
        worst,
        format!("each step ≤ {} × previous", 1.0 + slack),
        ok,
    )];
    if let Some(max) = cfg.bounds.max_final_error {
        let last = *errs.last().unwrap();
        checks.push(Check::new(
            "final_sup_error",
            last,
            format!("≤ {max}"),
            last <= max,
        ));
    }
    Ok((runs, tables, checks))
}

/// The travelling-wave run shared by the wave-speed and velocity-law
/// scenarios: the ε-wave as initial and boundary data, solved on the full
/// grid, plus the restriction to the window where the wave is increasing.
pub struct TravellingRun {
    pub wave: WaveProfile,
    pub solution: PdeSolution,
    pub window: PdeSolution,
}

pub fn travelling_run(
    model: &EpsModel,
    slopes: Slopes,
    grid: &Grid,
    time: &TimeSpec,
) -> Result<TravellingRun> {
    let c = crate::wave::velocity(model, slopes.a, slopes.b)?;
    let reach = grid.a.abs().max(grid.b.abs()) + c.abs() * time.t_end + 0.5;
    let steady = SteadySpec::new(slopes.a, slopes.b)?;
    let cap = 2.0 * steady.w_ab(-reach).abs().max(steady.w_ab(reach).abs()) + 10.0 * model.u1();
    let spec = ShootingSpec::new(*model, slopes.a, slopes.b)?
        .with_x_max(reach)
        .with_height_cap(cap);
    let wave = build_wave(&spec)?;
    let u0 = wave.sample(&grid.nodes())?;
    let opts = EpsOptions {
        dt: time.dt,
        output: OutputTimes::Every(time.dt_out),
        boundary: BoundaryData::Translating(wave.clone()),
    };
    let solution = solve_eps_with(model, grid, &u0, time.t_end, &opts)?;
    // keep a margin from any crest so the window stays increasing while the wave moves
    let (lo, hi) = wave.monotone_range();
    let margin = 0.1 + c.abs() * time.t_end;
    let window = solution.restrict(grid.a.max(lo + margin), grid.b.min(hi - margin))?;
    Ok(TravellingRun {
        wave,
        solution,
        window,
    })
}

fn trace_table(trace: &interface::InterfaceTrace) -> Table {
    let mut t = Table::new("t,zeta,zeta_rate");
    for k in 0..trace.times.len() {
        t.row(&[trace.times[k], trace.zeta[k], trace.zeta_rate[k]]);
    }
    t
}

fn wave_speed(cfg: &ScenarioConfig) -> KindResult {
    let s = cfg.slopes()?;
    let grid = cfg.grid()?;
    let time = cfg.time()?;
    let fit_from = cfg.params.fit_from;
    let results = per_eps(&cfg.eps_list, |i, eps| {
        let model = EpsModel::new(eps)?;
        let run = travelling_run(&model, s, &grid, &time)?;
        let trace = track(&run.window)?;
        let measured = trace.fitted_velocity(fit_from, time.t_end)?;
        let c = run.wave.velocity;
        let label = eps_label(i, eps);
        Ok((
            RunSummary {
                label: label.clone(),
                eps: Some(eps),
                values: values(&[
                    ("measured_velocity", measured),
                    ("velocity", c),
                    ("ratio", measured / c),
                ]),
                csv: Some(format!("{label}.csv")),
            },
            (format!("{label}.csv"), trace_table(&trace).text),
        ))
    })?;
    let (runs, tables): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let [lo, hi] = cfg.bounds.speed_ratio;
    let checks = runs
        .iter()
        .map(|r| {
            let v = r.values["ratio"];
            Check::new(
                &format!("speed_ratio_{}", r.label),
                v,
                format!("in [{lo}, {hi}]"),
                v >= lo && v <= hi,
            )
        })
        .collect();
    Ok((runs, tables, checks))
}

fn immobility(cfg: &ScenarioConfig) -> KindResult {
    let grid = cfg.grid()?;
    let time = cfg.time()?;
    let data = cfg.initial()?.clone();
    let x1 = data.zeros[0];
    let results = per_eps(&cfg.eps_list, |i, eps| {
        let model = EpsModel::new(eps)?;
        let u0 = make_initial(&model, &data, &grid)?;
        let opts = EpsOptions {
            dt: time.dt,
            output: OutputTimes::Every(time.dt_out),
            boundary: BoundaryData::FromInitial,
        };
        let sol = solve_eps_with(&model, &grid, &u0, time.t_end, &opts)?;
        let trace = track(&sol)?;
        let disp = trace.max_displacement(x1, time.t_end);
        let label = eps_label(i, eps);
        Ok((
            RunSummary {
                label: label.clone(),
                eps: Some(eps),
                values: values(&[
                    ("max_displacement", disp),
                    ("scaled_displacement", disp * eps.ln().abs()),
                ]),
                csv: Some(format!("{label}.csv")),
            },
            (format!("{label}.csv"), trace_table(&trace).text),
        ))
    })?;
    let (runs, tables): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let disp: Vec<f64> = runs.iter().map(|r| r.values["max_displacement"]).collect();
    let scaled: Vec<f64> = runs
        .iter()
        .map(|r| r.values["scaled_displacement"])
        .collect();
    let slack = cfg.bounds.monotone_slack;
    let (worst, ok) = nonincreasing(&disp, slack);
    let spread = scaled.iter().cloned().fold(0.0, f64::max)
        / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let f = cfg.bounds.band_factor;
    let checks = vec![
        Check::new(
            "displacement_nonincreasing",
            worst,
            format!("each step ≤ {} × previous", 1.0 + slack),
            ok,
        ),
        Check::new(
            "log_scaled_band",
            spread,
            format!("max/min ≤ {f}"),
            spread <= f,
        ),
    ];
    Ok((runs, tables, checks))
}

/// Steady limit state `w_AB` frozen at the given times.
fn steady_limit(slopes: Slopes, grid: &Grid, times: &[f64]) -> Result<PdeSolution> {
    let s = SteadySpec::new(slopes.a, slopes.b)?;
    let p = s.sample(&grid.nodes());
    PdeSolution::from_profiles(*grid, times.to_vec(), vec![p; times.len()], 0.0)
}

fn conjecture(cfg: &ScenarioConfig) -> KindResult {
    let s = cfg.slopes()?;
    let grid = cfg.grid()?;
    let time = cfg.time()?;
    let t_eval = cfg.params.t_eval.clone();
    let rule = cfg.delta;
    let results = per_eps(&cfg.eps_list, |i, eps| {
        let model = EpsModel::new(eps)?;
        let delta = rule.delta(eps);
        let run = travelling_run(&model, s, &grid, &time)?;
        let sol = &run.window;
        // the travelling wave converges to the glued steady state at its origin
        let limit = steady_limit(s, &sol.grid, &sol.times)?;
        let x1 = 0.0;
        let trace = track(sol)?;
        let mut table =
            Table::new("t,zeta,zeta_rate,left_slope,right_slope,weighted_velocity,rhs,ratio");
        for k in 1..sol.times.len() - 1 {
            let t = sol.times[k];
            let g = conjecture_gap(sol, &limit, t, delta, &model, x1)?;
            let sp = interface::one_sided_slopes(&limit, t, x1)?;
            table.row(&[
                t,
                trace.zeta[k],
                trace.zeta_rate[k],
                sp.left,
                sp.right,
                g.lhs,
                g.rhs,
                g.ratio,
            ]);
        }
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut flux_gap: f64 = 0.0;
        for &t in &t_eval {
            let k = nearest_time(sol, t);
            let t = sol.times[k];
            let g = conjecture_gap(sol, &limit, t, delta, &model, x1)?;
            let f = flux_velocity(sol, t, delta, &model)?;
            flux_gap = flux_gap.max((f - g.lhs).abs() / g.lhs.abs());
            lhs += g.lhs;
            rhs += g.rhs;
        }
        let m = t_eval.len() as f64;
        let (lhs, rhs) = (lhs / m, rhs / m);
        let label = eps_label(i, eps);
        Ok((
            RunSummary {
                label: label.clone(),
                eps: Some(eps),
                values: values(&[
                    ("delta", delta),
                    ("lhs", lhs),
                    ("rhs", rhs),
                    ("ratio", lhs / rhs),
                    ("flux_relative_gap", flux_gap),
                ]),
                csv: Some(format!("{label}.csv")),
            },
            (format!("{label}.csv"), table.text),
        ))
    })?;
    let (runs, mut tables): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let mut ratios = Table::new("eps,lhs,rhs,ratio");
    for r in &runs {
        ratios.row(&[
            r.eps.unwrap(),
            r.values["lhs"],
            r.values["rhs"],
            r.values["ratio"],
        ]);
    }
    tables.push(("ratios.csv".into(), ratios.text));
    let b = &cfg.bounds;
    let [lo, hi] = b.conjecture_ratio;
    let last = runs.last().unwrap();
    let ratio = last.values["ratio"];
    let worst_flux = runs
        .iter()
        .map(|r| r.values["flux_relative_gap"])
        .fold(0.0, f64::max);
    let dev: Vec<f64> = runs
        .iter()
        .map(|r| (r.values["ratio"] - 1.0).abs())
        .collect();
    let trend_ok = dev.windows(2).all(|w| w[1] <= w[0] + b.trend_slack);
    let trend = dev
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let checks = vec![
        Check::new(
            "ratio_at_smallest_eps",
            ratio,
            format!("in [{lo}, {hi}]"),
            ratio >= lo && ratio <= hi,
        ),
        Check::new(
            "flux_agreement",
            worst_flux,
            format!("≤ {}", b.flux_agreement),
            worst_flux <= b.flux_agreement,
        ),
        Check::new(
            "ratio_trend",
            if dev.len() > 1 { trend } else { 0.0 },
            format!("|ratio − 1| grows by ≤ {} per step", b.trend_slack),
            trend_ok,
        ),
    ];
    Ok((runs, tables, checks))
}

fn nearest_time(sol: &PdeSolution, t: f64) -> usize {
    let last = sol.times.len() - 2;
    (1..=last.max(1))
        .min_by(|&a, &b| {
            (sol.times[a] - t)
                .abs()
                .partial_cmp(&(sol.times[b] - t).abs())
                .unwrap()
        })
        .unwrap()
}

fn waiting(cfg: &ScenarioConfig) -> KindResult {
    let grid = cfg.grid()?;
    let time = cfg.time()?;
    let data = cfg.initial()?;
    let p = &cfg.params;
    let opts = cfg.limit_options(&time);
    let sol = solve_limit(&grid, data, time.t_end, &opts)?;
    let x1 = grid.x(grid.nearest(data.zeros[0]));
    let w = waiting_time(&sol, x1, p.side, p.threshold)?;
    let tq = monotone_bound_ratio(&sol, x1, p.side, 0.0, p.threshold)?;
    let ab = aronson_benilan_check(&sol, p.ab_t0)?;
    let max_u = sol.max_abs();
    let max_slope = w
        .slopes
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let (t_first, s_first) = w.slopes[0];
    let mut table = Table::new("t,slope");
    for &(t, s) in &w.slopes {
        table.row(&[t, s]);
    }
    let level = *opts.n_sequence.last().unwrap() as f64;
    let run = RunSummary {
        label: "limit".into(),
        eps: None,
        values: values(&[
            ("tau", w.tau),
            (
                "tau_is_infinite",
                if w.tau.is_infinite() { 1.0 } else { 0.0 },
            ),
            ("max_slope", max_slope),
            ("first_output_time", t_first),
            ("slope_at_first_output", s_first),
            ("bound_violations", w.bound_violations.len() as f64),
            ("tq_ratio", tq),
            ("aronson_benilan", ab),
            ("max_abs_u", max_u),
            ("level_n", level),
        ]),
        csv: Some("slopes.csv".into()),
    };
    let b = &cfg.bounds;
    let mut checks = vec![
        Check::new(
            "tq_nondecreasing",
            tq,
            format!("≥ {}", 1.0 - b.tq_slack),
            tq >= 1.0 - b.tq_slack,
        ),
        Check::new(
            "aronson_benilan",
            ab,
            format!("≥ −{} × max|u| = {}", b.ab_slack, -b.ab_slack * max_u),
            ab >= -b.ab_slack * max_u,
        ),
    ];
    match b.expect_infinite_wait {
        Some(true) => checks.push(Check::new(
            "slope_stays_below_threshold",
            max_slope,
            format!("≤ {}", p.threshold),
            max_slope <= p.threshold,
        )),
        Some(false) => checks.push(Check::new(
            "slope_at_first_output",
            s_first,
            format!("> {}", p.threshold),
            s_first > p.threshold && w.tau == t_first,
        )),
        None => {}
    }
    Ok((vec![run], vec![("slopes.csv".into(), table.text)], checks))
}

fn sine_bump(grid: &Grid) -> Vec<f64> {
    let len = grid.b - grid.a;
    let mut u: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| (PI * (x - grid.a) / len).sin().max(0.0))
        .collect();
    u[0] = 0.0;
    u[grid.n_cells] = 0.0;
    u
}

/// Weak residual of the steady state `1 − e^{−x}` on `[0, 3]` over `t ∈ [0, 1]`,
/// sampled at spacing `h` with time step `h/10` and 101 stored times.
pub fn steady_weak_residual(h: f64) -> Result<f64> {
    let g = Grid::with_spacing(0.0, 3.0, h)?;
    let s = SteadySpec::new(1.0, 1.0)?;
    let p = g
        .nodes()
        .iter()
        .map(|&x| s.w_plus(x))
        .collect::<Result<Vec<_>>>()?;
    let times: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let sol = PdeSolution::from_profiles(g, times.clone(), vec![p; times.len()], h / 10.0)?;
    weak_residual(
        &sol,
        &ProductBump {
            x0: 0.0,
            x1: 3.0,
            t_end: 1.0,
        },
    )
}

fn limit_approx(cfg: &ScenarioConfig) -> KindResult {
    let grid = cfg.grid()?;
    let time = cfg.time()?;
    let p = &cfg.params;
    let b = &cfg.bounds;
    let opts = cfg.limit_options(&time);
    let u0 = sine_bump(&grid);
    let sols = solve_limit_interval(&grid, &u0, time.t_end, &opts)?;
    let energy = energy_estimate(&sols, p.alpha)?;
    let psi = ProductBump {
        x0: grid.a,
        x1: grid.b,
        t_end: time.t_end,
    };
    let mut runs = Vec::new();
    let mut tables = Vec::new();
    let mut worst_increase = f64::NEG_INFINITY;
    for (k, sol) in sols.iter().enumerate() {
        let level = sol.meta.n.unwrap_or(0);
        let weak = weak_residual(sol, &psi)?;
        let ab = aronson_benilan_check(sol, p.ab_t0)?;
        if k > 0 {
            for (a, bb) in sols[k - 1].profiles.iter().zip(&sol.profiles) {
                for (x, y) in a.iter().zip(bb) {
                    worst_increase = worst_increase.max(y - x);
                }
            }
        }
        let mut table = Table::new("x,u0,u_final");
        let last = sol.profiles.last().unwrap();
        for (j, x) in grid.nodes().iter().enumerate() {
            table.row(&[*x, sol.profiles[0][j], last[j]]);
        }
        let label = format!("n{level}");
        runs.push(RunSummary {
            label: label.clone(),
            eps: None,
            values: values(&[
                ("n", level as f64),
                ("energy", energy[k]),
                ("weak_residual", weak),
                ("aronson_benilan", ab),
                ("max_abs_u", sol.max_abs()),
            ]),
            csv: Some(format!("{label}.csv")),
        });
        tables.push((format!("{label}.csv"), table.text));
    }
    let h = grid.h();
    let steady = steady_weak_residual(h)?.abs();
    let steady_fine = steady_weak_residual(0.5 * h)?.abs();
    runs.push(RunSummary {
        label: "steady".into(),
        eps: None,
        values: values(&[
            ("weak_residual", steady),
            ("weak_residual_refined", steady_fine),
        ]),
        csv: None,
    });
    let e_max = energy.iter().cloned().fold(0.0, f64::max);
    let weak_last = runs[sols.len() - 1].values["weak_residual"].abs();
    let ab_min = runs[..sols.len()]
        .iter()
        .map(|r| r.values["aronson_benilan"] / r.values["max_abs_u"])
        .fold(f64::INFINITY, f64::min);
    let gain = steady / steady_fine;
    let checks = vec![
        Check::new(
            "monotone_in_n",
            worst_increase.max(0.0),
            format!("≤ {}", b.n_slack),
            sols.len() < 2 || worst_increase <= b.n_slack,
        ),
        Check::new(
            "energy_bounded",
            e_max / energy[0],
            format!("≤ {}", b.energy_factor),
            e_max <= b.energy_factor * energy[0],
        ),
        Check::new(
            "weak_residual_largest_n",
            weak_last,
            format!("≤ {}", b.weak_residual),
            weak_last <= b.weak_residual,
        ),
        Check::new(
            "steady_weak_residual",
            steady,
            format!("≤ {}", b.steady_weak_residual),
            steady <= b.steady_weak_residual,
        ),
        Check::new(
            "steady_refinement_gain",
            gain,
            format!("≥ {}", b.refinement_gain),
            gain >= b.refinement_gain,
        ),
        Check::new(
            "aronson_benilan",
            ab_min,
            format!("≥ −{} (relative to max|u|)", b.ab_slack),
            ab_min >= -b.ab_slack,
        ),
    ];
    Ok((runs, tables, checks))
}

/// `A_ε(δ)/(−log ε)` for the two half-width rules.
pub fn asymptotic_ratios(eps: f64) -> Result<(f64, f64)> {
    let m = EpsModel::new(eps)?;
    let scale = -eps.ln();
    Ok((
        m.a_transform(default_delta(eps))? / scale,
        m.a_transform(eps.sqrt())? / scale,
    ))
}

fn asymptotics(cfg: &ScenarioConfig) -> KindResult {
    let mut table = Table::new("eps,delta_log,ratio_log,delta_sqrt,ratio_sqrt");
    let mut runs = Vec::new();
    for (i, &eps) in cfg.eps_list.iter().enumerate() {
        let (r_log, r_sqrt) =
            asymptotic_ratios(eps).map_err(|e| e.in_scenario(format!("eps = {eps}")))?;
        table.row(&[eps, default_delta(eps), r_log, eps.sqrt(), r_sqrt]);
        runs.push(RunSummary {
            label: eps_label(i, eps),
            eps: Some(eps),
            values: values(&[("ratio_log", r_log), ("ratio_sqrt", r_sqrt)]),
            csv: Some("ratios.csv".into()),
        });
    }
    let [lo, hi] = cfg.bounds.asymptotic_ratio;
    let r: Vec<f64> = runs.iter().map(|r| r.values["ratio_log"]).collect();
    let last = *r.last().unwrap();
    let increase = r
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::new(
            "ratio_at_smallest_eps",
            last,
            format!("in [{lo}, {hi}]"),
            last >= lo && last <= hi,
        ),
        Check::new(
            "ratio_increasing",
            if r.len() > 1 { increase } else { 0.0 },
            "> 0 per step".into(),
            r.windows(2).all(|w| w[1] > w[0]),
        ),
    ];
    Ok((runs, vec![("ratios.csv".into(), table.text)], checks))
}

/// Write a gnuplot command file plotting the scenario's tables. Every
/// referenced table must already exist in `dir`.
pub fn emit_plot_script(summary: &Summary, dir: &Path, tables: &[String]) -> Result<PathBuf> {
    for t in tables {
        let p = dir.join(t);
        if !p.is_file() {
            return Err(Error::Io(format!("missing table {}", p.display())));
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "# {}", summary.name);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let runs_with = |name: &str| -> Vec<&RunSummary> {
        summary
            .runs
            .iter()
            .filter(|r| r.csv.as_deref().is_some_and(|c| c != name))
            .collect()
    };
    let curves = |s: &mut String, runs: &[&RunSummary], cols: &str| {
        let parts: Vec<String> = runs
            .iter()
            .map(|r| {
                format!(
                    "'{}' using {cols} with lines title '{}'",
                    r.csv.as_ref().unwrap(),
                    r.label
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    };
    match summary.kind {
        ScenarioKind::TwConvergence => {
            let _ = writeln!(s, "set xlabel 'x'\nset ylabel 'w'");
            let runs = runs_with("");
            let mut parts: Vec<String> = runs
                .iter()
                .map(|r| {
                    format!(
                        "'{}' using 1:2 with lines title '{}'",
                        r.csv.as_ref().unwrap(),
                        r.label
                    )
                })
                .collect();
            if let Some(r) = runs.first() {
                parts.push(format!(
                    "'{}' using 1:3 with lines dashtype 2 title 'closed form'",
                    r.csv.as_ref().unwrap()
                ));
            }
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        }
        ScenarioKind::WaveSpeed | ScenarioKind::Immobility => {
            let _ = writeln!(s, "set xlabel 't'\nset ylabel 'zeta'");
            curves(&mut s, &runs_with(""), "1:2");
        }
        ScenarioKind::Conjecture => {
            let _ = writeln!(s, "set logscale x\nset xlabel 'eps'\nset ylabel 'ratio'");
            let _ = writeln!(
                s,
                "plot 'ratios.csv' using 1:4 with linespoints title 'ratio', 1 dashtype 2 notitle"
            );
        }
        ScenarioKind::WaitingTime => {
            let _ = writeln!(s, "set xlabel 't'\nset ylabel 'one-sided slope'");
            let _ = writeln!(
                s,
                "plot 'slopes.csv' using 1:2 with linespoints title 'slope'"
            );
        }
        ScenarioKind::LimitApprox => {
            let _ = writeln!(s, "set xlabel 'x'\nset ylabel 'u'");
            curves(&mut s, &runs_with(""), "1:3");
        }
        ScenarioKind::Asymptotics => {
            let _ = writeln!(
                s,
                "set logscale x\nset xlabel 'eps'\nset ylabel 'A(delta)/|log eps|'"
            );
            let _ = writeln!(
                s,
                "plot 'ratios.csv' using 1:3 with linespoints title 'delta = 1/log(1/eps)', \\\n     'ratios.csv' using 1:5 with linespoints title 'delta = sqrt(eps)'"
            );
        }
    }
    let path = dir.join("plot.gp");
    std::fs::write(&path, s)?;
    Ok(path)
}

/// Write tables, `summary.json` and `plot.gp` into `dir`.
pub fn write_outputs(out: &ScenarioOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in &out.tables {
        std::fs::write(dir.join(name), text)?;
    }
    let json = serde_json::to_string_pretty(&out.summary)?;
    std::fs::write(dir.join("summary.json"), json + "\n")?;
    let names: Vec<String> = out.tables.iter().map(|t| t.0.clone()).collect();
    emit_plot_script(&out.summary, dir, &names)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: &str, extra: &str) -> String {
        format!(r#"{{"name": "t", "kind": "{kind}"{extra}}}"#)
    }

    #[test]
    fn empty_eps_list_is_rejected() {
        let err =
            ScenarioConfig::from_json(&base("tw_convergence", r#", "slopes": {"a": 2, "b": 2}"#));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn eps_list_must_decrease_inside_the_unit_interval() {
        for list in ["[1e-3, 1e-2]", "[1.0]", "[0.1, -0.1]"] {
            let cfg = base("asymptotics", &format!(r#", "eps_list": {list}"#));
            assert!(
                matches!(ScenarioConfig::from_json(&cfg), Err(Error::Config(_))),
                "{list}"
            );
        }
    }

    #[test]
    fn unknown_fields_and_missing_sections_are_rejected() {
        let cfg = base("asymptotics", r#", "eps_list": [1e-2], "colour": 1"#);
        assert!(ScenarioConfig::from_json(&cfg).is_err());
        let cfg = base(
            "wave_speed",
            r#", "eps_list": [1e-2], "slopes": {"a": 2, "b": 1}"#,
        );
        assert!(matches!(
            ScenarioConfig::from_json(&cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn initial_data_parses_from_json() {
        let cfg = base(
            "immobility",
            r#", "eps_list": [1e-1], "grid": {"a": -1, "b": 1, "h": 0.01},
               "time": {"t_end": 0.1, "dt": 1e-3, "dt_out": 0.01},
               "initial": {"kind": "monotone_tanh_like", "steepness": 2, "zeros": [0.2]}"#,
        );
        let c = ScenarioConfig::from_json(&cfg).unwrap();
        assert_eq!(c.initial.unwrap(), InitialData::monotone(0.2, 2.0));
        let bad = cfg.replace("[0.2]", "[0.2, 0.3]");
        assert!(matches!(
            ScenarioConfig::from_json(&bad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn asymptotics_scenario() {
        let cfg =
            ScenarioConfig::from_json(&base("asymptotics", r#", "eps_list": [1e-4, 1e-6, 1e-8]"#))
                .unwrap();
        let out = run(&cfg).unwrap();
        assert!(out.summary.passed, "{:?}", out.summary.checks);
        let r = out.summary.runs[2].values["ratio_sqrt"];
        assert!((r - 0.5).abs() < 0.1);
        assert_eq!(out.tables[0].1.lines().count(), 4);
    }

    #[test]
    fn convergence_scenario_writes_everything() {
        let cfg = ScenarioConfig::from_json(&base(
            "tw_convergence",
            r#", "eps_list": [1e-2, 1e-3, 1e-4], "slopes": {"a": 2, "b": 2}"#,
        ))
        .unwrap();
        let out = run_with_jobs(&cfg, 2).unwrap();
        assert_eq!(out.summary.runs.len(), 3);
        assert!(out.summary.check("sup_error_nonincreasing").unwrap().passed);
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&out, dir.path()).unwrap();
        for f in ["summary.json", "plot.gp", "eps0_1e-2.csv"] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
        let plot = std::fs::read_to_string(dir.path().join("plot.gp")).unwrap();
        assert_eq!(plot.matches("with lines").count(), 4);
    }

    #[test]
    fn plot_script_needs_its_tables() {
        let cfg =
            ScenarioConfig::from_json(&base("asymptotics", r#", "eps_list": [1e-4]"#)).unwrap();
        let out = run(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let res = emit_plot_script(&out.summary, dir.path(), &["ratios.csv".into()]);
        assert!(matches!(res, Err(Error::Io(_))));
    }

    #[test]
    fn csv_numbers_round_trip() {
        let mut t = Table::new("a,b");
        let row = [0.1, 1.0 / 3.0, 3.9e-27, -2.5e20, 0.0];
        t.row(&row);
        let line = t.text.lines().nth(1).unwrap().to_string();
        assert_eq!(line, "0.1,0.3333333333333333,3.9e-27,-2.5e20,0");
        let back: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(back, row);
    }
}
