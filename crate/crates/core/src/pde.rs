//! Finite-difference solvers for the regularised problem and for the
//! degenerate limit problem, together with the a-priori quantities used to
//! check them.
//!
//! Both solvers use the same first-order IMEX step: the diffusion term is
//! implicit with its coefficient frozen at the old level, the reaction is
//! explicit, so each step costs one tridiagonal solve.
//!
//! The limit problem `u_t = |u|u_xx + u(1 − |u|)` is solved interval by
//! interval between consecutive zeros of the data. On a positive interval it
//! is approximated by the uniformly parabolic problem `u_t = u(u_xx + 1 − u)`
//! with every boundary and initial value raised by `1/n`; the solutions
//! decrease to the limit as `n` grows.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::EpsModel;
use crate::wave::WaveProfile;

/// Uniform grid on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
}

impl Grid {
    pub const MIN_CELLS: usize = 8;

    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid needs a < b, got [{a}, {b}]"
            )));
        }
        if n_cells < Self::MIN_CELLS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} cells, got {n_cells}",
                Self::MIN_CELLS
            )));
        }
        Ok(Self { a, b, n_cells })
    }

    /// Grid on `[a, b]` whose spacing is as close to `h` as possible.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        Self::new(a, b, ((b - a) / h).round().max(1.0) as usize)
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n_cells as f64
    }

    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        if j == self.n_cells {
            self.b
        } else {
            self.a + j as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    /// Index of the node nearest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        (((x - self.a) / self.h()).round().max(0.0) as usize).min(self.n_cells)
    }
}

fn default_steepness() -> f64 {
    2.0
}

/// Shape of the initial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialKind {
    /// `P·tanh(k(x−x₁)) + Q·tanh²(k(x−x₁))` with a single zero, strictly
    /// increasing.
    MonotoneTanhLike {
        #[serde(default = "default_steepness")]
        steepness: f64,
    },
    /// `∏(x − xᵢ)·(α + β(x − a))`, alternating in sign between the zeros.
    MultiZero,
    /// `sgn(x−x₁)·exp(−1/|x−x₁|)`, scaled separately on each side. It has a
    /// zero of infinite order.
    FlatExponential,
}

/// Initial data: a shape and its ordered zeros.
///
/// The profile is negative on `(a, x₁)` and alternates in sign across every
/// zero, so an odd number of zeros is needed to reach the positive value at
/// `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    #[serde(flatten)]
    pub kind: InitialKind,
    pub zeros: Vec<f64>,
}

impl InitialData {
    pub fn monotone(x1: f64, steepness: f64) -> Self {
        Self {
            kind: InitialKind::MonotoneTanhLike { steepness },
            zeros: vec![x1],
        }
    }

    pub fn multi_zero(zeros: Vec<f64>) -> Self {
        Self {
            kind: InitialKind::MultiZero,
            zeros,
        }
    }

    pub fn flat_exponential(x1: f64) -> Self {
        Self {
            kind: InitialKind::FlatExponential,
            zeros: vec![x1],
        }
    }

    /// Sign of the data on the interval `(x_i, x_{i+1})`, with `x_0 = a`.
    pub fn interval_sign(i: usize) -> f64 {
        if i.is_multiple_of(2) {
            -1.0
        } else {
            1.0
        }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        let z = &self.zeros;
        if z.is_empty() || z.len().is_multiple_of(2) {
            return Err(Error::BadZeros(format!(
                "{} zeros cannot connect a negative value at a to a positive value at b",
                z.len()
            )));
        }
        if !matches!(self.kind, InitialKind::MultiZero) && z.len() != 1 {
            return Err(Error::BadZeros(
                "this profile kind has exactly one zero".into(),
            ));
        }
        let mut edges = vec![grid.a];
        edges.extend_from_slice(z);
        edges.push(grid.b);
        for w in edges.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::BadZeros(format!(
                    "zeros must be strictly increasing inside ({}, {}): {z:?}",
                    grid.a, grid.b
                )));
            }
            // every sign interval must contain a node of its own
            let inside = grid.nodes().iter().any(|&x| x > w[0] && x < w[1]);
            if !inside {
                return Err(Error::BadZeros(format!(
                    "no grid node strictly between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    /// The profile as a function, with boundary values `∓v`.
    fn profile(&self, a: f64, b: f64, v: f64) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        match self.kind {
            InitialKind::MonotoneTanhLike { steepness: k } => {
                if !(k > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "steepness must be positive, got {k}"
                    )));
                }
                let x1 = self.zeros[0];
                let sa = (k * (a - x1)).tanh();
                let sb = (k * (b - x1)).tanh();
                // P·s + Q·s² = ∓v at the two ends
                let det = sa * sb * (sb - sa);
                let p = (-v * sb * sb - v * sa * sa) / det;
                let q = (v * sa + v * sb) / det;
                if !(p + 2.0 * q * sa > 0.0 && p + 2.0 * q * sb > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "steepness {k} gives a non-monotone profile for x1 = {x1} on [{a}, {b}]"
                    )));
                }
                Ok(Box::new(move |x| {
                    let s = (k * (x - x1)).tanh();
                    p * s + q * s * s
                }))
            }
            InitialKind::MultiZero => {
                let z = self.zeros.clone();
                let prod = move |x: f64| z.iter().map(|&zi| x - zi).product::<f64>();
                let alpha = -v / prod(a);
                let beta = (v / prod(b) - alpha) / (b - a);
                Ok(Box::new(move |x| prod(x) * (alpha + beta * (x - a))))
            }
            InitialKind::FlatExponential => {
                let x1 = self.zeros[0];
                let left = v / (-1.0 / (x1 - a)).exp();
                let right = v / (-1.0 / (b - x1)).exp();
                Ok(Box::new(move |x| {
                    let d = x - x1;
                    if d == 0.0 {
                        0.0
                    } else if d > 0.0 {
                        right * (-1.0 / d).exp()
                    } else {
                        -left * (1.0 / d).exp()
                    }
                }))
            }
        }
    }
}

/// Initial profile of the regularised problem, with boundary values `∓u_{1ε}`.
pub fn make_initial(model: &EpsModel, data: &InitialData, grid: &Grid) -> Result<Vec<f64>> {
    make_initial_with_boundary(data, grid, model.u1())
}

/// Initial profile with boundary values `∓boundary`; the limit problem uses
/// `boundary = 1`.
pub fn make_initial_with_boundary(
    data: &InitialData,
    grid: &Grid,
    boundary: f64,
) -> Result<Vec<f64>> {
    data.validate(grid)?;
    let f = data.profile(grid.a, grid.b, boundary)?;
    let mut u: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
    u[0] = -boundary;
    u[grid.n_cells] = boundary;
    Ok(u)
}

/// Which times to store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputTimes {
    /// `T/100` spacing plus a geometric refinement `T/100·2^{−k}` towards 0.
    Default,
    /// Every multiple of the given spacing plus the geometric refinement.
    Every(f64),
    /// Exactly these times (each snapped to the nearest step).
    List(Vec<f64>),
}

const GEOMETRIC_LEVELS: i32 = 6;

impl OutputTimes {
    /// Step indices to store for `n_steps` steps of size `dt`.
    fn step_indices(&self, n_steps: usize, dt: f64) -> Result<Vec<usize>> {
        let t_end = n_steps as f64 * dt;
        let snap = |t: f64| ((t / dt).round().max(0.0) as usize).min(n_steps);
        if n_steps == 0 {
            return Ok(vec![0]);
        }
        let mut idx = vec![0, n_steps];
        let mut spaced = |spacing: f64| -> Result<()> {
            if !(spacing > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "output spacing must be positive, got {spacing}"
                )));
            }
            let count = (t_end / spacing).round() as usize;
            for k in 1..=count {
                idx.push(snap(k as f64 * spacing));
            }
            for k in 1..=GEOMETRIC_LEVELS {
                idx.push(snap(spacing * 2f64.powi(-k)));
            }
            Ok(())
        };
        match self {
            OutputTimes::Default => spaced(t_end / 100.0)?,
            OutputTimes::Every(s) => spaced(*s)?,
            OutputTimes::List(ts) => {
                for &t in ts {
                    if !(t >= 0.0 && t <= t_end * (1.0 + 1e-12)) {
                        return Err(Error::InvalidParameter(format!(
                            "output time {t} outside [0, {t_end}]"
                        )));
                    }
                    idx.push(snap(t));
                }
            }
        }
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }
}

/// Dirichlet data of the regularised problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryData {
    /// Hold the end values of the initial profile.
    FromInitial,
    /// Follow a travelling wave: `u(a, t) = w(a − ct)`, `u(b, t) = w(b − ct)`.
    Translating(WaveProfile),
}

impl BoundaryData {
    fn values(&self, grid: &Grid, u0: &[f64], t: f64) -> Result<(f64, f64)> {
        match self {
            BoundaryData::FromInitial => Ok((u0[0], u0[u0.len() - 1])),
            BoundaryData::Translating(w) => {
                let shift = w.velocity * t;
                Ok((w.eval(grid.a - shift)?, w.eval(grid.b - shift)?))
            }
        }
    }
}

/// Settings of [`solve_eps_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsOptions {
    pub dt: f64,
    pub output: OutputTimes,
    pub boundary: BoundaryData,
}

impl EpsOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            output: OutputTimes::Default,
            boundary: BoundaryData::FromInitial,
        }
    }
}

/// Default approximation levels `n` of the limit solver.
pub const DEFAULT_N_SEQUENCE: [u128; 3] = [10, 40, 160];

/// Settings of the limit solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    pub dt: f64,
    pub output: OutputTimes,
    /// Increasing approximation levels; `solve_limit` uses the last.
    pub n_sequence: Vec<u128>,
}

impl LimitOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            output: OutputTimes::Default,
            n_sequence: DEFAULT_N_SEQUENCE.to_vec(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_sequence.is_empty()
            || self.n_sequence[0] == 0
            || self.n_sequence.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidParameter(format!(
                "n_sequence must be positive and strictly increasing, got {:?}",
                self.n_sequence
            )));
        }
        Ok(())
    }
}

/// Bookkeeping of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeMeta {
    pub dt: f64,
    /// Implicitness of the diffusion term (1 = backward Euler).
    pub theta: f64,
    pub steps: usize,
    /// Approximation level for limit runs.
    pub n: Option<u128>,
}

/// Stored profiles of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSolution {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
    pub meta: SchemeMeta,
}

impl PdeSolution {
    /// Wrap externally computed profiles, e.g. a sampled exact solution.
    pub fn from_profiles(
        grid: Grid,
        times: Vec<f64>,
        profiles: Vec<Vec<f64>>,
        dt: f64,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != profiles.len() {
            return Err(Error::InvalidParameter(format!(
                "{} times for {} profiles",
                times.len(),
                profiles.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "times must be strictly increasing".into(),
            ));
        }
        if let Some(p) = profiles.iter().find(|p| p.len() != grid.len()) {
            return Err(Error::GridTooSmall {
                nodes: p.len(),
                required: grid.len(),
            });
        }
        let steps = profiles.len() - 1;
        Ok(Self {
            grid,
            times,
            profiles,
            meta: SchemeMeta {
                dt,
                theta: 1.0,
                steps,
                n: None,
            },
        })
    }

    /// Index of the stored time closest to `t`, if within `1e-9` of it.
    pub fn time_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * (1.0 + t.abs());
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().partial_cmp(&(b.1 - t).abs()).unwrap())
            .map(|(k, _)| k)
            .unwrap();
        if (self.times[k] - t).abs() <= tol {
            Ok(k)
        } else {
            Err(Error::NoSuchTime { t })
        }
    }

    /// The same run seen only on the nodes inside `[xa, xb]`.
    pub fn restrict(&self, xa: f64, xb: f64) -> Result<Self> {
        let tol = 1e-9 * self.grid.h();
        let inside: Vec<usize> = (0..self.grid.len())
            .filter(|&j| self.grid.x(j) >= xa - tol && self.grid.x(j) <= xb + tol)
            .collect();
        let (j0, j1) = match (inside.first(), inside.last()) {
            (Some(&j0), Some(&j1)) => (j0, j1),
            _ => (0, 0),
        };
        let grid = Grid::new(self.grid.x(j0), self.grid.x(j1), j1.saturating_sub(j0))?;
        Ok(Self {
            grid,
            times: self.times.clone(),
            profiles: self.profiles.iter().map(|p| p[j0..=j1].to_vec()).collect(),
            meta: self.meta,
        })
    }

    pub fn profile_at(&self, t: f64) -> Result<&[f64]> {
        Ok(&self.profiles[self.time_index(t)?])
    }

    pub fn max_abs(&self) -> f64 {
        self.profiles
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Snapshot export with header `t,x,u`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,x,u")?;
        let xs = self.grid.nodes();
        for (t, p) in self.times.iter().zip(&self.profiles) {
            for (x, u) in xs.iter().zip(p) {
                writeln!(out, "{t},{x},{u}")?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn meta_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.meta)?)
    }
}

/// Solve `−l_j x_{j−1} + d_j x_j − r_j x_{j+1} = f_j` in place (Thomas).
/// The first and last rows are identities.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = rhs.len();
    scratch[0] = 0.0;
    for j in 1..n - 1 {
        let m = diag[j] - lower[j] * scratch[j - 1];
        scratch[j] = upper[j] / m;
        rhs[j] = (rhs[j] + lower[j] * rhs[j - 1]) / m;
    }
    for j in (1..n - 1).rev() {
        rhs[j] += scratch[j] * rhs[j + 1];
    }
}

/// Coefficients `(D_j, R_j)` of `u_t = D u_xx + R` evaluated at the old level.
trait Coefficients {
    fn eval(&mut self, u: &[f64], d: &mut [f64], r: &mut [f64]) -> Result<()>;
}

struct EpsCoefficients {
    model: EpsModel,
    phi: Vec<f64>,
}

impl Coefficients for EpsCoefficients {
    fn eval(&mut self, u: &[f64], d: &mut [f64], r: &mut [f64]) -> Result<()> {
        for j in 0..u.len() {
            let phi = self.model.phi_from_u_with_guess(u[j], self.phi[j].abs())?;
            self.phi[j] = phi;
            d[j] = self.model.diffusivity_from_phi(phi);
            r[j] = self.model.reaction_from_phi(phi);
        }
        Ok(())
    }
}

struct LimitCoefficients;

impl Coefficients for LimitCoefficients {
    fn eval(&mut self, u: &[f64], d: &mut [f64], r: &mut [f64]) -> Result<()> {
        for j in 0..u.len() {
            d[j] = u[j];
            r[j] = u[j] * (1.0 - u[j]);
        }
        Ok(())
    }
}

fn step_count(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and T ≥ 0, got dt = {dt}, T = {t_end}"
        )));
    }
    if t_end == 0.0 {
        return Ok((0, dt));
    }
    let n = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n, t_end / n as f64))
}

fn run_imex<C, B>(
    grid: &Grid,
    u0: &[f64],
    t_end: f64,
    dt: f64,
    output: &OutputTimes,
    mut coeffs: C,
    mut boundary: B,
) -> Result<PdeSolution>
where
    C: Coefficients,
    B: FnMut(f64) -> Result<(f64, f64)>,
{
    let n = grid.len();
    if u0.len() != n {
        return Err(Error::GridTooSmall {
            nodes: u0.len(),
            required: n,
        });
    }
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial data is not finite".into()));
    }
    let (steps, dt) = step_count(t_end, dt)?;
    let store = output.step_indices(steps, dt)?;
    let r = dt / (grid.h() * grid.h());

    let mut times = vec![0.0];
    let mut profiles = vec![u0.to_vec()];
    let mut u = u0.to_vec();
    let (mut d, mut react) = (vec![0.0; n], vec![0.0; n]);
    let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![1.0; n], vec![0.0; n]);
    let mut scratch = vec![0.0; n];
    let mut next_store = 1;

    for k in 1..=steps {
        let t = k as f64 * dt;
        coeffs.eval(&u, &mut d, &mut react)?;
        for j in 1..n - 1 {
            let c = r * d[j];
            lower[j] = c;
            upper[j] = c;
            diag[j] = 1.0 + 2.0 * c;
            u[j] += dt * react[j];
        }
        let (left, right) = boundary(t)?;
        u[0] = left;
        u[n - 1] = right;
        thomas(&lower, &diag, &upper, &mut u, &mut scratch);
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepRejected { t });
        }
        if next_store < store.len() && store[next_store] == k {
            times.push(t);
            profiles.push(u.clone());
            next_store += 1;
        }
    }
    Ok(PdeSolution {
        grid: *grid,
        times,
        profiles,
        meta: SchemeMeta {
            dt,
            theta: 1.0,
            steps,
            n: None,
        },
    })
}

/// Regularised problem with the end values of `u0` held fixed and the
/// default output times.
pub fn solve_eps(
    model: &EpsModel,
    grid: &Grid,
    u0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<PdeSolution> {
    solve_eps_with(model, grid, u0, t_end, &EpsOptions::new(dt))
}

pub fn solve_eps_with(
    model: &EpsModel,
    grid: &Grid,
    u0: &[f64],
    t_end: f64,
    opts: &EpsOptions,
) -> Result<PdeSolution> {
    let phi = u0
        .iter()
        .map(|&v| model.phi_from_u(v))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = EpsCoefficients { model: *model, phi };
    let boundary = |t: f64| opts.boundary.values(grid, u0, t);
    run_imex(grid, u0, t_end, opts.dt, &opts.output, coeffs, boundary)
}

/// Solve `u_t = u(u_xx + 1 − u)` on a positive interval for every level `n`
/// of `opts.n_sequence`, with data `u0_pos + 1/n` and boundary values
/// `u0_pos(end) + 1/n`. Levels run concurrently; results are in sequence
/// order.
pub fn solve_limit_interval(
    segment: &Grid,
    u0_pos: &[f64],
    t_end: f64,
    opts: &LimitOptions,
) -> Result<Vec<PdeSolution>> {
    opts.validate()?;
    let n = segment.len();
    if u0_pos.len() != n {
        return Err(Error::GridTooSmall {
            nodes: u0_pos.len(),
            required: n,
        });
    }
    // the lifted data u0 + 1/n is positive even where u0 underflows to zero
    if u0_pos.iter().any(|&v| !(v >= 0.0)) || !u0_pos[1..n - 1].iter().any(|&v| v > 0.0) {
        return Err(Error::InvalidParameter(
            "interval data must be nonnegative and positive somewhere inside".into(),
        ));
    }
    opts.n_sequence
        .par_iter()
        .map(|&level| {
            let lift = 1.0 / level as f64;
            let start: Vec<f64> = u0_pos.iter().map(|v| v + lift).collect();
            let (left, right) = (start[0], start[n - 1]);
            let mut sol = run_imex(
                segment,
                &start,
                t_end,
                opts.dt,
                &opts.output,
                LimitCoefficients,
                |_| Ok((left, right)),
            )?;
            sol.meta.n = Some(level);
            Ok(sol)
        })
        .collect()
}

/// Solve the limit problem on the whole grid by approximating every sign
/// interval at the largest level of `opts.n_sequence`.
///
/// Zeros are snapped to the nearest nodes and held at `u = 0`; on each
/// interval the stored profile is `sgn·(u_{i,n} − 1/n)`, so the outer
/// boundary values are exactly `∓1`.
pub fn solve_limit(
    grid: &Grid,
    data: &InitialData,
    t_end: f64,
    opts: &LimitOptions,
) -> Result<PdeSolution> {
    opts.validate()?;
    let (cuts, u0) = limit_initial(grid, data)?;
    let level = *opts.n_sequence.last().unwrap();
    let single = LimitOptions {
        n_sequence: vec![level],
        ..opts.clone()
    };
    let lift = 1.0 / level as f64;
    let pieces = cuts
        .windows(2)
        .enumerate()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, w)| {
            let (j0, j1) = (w[0], w[1]);
            let seg = Grid::new(grid.x(j0), grid.x(j1), j1 - j0)?;
            let sign = InitialData::interval_sign(i);
            let part: Vec<f64> = u0[j0..=j1].iter().map(|v| (sign * v).max(0.0)).collect();
            let mut sols = solve_limit_interval(&seg, &part, t_end, &single)?;
            Ok((sign, sols.remove(0)))
        })
        .collect::<Result<Vec<_>>>()?;

    let first = &pieces[0].1;
    let times = first.times.clone();
    let mut profiles = vec![vec![0.0; grid.len()]; times.len()];
    for ((sign, sol), w) in pieces.iter().zip(cuts.windows(2)) {
        for (k, p) in sol.profiles.iter().enumerate() {
            for (off, v) in p.iter().enumerate() {
                let j = w[0] + off;
                let val = if j == w[0] && w[0] != 0 || j == w[1] && w[1] != grid.n_cells {
                    0.0
                } else {
                    sign * (v - lift)
                };
                profiles[k][j] = val;
            }
        }
    }
    for p in profiles.iter_mut() {
        p[0] = u0[0];
        p[grid.n_cells] = u0[grid.n_cells];
    }
    Ok(PdeSolution {
        grid: *grid,
        times,
        profiles,
        meta: SchemeMeta {
            n: Some(level),
            ..first.meta
        },
    })
}

/// Node indices `0 = j_0 < j_1 < … < j_m < N` of the snapped zeros plus both
/// ends, and the initial profile of the limit problem with the zeros moved
/// onto those nodes.
pub fn limit_initial(grid: &Grid, data: &InitialData) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut snapped = data.clone();
    let mut cuts = vec![0];
    for z in snapped.zeros.iter_mut() {
        let j = grid.nearest(*z);
        *z = grid.x(j);
        cuts.push(j);
    }
    cuts.push(grid.n_cells);
    if let Some(w) = cuts.windows(2).find(|w| w[1] < w[0] + Grid::MIN_CELLS) {
        return Err(Error::BadZeros(format!(
            "sign interval between nodes {} and {} has fewer than {} cells",
            w[0],
            w[1],
            Grid::MIN_CELLS
        )));
    }
    let mut u0 = make_initial_with_boundary(&snapped, grid, 1.0)?;
    for &j in &cuts[1..cuts.len() - 1] {
        u0[j] = 0.0;
    }
    Ok((cuts, u0))
}

/// `min sgn(u)·(t·u_t + u)` over interior nodes and stored times `t ≥ t0`,
/// with `u_t` by forward differences between stored times.
pub fn aronson_benilan_check(sol: &PdeSolution, t0: f64) -> Result<f64> {
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t0 must be positive, got {t0}"
        )));
    }
    let ks: Vec<usize> = (0..sol.times.len())
        .filter(|&k| sol.times[k] >= t0 - 1e-12)
        .collect();
    if ks.len() < 2 {
        return Err(Error::NeedsTwoTimes { t0 });
    }
    let n = sol.grid.len();
    let mut min = f64::INFINITY;
    for w in ks.windows(2) {
        let (k, k1) = (w[0], w[1]);
        let (t, dt) = (sol.times[k], sol.times[k1] - sol.times[k]);
        for j in 1..n - 1 {
            let u = sol.profiles[k][j];
            let ut = (sol.profiles[k1][j] - u) / dt;
            let s = if u > 0.0 {
                1.0
            } else if u < 0.0 {
                -1.0
            } else {
                0.0
            };
            min = min.min(s * (t * ut + u));
        }
    }
    Ok(min)
}

/// Second-order one-sided derivative at the left (`from_right = true`) or
/// right end of a grid function.
fn end_derivative(u: &[f64], h: f64, at_left: bool) -> f64 {
    let n = u.len();
    if at_left {
        (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    } else {
        (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h)
    }
}

/// Spatial derivative: centred inside, second-order one-sided at the ends.
fn derivative(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    let mut d = vec![0.0; n];
    for j in 1..n - 1 {
        d[j] = (u[j + 1] - u[j - 1]) / (2.0 * h);
    }
    d[0] = end_derivative(u, h, true);
    d[n - 1] = end_derivative(u, h, false);
    d
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

fn trapezoid_nonuniform(xs: &[f64], values: &[f64]) -> f64 {
    xs.windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum()
}

/// The quantity bounded uniformly in `n`:
/// `4(α+1)/(α+2)²·∬((u^{(α+2)/2})_x)² + ∫n^{−(α+1)}(|u_x(x_{i+1})| + |u_x(x_i)|)dt`,
/// one value per element of `seq` (which must carry its level `n`).
pub fn energy_estimate(seq: &[PdeSolution], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must exceed −1, got {alpha}"
        )));
    }
    let pref = energy_prefactor(alpha);
    let power = 0.5 * (alpha + 2.0);
    seq.iter()
        .map(|sol| {
            let level = sol.meta.n.ok_or_else(|| {
                Error::InvalidParameter("energy estimate needs solutions with a level n".into())
            })? as f64;
            let h = sol.grid.h();
            let mut grad = Vec::with_capacity(sol.times.len());
            let mut flux = Vec::with_capacity(sol.times.len());
            for p in &sol.profiles {
                let w: Vec<f64> = p.iter().map(|v| v.max(0.0).powf(power)).collect();
                let wx: Vec<f64> = derivative(&w, h).iter().map(|d| d * d).collect();
                grad.push(trapezoid(&wx, h));
                flux.push(end_derivative(p, h, true).abs() + end_derivative(p, h, false).abs());
            }
            Ok(pref * trapezoid_nonuniform(&sol.times, &grad)
                + level.powf(-(alpha + 1.0)) * trapezoid_nonuniform(&sol.times, &flux))
        })
        .collect()
}

/// `4(α+1)/(α+2)²`.
pub fn energy_prefactor(alpha: f64) -> f64 {
    4.0 * (alpha + 1.0) / ((alpha + 2.0) * (alpha + 2.0))
}

/// A test function `ψ(x, t)` with its first derivatives.
pub trait TestFunction {
    fn value(&self, x: f64, t: f64) -> f64;
    fn dx(&self, x: f64, t: f64) -> f64;
    fn dt(&self, x: f64, t: f64) -> f64;
}

/// `ψ(x, t) = (x − x0)(x1 − x)(t_end − t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductBump {
    pub x0: f64,
    pub x1: f64,
    pub t_end: f64,
}

impl TestFunction for ProductBump {
    fn value(&self, x: f64, t: f64) -> f64 {
        (x - self.x0) * (self.x1 - x) * (self.t_end - t)
    }
    fn dx(&self, x: f64, t: f64) -> f64 {
        (self.x0 + self.x1 - 2.0 * x) * (self.t_end - t)
    }
    fn dt(&self, x: f64, _t: f64) -> f64 {
        -(x - self.x0) * (self.x1 - x)
    }
}

/// Left side of the weak formulation on the solution's whole grid,
/// `∫u₀ψ(·,0) + ∬(uψ_t − u u_x ψ_x − u_x² ψ + u(1−u)ψ)`, with trapezoidal
/// quadrature in `x` and over the stored times.
pub fn weak_residual(sol: &PdeSolution, psi: &dyn TestFunction) -> Result<f64> {
    let xs = sol.grid.nodes();
    let t_end = *sol.times.last().unwrap();
    let tol = 1e-12;
    for &t in &sol.times {
        for &x in &[xs[0], xs[xs.len() - 1]] {
            let v = psi.value(x, t);
            if v.abs() > tol {
                return Err(Error::BadTestFunction(format!("ψ({x}, {t}) = {v}")));
            }
        }
    }
    if let Some(&x) = xs.iter().find(|&&x| psi.value(x, t_end).abs() > tol) {
        return Err(Error::BadTestFunction(format!(
            "ψ({x}, {t_end}) = {}",
            psi.value(x, t_end)
        )));
    }
    let h = sol.grid.h();
    let initial: Vec<f64> = xs
        .iter()
        .zip(&sol.profiles[0])
        .map(|(&x, &u)| u * psi.value(x, sol.times[0]))
        .collect();
    let mut per_time = Vec::with_capacity(sol.times.len());
    for (&t, u) in sol.times.iter().zip(&sol.profiles) {
        let ux = derivative(u, h);
        let integrand: Vec<f64> = (0..xs.len())
            .map(|j| {
                let x = xs[j];
                let p = psi.value(x, t);
                u[j] * psi.dt(x, t) - u[j] * ux[j] * psi.dx(x, t) - ux[j] * ux[j] * p
                    + u[j] * (1.0 - u[j]) * p
            })
            .collect();
        per_time.push(trapezoid(&integrand, h));
    }
    Ok(trapezoid(&initial, h) + trapezoid_nonuniform(&sol.times, &per_time))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Grid {
        Grid::new(a, b, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 7).is_err());
        let g = grid(-1.0, 1.0, 8);
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.nodes().len(), 9);
        assert_eq!(g.x(8), 1.0);
        assert_eq!(g.nearest(0.1), 4);
    }

    #[test]
    fn monotone_data_is_odd_and_hits_the_boundary_values() {
        let m = EpsModel::new(1e-2).unwrap();
        let g = grid(-1.0, 1.0, 200);
        let u = make_initial(&m, &InitialData::monotone(0.0, 2.0), &g).unwrap();
        assert_eq!(u[0], -m.u1());
        assert_eq!(u[200], m.u1());
        assert_eq!(u[100], 0.0);
        for j in 0..=200 {
            assert!((u[j] + u[200 - j]).abs() < 1e-14);
        }
        assert!(u.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn asymmetric_monotone_data_stays_increasing() {
        let m = EpsModel::new(1e-3).unwrap();
        let g = grid(-1.0, 1.0, 400);
        let u = make_initial(&m, &InitialData::monotone(0.3, 2.0), &g).unwrap();
        assert!(u.windows(2).all(|w| w[1] > w[0]));
        assert!(u[g.nearest(0.3)].abs() < 1e-14);
        assert!(make_initial(&m, &InitialData::monotone(0.9, 2.0), &g).is_err());
    }

    #[test]
    fn flat_exponential_is_flat_at_its_zero() {
        let m = EpsModel::new(1e-2).unwrap();
        let g = grid(-1.0, 1.0, 2000);
        let u = make_initial(&m, &InitialData::flat_exponential(0.0), &g).unwrap();
        let h = g.h();
        assert!(h >= 1e-3);
        assert!(u[1001].abs() / h <= 1e-8);
        assert!(u[999].abs() / h <= 1e-8);
        assert_eq!(u[1000], 0.0);
        assert!((u[2000] - m.u1()).abs() < 1e-14);
    }

    #[test]
    fn multi_zero_alternates() {
        let m = EpsModel::new(1e-2).unwrap();
        let g = grid(-1.0, 1.0, 200);
        let data = InitialData::multi_zero(vec![-0.4, 0.1, 0.5]);
        let u = make_initial(&m, &data, &g).unwrap();
        let xs = g.nodes();
        for (&x, &v) in xs.iter().zip(&u) {
            let expected = if x < -0.4 {
                -1.0
            } else if x < 0.1 {
                1.0
            } else if x < 0.5 {
                -1.0
            } else {
                1.0
            };
            if (x + 0.4).abs() > 1e-9 && (x - 0.1).abs() > 1e-9 && (x - 0.5).abs() > 1e-9 {
                assert_eq!(v.signum(), expected, "x = {x}");
            }
        }
        assert!((u[0] + m.u1()).abs() < 1e-15);
    }

    #[test]
    fn bad_zeros_are_rejected() {
        let m = EpsModel::new(1e-2).unwrap();
        let g = grid(-1.0, 1.0, 10);
        let bad = [
            InitialData::multi_zero(vec![0.1, -0.1, 0.5]),
            InitialData::multi_zero(vec![-0.5, 0.5]),
            InitialData::multi_zero(vec![0.01, 0.02, 0.03]),
            InitialData::monotone(1.5, 2.0),
        ];
        for d in &bad {
            assert!(
                matches!(make_initial(&m, d, &g), Err(Error::BadZeros(_))),
                "{d:?}"
            );
        }
    }

    #[test]
    fn thomas_solves_a_small_system() {
        // rows 1..3 of −x_{j−1} + 4x_j − x_{j+1} = f with x_0 = 1, x_4 = 2
        let lower = [0.0, 1.0, 1.0, 1.0, 0.0];
        let upper = lower;
        let diag = [1.0, 4.0, 4.0, 4.0, 1.0];
        let exact = [1.0, 0.5, -0.25, 0.75, 2.0];
        let mut rhs: Vec<f64> = (0..5)
            .map(|j| {
                if j == 0 || j == 4 {
                    exact[j]
                } else {
                    4.0 * exact[j] - exact[j - 1] - exact[j + 1]
                }
            })
            .collect();
        let mut s = vec![0.0; 5];
        thomas(&lower, &diag, &upper, &mut rhs, &mut s);
        for j in 0..5 {
            assert!((rhs[j] - exact[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn bulk_state_is_an_equilibrium() {
        let m = EpsModel::new(1e-2).unwrap();
        let g = grid(0.0, 1.0, 50);
        let u0 = vec![m.u1(); 51];
        let sol = solve_eps(&m, &g, &u0, 0.5, 1e-3).unwrap();
        for p in &sol.profiles {
            for v in p {
                assert!((v - m.u1()).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn output_times_are_step_multiples() {
        let m = EpsModel::new(1e-1).unwrap();
        let g = grid(-1.0, 1.0, 40);
        let u0 = make_initial(&m, &InitialData::monotone(0.0, 2.0), &g).unwrap();
        let opts = EpsOptions {
            output: OutputTimes::List(vec![0.25, 0.5]),
            ..EpsOptions::new(1e-2)
        };
        let sol = solve_eps_with(&m, &g, &u0, 1.0, &opts).unwrap();
        assert_eq!(sol.times.len(), 4);
        assert_eq!(sol.profiles[0], u0);
        assert!(sol.profile_at(0.5).is_ok());
        assert!(matches!(sol.profile_at(0.3), Err(Error::NoSuchTime { .. })));
        let sol = solve_eps(&m, &g, &u0, 1.0, 1e-2).unwrap();
        assert!(sol.times[1] < 0.01 + 1e-12);
        assert_eq!(*sol.times.last().unwrap(), 1.0);
        assert!(sol.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn boundary_values_are_held() {
        let m = EpsModel::new(1e-2).unwrap();
        let g = grid(-1.0, 1.0, 100);
        let u0 = make_initial(&m, &InitialData::monotone(0.2, 2.0), &g).unwrap();
        let sol = solve_eps(&m, &g, &u0, 0.2, 1e-3).unwrap();
        for p in &sol.profiles {
            assert_eq!(p[0], -m.u1());
            assert_eq!(p[100], m.u1());
        }
    }

    #[test]
    fn zero_horizon_returns_the_data() {
        let g = grid(0.0, 1.0, 20);
        let u0: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| (std::f64::consts::PI * x).sin())
            .collect();
        let sols = solve_limit_interval(&g, &u0, 0.0, &LimitOptions::new(1e-3)).unwrap();
        assert_eq!(sols.len(), 3);
        for (s, n) in sols.iter().zip(DEFAULT_N_SEQUENCE) {
            assert_eq!(s.times, vec![0.0]);
            assert!(s.profiles[0]
                .iter()
                .zip(&u0)
                .all(|(a, b)| (a - b - 1.0 / n as f64).abs() < 1e-15));
        }
    }

    #[test]
    fn constant_data_respects_the_comparison_bounds() {
        let g = grid(0.0, 1.0, 100);
        let mut u0 = vec![1.0; 101];
        u0[0] = 0.0;
        u0[100] = 0.0;
        let sols = solve_limit_interval(&g, &u0, 0.5, &LimitOptions::new(1e-3)).unwrap();
        for (s, n) in sols.iter().zip(DEFAULT_N_SEQUENCE) {
            let lo = 1.0 / n as f64;
            let hi = 1.0 + lo;
            for p in &s.profiles {
                assert!(p.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
            }
        }
    }

    #[test]
    fn limit_options_validation() {
        let g = grid(0.0, 1.0, 10);
        let u0 = vec![0.5; 11];
        let bad = LimitOptions {
            n_sequence: vec![40, 10],
            ..LimitOptions::new(1e-2)
        };
        assert!(solve_limit_interval(&g, &u0, 1.0, &bad).is_err());
    }

    #[test]
    fn limit_solution_is_pinned_and_keeps_its_sign() {
        let g = grid(-1.0, 1.0, 200);
        let data = InitialData::monotone(0.2, 2.0);
        let sol = solve_limit(&g, &data, 0.5, &LimitOptions::new(1e-3)).unwrap();
        let j1 = g.nearest(0.2);
        for p in &sol.profiles {
            assert_eq!(p[j1], 0.0);
            assert!(p[..j1].iter().all(|&v| v < 0.0));
            assert!(p[j1 + 1..].iter().all(|&v| v > 0.0));
            assert_eq!(p[0], -1.0);
            assert_eq!(p[200], 1.0);
        }
    }

    #[test]
    fn aronson_benilan_for_a_stationary_profile() {
        let g = grid(0.0, 1.0, 10);
        let p: Vec<f64> = (0..11).map(|j| 0.5 + 0.01 * j as f64).collect();
        let sol =
            PdeSolution::from_profiles(g, vec![0.0, 0.5, 1.0], vec![p.clone(); 3], 0.5).unwrap();
        let v = aronson_benilan_check(&sol, 0.2).unwrap();
        assert!((v - 0.51).abs() < 1e-14);
        let one = PdeSolution::from_profiles(g, vec![0.0], vec![p], 0.5).unwrap();
        assert!(matches!(
            aronson_benilan_check(&one, 0.2),
            Err(Error::NeedsTwoTimes { .. })
        ));
    }

    #[test]
    fn energy_of_a_constant_is_zero() {
        let g = grid(0.0, 1.0, 10);
        let mut sol =
            PdeSolution::from_profiles(g, vec![0.0, 1.0], vec![vec![0.7; 11]; 2], 1.0).unwrap();
        sol.meta.n = Some(10);
        let e = energy_estimate(&[sol], 0.0).unwrap();
        assert!(e[0].abs() < 1e-14);
        assert!(energy_prefactor(-1.0 + 1e-12) < 1e-11);
        assert_eq!(energy_prefactor(0.0), 1.0);
    }

    #[test]
    fn weak_residual_of_zero_is_zero() {
        let g = grid(0.0, 3.0, 30);
        let sol =
            PdeSolution::from_profiles(g, vec![0.0, 1.0], vec![vec![0.0; 31]; 2], 1.0).unwrap();
        let psi = ProductBump {
            x0: 0.0,
            x1: 3.0,
            t_end: 1.0,
        };
        assert_eq!(weak_residual(&sol, &psi).unwrap(), 0.0);
        let bad = ProductBump {
            x0: 0.5,
            x1: 3.0,
            t_end: 1.0,
        };
        assert!(matches!(
            weak_residual(&sol, &bad),
            Err(Error::BadTestFunction(_))
        ));
        let late = ProductBump {
            x0: 0.0,
            x1: 3.0,
            t_end: 2.0,
        };
        assert!(matches!(
            weak_residual(&sol, &late),
            Err(Error::BadTestFunction(_))
        ));
    }

    #[test]
    fn restriction_keeps_the_inner_nodes() {
        let g = grid(-1.0, 1.0, 20);
        let p: Vec<f64> = g.nodes();
        let sol = PdeSolution::from_profiles(g, vec![0.0, 1.0], vec![p.clone(), p], 0.1).unwrap();
        let r = sol.restrict(-0.5, 0.55).unwrap();
        assert_eq!(r.grid.n_cells, 10);
        assert!((r.grid.a + 0.5).abs() < 1e-15 && (r.grid.b - 0.5).abs() < 1e-15);
        assert_eq!(r.profiles[1][0], sol.profiles[1][5]);
        assert!(sol.restrict(0.0, 0.2).is_err());
    }

    #[test]
    fn csv_export() {
        let g = grid(0.0, 1.0, 8);
        let sol = PdeSolution::from_profiles(g, vec![0.0], vec![vec![0.25; 9]], 0.1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        sol.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x,u"));
        assert_eq!(lines.next(), Some("0,0,0.25"));
        assert_eq!(text.lines().count(), 10);
        assert!(sol.meta_json().unwrap().contains("\"dt\""));
    }
}
