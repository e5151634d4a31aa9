//! Configuration-level planning: the node-wise group action, orbit steering
//! and the minimal-energy horizontal lift of a head curve.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integrate::rk4_step;
use crate::linalg::{self, Mat, Vector};
use crate::lorentz::{pseudo_adjoint, LieElement, LorentzMatrix};
use crate::mobius::act_on_vector;
use crate::snake::{self, ConfigTangent, SnakeConfig};

use super::group::plan_group_path;
use super::path::DEFAULT_STEP;

/// Central-difference step for configuration velocities.
const FD_STEP: f64 = 1e-5;

/// Node-wise sphere action `s ↦ A · u(s)`.
pub fn act(a: &LorentzMatrix, u: &SnakeConfig) -> Result<SnakeConfig> {
    if a.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: a.dim(),
        });
    }
    act_raw(a.matrix(), u)
}

fn act_raw(a: &Mat, u: &SnakeConfig) -> Result<SnakeConfig> {
    u.map_nodes(|x| act_on_vector(a, x))
}

/// Derivative of the action at the identity: `w − ⟨w, u⟩u + B u` node-wise for
/// `X = (w, B)`.
pub fn infinitesimal_action(x: &LieElement, u: &SnakeConfig) -> Result<ConfigTangent> {
    if x.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: x.dim(),
        });
    }
    let mut field = snake::horizontal_gradient(&x.u, u);
    for (v, node) in field
        .segments
        .iter_mut()
        .flatten()
        .zip(u.segments().iter().flatten())
    {
        *v += &x.b * node;
    }
    Ok(field)
}

/// A time-sampled configuration path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigPath {
    pub times: Vec<f64>,
    pub configs: Vec<SnakeConfig>,
    /// `endpoint(configs[k])`.
    pub head_trace: Vec<Vector>,
    /// Horizontal direction `w(t)`: the velocity is `s ↦ w − ⟨w, u(s)⟩u(s)`.
    pub controls: Vec<Vector>,
    /// `fit_horizontal` residual of the velocity at each sample.
    pub residuals: Vec<f64>,
    /// `|endpoint − c(t)|` for lifted head curves; empty otherwise.
    pub tracking_errors: Vec<f64>,
}

impl ConfigPath {
    pub fn final_config(&self) -> &SnakeConfig {
        self.configs
            .last()
            .expect("paths hold at least the initial sample")
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_tracking_error(&self) -> f64 {
        self.tracking_errors.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteerOptions {
    pub tol: f64,
    pub step: f64,
}

impl Default for SteerOptions {
    fn default() -> Self {
        Self {
            tol: crate::lorentz::FACTOR_TOL,
            step: DEFAULT_STEP,
        }
    }
}

/// Horizontal configuration path from `u0` to `act(A, u0)`.
///
/// The action turns right-invariant horizontal group curves into horizontal
/// configuration curves, so the path is `t ↦ act(γ(t)⁻¹, u0)` with `γ` the
/// planned left-invariant horizontal path to `A⁻¹`: then `σ = γ⁻¹` satisfies
/// `σ̇σ⁻¹ = −γ⁻¹γ̇ ∈ 𝔥` and ends at `A`.
pub fn steer_config(u0: &SnakeConfig, a: &LorentzMatrix, opts: SteerOptions) -> Result<ConfigPath> {
    if a.dim() != u0.dim() {
        return Err(Error::DimensionMismatch {
            expected: u0.dim(),
            got: a.dim(),
        });
    }
    let gamma = plan_group_path(&a.inverse(), opts.tol)?.with_step(opts.step)?;
    let times = gamma.times();
    let mut path = ConfigPath {
        times: Vec::with_capacity(times.len()),
        configs: Vec::with_capacity(times.len()),
        head_trace: Vec::with_capacity(times.len()),
        controls: Vec::with_capacity(times.len()),
        residuals: Vec::with_capacity(times.len()),
        tracking_errors: Vec::new(),
    };
    for t in times {
        let (config, control, residual) = match gamma.leg_at(t) {
            None => (u0.clone(), Vector::zeros(u0.dim()), 0.0),
            Some((leg, prefix, tau)) => {
                let sigma = |s: f64| pseudo_adjoint(&(prefix * leg.at(s))).expect("square");
                let config = act_raw(&sigma(tau), u0)?;
                let plus = act_raw(&sigma(tau + FD_STEP), u0)?;
                let minus = act_raw(&sigma(tau - FD_STEP), u0)?;
                let raw: Vec<Vec<Vector>> = plus
                    .segments()
                    .iter()
                    .zip(minus.segments())
                    .map(|(p, m)| p.iter().zip(m).map(|(a, b)| (a - b) / (2.0 * FD_STEP)).collect())
                    .collect();
                let velocity = config.project(raw)?;
                let residual = snake::fit_horizontal(&config, &velocity).residual;
                (config, -leg.control(tau).u, residual)
            }
        };
        path.times.push(t);
        path.head_trace.push(snake::endpoint(&config));
        path.configs.push(config);
        path.controls.push(control);
        path.residuals.push(residual);
    }
    Ok(path)
}

/// A head trajectory `c : [0, T] → ℝⁿ` with its velocity.
pub trait HeadCurve {
    fn dim(&self) -> usize;
    fn duration(&self) -> f64;
    fn position(&self, t: f64) -> Vector;
    fn velocity(&self, t: f64) -> Vector;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantHead {
    pub point: Vector,
    pub duration: f64,
}

impl HeadCurve for ConstantHead {
    fn dim(&self) -> usize {
        self.point.len()
    }
    fn duration(&self) -> f64 {
        self.duration
    }
    fn position(&self, _t: f64) -> Vector {
        self.point.clone()
    }
    fn velocity(&self, _t: f64) -> Vector {
        Vector::zeros(self.point.len())
    }
}

/// Constant-speed segment from `start` to `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineHead {
    pub start: Vector,
    pub end: Vector,
    pub duration: f64,
}

impl HeadCurve for LineHead {
    fn dim(&self) -> usize {
        self.start.len()
    }
    fn duration(&self) -> f64 {
        self.duration
    }
    fn position(&self, t: f64) -> Vector {
        &self.start + (&self.end - &self.start) * (t / self.duration)
    }
    fn velocity(&self, _t: f64) -> Vector {
        (&self.end - &self.start) / self.duration
    }
}

/// One turn around a circle in the plane `(e1, e2)`, starting at
/// `center + radius·e1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleHead {
    pub center: Vector,
    pub radius: f64,
    pub e1: Vector,
    pub e2: Vector,
    pub duration: f64,
}

impl CircleHead {
    /// Circle through `start` with the given centre offset direction.
    pub fn through(start: &Vector, radius: f64, e1: Vector, e2: Vector, duration: f64) -> Self {
        Self {
            center: start - &e1 * radius,
            radius,
            e1,
            e2,
            duration,
        }
    }
}

impl HeadCurve for CircleHead {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn duration(&self) -> f64 {
        self.duration
    }
    fn position(&self, t: f64) -> Vector {
        let phi = 2.0 * PI * t / self.duration;
        &self.center + (&self.e1 * phi.cos() + &self.e2 * phi.sin()) * self.radius
    }
    fn velocity(&self, t: f64) -> Vector {
        let phi = 2.0 * PI * t / self.duration;
        let rate = 2.0 * PI / self.duration * self.radius;
        (&self.e2 * phi.cos() - &self.e1 * phi.sin()) * rate
    }
}

/// Piecewise cubic Hermite interpolant of samples, with three-point slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledHead {
    times: Vec<f64>,
    points: Vec<Vector>,
    slopes: Vec<Vector>,
}

impl SampledHead {
    pub fn new(times: Vec<f64>, points: Vec<Vector>) -> Result<Self> {
        if times.len() != points.len() || times.len() < 2 {
            return Err(Error::InvalidArgument(
                "head curve needs at least two samples with matching times".into(),
            ));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "head curve times must start at 0 and increase strictly".into(),
            ));
        }
        let n = points[0].len();
        if points.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidArgument(
                "head curve points differ in dimension".into(),
            ));
        }
        let k = times.len();
        let secant = |i: usize| (&points[i + 1] - &points[i]) / (times[i + 1] - times[i]);
        let mut slopes = Vec::with_capacity(k);
        for i in 0..k {
            let m = if k == 2 {
                secant(0)
            } else if i == 0 {
                let (h0, h1) = (times[1] - times[0], times[2] - times[1]);
                secant(0) * ((2.0 * h0 + h1) / (h0 + h1)) - secant(1) * (h0 / (h0 + h1))
            } else if i == k - 1 {
                let (h0, h1) = (times[k - 2] - times[k - 3], times[k - 1] - times[k - 2]);
                secant(k - 2) * ((2.0 * h1 + h0) / (h0 + h1)) - secant(k - 3) * (h1 / (h0 + h1))
            } else {
                let (h0, h1) = (times[i] - times[i - 1], times[i + 1] - times[i]);
                (secant(i - 1) * h1 + secant(i) * h0) / (h0 + h1)
            };
            slopes.push(m);
        }
        Ok(Self {
            times,
            points,
            slopes,
        })
    }

    /// Samples `curve` at `samples + 1` equally spaced times.
    pub fn from_curve(curve: &dyn HeadCurve, samples: usize) -> Result<Self> {
        let samples = samples.max(1);
        let t_end = curve.duration();
        let times: Vec<f64> = (0..=samples).map(|k| t_end * k as f64 / samples as f64).collect();
        let points = times.iter().map(|t| curve.position(*t)).collect();
        Self::new(times, points)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    fn interval(&self, t: f64) -> (usize, f64, f64) {
        let k = self.times.len();
        let i = self.times.partition_point(|s| *s <= t).clamp(1, k - 1) - 1;
        let h = self.times[i + 1] - self.times[i];
        (i, h, (t - self.times[i]) / h)
    }
}

impl HeadCurve for SampledHead {
    fn dim(&self) -> usize {
        self.points[0].len()
    }
    fn duration(&self) -> f64 {
        *self.times.last().expect("validated samples")
    }
    fn position(&self, t: f64) -> Vector {
        let (i, h, x) = self.interval(t);
        let (x2, x3) = (x * x, x * x * x);
        &self.points[i] * (2.0 * x3 - 3.0 * x2 + 1.0)
            + &self.slopes[i] * (h * (x3 - 2.0 * x2 + x))
            + &self.points[i + 1] * (-2.0 * x3 + 3.0 * x2)
            + &self.slopes[i + 1] * (h * (x3 - x2))
    }
    fn velocity(&self, t: f64) -> Vector {
        let (i, h, x) = self.interval(t);
        let x2 = x * x;
        &self.points[i] * ((6.0 * x2 - 6.0 * x) / h)
            + &self.slopes[i] * (3.0 * x2 - 4.0 * x + 1.0)
            + &self.points[i + 1] * ((-6.0 * x2 + 6.0 * x) / h)
            + &self.slopes[i + 1] * (3.0 * x2 - 2.0 * x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftOptions {
    pub step: f64,
    /// Abort when `λ_min(A_u)` drops below `margin_rel · L`.
    pub margin_rel: f64,
    /// Allowed mismatch `|c(0) − endpoint(u0)|` relative to `L`.
    pub start_tol_rel: f64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            margin_rel: 1e-3,
            start_tol_rel: 1e-6,
        }
    }
}

/// Minimal-energy horizontal lift of a head curve.
///
/// At each instant the velocity is `s ↦ w − ⟨w, u(s)⟩u(s)` with
/// `A_u w = ċ(t)`; nodes are advanced with RK4 and renormalized after every
/// step.
pub fn horizontal_lift(u0: &SnakeConfig, head: &dyn HeadCurve, opts: LiftOptions) -> Result<ConfigPath> {
    let n = u0.dim();
    if head.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: head.dim(),
        });
    }
    if !(opts.step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {}",
            opts.step
        )));
    }
    let length = u0.length();
    let duration = head.duration();
    let start_gap = (head.position(0.0) - snake::endpoint(u0)).norm();
    if start_gap > opts.start_tol_rel * length {
        return Err(Error::InvalidArgument(format!(
            "head curve starts {start_gap:.3e} away from the snake endpoint"
        )));
    }
    let steps = ((duration / opts.step).ceil() as usize).max(1);
    let h = duration / steps as f64;
    for k in 0..=steps {
        let t = h * k as f64;
        let norm = head.position(t).norm();
        if norm >= length {
            return Err(Error::Unreachable {
                time: t,
                norm,
                length,
            });
        }
    }
    let margin_min = opts.margin_rel * length;
    let weights = u0.weights();

    // Velocity field of the stacked nodes.
    let field = |t: f64, y: &Vector| -> Vector {
        let w = solve_direction(y, &weights, n, length, &head.velocity(t));
        let mut out = Vector::zeros(y.len());
        for k in 0..weights.len() {
            let x = y.rows(k * n, n);
            let coeff = w.dot(&x);
            out.rows_mut(k * n, n).copy_from(&(&w - x * coeff));
        }
        out
    };

    let mut config = u0.clone();
    let mut path = ConfigPath {
        times: Vec::with_capacity(steps + 1),
        configs: Vec::with_capacity(steps + 1),
        head_trace: Vec::with_capacity(steps + 1),
        controls: Vec::with_capacity(steps + 1),
        residuals: Vec::with_capacity(steps + 1),
        tracking_errors: Vec::with_capacity(steps + 1),
    };
    for k in 0..=steps {
        let t = h * k as f64;
        let gram = snake::gram_data(&config);
        let margin = gram.lambda_min();
        if margin < margin_min {
            return Err(Error::SingularityApproach { time: t, margin });
        }
        let w = gram.solve(&head.velocity(t), 0.0);
        let velocity = snake::horizontal_gradient(&w, &config);
        let head_pos = snake::endpoint(&config);
        path.tracking_errors.push((&head_pos - head.position(t)).norm());
        path.residuals
            .push(snake::fit_horizontal(&config, &velocity).residual);
        path.times.push(t);
        path.head_trace.push(head_pos);
        path.controls.push(w);
        path.configs.push(config.clone());
        if k == steps {
            break;
        }
        let next = rk4_step(&field, t, &config.flat_nodes(), h);
        config = config.with_flat_nodes(&next)?;
    }
    Ok(path)
}

/// Solves `A_u w = ċ` for stacked, possibly slightly non-unit, nodes.
fn solve_direction(y: &Vector, weights: &[f64], n: usize, length: f64, cdot: &Vector) -> Vector {
    let mut a = Mat::identity(n, n) * length;
    for (k, w) in weights.iter().enumerate() {
        let x = y.rows(k * n, n);
        a.ger(-w, &x, &x, 1.0);
    }
    let a = linalg::symmetrize(&a);
    match a.clone().cholesky() {
        Some(ch) => ch.solve(cdot),
        None => a
            .pseudo_inverse(1e-14)
            .map(|p| p * cdot)
            .unwrap_or_else(|_| Vector::zeros(n)),
    }
}
