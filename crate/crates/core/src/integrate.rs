//! Classical fixed-step Runge–Kutta 4 on `ℝⁿ`.

use crate::linalg::Vector;

/// One RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<F>(f: &F, t: f64, y: &Vector, h: f64) -> Vector
where
    F: Fn(f64, &Vector) -> Vector,
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + &k1 * (0.5 * h)));
    let k3 = f(t + 0.5 * h, &(y + &k2 * (0.5 * h)));
    let k4 = f(t + h, &(y + &k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrates from `t0` to `t1` with `steps` equal steps, returning the
/// trajectory including both endpoints.
pub fn rk4<F>(f: F, t0: f64, y0: Vector, t1: f64, steps: usize) -> Vec<(f64, Vector)>
where
    F: Fn(f64, &Vector) -> Vector,
{
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push((t0, y.clone()));
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        y = rk4_step(&f, t, &y, h);
        out.push((t0 + (k + 1) as f64 * h, y.clone()));
    }
    out
}
