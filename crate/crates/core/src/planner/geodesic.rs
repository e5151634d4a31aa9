//! Horizontal geodesics of `SO(2,1)` ending at a pure rotation.
//!
//! In the frame `(e_t, p, q)` let `G = q pᵀ − p qᵀ` (so `G p = q`) and
//! `X = U_p + k G`. The curve `γ(τ) = Exp(τX) Exp(−τkG)` has control
//! `γ⁻¹γ̇ = U_{cos(kτ) p + sin(kτ) q}`, a unit horizontal vector. Since
//! `X³ = (1 − k²) X`, for `|k| > 1` the first factor closes up after
//! `T = 2π/√(k²−1)` and the endpoint is the rotation `Exp(−kT·G)`.
//!
//! Reaching `Exp(θG)` therefore needs `−kT ≡ θ (mod 2π)`; the shortest choice
//! is `−kT = θ + 2π·sign θ`, giving length `T = √(θ² + 4π|θ|)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::lorentz::LieElement;

/// Length of the shortest horizontal curve from `Id` to a planar rotation by
/// `theta`.
pub fn minimal_plane_length(theta: f64) -> f64 {
    (theta * theta + 4.0 * PI * theta.abs()).sqrt()
}

/// Vertical parameter `k` and duration `T` of the geodesic reaching `Exp(θG)`.
///
/// `k` is found by bisection on the closing condition
/// `2π|k|/√(k²−1) = 2π + |θ|`; at `|θ| = π` the sign `k < 0` is used.
pub fn solve_vertical(theta: f64) -> Result<(f64, f64)> {
    if !(theta.abs() > 0.0 && theta.abs() <= PI + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "rotation angle must satisfy 0 < |θ| ≤ π, got {theta}"
        )));
    }
    let target = 2.0 * PI + theta.abs();
    let f = |kappa: f64| 2.0 * PI * kappa / (kappa * kappa - 1.0).sqrt() - target;
    let (mut lo, mut hi) = (1.0 + 1e-12, 1e6);
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::RootSolver { lo, hi, flo, fhi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let kappa = 0.5 * (lo + hi);
    let duration = 2.0 * PI / (kappa * kappa - 1.0).sqrt();
    let sign = if theta < 0.0 { 1.0 } else { -1.0 };
    Ok((sign * kappa, duration))
}

/// A normal geodesic in the Lorentz subgroup acting on `(e_t, p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneLeg {
    pub p: Vector,
    pub q: Vector,
    pub k: f64,
    pub duration: f64,
    /// Target angle: the endpoint is `Exp(θ (q pᵀ − p qᵀ))`.
    pub theta: f64,
}

impl PlaneLeg {
    /// `p, q` must be orthonormal.
    pub fn new(p: Vector, q: Vector, theta: f64) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                got: q.len(),
            });
        }
        let defect = (p.norm() - 1.0).abs() + (q.norm() - 1.0).abs() + p.dot(&q).abs();
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "plane frame is not orthonormal (defect {defect:.3e})"
            )));
        }
        let (k, duration) = solve_vertical(theta)?;
        Ok(Self {
            p,
            q,
            k,
            duration,
            theta,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// `3×3` form of `γ(τ)` in the frame `(e_t, p, q)`.
    fn local(&self, tau: f64) -> nalgebra::Matrix3<f64> {
        let k = self.k;
        let x = nalgebra::Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, -k, 0.0, k, 0.0);
        let omega = (k * k - 1.0).sqrt();
        let (s, c) = (omega * tau).sin_cos();
        let first = nalgebra::Matrix3::identity() + x * (s / omega) + x * x * ((1.0 - c) / (omega * omega));
        let (sr, cr) = (-k * tau).sin_cos();
        let rot = nalgebra::Matrix3::new(1.0, 0.0, 0.0, 0.0, cr, -sr, 0.0, sr, cr);
        first * rot
    }

    /// `γ(τ)` as an `(n+1)×(n+1)` matrix; defined for every real `τ`.
    pub fn at(&self, tau: f64) -> Mat {
        let n = self.dim();
        let mut frame = Mat::zeros(n + 1, 3);
        frame[(0, 0)] = 1.0;
        frame.view_mut((1, 1), (n, 1)).copy_from(&self.p);
        frame.view_mut((1, 2), (n, 1)).copy_from(&self.q);
        let local = self.local(tau) - nalgebra::Matrix3::identity();
        let local = Mat::from_iterator(3, 3, local.iter().copied());
        Mat::identity(n + 1, n + 1) + &frame * local * frame.transpose()
    }

    /// `γ⁻¹γ̇` at `τ`.
    pub fn control(&self, tau: f64) -> LieElement {
        let (s, c) = (self.k * tau).sin_cos();
        LieElement::horizontal(&self.p * c + &self.q * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, expm};

    #[test]
    fn closed_form_matches_root_solve() {
        for theta in [0.1, 0.5, 1.0, 2.0, 3.0, PI, -0.7] {
            let (k, duration) = solve_vertical(theta).unwrap();
            let length = minimal_plane_length(theta);
            assert!((duration - length).abs() < 1e-12 * length, "θ={theta}");
            let k_closed = -theta.signum() * (2.0 * PI + theta.abs()) / length;
            assert!((k - k_closed).abs() < 1e-12, "θ={theta}");
        }
        assert!(solve_vertical(0.0).is_err());
        assert!(solve_vertical(4.0).is_err());
    }

    #[test]
    fn local_form_matches_generic_exponential() {
        let leg = PlaneLeg::new(linalg::basis(0, 2), linalg::basis(1, 2), 0.8).unwrap();
        let tau = 0.37;
        let mut x = Mat::zeros(3, 3);
        x[(0, 1)] = 1.0;
        x[(1, 0)] = 1.0;
        x[(1, 2)] = -leg.k;
        x[(2, 1)] = leg.k;
        let mut g = Mat::zeros(3, 3);
        g[(2, 1)] = 1.0;
        g[(1, 2)] = -1.0;
        let reference = expm(&(x * tau)) * expm(&(g * (-leg.k * tau)));
        assert!((leg.at(tau) - reference).norm() < 1e-13);
    }

    #[test]
    fn endpoint_is_the_target_rotation() {
        let theta = 1.3;
        let leg = PlaneLeg::new(linalg::basis(0, 2), linalg::basis(1, 2), theta).unwrap();
        let end = leg.at(leg.duration);
        let mut expected = Mat::identity(3, 3);
        expected[(1, 1)] = theta.cos();
        expected[(2, 2)] = theta.cos();
        expected[(2, 1)] = theta.sin();
        expected[(1, 2)] = -theta.sin();
        assert!((end - expected).norm() < 1e-12);
    }
}
