//! Seeded test distributions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{self, Mat, Vector};
use crate::lorentz::{exp_h, LieElement, LorentzMatrix};
use crate::planner::CircleHead;
use crate::snake::{self, SnakeConfig, DEFAULT_NODES};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Haar-distributed element of `SO(n)`.
pub fn random_rotation<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let g = Mat::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// `R₁ · exp_h(u) · R₂` with Haar rotations and `|u|` uniform on `[0, max_rapidity]`.
pub fn random_so0<R: Rng>(rng: &mut R, n: usize, max_rapidity: f64) -> LorentzMatrix {
    let left = LorentzMatrix::from_rotation(&random_rotation(rng, n));
    let right = LorentzMatrix::from_rotation(&random_rotation(rng, n));
    let u = unit_vector(rng, n) * rng.random_range(0.0..=max_rapidity);
    left.compose(&exp_h(&u)).compose(&right)
}

/// Gaussian `(u, B)` scaled to `|u| = boost` and `‖B‖_F = spin`.
pub fn random_lie<R: Rng>(rng: &mut R, n: usize, boost: f64, spin: f64) -> LieElement {
    let u = unit_vector(rng, n) * boost;
    let g = Mat::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let b = linalg::antisymmetrize(&g);
    let norm = b.norm();
    let b = if norm > 0.0 { b * (spin / norm) } else { b };
    LieElement::new(u, &b).expect("square by construction")
}

/// Piecewise circular arcs: segment `i` is `cos(κᵢσ) aᵢ + sin(κᵢσ) bᵢ` with
/// `σ` the local arc length, `κᵢ ∈ [−1, 1]` and lengths in `[0.5, 1.5]`.
pub fn random_config<R: Rng>(rng: &mut R, n: usize, segments: usize) -> Result<SnakeConfig> {
    let mut partition = vec![0.0];
    let mut arcs = Vec::with_capacity(segments);
    for _ in 0..segments.max(1) {
        let len = rng.random_range(0.5..1.5);
        partition.push(partition.last().unwrap() + len);
        let a = unit_vector(rng, n);
        let b = loop {
            let w = linalg::project_tangent(&gaussian_vector(rng, n), &a);
            if w.norm() > 1e-6 {
                break w.normalize();
            }
        };
        let kappa: f64 = rng.random_range(-1.0..=1.0);
        arcs.push((a, b, kappa));
    }
    let starts = partition.clone();
    SnakeConfig::from_fn(partition, DEFAULT_NODES, |i, s| {
        let (a, b, kappa) = &arcs[i];
        let (sn, cs) = (kappa * (s - starts[i])).sin_cos();
        a * cs + b * sn
    })
}

/// Every node equal to `e₀`: the canonical singular configuration.
pub fn straight_config(n: usize, partition: Vec<f64>) -> Result<SnakeConfig> {
    SnakeConfig::from_fn(partition, DEFAULT_NODES, |_, _| linalg::basis(0, n))
}

/// Circle through the endpoint of `u` with radius `radius_rel · L` in a random
/// plane, traversed once over `duration`.
pub fn random_circle_head<R: Rng>(
    rng: &mut R,
    u: &SnakeConfig,
    radius_rel: f64,
    duration: f64,
) -> CircleHead {
    let n = u.dim();
    let e1 = unit_vector(rng, n);
    let e2 = loop {
        let w = linalg::project_tangent(&gaussian_vector(rng, n), &e1);
        if w.norm() > 1e-6 {
            break w.normalize();
        }
    };
    CircleHead::through(&snake::endpoint(u), radius_rel * u.length(), e1, e2, duration)
}
