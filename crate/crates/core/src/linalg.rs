//! Small dense helpers shared by every module.

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Standard basis vector `e_i` of `ℝⁿ` (zero-based).
pub fn basis(i: usize, n: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// `(B - Bᵀ) / 2`.
pub fn antisymmetrize(b: &Mat) -> Mat {
    (b - b.transpose()) * 0.5
}

pub fn symmetrize(b: &Mat) -> Mat {
    (b + b.transpose()) * 0.5
}

/// `‖QᵀQ − Id‖_F`.
pub fn orthogonality_residual(q: &Mat) -> f64 {
    let n = q.nrows();
    (q.transpose() * q - Mat::identity(n, n)).norm()
}

/// Generic matrix exponential by scaling and squaring of the Taylor series.
///
/// Used where no closed form applies (general `𝔰𝔬(n,1)` elements) and as an
/// independent reference for the closed-form exponentials.
pub fn expm(a: &Mat) -> Mat {
    let n = a.nrows();
    let norm = a.norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);
    let mut result = Mat::identity(n, n);
    let mut term = Mat::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        result += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Orthonormal completion: an `n×n` rotation whose first column is `dir`.
///
/// Householder reflection mapping `e₀` to `dir`, with the last column negated
/// so the determinant is `+1`. `dir` must be a unit vector and `n ≥ 2`.
pub fn rotation_with_first_column(dir: &Vector) -> Mat {
    let n = dir.len();
    let e0 = basis(0, n);
    let w = &e0 - dir;
    let wn = w.norm_squared();
    let mut h = Mat::identity(n, n);
    if wn > 1e-30 {
        h -= (&w * w.transpose()) * (2.0 / wn);
    } else {
        // dir == e0: the reflection is the identity, which already has det +1.
        return h;
    }
    let mut last = h.column_mut(n - 1);
    last.neg_mut();
    h
}

/// Tangent projection `w − ⟨w, u⟩ u`.
pub fn project_tangent(w: &Vector, u: &Vector) -> Vector {
    w - u * w.dot(u)
}

/// Angle between two unit vectors, accurate near 0 and π.
pub fn angle_between(a: &Vector, b: &Vector) -> f64 {
    let cross = (a * b.norm() - b * a.norm()).norm();
    let sum = (a * b.norm() + b * a.norm()).norm();
    2.0 * cross.atan2(sum)
}
