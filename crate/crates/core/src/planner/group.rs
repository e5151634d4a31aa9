use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::lorentz::{self, LorentzMatrix, Membership};

use super::geodesic::PlaneLeg;
use super::path::{GroupPath, Leg};

/// `τ ↦ exp_h(τ u/|u|)` on `[0, |u|]`.
pub fn boost_leg(u: &Vector) -> Result<GroupPath> {
    let length = u.norm();
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument("boost leg needs a nonzero vector".into()));
    }
    GroupPath::from_legs(
        u.len(),
        vec![Leg::Boost {
            dir: u / length,
            length,
        }],
    )
}

/// Horizontal geodesic in `SO(2,1)` from `Id` to `diag(1, R(θ))`, with `R(θ)`
/// the counter-clockwise rotation of the plane.
pub fn su11_geodesic(theta: f64) -> Result<GroupPath> {
    plane_leg(&linalg::basis(0, 2), &linalg::basis(1, 2), theta)
}

/// Geodesic leg ending at `Exp(θ (b aᵀ − a bᵀ))` for an orthonormal frame
/// `(a, b)`: the rotation by `θ` turning `a` towards `b`.
pub fn plane_leg(a: &Vector, b: &Vector, theta: f64) -> Result<GroupPath> {
    let leg = PlaneLeg::new(a.clone(), b.clone(), theta)?;
    GroupPath::from_legs(a.len(), vec![Leg::Plane(leg)])
}

/// Geodesic leg ending at `Exp(θ Ωᵢⱼ)`, acting on the coordinates `(t, i, j)`.
pub fn rotation_leg(i: usize, j: usize, theta: f64, n: usize) -> Result<GroupPath> {
    for k in [i, j] {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dim: n });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument("plane indices must differ".into()));
    }
    // Ωᵢⱼ = eᵢeⱼᵀ − eⱼeᵢᵀ turns eⱼ towards eᵢ.
    plane_leg(&linalg::basis(j, n), &linalg::basis(i, n), theta)
}

/// Horizontal path from `Id` to `A`: one geodesic leg per plane of the
/// factorization, in decreasing angle, followed by the boost.
pub fn plan_group_path(a: &LorentzMatrix, tol: f64) -> Result<GroupPath> {
    let grade = a.classify(tol.max(lorentz::MEMBERSHIP_TOL));
    if grade != Membership::So0 {
        return Err(Error::NotOrthochronous(grade.to_string()));
    }
    let f = lorentz::factorize(a, tol)?;
    let n = a.dim();
    let mut path = GroupPath::new(n);
    for (theta, p, q) in f.blocks.planes() {
        path.push(Leg::Plane(PlaneLeg::new(p.clone(), q.clone(), theta)?))?;
    }
    let length = f.u.norm();
    if length > 0.0 {
        path.push(Leg::Boost {
            dir: &f.u / length,
            length,
        })?;
    }
    Ok(path)
}

/// `m` commutator cycles of boost legs of length `√(t/m)` along `±eᵢ, ±eⱼ`.
///
/// Odd cycles run `(+i, +j, −i, −j)` and even cycles the reversed signs
/// `(−i, −j, +i, +j)`, so the third-order terms of consecutive cycles cancel.
/// The endpoint tends to `Exp(t [Uᵢ, Uⱼ]) = Exp(t Ωᵢⱼ)` with error `O(1/m)`.
pub fn commutator_probe(i: usize, j: usize, t: f64, m: usize, n: usize) -> Result<GroupPath> {
    for k in [i, j] {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dim: n });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument("probe indices must differ".into()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("probe needs at least one cycle".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "probe time must be non-negative, got {t}"
        )));
    }
    let mut path = GroupPath::new(n);
    if t == 0.0 {
        return Ok(path);
    }
    let s = (t / m as f64).sqrt();
    let (ei, ej) = (linalg::basis(i, n), linalg::basis(j, n));
    for cycle in 0..m {
        let sign = if cycle % 2 == 0 { 1.0 } else { -1.0 };
        for dir in [&ei * sign, &ej * sign, &ei * -sign, &ej * -sign] {
            path.push(Leg::Boost { dir, length: s })?;
        }
    }
    Ok(path)
}
