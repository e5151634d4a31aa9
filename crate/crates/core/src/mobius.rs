//! Möbius geometry: stereographic charts, reflections, hyperbolic distance and
//! the conformal action of `SO₀(n,1)` on the unit sphere.
//!
//! The sphere action goes through the forward light cone: `z` is identified
//! with the ray of `(1, z)`, so `A · z = w.x / w.t` for `w = A (1, z)`.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::lorentz::{exp_h, LorentzMatrix};

/// `1 − x₀` below which the stereographic image is the point at infinity.
pub const POLE_TOL: f64 = 1e-14;

/// A unit vector of `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    z: Vector,
}

impl SpherePoint {
    /// Normalizes `z`; rejects zero or non-finite input.
    pub fn new(z: Vector) -> Result<Self> {
        let norm = z.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidArgument(
                "sphere point needs a finite nonzero vector".into(),
            ));
        }
        Ok(Self { z: z / norm })
    }

    pub fn pole(i: usize, n: usize) -> Self {
        Self {
            z: linalg::basis(i, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.z
    }

    pub fn into_vector(self) -> Vector {
        self.z
    }

    /// Great-circle distance.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        linalg::angle_between(&self.z, &other.z)
    }
}

/// A point of `ℝⁿ⁻¹ ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedPoint {
    Finite(Vector),
    Infinity,
}

impl ExtendedPoint {
    pub fn finite(&self) -> Option<&Vector> {
        match self {
            ExtendedPoint::Finite(x) => Some(x),
            ExtendedPoint::Infinity => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereTangent {
    pub base: SpherePoint,
    pub vec: Vector,
}

impl SphereTangent {
    /// Tangency defect `⟨vec, base⟩`.
    pub fn normal_component(&self) -> f64 {
        self.vec.dot(self.base.as_vector())
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `(x₀, x̄) ↦ x̄ / (1 − x₀)`, with the pole `e₀` sent to `∞`.
pub fn stereographic(z: &SpherePoint) -> ExtendedPoint {
    let v = z.as_vector();
    let denom = 1.0 - v[0];
    if denom < POLE_TOL {
        return ExtendedPoint::Infinity;
    }
    ExtendedPoint::Finite(v.rows(1, v.len() - 1) / denom)
}

/// Inverse chart onto the sphere of `ℝⁿ`.
pub fn stereographic_inv(p: &ExtendedPoint, n: usize) -> Result<SpherePoint> {
    match p {
        ExtendedPoint::Infinity => Ok(SpherePoint::pole(0, n)),
        ExtendedPoint::Finite(x) => {
            check_dim(n - 1, x.len())?;
            let r2 = x.norm_squared();
            let mut z = Vector::zeros(n);
            z[0] = (r2 - 1.0) / (r2 + 1.0);
            z.rows_mut(1, n - 1).copy_from(&(x * (2.0 / (r2 + 1.0))));
            SpherePoint::new(z)
        }
    }
}

/// Inversion in the sphere `S(a, r)`.
pub fn reflect_sphere(a: &Vector, r: f64, x: &ExtendedPoint) -> Result<ExtendedPoint> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    match x {
        ExtendedPoint::Infinity => Ok(ExtendedPoint::Finite(a.clone())),
        ExtendedPoint::Finite(x) => {
            check_dim(a.len(), x.len())?;
            let d = x - a;
            let d2 = d.norm_squared();
            if d2 == 0.0 {
                return Ok(ExtendedPoint::Infinity);
            }
            Ok(ExtendedPoint::Finite(a + d * (r * r / d2)))
        }
    }
}

/// Reflection in the hyperplane `⟨a, x⟩ = t`.
pub fn reflect_plane(a: &Vector, t: f64, x: &ExtendedPoint) -> Result<ExtendedPoint> {
    let a2 = a.norm_squared();
    if a2 == 0.0 {
        return Err(Error::InvalidArgument("plane normal must be nonzero".into()));
    }
    match x {
        ExtendedPoint::Infinity => Ok(ExtendedPoint::Infinity),
        ExtendedPoint::Finite(x) => {
            check_dim(a.len(), x.len())?;
            Ok(ExtendedPoint::Finite(x + a * (2.0 * (t - a.dot(x)) / a2)))
        }
    }
}

/// Hyperbolic distance in the hyperboloid chart `x ↦ (√(1+|x|²), x)`.
///
/// Evaluated as `2 asinh(‖g(x) − g(y)‖_L / 2)`, which avoids the cancellation
/// of `acosh` near the diagonal.
pub fn hyperbolic_distance(x: &Vector, y: &Vector) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    let tx = (1.0 + x.norm_squared()).sqrt();
    let ty = (1.0 + y.norm_squared()).sqrt();
    let dt = (x.norm_squared() - y.norm_squared()) / (tx + ty);
    let chord2 = ((x - y).norm_squared() - dt * dt).max(0.0);
    Ok(2.0 * (chord2.sqrt() / 2.0).asinh())
}

/// `g⁻¹(A · g(x))`.
pub fn lorentz_to_hyperbolic(a: &LorentzMatrix, x: &Vector) -> Result<Vector> {
    check_dim(a.dim(), x.len())?;
    let n = x.len();
    let mut w = Vector::zeros(n + 1);
    w[0] = (1.0 + x.norm_squared()).sqrt();
    w.rows_mut(1, n).copy_from(x);
    let image = a.matrix() * w;
    if image[0] <= 0.0 {
        return Err(Error::TimeReversal(image[0]));
    }
    Ok(image.rows(1, n).into_owned())
}

/// Light-cone action of `A` on the sphere.
pub fn mobius_sphere_action(a: &LorentzMatrix, z: &SpherePoint) -> Result<SpherePoint> {
    check_dim(a.dim(), z.dim())?;
    Ok(SpherePoint {
        z: act_on_vector(a.matrix(), z.as_vector())?,
    })
}

/// Raw form of the sphere action, shared with the configuration action.
pub(crate) fn act_on_vector(a: &Mat, z: &Vector) -> Result<Vector> {
    let n = z.len();
    let mut w = Vector::zeros(n + 1);
    w[0] = 1.0;
    w.rows_mut(1, n).copy_from(z);
    let image = a * w;
    if image[0] <= 0.0 {
        return Err(Error::TimeReversal(image[0]));
    }
    let x = image.rows(1, n) / image[0];
    // The light cone is preserved exactly; renormalize away the rounding.
    let norm = x.norm();
    Ok(x / norm)
}

fn unit(v: &Vector) -> Result<Vector> {
    let norm = v.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidArgument("direction vector must be nonzero".into()));
    }
    Ok(v / norm)
}

/// `v̂ − ⟨v̂, z⟩ z`, the spherical gradient of `z ↦ ⟨v̂, z⟩`.
pub fn grad_phi(v: &Vector, z: &SpherePoint) -> Result<SphereTangent> {
    check_dim(z.dim(), v.len())?;
    let vhat = unit(v)?;
    Ok(SphereTangent {
        vec: linalg::project_tangent(&vhat, z.as_vector()),
        base: z.clone(),
    })
}

/// Flow of `grad φ_v` for time `s`, in closed form through the boost
/// `exp_h(s v̂)`.
pub fn gradient_flow(v: &Vector, s: f64, z: &SpherePoint) -> Result<SpherePoint> {
    let vhat = unit(v)?;
    mobius_sphere_action(&exp_h(&(vhat * s)), z)
}

/// `ξᵢ(z) = eᵢ − zᵢ z`.
pub fn xi_field(i: usize, z: &SpherePoint) -> Result<SphereTangent> {
    let n = z.dim();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    grad_phi(&linalg::basis(i, n), z)
}

/// `[ξᵢ, ξⱼ](z) = zᵢ eⱼ − zⱼ eᵢ`.
pub fn xi_bracket(i: usize, j: usize, z: &SpherePoint) -> Result<SphereTangent> {
    let n = z.dim();
    for k in [i, j] {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dim: n });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument("bracket indices must differ".into()));
    }
    let zv = z.as_vector();
    let mut vec = Vector::zeros(n);
    vec[j] += zv[i];
    vec[i] -= zv[j];
    Ok(SphereTangent { base: z.clone(), vec })
}

/// Orthonormal frame `(e₁, e₂)` of `span(v, w)` by Gram–Schmidt in that order,
/// together with `sin ∠(v, w)`.
fn plane_frame(v: &Vector, w: &Vector) -> Result<(Vector, Vector, f64)> {
    let e1 = unit(v)?;
    let what = unit(w)?;
    let perp = &what - &e1 * e1.dot(&what);
    let sin = perp.norm();
    if sin < 1e-12 {
        return Err(Error::InvalidArgument(
            "v and w must be linearly independent".into(),
        ));
    }
    Ok((e1, perp / sin, sin))
}

/// Rotation in the oriented plane `(v, w)` generated by the commutator of the
/// gradient flows of `φ_v` and `φ_w`.
///
/// `Φᵛ_s Φʷ_s Φᵛ_{−s} Φʷ_{−s} ≈` this map at `t = s²`. For orthogonal `v, w`
/// the angle is exactly `−t`; in general it is `−t · sin ∠(v, w)`.
pub fn bracket_rotation_flow(v: &Vector, w: &Vector, t: f64, z: &SpherePoint) -> Result<SpherePoint> {
    check_dim(z.dim(), v.len())?;
    check_dim(z.dim(), w.len())?;
    let (e1, e2, sin) = plane_frame(v, w)?;
    let angle = -t * sin;
    let zv = z.as_vector();
    let (p, q) = (e1.dot(zv), e2.dot(zv));
    let (s, c) = angle.sin_cos();
    let rotated = zv + &e1 * (c * p - s * q - p) + &e2 * (s * p + c * q - q);
    SpherePoint::new(rotated)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[f64]) -> SpherePoint {
        SpherePoint::new(Vector::from_vec(v.to_vec())).unwrap()
    }

    #[test]
    fn stereographic_examples() {
        let south = sp(&[-1.0, 0.0, 0.0]);
        assert_eq!(stereographic(&south), ExtendedPoint::Finite(Vector::zeros(2)));
        let eq = sp(&[0.0, 0.6, 0.8]);
        let img = stereographic(&eq);
        assert!((img.finite().unwrap() - Vector::from_vec(vec![0.6, 0.8])).norm() < 1e-15);
        assert_eq!(stereographic(&SpherePoint::pole(0, 3)), ExtendedPoint::Infinity);
        let back = stereographic_inv(&ExtendedPoint::Finite(Vector::zeros(2)), 3).unwrap();
        assert_eq!(back, south);
        assert_eq!(
            stereographic_inv(&ExtendedPoint::Infinity, 3).unwrap(),
            SpherePoint::pole(0, 3)
        );
        let far = stereographic_inv(&ExtendedPoint::Finite(Vector::from_vec(vec![1e6, 0.0])), 3).unwrap();
        assert!(far.distance(&SpherePoint::pole(0, 3)) <= 1e-5);
    }

    #[test]
    fn reflection_examples() {
        let a = Vector::from_vec(vec![1.0, 2.0]);
        let on = ExtendedPoint::Finite(Vector::from_vec(vec![1.0, 5.0]));
        let img = reflect_sphere(&a, 3.0, &on).unwrap();
        assert!((img.finite().unwrap() - on.finite().unwrap()).norm() < 1e-15);
        assert_eq!(
            reflect_sphere(&a, 3.0, &ExtendedPoint::Finite(a.clone())).unwrap(),
            ExtendedPoint::Infinity
        );
        assert_eq!(
            reflect_sphere(&a, 3.0, &ExtendedPoint::Infinity).unwrap(),
            ExtendedPoint::Finite(a.clone())
        );
        assert!(reflect_sphere(&a, 0.0, &on).is_err());

        let normal = Vector::from_vec(vec![0.0, 2.0]);
        let fixed = ExtendedPoint::Finite(Vector::from_vec(vec![7.0, 1.5]));
        assert_eq!(reflect_plane(&normal, 3.0, &fixed).unwrap(), fixed);
        assert_eq!(
            reflect_plane(&normal, 3.0, &ExtendedPoint::Infinity).unwrap(),
            ExtendedPoint::Infinity
        );
        assert!(reflect_plane(&Vector::zeros(2), 1.0, &fixed).is_err());
    }

    #[test]
    fn hyperbolic_distance_examples() {
        let x = Vector::from_vec(vec![0.3, -2.0]);
        assert_eq!(hyperbolic_distance(&x, &x).unwrap(), 0.0);
        let t = 1.7;
        let y = linalg::basis(0, 2) * t;
        let d = hyperbolic_distance(&Vector::zeros(2), &y).unwrap();
        assert!((d - t.asinh()).abs() < 1e-15);
    }

    #[test]
    fn lorentz_to_hyperbolic_examples() {
        let alpha = 0.9;
        let b = crate::lorentz::axis_boost(alpha, 3);
        let img = lorentz_to_hyperbolic(&b, &Vector::zeros(3)).unwrap();
        assert!((img - linalg::basis(0, 3) * alpha.sinh()).norm() < 1e-15);
        let x = Vector::from_vec(vec![0.2, 0.1, -0.4]);
        assert_eq!(lorentz_to_hyperbolic(&LorentzMatrix::identity(3), &x).unwrap(), x);
    }

    #[test]
    fn sphere_action_rotation() {
        let mut r = Mat::identity(3, 3);
        r[(0, 0)] = 0.0;
        r[(1, 1)] = 0.0;
        r[(0, 1)] = -1.0;
        r[(1, 0)] = 1.0;
        let a = LorentzMatrix::from_rotation(&r);
        let z = sp(&[0.6, 0.0, 0.8]);
        let img = mobius_sphere_action(&a, &z).unwrap();
        assert!((img.as_vector() - Vector::from_vec(vec![0.0, 0.6, 0.8])).norm() < 1e-15);
    }

    #[test]
    fn sphere_action_rejects_time_reversal() {
        let mut m = Mat::identity(3, 3);
        m[(0, 0)] = -1.0;
        let a = LorentzMatrix::new(m, 1e-9).unwrap();
        assert!(matches!(
            mobius_sphere_action(&a, &sp(&[1.0, 0.0])),
            Err(Error::TimeReversal(_))
        ));
    }

    #[test]
    fn gradient_examples() {
        let v = Vector::from_vec(vec![0.0, 2.0, 0.0]);
        let at_fixed = grad_phi(&v, &sp(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(at_fixed.vec, Vector::zeros(3));
        let perp = grad_phi(&v, &sp(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(perp.vec, linalg::basis(1, 3));
        assert!(grad_phi(&Vector::zeros(3), &sp(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn xi_examples() {
        assert_eq!(
            xi_field(1, &SpherePoint::pole(1, 3)).unwrap().vec,
            Vector::zeros(3)
        );
        assert_eq!(
            xi_field(1, &SpherePoint::pole(2, 3)).unwrap().vec,
            linalg::basis(1, 3)
        );
        assert!(xi_field(3, &SpherePoint::pole(2, 3)).is_err());
        let b = xi_bracket(0, 1, &SpherePoint::pole(0, 3)).unwrap();
        assert_eq!(b.vec, linalg::basis(1, 3));
        let b = xi_bracket(0, 1, &SpherePoint::pole(2, 3)).unwrap();
        assert_eq!(b.vec, Vector::zeros(3));
        assert!(xi_bracket(1, 1, &SpherePoint::pole(2, 3)).is_err());
    }

    #[test]
    fn bracket_rotation_examples() {
        let v = linalg::basis(0, 3);
        let w = linalg::basis(1, 3);
        let z = sp(&[0.3, 0.4, 0.5]);
        assert!(bracket_rotation_flow(&v, &w, 0.0, &z).unwrap().distance(&z) < 1e-15);
        let fixed = SpherePoint::pole(2, 3);
        assert!(
            (bracket_rotation_flow(&v, &w, 0.7, &fixed).unwrap().as_vector() - fixed.as_vector()).norm()
                < 1e-15
        );
        // Angle −t turns e₀ away from e₁.
        let img = bracket_rotation_flow(&v, &w, 0.5, &SpherePoint::pole(0, 3)).unwrap();
        assert!((img.as_vector()[1] + 0.5f64.sin()).abs() < 1e-15);
        assert!(bracket_rotation_flow(&v, &(&v * 2.0), 0.1, &z).is_err());
    }
}
