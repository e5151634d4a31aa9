//! The Lorentz form on `ℝ ⊕ ℝⁿ`, the groups `O(n,1) ⊃ SO(n,1) ⊃ SO₀(n,1)`
//! and the Lie algebra `𝔰𝔬(n,1) = 𝔥 ⊕ 𝔰`.
//!
//! Matrices act on `(t, x)` with the time coordinate in slot 0. An element of
//! `O(n,1)` has the block form
//!
//! ```text
//!     | c   vᵀ |
//!     | u   B  |
//! ```
//!
//! and every element of the group factors as `diag(ε, Q) · T` with `T` a boost
//! (symmetric, `T₀₀ = √(1+|v|²)`, identity on the orthogonal complement of the
//! boost direction).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::spectral::{self, RotationBlocks};

/// Default tolerance for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Default tolerance for factorization residuals.
pub const FACTOR_TOL: f64 = 1e-8;

/// Below this rapidity the closed-form boost switches to Taylor coefficients.
const SMALL_RAPIDITY: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiVector {
    pub t: f64,
    pub x: Vector,
}

impl MinkowskiVector {
    pub fn new(t: f64, x: Vector) -> Result<Self> {
        if !t.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Minkowski vector".into()));
        }
        Ok(Self { t, x })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Stacked `(t, x)` as an `(n+1)`-vector.
    pub fn to_vector(&self) -> Vector {
        let mut v = Vector::zeros(self.dim() + 1);
        v[0] = self.t;
        v.rows_mut(1, self.dim()).copy_from(&self.x);
        v
    }

    pub fn from_vector(v: &Vector) -> Self {
        Self {
            t: v[0],
            x: v.rows(1, v.len() - 1).into_owned(),
        }
    }
}

/// `⟨a, b⟩_L = ⟨a.x, b.x⟩ − a.t·b.t`.
pub fn lorentz_product(a: &MinkowskiVector, b: &MinkowskiVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(a.x.dot(&b.x) - a.t * b.t)
}

fn check_square(m: &Mat) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() < 2 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows() - 1)
}

/// `A^# = J Aᵀ J` with `J = diag(−1, Idₙ)`.
pub fn pseudo_adjoint(a: &Mat) -> Result<Mat> {
    check_square(a)?;
    let mut r = a.transpose();
    // J X J flips the sign of row 0 and column 0, leaving the corner unchanged.
    let size = r.nrows();
    for k in 1..size {
        r[(0, k)] = -r[(0, k)];
        r[(k, 0)] = -r[(k, 0)];
    }
    Ok(r)
}

/// `‖A^# A − Id‖_F`.
pub fn lorentz_residual(a: &Mat) -> Result<f64> {
    let size = check_square(a)? + 1;
    let adj = pseudo_adjoint(a)?;
    Ok((adj * a - Mat::identity(size, size)).norm())
}

/// Membership grades, each contained in the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    NotLorentz,
    O,
    So,
    So0,
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Membership::NotLorentz => "not_lorentz",
            Membership::O => "O",
            Membership::So => "SO",
            Membership::So0 => "SO0",
        };
        f.write_str(s)
    }
}

pub fn classify(a: &Mat, tol: f64) -> Membership {
    let Ok(residual) = lorentz_residual(a) else {
        return Membership::NotLorentz;
    };
    if !residual.is_finite() || residual > tol {
        return Membership::NotLorentz;
    }
    if a[(0, 0)] <= 0.0 {
        return Membership::O;
    }
    let (_, q, _) = polar_factors(a);
    if q.determinant() > 0.0 {
        Membership::So0
    } else {
        Membership::So
    }
}

/// An `(n+1)×(n+1)` matrix that passed the Lorentz membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMatrix {
    m: Mat,
}

impl LorentzMatrix {
    /// Certifies `m` against the Lorentz form.
    pub fn new(m: Mat, tol: f64) -> Result<Self> {
        let residual = lorentz_residual(&m)?;
        if !residual.is_finite() || residual > tol {
            return Err(Error::NotLorentz { residual, tol });
        }
        Ok(Self { m })
    }

    /// Certifies `m` and additionally requires the `SO₀` grade.
    pub fn new_so0(m: Mat, tol: f64) -> Result<Self> {
        let grade = classify(&m, tol);
        if grade != Membership::So0 {
            if grade == Membership::NotLorentz {
                return Err(Error::NotLorentz {
                    residual: lorentz_residual(&m)?,
                    tol,
                });
            }
            return Err(Error::NotOrthochronous(grade.to_string()));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix built from closed forms that are Lorentz by construction.
    pub(crate) fn from_trusted(m: Mat) -> Self {
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: Mat::identity(n + 1, n + 1),
        }
    }

    /// `diag(1, Q)` for an orthogonal `Q`.
    pub fn from_rotation(q: &Mat) -> Self {
        let n = q.nrows();
        let mut m = Mat::identity(n + 1, n + 1);
        m.view_mut((1, 1), (n, n)).copy_from(q);
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows() - 1
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn into_matrix(self) -> Mat {
        self.m
    }

    /// The `(0,0)` entry `c`.
    pub fn time_entry(&self) -> f64 {
        self.m[(0, 0)]
    }

    /// Spatial block `B`.
    pub fn spatial_block(&self) -> Mat {
        let n = self.dim();
        self.m.view((1, 1), (n, n)).into_owned()
    }

    pub fn compose(&self, other: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix {
            m: &self.m * &other.m,
        }
    }

    /// Group inverse, computed exactly as the pseudo-adjoint.
    pub fn inverse(&self) -> LorentzMatrix {
        LorentzMatrix {
            m: pseudo_adjoint(&self.m).expect("square by construction"),
        }
    }

    pub fn residual(&self) -> f64 {
        lorentz_residual(&self.m).expect("square by construction")
    }

    pub fn classify(&self, tol: f64) -> Membership {
        classify(&self.m, tol)
    }

    pub fn apply(&self, w: &MinkowskiVector) -> Result<MinkowskiVector> {
        if w.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: w.dim(),
            });
        }
        Ok(MinkowskiVector::from_vector(&(&self.m * w.to_vector())))
    }
}

/// An element `(u, B)` of `𝔰𝔬(n,1) = 𝔥 ⊕ 𝔰`, embedded as
/// `[[0, uᵀ], [u, B]]` with `B` skew.
#[derive(Debug, Clone, PartialEq)]
pub struct LieElement {
    pub u: Vector,
    pub b: Mat,
}

impl LieElement {
    /// Builds an element, antisymmetrizing `b`.
    pub fn new(u: Vector, b: &Mat) -> Result<Self> {
        if b.nrows() != u.len() || b.ncols() != u.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                got: b.nrows(),
            });
        }
        Ok(Self {
            u,
            b: linalg::antisymmetrize(b),
        })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            u: Vector::zeros(n),
            b: Mat::zeros(n, n),
        }
    }

    pub fn horizontal(u: Vector) -> Self {
        let n = u.len();
        Self {
            u,
            b: Mat::zeros(n, n),
        }
    }

    pub fn vertical(b: &Mat) -> Result<Self> {
        Self::new(Vector::zeros(b.nrows()), b)
    }

    /// Boost generator `Uᵢ`.
    pub fn boost_generator(i: usize, n: usize) -> Self {
        Self::horizontal(linalg::basis(i, n))
    }

    /// Rotation generator `Ωᵢⱼ`: `+1` at `(i, j)`, `−1` at `(j, i)`.
    pub fn rotation_generator(i: usize, j: usize, n: usize) -> Self {
        let mut b = Mat::zeros(n, n);
        b[(i, j)] = 1.0;
        b[(j, i)] = -1.0;
        Self {
            u: Vector::zeros(n),
            b,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn to_matrix(&self) -> Mat {
        let n = self.dim();
        let mut m = Mat::zeros(n + 1, n + 1);
        for i in 0..n {
            m[(0, i + 1)] = self.u[i];
            m[(i + 1, 0)] = self.u[i];
        }
        m.view_mut((1, 1), (n, n)).copy_from(&self.b);
        m
    }

    /// Splits an `(n+1)×(n+1)` matrix into its `𝔥` and `𝔰` parts. Components
    /// outside `𝔰𝔬(n,1)` (diagonal time entry, symmetric spatial part, the
    /// antisymmetric time/space coupling) are discarded.
    pub fn from_matrix(m: &Mat) -> Result<Self> {
        let n = check_square(m)?;
        let mut u = Vector::zeros(n);
        for i in 0..n {
            u[i] = 0.5 * (m[(0, i + 1)] + m[(i + 1, 0)]);
        }
        let b = m.view((1, 1), (n, n)).into_owned();
        Self::new(u, &b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            u: &self.u * s,
            b: &self.b * s,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            u: &self.u + &other.u,
            b: &self.b + &other.b,
        }
    }

    /// Norm induced by `½⟨·,·⟩_HS`: `(|u|² + Σ_{i<j} b_ij²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.u.norm_squared() + 0.5 * self.b.norm_squared()).sqrt()
    }

    pub fn s_norm(&self) -> f64 {
        (0.5 * self.b.norm_squared()).sqrt()
    }

    /// Group exponential. Closed form on `𝔥`, scaling-and-squaring otherwise.
    pub fn exp(&self) -> LorentzMatrix {
        if self.b.iter().all(|x| *x == 0.0) {
            return exp_h(&self.u);
        }
        LorentzMatrix::from_trusted(linalg::expm(&self.to_matrix()))
    }

    /// `Ad_g X = g X g⁻¹`.
    pub fn adjoint_by(&self, g: &LorentzMatrix) -> Self {
        let m = g.matrix() * self.to_matrix() * g.inverse().matrix();
        Self::from_matrix(&m).expect("square by construction")
    }
}

/// Lie bracket via the commutator of embedded matrices.
pub fn bracket(x: &LieElement, y: &LieElement) -> Result<LieElement> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let c = linalg::commutator(&x.to_matrix(), &y.to_matrix());
    LieElement::from_matrix(&c)
}

/// Boost parameters `(v, c = √(1+|v|²), α = asinh|v|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostData {
    pub v: Vector,
    pub c: f64,
    pub alpha: f64,
}

impl BoostData {
    pub fn from_velocity(v: Vector) -> Self {
        let norm = v.norm();
        Self {
            c: (1.0 + norm * norm).sqrt(),
            alpha: norm.asinh(),
            v,
        }
    }

    /// `[[c, vᵀ], [v, Id + (c−1)/|v|² vvᵀ]]`.
    pub fn matrix(&self) -> LorentzMatrix {
        let n = self.v.len();
        let mut m = Mat::identity(n + 1, n + 1);
        m[(0, 0)] = self.c;
        for i in 0..n {
            m[(0, i + 1)] = self.v[i];
            m[(i + 1, 0)] = self.v[i];
        }
        // (c−1)/|v|² = 1/(c+1), which stays finite at v = 0.
        let coeff = 1.0 / (self.c + 1.0);
        let outer = &self.v * self.v.transpose() * coeff;
        let mut block = m.view_mut((1, 1), (n, n));
        block += outer;
        LorentzMatrix::from_trusted(m)
    }
}

/// Closed-form boost `Exp(U)` for `U ∈ 𝔥` with spatial vector `u`.
pub fn exp_h(u: &Vector) -> LorentzMatrix {
    let n = u.len();
    let omega = u.norm();
    let (sinhc, coshc) = if omega < SMALL_RAPIDITY {
        let w2 = omega * omega;
        (1.0 + w2 / 6.0, 0.5 + w2 / 24.0)
    } else {
        (omega.sinh() / omega, (omega.cosh() - 1.0) / (omega * omega))
    };
    let mut m = Mat::identity(n + 1, n + 1);
    m[(0, 0)] = omega.cosh();
    for i in 0..n {
        m[(0, i + 1)] = sinhc * u[i];
        m[(i + 1, 0)] = sinhc * u[i];
    }
    let mut block = m.view_mut((1, 1), (n, n));
    block += u * u.transpose() * coshc;
    LorentzMatrix::from_trusted(m)
}

/// Inverse of [`exp_h`] on boosts.
pub fn log_boost(t: &LorentzMatrix, tol: f64) -> Result<Vector> {
    let m = t.matrix();
    let asym = (m - m.transpose()).norm();
    if asym > tol {
        return Err(Error::NotBoost(format!("asymmetry {asym:.3e}")));
    }
    let grade = t.classify(tol);
    if grade != Membership::So0 {
        return Err(Error::NotBoost(format!("grade {grade}")));
    }
    let n = t.dim();
    let v: Vector = m.view((1, 0), (n, 1)).column(0).into_owned();
    let u = boost_generator_from_velocity(&v);
    let mismatch = (exp_h(&u).matrix() - m).norm();
    if mismatch > tol * (1.0 + m.norm()) {
        return Err(Error::NotBoost(format!("spectral mismatch {mismatch:.3e}")));
    }
    Ok(u)
}

/// `u = asinh(|v|) v/|v|`, the `𝔥` generator of the boost with velocity `v`.
fn boost_generator_from_velocity(v: &Vector) -> Vector {
    let norm = v.norm();
    if norm == 0.0 {
        return Vector::zeros(v.len());
    }
    v * (norm.asinh() / norm)
}

/// Raw polar factors `(ε, Q, boost velocity v)` read off the first row.
fn polar_factors(a: &Mat) -> (f64, Mat, Vector) {
    let n = a.nrows() - 1;
    let c = a[(0, 0)];
    let epsilon = if c >= 0.0 { 1.0 } else { -1.0 };
    // First row of A is ε·(c_T, v_Tᵀ).
    let v = Vector::from_iterator(n, (1..=n).map(|k| a[(0, k)] * epsilon));
    let boost = BoostData::from_velocity(v.clone());
    let spatial = a.view((1, 1), (n, n)).into_owned();
    // S⁻¹ = Id + (1/c − 1)/|v|² vvᵀ = Id − vvᵀ/(c(c+1)).
    let s_inv = Mat::identity(n, n) - &v * v.transpose() / (boost.c * (boost.c + 1.0));
    (epsilon, spatial * s_inv, v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostDecomposition {
    pub epsilon: f64,
    pub q: Mat,
    pub t: LorentzMatrix,
    pub boost: BoostData,
    pub residual: f64,
}

/// `A = diag(ε, Q) · T`.
pub fn boost_decompose(a: &LorentzMatrix, tol: f64) -> Result<BoostDecomposition> {
    let (epsilon, q, v) = polar_factors(a.matrix());
    let boost = BoostData::from_velocity(v);
    let t = boost.matrix();
    let mut p = LorentzMatrix::from_rotation(&q).into_matrix();
    p[(0, 0)] = epsilon;
    let residual = (&p * t.matrix() - a.matrix()).norm();
    let orth = linalg::orthogonality_residual(&q);
    if residual > tol || orth > tol {
        return Err(Error::Reconstruction {
            residual: residual.max(orth),
            tol,
        });
    }
    Ok(BoostDecomposition {
        epsilon,
        q,
        t,
        boost,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KakDecomposition {
    /// `Q'`, applied last.
    pub q_left: Mat,
    pub alpha: f64,
    /// `Q`, applied first as `Qᵀ`.
    pub q_right: Mat,
    pub residual: f64,
}

/// Axis boost of rapidity `alpha` along `e₀` in dimension `n`.
pub fn axis_boost(alpha: f64, n: usize) -> LorentzMatrix {
    let mut u = Vector::zeros(n);
    u[0] = alpha;
    exp_h(&u)
}

/// `A = diag(1, Q') · B_α(e₀) · diag(1, Qᵀ)`.
pub fn kak_decompose(a: &LorentzMatrix, tol: f64) -> Result<KakDecomposition> {
    let grade = a.classify(tol.max(MEMBERSHIP_TOL));
    if grade < Membership::So {
        return Err(Error::NotOrthochronous(grade.to_string()));
    }
    let d = boost_decompose(a, tol)?;
    let n = a.dim();
    let vnorm = d.boost.v.norm();
    let r = if vnorm > 0.0 {
        linalg::rotation_with_first_column(&(&d.boost.v / vnorm))
    } else {
        Mat::identity(n, n)
    };
    let q_left = &d.q * &r;
    let alpha = d.boost.alpha;
    let recon = LorentzMatrix::from_rotation(&q_left).matrix()
        * axis_boost(alpha, n).matrix()
        * LorentzMatrix::from_rotation(&r.transpose()).matrix();
    let residual = (recon - a.matrix()).norm();
    if residual > tol {
        return Err(Error::Reconstruction { residual, tol });
    }
    Ok(KakDecomposition {
        q_left,
        alpha,
        q_right: r,
        residual,
    })
}

/// Product-of-exponentials form `A = ∏ⱼ Exp(θⱼ Bⱼ) · Exp(U)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub blocks: RotationBlocks,
    pub u: Vector,
    pub residual: f64,
}

impl Factorization {
    /// Rebuilds the group element from the factors.
    pub fn reconstruct(&self) -> LorentzMatrix {
        let q = spectral::so_exp_blocks(&self.blocks);
        LorentzMatrix::from_rotation(&q).compose(&exp_h(&self.u))
    }

    /// The generator `(u, Σ θⱼ Bⱼ)`.
    pub fn generator(&self) -> LieElement {
        LieElement {
            u: self.u.clone(),
            b: self.blocks.generator(),
        }
    }
}

pub fn factorize(a: &LorentzMatrix, tol: f64) -> Result<Factorization> {
    let grade = a.classify(tol.max(MEMBERSHIP_TOL));
    if grade != Membership::So0 {
        return Err(Error::NotOrthochronous(grade.to_string()));
    }
    let d = boost_decompose(a, tol)?;
    let (_, blocks) = spectral::so_log(&d.q, tol)?;
    let u = boost_generator_from_velocity(&d.boost.v);
    let mut f = Factorization {
        blocks,
        u,
        residual: 0.0,
    };
    let residual = (f.reconstruct().matrix() - a.matrix()).norm();
    if residual > tol {
        return Err(Error::Reconstruction { residual, tol });
    }
    f.residual = residual;
    Ok(f)
}

/// `|u| + 2 Σⱼ (number of planes of Eⱼ)·θⱼ`, from the spectral blocks of the
/// `𝔰`-part.
pub fn block_l1_norm(x: &LieElement) -> Result<f64> {
    let blocks = spectral::skew_spectral(&x.b, spectral::SKEW_TOL)?;
    let rot: f64 = blocks
        .blocks
        .iter()
        .map(|blk| blk.planes.len() as f64 * blk.theta)
        .sum();
    Ok(x.u.norm() + 2.0 * rot)
}

/// Block-diagonal extension by the identity on the appended coordinates.
pub fn embed(a: &LorentzMatrix, m: usize) -> Result<LorentzMatrix> {
    let n = a.dim();
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "cannot embed dimension {n} into {m}"
        )));
    }
    let mut out = Mat::identity(m + 1, m + 1);
    out.view_mut((0, 0), (n + 1, n + 1)).copy_from(a.matrix());
    Ok(LorentzMatrix::from_trusted(out))
}

/// Extends a Lie algebra element by zeros, matching [`embed`].
pub fn embed_algebra(x: &LieElement, m: usize) -> Result<LieElement> {
    let n = x.dim();
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "cannot embed dimension {n} into {m}"
        )));
    }
    let mut u = Vector::zeros(m);
    u.rows_mut(0, n).copy_from(&x.u);
    let mut b = Mat::zeros(m, m);
    b.view_mut((0, 0), (n, n)).copy_from(&x.b);
    Ok(LieElement { u, b })
}
