//! Sampled snake configurations: piecewise continuous unit-vector fields on a
//! partition of `[0, L]`.
//!
//! Each segment carries its field at the nodes of an `M`-point Gauss–Legendre
//! rule. Integrals, tangent fields and the Gram operator all live on this one
//! grid, so the identity `∫ (w − ⟨w,u⟩u) = A_u w` holds to rounding.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::quadrature::{self, GaussLegendre};

pub const DEFAULT_NODES: usize = 16;
/// Largest admissible angle between adjacent nodes of a segment.
pub const DEFAULT_RESOLUTION: f64 = PI / 8.0;
/// Singularity threshold relative to `L`.
pub const SINGULAR_TOL_REL: f64 = 1e-8;
const UNIT_TOL: f64 = 1e-12;
const TANGENCY_TOL: f64 = 1e-10;
/// Largest partition handled by [`critical_radii`].
pub const MAX_CRITICAL_SEGMENTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SnakeConfig {
    partition: Vec<f64>,
    rule: GaussLegendre,
    /// `segments[i][k]` is `u` at the `k`-th node of segment `i`.
    segments: Vec<Vec<Vector>>,
}

fn validate_partition(partition: &[f64]) -> Result<()> {
    if partition.len() < 2 {
        return Err(Error::InvalidConfig("partition needs at least two points".into()));
    }
    if partition[0] != 0.0 {
        return Err(Error::InvalidConfig("partition must start at 0".into()));
    }
    if partition.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidConfig("partition has non-finite entries".into()));
    }
    if partition.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "partition must be strictly increasing".into(),
        ));
    }
    Ok(())
}

impl SnakeConfig {
    /// Validates unit nodes, a common node count and the resolution bound.
    pub fn new(partition: Vec<f64>, segments: Vec<Vec<Vector>>) -> Result<Self> {
        Self::with_resolution(partition, segments, DEFAULT_RESOLUTION)
    }

    pub fn with_resolution(partition: Vec<f64>, segments: Vec<Vec<Vector>>, resolution: f64) -> Result<Self> {
        validate_partition(&partition)?;
        if segments.len() != partition.len() - 1 {
            return Err(Error::InvalidConfig(format!(
                "{} segments for a partition with {} intervals",
                segments.len(),
                partition.len() - 1
            )));
        }
        let m = segments[0].len();
        if m == 0 {
            return Err(Error::InvalidConfig("segments need at least one node".into()));
        }
        let n = segments[0][0].len();
        if n < 2 {
            return Err(Error::InvalidConfig(
                "ambient dimension must be at least 2".into(),
            ));
        }
        for (i, seg) in segments.iter().enumerate() {
            if seg.len() != m {
                return Err(Error::InvalidConfig(format!(
                    "segment {i} has {} nodes, expected {m}",
                    seg.len()
                )));
            }
            for (k, u) in seg.iter().enumerate() {
                if u.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: u.len(),
                    });
                }
                if !((u.norm() - 1.0).abs() <= UNIT_TOL) {
                    return Err(Error::InvalidConfig(format!(
                        "node {k} of segment {i} is not a unit vector (|u| = {})",
                        u.norm()
                    )));
                }
            }
            for (k, pair) in seg.windows(2).enumerate() {
                let step = linalg::angle_between(&pair[0], &pair[1]);
                if step > resolution {
                    return Err(Error::InvalidConfig(format!(
                        "segment {i} jumps by {step:.3} rad between nodes {k} and {}",
                        k + 1
                    )));
                }
            }
        }
        Ok(Self {
            partition,
            rule: GaussLegendre::new(m),
            segments,
        })
    }

    /// Samples `f(segment, s)` at the nodes and normalizes.
    pub fn from_fn<F>(partition: Vec<f64>, m: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, f64) -> Vector,
    {
        validate_partition(&partition)?;
        let rule = GaussLegendre::new(m);
        let mut segments = Vec::with_capacity(partition.len() - 1);
        for i in 0..partition.len() - 1 {
            let (nodes, _) = rule.mapped(partition[i], partition[i + 1]);
            let seg = nodes
                .iter()
                .map(|&s| {
                    let v = f(i, s);
                    let norm = v.norm();
                    if !(norm > 0.0) || !norm.is_finite() {
                        return Err(Error::InvalidConfig(format!("zero direction at s = {s}")));
                    }
                    Ok(v / norm)
                })
                .collect::<Result<Vec<_>>>()?;
            segments.push(seg);
        }
        Self::new(partition, segments)
    }

    /// Same grid, every node mapped through `f` and renormalized. The
    /// resolution bound is not re-checked.
    pub fn map_nodes<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Vector) -> Result<Vector>,
    {
        let segments = self
            .segments
            .iter()
            .map(|seg| {
                seg.iter()
                    .map(|u| {
                        let v = f(u)?;
                        let norm = v.norm();
                        if !(norm > 0.0) || !norm.is_finite() {
                            return Err(Error::InvalidConfig("degenerate node image".into()));
                        }
                        Ok(v / norm)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            partition: self.partition.clone(),
            rule: self.rule.clone(),
            segments,
        })
    }

    pub fn length(&self) -> f64 {
        *self.partition.last().expect("validated partition")
    }

    pub fn partition(&self) -> &[f64] {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.segments[0][0].len()
    }

    pub fn nodes_per_segment(&self) -> usize {
        self.rule.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[Vec<Vector>] {
        &self.segments
    }

    /// `(s, weight, u(s))` for every node.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, &Vector)> + '_ {
        self.segments.iter().enumerate().flat_map(move |(i, seg)| {
            let (s, w) = self.rule.mapped(self.partition[i], self.partition[i + 1]);
            seg.iter().zip(s.into_iter().zip(w)).map(|(u, (s, w))| (s, w, u))
        })
    }

    /// Quadrature weights of all nodes, segment by segment.
    pub fn weights(&self) -> Vec<f64> {
        self.nodes().map(|(_, w, _)| w).collect()
    }

    /// All node vectors stacked into one vector.
    pub fn flat_nodes(&self) -> Vector {
        let n = self.dim();
        let mut out = Vector::zeros(self.segments.len() * self.rule.len() * n);
        for (k, u) in self.segments.iter().flatten().enumerate() {
            out.rows_mut(k * n, n).copy_from(u);
        }
        out
    }

    /// Same grid with nodes read from a stacked vector and renormalized.
    pub(crate) fn with_flat_nodes(&self, flat: &Vector) -> Result<Self> {
        let n = self.dim();
        let mut k = 0;
        self.map_nodes(|_| {
            let v = flat.rows(k * n, n).into_owned();
            k += 1;
            Ok(v)
        })
    }

    /// Node-wise sup of angular distances.
    pub fn distance(&self, other: &SnakeConfig) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .segments
            .iter()
            .flatten()
            .zip(other.segments.iter().flatten())
            .map(|(a, b)| linalg::angle_between(a, b))
            .fold(0.0, f64::max))
    }

    fn check_same_grid(&self, other: &SnakeConfig) -> Result<()> {
        if self.partition != other.partition
            || self.rule.len() != other.rule.len()
            || self.dim() != other.dim()
        {
            return Err(Error::InvalidConfig(
                "configurations live on different grids".into(),
            ));
        }
        Ok(())
    }

    /// Zero tangent field on this grid.
    pub fn zero_tangent(&self) -> ConfigTangent {
        let n = self.dim();
        ConfigTangent {
            segments: self
                .segments
                .iter()
                .map(|seg| vec![Vector::zeros(n); seg.len()])
                .collect(),
        }
    }

    /// `(∫ |v|²)^{1/2}`.
    pub fn l2_norm(&self, v: &ConfigTangent) -> f64 {
        self.nodes()
            .zip(v.segments.iter().flatten())
            .map(|((_, w, _), x)| w * x.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Builds a tangent field, checking its shape and tangency.
    pub fn tangent(&self, segments: Vec<Vec<Vector>>) -> Result<ConfigTangent> {
        if segments.len() != self.segments.len()
            || segments
                .iter()
                .zip(&self.segments)
                .any(|(a, b)| a.len() != b.len())
        {
            return Err(Error::InvalidConfig("tangent field has the wrong shape".into()));
        }
        for (v, u) in segments.iter().flatten().zip(self.segments.iter().flatten()) {
            if v.len() != u.len() {
                return Err(Error::DimensionMismatch {
                    expected: u.len(),
                    got: v.len(),
                });
            }
            let defect = v.dot(u).abs();
            if defect > TANGENCY_TOL * v.norm().max(1.0) {
                return Err(Error::InvalidConfig(format!("tangency defect {defect:.3e}")));
            }
        }
        Ok(ConfigTangent { segments })
    }

    /// Projects arbitrary node vectors onto the tangent spaces.
    pub fn project(&self, segments: Vec<Vec<Vector>>) -> Result<ConfigTangent> {
        let projected = segments
            .into_iter()
            .zip(&self.segments)
            .map(|(vs, us)| {
                vs.into_iter()
                    .zip(us)
                    .map(|(v, u)| linalg::project_tangent(&v, u))
                    .collect()
            })
            .collect();
        self.tangent(projected)
    }
}

/// A vector field along a configuration, on the same node grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigTangent {
    pub segments: Vec<Vec<Vector>>,
}

impl ConfigTangent {
    pub fn iter(&self) -> impl Iterator<Item = &Vector> {
        self.segments.iter().flatten()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().map(|v| v.amax()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &ConfigTangent) -> ConfigTangent {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &ConfigTangent) -> ConfigTangent {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> ConfigTangent {
        ConfigTangent {
            segments: self
                .segments
                .iter()
                .map(|seg| seg.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    fn zip_with(&self, other: &ConfigTangent, f: impl Fn(&Vector, &Vector) -> Vector) -> ConfigTangent {
        ConfigTangent {
            segments: self
                .segments
                .iter()
                .zip(&other.segments)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        }
    }
}

/// `∫₀ᴸ u`.
pub fn endpoint(u: &SnakeConfig) -> Vector {
    let mut acc = Vector::zeros(u.dim());
    for (_, w, x) in u.nodes() {
        acc.axpy(w, x, 1.0);
    }
    acc
}

/// `S(t) = ∫₀ᵗ u`. Partial segments use the degree-`M−1` interpolant of the
/// node values, renormalized, under a fresh `M`-point rule.
pub fn snake_curve(u: &SnakeConfig, t: f64) -> Result<Vector> {
    let length = u.length();
    if !(0.0..=length).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, {length}]")));
    }
    let partition = u.partition();
    let mut acc = Vector::zeros(u.dim());
    let bary = quadrature::barycentric_weights(&u.rule.nodes);
    for (i, seg) in u.segments.iter().enumerate() {
        let (a, b) = (partition[i], partition[i + 1]);
        if t >= b {
            let (_, w) = u.rule.mapped(a, b);
            for (x, wk) in seg.iter().zip(w) {
                acc.axpy(wk, x, 1.0);
            }
            continue;
        }
        if t > a {
            let (s, w) = u.rule.mapped(a, t);
            for (sk, wk) in s.into_iter().zip(w) {
                // Reference coordinate of sk in the full segment.
                let x = (2.0 * sk - a - b) / (b - a);
                let basis = quadrature::lagrange_basis(&u.rule.nodes, &bary, x);
                let mut val = Vector::zeros(u.dim());
                for (l, node) in basis.iter().zip(seg) {
                    val.axpy(*l, node, 1.0);
                }
                let norm = val.norm();
                if norm > 0.0 {
                    acc.axpy(wk / norm, &val, 1.0);
                }
            }
        }
        break;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramData {
    /// `Γ_u = ∫ u uᵀ`.
    pub gram: Mat,
    /// `A_u = L·Id − Γ_u`.
    pub a_op: Mat,
    /// Eigenvalues of `A_u`, ascending.
    pub spectrum: Vec<f64>,
    /// Matching orthonormal eigenvectors as columns.
    pub eigenvectors: Mat,
}

impl GramData {
    pub fn lambda_min(&self) -> f64 {
        self.spectrum[0]
    }

    /// `A_u⁺ y` with eigenvalues at or below `cutoff` treated as zero.
    pub fn solve(&self, y: &Vector, cutoff: f64) -> Vector {
        let coeffs = self.eigenvectors.transpose() * y;
        let mut scaled = Vector::zeros(coeffs.len());
        for (k, lam) in self.spectrum.iter().enumerate() {
            if *lam > cutoff {
                scaled[k] = coeffs[k] / lam;
            }
        }
        &self.eigenvectors * scaled
    }
}

pub fn gram_data(u: &SnakeConfig) -> GramData {
    let n = u.dim();
    let mut gram = Mat::zeros(n, n);
    for (_, w, x) in u.nodes() {
        gram.ger(w, x, x, 1.0);
    }
    let gram = linalg::symmetrize(&gram);
    let a_op = Mat::identity(n, n) * u.length() - &gram;
    let eig = SymmetricEigen::new(a_op.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let spectrum = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<Vector> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    GramData {
        gram,
        a_op,
        spectrum,
        eigenvectors: Mat::from_columns(&cols),
    }
}

/// Default singularity threshold `1e−8·L`.
pub fn default_singular_tol(u: &SnakeConfig) -> f64 {
    SINGULAR_TOL_REL * u.length()
}

/// `(λ_min(A_u) ≤ tol, λ_min(A_u))`.
pub fn is_singular(u: &SnakeConfig, tol: f64) -> (bool, f64) {
    let margin = gram_data(u).lambda_min();
    (margin <= tol, margin)
}

/// `s ↦ w − ⟨w, u(s)⟩ u(s)`.
pub fn horizontal_gradient(w: &Vector, u: &SnakeConfig) -> ConfigTangent {
    ConfigTangent {
        segments: u
            .segments
            .iter()
            .map(|seg| seg.iter().map(|x| linalg::project_tangent(w, x)).collect())
            .collect(),
    }
}

/// `Eᵢ = horizontal_gradient(eᵢ, ·)`.
pub fn e_field(i: usize, u: &SnakeConfig) -> Result<ConfigTangent> {
    let n = u.dim();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    Ok(horizontal_gradient(&linalg::basis(i, n), u))
}

/// `∫₀ᴸ v`.
pub fn differential_endpoint(u: &SnakeConfig, v: &ConfigTangent) -> Vector {
    let mut acc = Vector::zeros(u.dim());
    for ((_, w, _), x) in u.nodes().zip(v.iter()) {
        acc.axpy(w, x, 1.0);
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalFit {
    pub w: Vector,
    /// `‖v − horizontal_gradient(w, u)‖_{L²}`.
    pub residual: f64,
    /// Whether `A_u` was singular, in which case `w` is restricted to its range.
    pub singular: bool,
}

/// Least-squares horizontal direction: solves `A_u w = ∫ v`.
pub fn fit_horizontal(u: &SnakeConfig, v: &ConfigTangent) -> HorizontalFit {
    let gram = gram_data(u);
    let cutoff = default_singular_tol(u);
    let rhs = differential_endpoint(u, v);
    let w = gram.solve(&rhs, cutoff);
    let fitted = horizontal_gradient(&w, u);
    HorizontalFit {
        residual: u.l2_norm(&v.sub(&fitted)),
        singular: gram.lambda_min() <= cutoff,
        w,
    }
}

/// Radii `|Σ εᵢ (sᵢ₊₁ − sᵢ)|` of the endpoint spheres of straight configurations,
/// ascending and deduplicated.
pub fn critical_radii(partition: &[f64]) -> Result<Vec<f64>> {
    validate_partition(partition).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let lengths: Vec<f64> = partition.windows(2).map(|w| w[1] - w[0]).collect();
    let count = lengths.len();
    if count > MAX_CRITICAL_SEGMENTS {
        return Err(Error::TooManySegments(count));
    }
    let total = partition[count];
    let mut radii: Vec<f64> = (0u32..1 << count)
        .map(|mask| {
            lengths
                .iter()
                .enumerate()
                .map(|(i, l)| if mask >> i & 1 == 1 { -l } else { *l })
                .sum::<f64>()
                .abs()
        })
        .collect();
    radii.sort_by(f64::total_cmp);
    let tol = 1e-12 * total;
    radii.dedup_by(|a, b| (*a - *b).abs() <= tol);
    Ok(radii)
}
