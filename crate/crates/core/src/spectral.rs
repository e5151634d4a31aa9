//! Commuting-block decompositions of skew matrices and logarithms on `SO(n)`.
//!
//! A skew `B` splits `ℝⁿ` into invariant subspaces `Eⱼ ⊕ K`, each `Eⱼ` a sum of
//! planes on which `B` acts as `θⱼ` times a quarter turn. Planes are stored as
//! frames `(a, b)` with `B a = θ b` and `B b = −θ a`.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};

/// Default skewness tolerance.
pub const SKEW_TOL: f64 = 1e-9;
/// Angles closer than this are merged into one block.
pub const ANGLE_CLUSTER_TOL: f64 = 1e-8;
/// Below this `|K a|` a plane near angle `π` is completed inside its eigenspace.
const HALF_TURN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RotationBlock {
    pub theta: f64,
    /// Orthonormal frames `(a, b)` spanning the block.
    pub planes: Vec<(Vector, Vector)>,
}

impl RotationBlock {
    /// `Bⱼ = Σ (b aᵀ − a bᵀ)` over the planes of the block.
    pub fn generator(&self) -> Mat {
        let n = self.planes.first().map_or(0, |(a, _)| a.len());
        let mut g = Mat::zeros(n, n);
        for (a, b) in &self.planes {
            g += b * a.transpose() - a * b.transpose();
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationBlocks {
    pub n: usize,
    /// Strictly decreasing angles.
    pub blocks: Vec<RotationBlock>,
    pub kernel: Vec<Vector>,
}

impl RotationBlocks {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            blocks: Vec::new(),
            kernel: (0..n).map(|i| linalg::basis(i, n)).collect(),
        }
    }

    /// `Σⱼ θⱼ Bⱼ`.
    pub fn generator(&self) -> Mat {
        let mut g = Mat::zeros(self.n, self.n);
        for blk in &self.blocks {
            g += blk.generator() * blk.theta;
        }
        g
    }

    pub fn plane_count(&self) -> usize {
        self.blocks.iter().map(|b| b.planes.len()).sum()
    }

    /// Planes in block order, each with its angle.
    pub fn planes(&self) -> impl Iterator<Item = (f64, &Vector, &Vector)> {
        self.blocks
            .iter()
            .flat_map(|blk| blk.planes.iter().map(move |(a, b)| (blk.theta, a, b)))
    }

    /// `maxⱼ ‖Bⱼ³ + Bⱼ‖_F`.
    pub fn cubic_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|blk| {
                let g = blk.generator();
                (&g * &g * &g + &g).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max_{j≠k} ‖[Bⱼ, Bₖ]‖_F`.
    pub fn commutation_residual(&self) -> f64 {
        let gens: Vec<Mat> = self.blocks.iter().map(RotationBlock::generator).collect();
        let mut worst = 0.0_f64;
        for j in 0..gens.len() {
            for k in j + 1..gens.len() {
                worst = worst.max(linalg::commutator(&gens[j], &gens[k]).norm());
            }
        }
        worst
    }

    /// `‖VᵀV − Id‖_F` for `V` the frame vectors followed by the kernel basis.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut cols: Vec<Vector> = Vec::with_capacity(self.n);
        for (_, a, b) in self.planes() {
            cols.push(a.clone());
            cols.push(b.clone());
        }
        cols.extend(self.kernel.iter().cloned());
        if cols.len() != self.n {
            return f64::INFINITY;
        }
        linalg::orthogonality_residual(&Mat::from_columns(&cols))
    }
}

/// Flips `v` so its first non-negligible component is positive.
fn sign_normalize(v: Vector) -> Vector {
    let scale = v.amax();
    match v.iter().find(|x| x.abs() > 1e-12 * scale.max(1e-300)) {
        Some(x) if *x < 0.0 => -v,
        _ => v,
    }
}

/// Orthonormal basis of the column span of `w`, keeping `rank` directions.
fn orthonormal_span(w: &Mat, rank: usize) -> Mat {
    if rank == 0 {
        return Mat::zeros(w.nrows(), 0);
    }
    let svd = w.clone().svd(true, false);
    let u = svd.u.expect("left vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let cols: Vec<Vector> = order[..rank].iter().map(|&i| u.column(i).into_owned()).collect();
    Mat::from_columns(&cols)
}

/// Groups sorted eigenpairs into runs whose consecutive keys differ by at most
/// `tol`.
fn cluster(keys: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (idx, k) in keys.iter().enumerate() {
        match out.last_mut() {
            Some(run) if (keys[*run.last().unwrap()] - k).abs() <= tol => run.push(idx),
            _ => out.push(vec![idx]),
        }
    }
    out
}

/// Plane extracted from one eigenspace cluster.
struct Plane {
    theta: f64,
    a: Vector,
    b: Vector,
}

/// Splits the invariant subspace spanned by `w` into planes.
///
/// `partner(a)` returns the unnormalized image that defines `b`, and
/// `angle(a, image)` the rotation angle of the plane.
fn pair_cluster(
    mut w: Mat,
    partner: impl Fn(&Vector) -> Vector,
    angle: impl Fn(&Vector, &Vector) -> f64,
    degenerate_tol: f64,
) -> Result<Vec<Plane>> {
    let mut planes = Vec::new();
    while w.ncols() > 0 {
        if w.ncols() == 1 {
            return Err(Error::InvalidArgument(
                "odd-dimensional rotation eigenspace".into(),
            ));
        }
        let a = sign_normalize(w.column(0).normalize());
        let image = partner(&a);
        let theta = angle(&a, &image);
        let mut b = &w * (w.transpose() * &image);
        b -= &a * a.dot(&b);
        let b = if b.norm() > degenerate_tol {
            b.normalize()
        } else {
            // Degenerate plane: complete `a` by the next direction of the span.
            let mut c = w.column(1).into_owned();
            c -= &a * a.dot(&c);
            sign_normalize(c.normalize())
        };
        let rest = &w - &a * (a.transpose() * &w) - &b * (b.transpose() * &w);
        let rank = w.ncols() - 2;
        w = orthonormal_span(&rest, rank);
        planes.push(Plane { theta, a, b });
    }
    Ok(planes)
}

/// Orders planes into blocks of strictly decreasing angle.
fn assemble(n: usize, mut planes: Vec<Plane>, kernel: Vec<Vector>) -> RotationBlocks {
    planes.sort_by(|p, q| q.theta.total_cmp(&p.theta));
    let mut blocks: Vec<RotationBlock> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for p in planes {
        let last_theta = blocks
            .last()
            .map(|blk| blk.planes.len())
            .and_then(|count| sums.last().map(|s| s / count as f64));
        match last_theta {
            Some(t) if (t - p.theta).abs() <= ANGLE_CLUSTER_TOL * t.max(1.0) => {
                blocks.last_mut().unwrap().planes.push((p.a, p.b));
                *sums.last_mut().unwrap() += p.theta;
            }
            _ => {
                blocks.push(RotationBlock {
                    theta: p.theta,
                    planes: vec![(p.a, p.b)],
                });
                sums.push(p.theta);
            }
        }
    }
    for (blk, s) in blocks.iter_mut().zip(sums) {
        blk.theta = s / blk.planes.len() as f64;
        blk.planes.sort_by_key(|(a, _)| a.iamax());
    }
    RotationBlocks { n, blocks, kernel }
}

fn kernel_basis(w: &Mat) -> Vec<Vector> {
    let basis = orthonormal_span(w, w.ncols());
    let mut out: Vec<Vector> = basis
        .column_iter()
        .map(|c| sign_normalize(c.into_owned()))
        .collect();
    out.sort_by_key(|v| v.iamax());
    out
}

fn columns(vectors: &Mat, idx: &[usize]) -> Mat {
    let cols: Vec<Vector> = idx.iter().map(|&i| vectors.column(i).into_owned()).collect();
    if cols.is_empty() {
        Mat::zeros(vectors.nrows(), 0)
    } else {
        Mat::from_columns(&cols)
    }
}

/// Eigenpairs of a symmetric matrix sorted by decreasing eigenvalue.
fn sorted_eigen(s: Mat) -> (Vec<f64>, Mat) {
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    (values, columns(&eig.eigenvectors, &order))
}

/// Block decomposition `B = Σⱼ θⱼ Bⱼ` of a skew matrix.
pub fn skew_spectral(b: &Mat, tol: f64) -> Result<RotationBlocks> {
    if b.nrows() != b.ncols() {
        return Err(Error::NotSquare {
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    let n = b.nrows();
    let asym = (b + b.transpose()).norm();
    if asym > tol {
        return Err(Error::NotSkew(asym));
    }
    let b = linalg::antisymmetrize(b);
    let scale = b.norm().max(1.0);
    // Eigenvalues of BᵀB are the squared angles, each with even multiplicity.
    let (_, vectors) = sorted_eigen(b.transpose() * &b);
    let angles: Vec<f64> = vectors.column_iter().map(|v| (&b * v).norm()).collect();
    let zero = ANGLE_CLUSTER_TOL * scale;

    let mut planes = Vec::new();
    let mut kernel_idx = Vec::new();
    for run in cluster(&angles, ANGLE_CLUSTER_TOL * scale) {
        if run.iter().all(|&i| angles[i] <= zero) {
            kernel_idx.extend(run);
            continue;
        }
        let w = columns(&vectors, &run);
        planes.extend(pair_cluster(w, |a| &b * a, |_, image| image.norm(), 0.0)?);
    }
    let kernel = kernel_basis(&columns(&vectors, &kernel_idx));
    Ok(assemble(n, planes, kernel))
}

/// Logarithm on `SO(n)`: a skew `B` with `Exp(B) = Q` and angles in `(0, π]`.
pub fn so_log(q: &Mat, tol: f64) -> Result<(Mat, RotationBlocks)> {
    if q.nrows() != q.ncols() {
        return Err(Error::NotSquare {
            rows: q.nrows(),
            cols: q.ncols(),
        });
    }
    let n = q.nrows();
    let orth = linalg::orthogonality_residual(q);
    if orth > tol {
        return Err(Error::NotRotation(format!("orthogonality residual {orth:.3e}")));
    }
    let det = q.determinant();
    if det <= 0.0 {
        return Err(Error::NotRotation(format!("determinant {det:.6}")));
    }
    let k = linalg::antisymmetrize(q);
    // Eigenvalues of the symmetric part are cos θ; sort by increasing cosine so
    // the largest angles come first.
    let (_, vectors) = sorted_eigen(-linalg::symmetrize(q));
    // atan2 stays accurate at both ends, unlike acos of the eigenvalue.
    let angles: Vec<f64> = vectors
        .column_iter()
        .map(|v| (&k * v).norm().atan2(v.dot(&(q * v))))
        .collect();
    let keys: Vec<f64> = angles.iter().map(|t| -t).collect();

    let mut planes = Vec::new();
    let mut kernel_idx = Vec::new();
    for run in cluster(&keys, ANGLE_CLUSTER_TOL) {
        if run.iter().all(|&i| angles[i] <= ANGLE_CLUSTER_TOL) {
            kernel_idx.extend(run);
            continue;
        }
        let w = columns(&vectors, &run);
        planes.extend(pair_cluster(
            w,
            |a| &k * a,
            |a, image| image.norm().atan2(a.dot(&(q * a))),
            HALF_TURN_TOL,
        )?);
    }
    let kernel = kernel_basis(&columns(&vectors, &kernel_idx));
    let blocks = assemble(n, planes, kernel);
    Ok((blocks.generator(), blocks))
}

/// `∏ⱼ Exp(θⱼ Bⱼ)` as a sum of closed-form planar rotations.
pub fn so_exp_blocks(blocks: &RotationBlocks) -> Mat {
    let n = blocks.n;
    let mut q = Mat::identity(n, n);
    for (theta, a, b) in blocks.planes() {
        let (s, c) = theta.sin_cos();
        q +=
            (b * a.transpose() - a * b.transpose()) * s + (a * a.transpose() + b * b.transpose()) * (c - 1.0);
    }
    q
}
