//! JSON payloads and CSV export.
//!
//! Payloads are plain serde structs; `into_*` conversions validate against the
//! domain constructors so that a malformed file is rejected before any
//! computation starts. Floats in JSON use serde's shortest round-trip form;
//! CSV floats use 17 significant digits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::lorentz::{LieElement, LorentzMatrix};
use crate::planner::{ConfigPath, GroupPath, SampledHead};
use crate::snake::{self, SnakeConfig};
use crate::spectral::{RotationBlock, RotationBlocks};

/// Tolerance for the skew check on loaded Lie algebra elements.
pub const SKEW_LOAD_TOL: f64 = 1e-12;

fn to_rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], size: usize) -> Result<Mat> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(Error::InvalidArgument(format!("expected a {size}x{size} matrix")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    Ok(Mat::from_fn(size, size, |i, j| rows[i][j]))
}

fn to_vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn from_vec(v: &[f64], n: usize) -> Result<Vector> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("vector has non-finite entries".into()));
    }
    Ok(Vector::from_column_slice(v))
}

/// `(dim+1)×(dim+1)` Lorentz matrix; `dim` is the spatial dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPayload {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixPayload {
    pub fn from_matrix(m: &Mat) -> Self {
        Self {
            dim: m.nrows().saturating_sub(1),
            rows: to_rows(m),
        }
    }

    pub fn to_matrix(&self) -> Result<Mat> {
        from_rows(&self.rows, self.dim + 1)
    }

    /// Checks membership in `O(dim, 1)` at `tol`.
    pub fn to_lorentz(&self, tol: f64) -> Result<LorentzMatrix> {
        LorentzMatrix::new(self.to_matrix()?, tol)
    }
}

/// `(u, B)` with `B` given in full and checked for skewness on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieElementPayload {
    pub u: Vec<f64>,
    pub skew: Vec<Vec<f64>>,
}

impl LieElementPayload {
    pub fn from_element(x: &LieElement) -> Self {
        Self {
            u: to_vec(&x.u),
            skew: to_rows(&x.b),
        }
    }

    pub fn to_element(&self) -> Result<LieElement> {
        let n = self.u.len();
        let b = from_rows(&self.skew, n)?;
        let defect = (&b + b.transpose()).abs().max();
        if defect > SKEW_LOAD_TOL {
            return Err(Error::NotSkew(defect));
        }
        LieElement::new(from_vec(&self.u, n)?, &b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPayload {
    pub theta: f64,
    /// Orthonormal pairs `[a, b]` rotated by `theta` from `a` towards `b`.
    pub planes: Vec<[Vec<f64>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationBlocksPayload {
    pub dim: usize,
    pub blocks: Vec<BlockPayload>,
    pub kernel: Vec<Vec<f64>>,
}

impl RotationBlocksPayload {
    pub fn from_blocks(r: &RotationBlocks) -> Self {
        Self {
            dim: r.n,
            blocks: r
                .blocks
                .iter()
                .map(|b| BlockPayload {
                    theta: b.theta,
                    planes: b.planes.iter().map(|(a, c)| [to_vec(a), to_vec(c)]).collect(),
                })
                .collect(),
            kernel: r.kernel.iter().map(to_vec).collect(),
        }
    }

    pub fn to_blocks(&self) -> Result<RotationBlocks> {
        let n = self.dim;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let planes = b
                    .planes
                    .iter()
                    .map(|[a, c]| Ok((from_vec(a, n)?, from_vec(c, n)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RotationBlock {
                    theta: b.theta,
                    planes,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let kernel = self
            .kernel
            .iter()
            .map(|k| from_vec(k, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(RotationBlocks { n, blocks, kernel })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPayload {
    pub nodes: Vec<Vec<f64>>,
}

/// Nodes are the Gauss–Legendre samples of each segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnakeConfigPayload {
    #[serde(rename = "L")]
    pub length: f64,
    pub partition: Vec<f64>,
    pub segments: Vec<SegmentPayload>,
}

impl SnakeConfigPayload {
    pub fn from_config(u: &SnakeConfig) -> Self {
        Self {
            length: u.length(),
            partition: u.partition().to_vec(),
            segments: u
                .segments()
                .iter()
                .map(|seg| SegmentPayload {
                    nodes: seg.iter().map(to_vec).collect(),
                })
                .collect(),
        }
    }

    pub fn to_config(&self) -> Result<SnakeConfig> {
        let last = self.partition.last().copied().unwrap_or(f64::NAN);
        if (last - self.length).abs() > 1e-12 * self.length.abs().max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "L = {} does not match the partition end {last}",
                self.length
            )));
        }
        let n = self
            .segments
            .first()
            .and_then(|s| s.nodes.first())
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidConfig("config has no nodes".into()))?;
        let segments = self
            .segments
            .iter()
            .map(|s| s.nodes.iter().map(|x| from_vec(x, n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        SnakeConfig::new(self.partition.clone(), segments)
    }
}

/// Sampled head curve, interpolated by cubic Hermite splines on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadPayload {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl HeadPayload {
    pub fn from_head(h: &SampledHead) -> Self {
        Self {
            times: h.times().to_vec(),
            points: h.points().iter().map(to_vec).collect(),
        }
    }

    pub fn to_head(&self) -> Result<SampledHead> {
        let n = self
            .points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("head curve has no samples".into()))?;
        let points = self
            .points
            .iter()
            .map(|p| from_vec(p, n))
            .collect::<Result<Vec<_>>>()?;
        SampledHead::new(self.times.clone(), points)
    }
}

/// Sampled plan: horizontal controls on the time grid and the path length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanPayload {
    pub times: Vec<f64>,
    pub controls: Vec<Vec<f64>>,
    pub length: f64,
}

impl PlanPayload {
    pub fn from_group_path(path: &GroupPath) -> Self {
        let times = path.times();
        let controls = times.iter().map(|t| to_vec(&path.control(*t).u)).collect();
        Self {
            times,
            controls,
            length: path.ledger().total,
        }
    }

    /// Length is the trapezoid value of `∫|w|` over the grid.
    pub fn from_config_path(path: &ConfigPath) -> Self {
        let length = path
            .times
            .windows(2)
            .zip(path.controls.windows(2))
            .map(|(t, w)| 0.5 * (t[1] - t[0]) * (w[0].norm() + w[1].norm()))
            .sum();
        Self {
            times: path.times.clone(),
            controls: path.controls.iter().map(to_vec).collect(),
            length,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// Fixed 17-significant-digit form, e.g. `-1.2500000000000000e-1`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header and rows of floats.
pub fn write_csv<W: Write>(out: &mut W, header: &[String], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let fields: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

fn numbered(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |k| format!("{prefix}{k}"))
}

/// Rows `(t, x₁, …, xₙ)` of any sampled trajectory.
pub fn trajectory_csv<W: Write>(
    out: &mut W,
    coord: &str,
    times: &[f64],
    points: &[Vector],
) -> std::io::Result<()> {
    let n = points.first().map_or(0, |p| p.len());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(numbered(coord, n))
        .collect();
    let rows: Vec<Vec<f64>> = times
        .iter()
        .zip(points)
        .map(|(t, p)| std::iter::once(*t).chain(p.iter().copied()).collect())
        .collect();
    write_csv(out, &header, &rows)
}

/// Snake polyline `(t, x₁..xₙ)` sampled at `samples + 1` arc-length points.
pub fn snake_curve_csv<W: Write>(out: &mut W, u: &SnakeConfig, samples: usize) -> Result<()> {
    let samples = samples.max(1);
    let times: Vec<f64> = (0..=samples)
        .map(|k| u.length() * k as f64 / samples as f64)
        .collect();
    let points = times
        .iter()
        .map(|t| snake::snake_curve(u, *t))
        .collect::<Result<Vec<_>>>()?;
    trajectory_csv(out, "x", &times, &points).map_err(io_error)
}

/// Per-time snake polylines of a configuration path: rows
/// `(t, s, x₁..xₙ)` with `samples + 1` arc-length points per time.
pub fn config_path_csv<W: Write>(out: &mut W, path: &ConfigPath, samples: usize) -> Result<()> {
    let samples = samples.max(1);
    let n = path.configs.first().map_or(0, |c| c.dim());
    let header: Vec<String> = ["t".to_string(), "s".to_string()]
        .into_iter()
        .chain(numbered("x", n))
        .collect();
    let mut rows = Vec::with_capacity(path.times.len() * (samples + 1));
    for (t, u) in path.times.iter().zip(&path.configs) {
        for k in 0..=samples {
            let s = u.length() * k as f64 / samples as f64;
            let x = snake::snake_curve(u, s)?;
            rows.push([*t, s].into_iter().chain(x.iter().copied()).collect());
        }
    }
    write_csv(out, &header, &rows).map_err(io_error)
}

fn io_error(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}
