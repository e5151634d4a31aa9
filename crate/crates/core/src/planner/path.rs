use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::lorentz::{exp_h, LieElement, LorentzMatrix};

use super::geodesic::PlaneLeg;

/// Default sampling step of path grids.
pub const DEFAULT_STEP: f64 = 1e-2;
/// Step of the central differences used to extract controls.
const FD_STEP: f64 = 1e-5;

/// One analytic piece of a horizontal path, parametrized by arc length.
#[derive(Debug, Clone, PartialEq)]
pub enum Leg {
    /// `τ ↦ exp_h(τ·dir)` with `dir` a unit vector.
    Boost { dir: Vector, length: f64 },
    /// Normal geodesic ending at a planar rotation.
    Plane(PlaneLeg),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LegKind {
    Boost,
    Rotation,
}

impl Leg {
    pub fn dim(&self) -> usize {
        match self {
            Leg::Boost { dir, .. } => dir.len(),
            Leg::Plane(p) => p.dim(),
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            Leg::Boost { length, .. } => *length,
            Leg::Plane(p) => p.duration,
        }
    }

    pub fn kind(&self) -> LegKind {
        match self {
            Leg::Boost { .. } => LegKind::Boost,
            Leg::Plane(_) => LegKind::Rotation,
        }
    }

    /// Leg-local position; defined for every real `τ`.
    pub fn at(&self, tau: f64) -> Mat {
        match self {
            Leg::Boost { dir, .. } => exp_h(&(dir * tau)).into_matrix(),
            Leg::Plane(p) => p.at(tau),
        }
    }

    pub fn endpoint(&self) -> Mat {
        self.at(self.duration())
    }

    /// Analytic control `γ⁻¹γ̇`.
    pub fn control(&self, tau: f64) -> LieElement {
        match self {
            Leg::Boost { dir, .. } => LieElement::horizontal(dir.clone()),
            Leg::Plane(p) => p.control(tau),
        }
    }

    /// Control recovered from the leg-local position by central differences.
    pub fn fd_control(&self, tau: f64) -> LieElement {
        let h = FD_STEP;
        let inv = crate::lorentz::pseudo_adjoint(&self.at(tau)).expect("square");
        let deriv = (self.at(tau + h) - self.at(tau - h)) / (2.0 * h);
        LieElement::from_matrix(&(inv * deriv)).expect("square")
    }

    /// The length this leg stands for in the nominal tally: `|θ|` for a
    /// rotation, the arc length for a boost.
    pub fn nominal_length(&self) -> f64 {
        match self {
            Leg::Boost { length, .. } => *length,
            Leg::Plane(p) => p.theta.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegRecord {
    pub kind: LegKind,
    /// Arc length of the leg.
    pub length: f64,
    /// `|θ|` for rotation legs, equal to `length` for boosts.
    pub nominal: f64,
}

/// Per-leg lengths and the two tallies of the rotation part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthLedger {
    pub legs: Vec<LegRecord>,
    /// Σ arc length of rotation legs.
    pub rotation_length: f64,
    /// Σ |θ| over rotation legs.
    pub rotation_nominal: f64,
    pub boost_length: f64,
    pub total: f64,
}

impl LengthLedger {
    fn from_legs(legs: &[Leg]) -> Self {
        let records: Vec<LegRecord> = legs
            .iter()
            .map(|leg| LegRecord {
                kind: leg.kind(),
                length: leg.duration(),
                nominal: leg.nominal_length(),
            })
            .collect();
        let sum = |kind: LegKind, f: fn(&LegRecord) -> f64| {
            records.iter().filter(|r| r.kind == kind).map(f).sum::<f64>()
        };
        let rotation_length = sum(LegKind::Rotation, |r| r.length);
        let rotation_nominal = sum(LegKind::Rotation, |r| r.nominal);
        let boost_length = sum(LegKind::Boost, |r| r.length);
        Self {
            legs: records,
            rotation_length,
            rotation_nominal,
            boost_length,
            total: rotation_length + boost_length,
        }
    }
}

/// Sampled verification of a [`GroupPath`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCheck {
    /// Largest `𝔰`-norm of a finite-difference control.
    pub max_vertical: f64,
    /// Trapezoid value of `∫ |γ⁻¹γ̇|` from finite-difference controls.
    pub trapezoid_length: f64,
    /// `|trapezoid_length − ledger total|`.
    pub ledger_gap: f64,
    /// `max_k ‖γ(t_{k+1}) − γ(t_k) Exp(Δt · control(t_{k+½}))‖_F`.
    pub max_step_defect: f64,
}

/// Concatenation of legs: `γ(t) = γ(start of leg) · leg(t − start)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPath {
    n: usize,
    legs: Vec<Leg>,
    starts: Vec<f64>,
    prefixes: Vec<Mat>,
    end: Mat,
    step: f64,
}

impl GroupPath {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            legs: Vec::new(),
            starts: Vec::new(),
            prefixes: Vec::new(),
            end: Mat::identity(n + 1, n + 1),
            step: DEFAULT_STEP,
        }
    }

    pub fn from_legs(n: usize, legs: Vec<Leg>) -> Result<Self> {
        let mut path = Self::new(n);
        for leg in legs {
            path.push(leg)?;
        }
        Ok(path)
    }

    /// Sampling step used by [`GroupPath::times`].
    pub fn with_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "step must be positive, got {step}"
            )));
        }
        self.step = step;
        Ok(self)
    }

    pub fn push(&mut self, leg: Leg) -> Result<()> {
        if leg.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: leg.dim(),
            });
        }
        self.starts.push(self.duration());
        self.prefixes.push(self.end.clone());
        self.end = &self.end * leg.endpoint();
        self.legs.push(leg);
        Ok(())
    }

    /// Right concatenation: `other` is traversed after `self`.
    pub fn concat(mut self, other: GroupPath) -> Result<Self> {
        for leg in other.legs {
            self.push(leg)?;
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn duration(&self) -> f64 {
        match (self.starts.last(), self.legs.last()) {
            (Some(s), Some(leg)) => s + leg.duration(),
            _ => 0.0,
        }
    }

    pub fn endpoint(&self) -> LorentzMatrix {
        LorentzMatrix::from_trusted(self.end.clone())
    }

    pub fn ledger(&self) -> LengthLedger {
        LengthLedger::from_legs(&self.legs)
    }

    /// Index of the leg containing `t` and the leg-local time.
    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if self.legs.is_empty() {
            return None;
        }
        let idx = match self.starts.partition_point(|s| *s <= t) {
            0 => 0,
            k => k - 1,
        };
        Some((idx, t - self.starts[idx]))
    }

    /// Leg containing `t`, its prefix `γ(start)` and the leg-local time.
    pub fn leg_at(&self, t: f64) -> Option<(&Leg, &Mat, f64)> {
        self.locate(t.clamp(0.0, self.duration()))
            .map(|(idx, tau)| (&self.legs[idx], &self.prefixes[idx], tau))
    }

    /// `γ(t)`, clamped to `[0, T]`.
    pub fn at(&self, t: f64) -> LorentzMatrix {
        let t = t.clamp(0.0, self.duration());
        match self.locate(t) {
            None => LorentzMatrix::identity(self.n),
            Some((idx, tau)) => LorentzMatrix::from_trusted(&self.prefixes[idx] * self.legs[idx].at(tau)),
        }
    }

    /// Analytic control at `t`; at a junction the control of the later leg.
    pub fn control(&self, t: f64) -> LieElement {
        match self.locate(t.clamp(0.0, self.duration())) {
            None => LieElement::zero(self.n),
            Some((idx, tau)) => self.legs[idx].control(tau),
        }
    }

    /// Control from central differences of the leg-local position.
    pub fn fd_control(&self, t: f64) -> LieElement {
        match self.locate(t.clamp(0.0, self.duration())) {
            None => LieElement::zero(self.n),
            Some((idx, tau)) => self.legs[idx].fd_control(tau),
        }
    }

    /// Sampling grid: every leg is split into equal steps of at most `step`.
    pub fn times(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        for (start, leg) in self.starts.iter().zip(&self.legs) {
            let d = leg.duration();
            let pieces = ((d / self.step).ceil() as usize).max(1);
            for k in 1..=pieces {
                out.push(start + d * k as f64 / pieces as f64);
            }
        }
        out
    }

    pub fn matrices(&self) -> Vec<LorentzMatrix> {
        self.times().into_iter().map(|t| self.at(t)).collect()
    }

    pub fn controls(&self) -> Vec<LieElement> {
        self.times().into_iter().map(|t| self.control(t)).collect()
    }

    /// Samples controls and steps on the grid and compares with the ledger.
    pub fn check(&self) -> PathCheck {
        let mut max_vertical = 0.0_f64;
        let mut trapezoid = 0.0;
        let mut max_step_defect = 0.0_f64;
        for (idx, leg) in self.legs.iter().enumerate() {
            let d = leg.duration();
            let pieces = ((d / self.step).ceil() as usize).max(1);
            let h = d / pieces as f64;
            let mut prev = leg.fd_control(0.0);
            max_vertical = max_vertical.max(prev.s_norm());
            for k in 1..=pieces {
                let tau = h * k as f64;
                let cur = leg.fd_control(tau);
                max_vertical = max_vertical.max(cur.s_norm());
                trapezoid += 0.5 * h * (prev.u.norm() + cur.u.norm());
                prev = cur;
                let mid = leg.control(tau - 0.5 * h).scale(h).exp();
                let predicted = &self.prefixes[idx] * leg.at(tau - h) * mid.matrix();
                let actual = &self.prefixes[idx] * leg.at(tau);
                max_step_defect = max_step_defect.max((predicted - actual).norm());
            }
        }
        PathCheck {
            max_vertical,
            trapezoid_length: trapezoid,
            ledger_gap: (trapezoid - self.ledger().total).abs(),
            max_step_defect,
        }
    }
}
