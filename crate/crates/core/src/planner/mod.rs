//! Horizontal paths in `SO₀(n,1)` and in the snake configuration space.
//!
//! Group paths are left-invariant: a control `γ⁻¹γ̇` is horizontal when its
//! `𝔰`-part vanishes. Paths are stored as analytic legs so they can be
//! evaluated at any time; sampled views (grids, controls, checks) are derived.

mod config;
mod geodesic;
mod group;
mod path;

pub use config::{
    act, horizontal_lift, infinitesimal_action, steer_config, CircleHead, ConfigPath, ConstantHead,
    HeadCurve, LiftOptions, LineHead, SampledHead, SteerOptions,
};
pub use geodesic::{minimal_plane_length, solve_vertical, PlaneLeg};
pub use group::{boost_leg, commutator_probe, plan_group_path, plane_leg, rotation_leg, su11_geodesic};
pub use path::{GroupPath, Leg, LegKind, LegRecord, LengthLedger, PathCheck, DEFAULT_STEP};
