//! Lorentz group decompositions, the Möbius action of `SO₀(n,1)` on the unit
//! sphere, and horizontal path planning for articulated snakes.
//!
//! The crate is organised bottom-up:
//!
//! - [`lorentz`]: the Lorentz form, membership grades, boost decompositions,
//!   the `𝔥 ⊕ 𝔰` splitting of `𝔰𝔬(n,1)` and the global product-of-exponentials
//!   factorization.
//! - [`spectral`]: commuting rotation blocks of skew matrices and the
//!   special-orthogonal logarithm.
//! - [`mobius`]: stereographic projection, reflections, hyperbolic distance and
//!   the light-cone action on the sphere.
//! - [`snake`]: the sampled configuration space, endpoint map, horizontal
//!   distribution and singularity analysis.
//! - [`planner`]: horizontal paths in the group and in configuration space.
//!
//! All vectors and matrices are `nalgebra` dynamic types. Spatial indices are
//! zero-based: `e(0)` is the first basis vector of `ℝⁿ`, and in an embedded
//! `(n+1)×(n+1)` Lorentz matrix the time axis is row/column 0.

pub mod error;
pub mod integrate;
pub mod io;
pub mod linalg;
pub mod lorentz;
pub mod mobius;
pub mod planner;
pub mod quadrature;
pub mod random;
pub mod snake;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{Mat, Vector};
pub use lorentz::{
    BoostData, BoostDecomposition, Factorization, KakDecomposition, LieElement, LorentzMatrix, Membership,
    MinkowskiVector,
};
pub use mobius::{ExtendedPoint, SpherePoint, SphereTangent};
pub use planner::{ConfigPath, GroupPath, Leg, LengthLedger};
pub use snake::{ConfigTangent, GramData, SnakeConfig};
pub use spectral::{RotationBlock, RotationBlocks};
