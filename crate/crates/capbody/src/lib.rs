//! Cap bodies of the unit ball and their illumination.
//!
//! A cap body is the convex hull of the unit ball and finitely many outside
//! vertices, subject to the condition that the segment between any two
//! vertices meets the ball. Each vertex is dual to a closed spherical cap on
//! the unit sphere, and the caps of a valid body form a packing. Illuminating
//! the body by a set of directions is equivalent to separating every cap by
//! an open hemisphere drawn from the (negated) directions, with the
//! hemispheres jointly covering the sphere.
//!
//! The crate provides:
//!
//! * [`sphere`] — unit vectors, rotations, reflections and the tolerance
//!   policy consulted by every predicate;
//! * [`cap`] — caps, cap bodies, packings, symmetry checks and the
//!   k-tangent classification machinery;
//! * [`illumination`] — separation predicates, the hemisphere cover test and
//!   the certificate checker;
//! * [`solver3d`] — six illumination directions for centrally symmetric
//!   packings on S²;
//! * [`solver4d`] — eight illumination directions for unconditionally
//!   symmetric packings on S³, plus stranded-point search;
//! * [`oracle`] — paper-independent ground truth: direct ray tests on the
//!   body geometry and Monte Carlo verification of certificates;
//! * [`configs`] — canned reference configurations and seeded random
//!   packing generators.

pub mod cap;
pub mod configs;
pub mod illumination;
mod lp;
pub mod oracle;
pub mod sampling;
pub mod solver3d;
pub mod solver4d;
pub mod sphere;

pub use cap::{Cap, CapBody, CapError, KTangentProfile, Packing, PackingCheck};
pub use illumination::{CoverResult, DirectionSet, IlluminationCertificate, VerifyFailure};
pub use sphere::{Rotation, TolerancePolicy, UnitVector, Verdict};

use thiserror::Error;

/// Errors shared by the constructive direction solvers.
#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("packing is not centrally symmetric")]
    NotCentrallySymmetric,
    #[error("packing is not unconditionally symmetric")]
    NotUnconditional,
    #[error("invalid packing: caps {i} and {j} overlap by {overlap:.3e}")]
    InvalidPacking { i: usize, j: usize, overlap: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unrecognized cap configuration: {0}")]
    UnrecognizedConfiguration(String),
    /// The construction is guaranteed to succeed on valid input; reaching
    /// this error indicates corrupt input or a tolerance failure and is
    /// never silently ignored.
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
}
