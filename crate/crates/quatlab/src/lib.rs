//! quatlab: an exact symbolic + numeric verification engine for the
//! conformal analysis of quasi regular functions on biquaternions.
//!
//! The library provides
//! - exact biquaternion arithmetic over complex rationals ([`biquat`]),
//! - an exact Laurent-polynomial function algebra with the conformal
//!   differential operators ([`symfunc`]),
//! - SU(2) matrix coefficients and their recurrence identities ([`tcoeff`]),
//! - the K-type basis families of biharmonic and quasi anti regular
//!   functions ([`bases`]),
//! - Lie-algebra actions of gl(2,H_C), inversion and Cayley transforms
//!   ([`actions`]),
//! - invariant bilinear pairings and pseudounitary forms computed two
//!   independent ways ([`pairing`]),
//! - reproducing-kernel closed forms and truncated expansions ([`kernels`]),
//! - contour quadrature over S^3_R and U(2)_R, reproducing formulas and the
//!   intertwining operators J', Mx ([`contour`]),
//! - a truncated Clifford algebra / fermionic Fock module with beta-gamma
//!   fields ([`fock`]),
//! - named verification suites with machine-readable reports ([`suites`],
//!   [`report`]).
//!
//! All symbolic computations are exact (arbitrary-precision complex
//! rationals); quadrature uses f64. Every value is immutable after
//! construction and all operations are pure, so types can be shared freely
//! across threads.

pub mod actions;
pub mod bases;
pub mod biquat;
pub mod contour;
pub mod fock;
pub mod kernels;
pub mod pairing;
pub mod rational;
pub mod report;
pub mod suites;
pub mod symfunc;
pub mod tcoeff;

pub use biquat::{Biquaternion, Domain, NumBiquat};
pub use rational::CRational;
pub use tcoeff::TIndex;
pub use symfunc::{Shape, SymFunc};

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operand has a homogeneous component of degree -2")]
    DegreeMinusTwoComponent,
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("argument touches the logarithm branch cut")]
    BranchCut,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("function is not in the span of the requested family; residual: {0}")]
    NotInSpan(String),
    #[error("function is not biharmonic")]
    NotBiharmonic,
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("quadrature underresolved: need at least {needed} nodes per angle, got {got}")]
    QuadratureUnderresolved { needed: usize, got: usize },
    #[error("unknown generator index {0}")]
    UnknownIndex(usize),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("i/o error")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
