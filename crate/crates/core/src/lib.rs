//! Exact computations with inverse systems of orthant cones: weight cones
//! of arc systems, their limits, and the odd-matrix realization of
//! column-stochastic systems by nested arc systems.
//!
//! Matrix code is generic over [`Scalar`]; everything that makes a decision
//! runs on [`Rational`].

// Error variants carry exact rationals as witnesses.
#![allow(clippy::result_large_err)]

pub mod arcs;
pub mod builtins;
pub mod chord;
pub mod limit;
pub mod matrix;
pub mod realization;
pub mod scalar;
pub mod system;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use arcs::{realize_arcs_odd, realize_arcs_triangular, ArcRealization, ArcSystemStage};
pub use builtins::{builtin, BuiltinExample, BuiltinFamily};
pub use chord::ChordDiagram;
pub use limit::{Certificate, Outcome, ProjectiveGauge, Query};
pub use matrix::{Matrix, MatrixError};
pub use realization::{odd_approximate, realize_pipeline, OddApproximation, PipelineOutput, StochasticMatrix};
pub use scalar::{format_rational, parse_rational, Scalar};
pub use system::{ConeError, InverseConeSystem, StageRule, SystemSpec, Thread};

pub type Integer = BigInt;
pub type Rational = BigRational;
pub type RationalMatrix = Matrix<Rational>;
pub type FloatMatrix = Matrix<f64>;
