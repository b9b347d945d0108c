//! Non-intersecting lattice paths with arbitrary starting points: exact partition and
//! one-point functions, and the boundary-shape to arctic-curve transform.

// comparisons are negated on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arctic;
pub mod asymptotics;
pub mod boundary;
pub mod exactcomb;
pub mod onepoint;
pub mod quadrature;
pub mod sampler;
mod scalar;
pub mod selftest;

pub use scalar::Real;

pub type Shape64 = boundary::BoundaryShape<f64>;
pub type Shape32 = boundary::BoundaryShape<f32>;

pub type IntMatrix = exactcomb::Matrix<num_bigint::BigInt>;
pub type RatMatrix = exactcomb::Matrix<num_rational::BigRational>;
pub type ExactMatrix = RatMatrix;

pub type Resolvent64 = arctic::Resolvent<f64>;
pub type Resolvent32 = arctic::Resolvent<f32>;
