//! Exact-arithmetic toolkit for joints configurations: incidence
//! verification, vanishing certificates by exact rank computation, weight
//! balancing, shaved-polytope volumes, real binomial bounds, and
//! set-theoretic joint set systems with their multiplicity hypergraphs.
//!
//! All geometry runs over a prime field or over arbitrary-precision
//! rationals; nothing in the geometric core touches floating point. Floating
//! point (a software big-float with configurable mantissa) appears only in
//! the iterative weight solver and in real-valued bound evaluation, where the
//! targets are irrational.

pub mod algebra;
pub mod bounds;
pub mod combin;
pub mod config;
pub mod generators;
pub mod optimize;
pub mod real;
pub mod setsys;
pub mod vanishing;

pub use algebra::{CoordinateFrame, FieldDesc, Matrix, Mult, MultiPoly, Scalar};
pub use config::{IncidenceStats, JointsConfiguration};
pub use real::BigFloat;
pub use setsys::JointSetSystem;
