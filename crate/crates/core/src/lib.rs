//! Exact computations with finite groupoids, spans and bisets: iso-comma
//! composition, coends, the realization of spans as bisets with all of its
//! coherence data, truncated linear hom categories, and G-set spans with
//! their Yoshida matrices.

pub mod biset;
pub mod coend;
pub mod composite;
pub mod error;
pub mod functor;
pub mod group;
pub mod groupoid;
pub mod gset;
pub mod iso_comma;
pub mod linear;
pub mod matrix;
pub mod pool;
pub mod realization;
pub mod report;
pub mod scalar;
pub mod serial;
pub mod span;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::{Scalar, ScalarMode};

/// Default exact scalars.
pub type Rational = num_rational::BigRational;
pub type Integer = num_bigint::BigInt;
pub type RatMatrix = matrix::Matrix<Rational>;
pub type RatHom = linear::LinearHom<Rational>;
/// Floating-point variants, for quick exploration only.
pub type F64Matrix = matrix::Matrix<f64>;
pub type F32Matrix = matrix::Matrix<f32>;
