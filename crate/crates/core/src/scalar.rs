//! Scalar rings for the linear parts of the engine.
//!
//! Everything linear (coends over modules, hom spaces of the linearized
//! categories, Yoshida matrices) is written against [`Scalar`], which only
//! asks for field operations plus a zero test. Exact types decide zero
//! exactly; floating point types use a tolerance, which makes them suitable
//! for quick experiments but not for the verification suites.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn from_i64(value: i64) -> Self;

    /// True when the value must be treated as zero by elimination.
    fn is_negligible(&self) -> bool;

    /// Whether zero tests are exact.
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for BigRational {
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for Rational64 {
    fn from_i64(value: i64) -> Self {
        Rational64::from_integer(value)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-9
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {
    fn from_i64(value: i64) -> Self {
        value as f32
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-4
    }

    fn is_exact() -> bool {
        false
    }
}

/// Scalar mode selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    #[default]
    Rational,
    Integer,
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarMode::Rational => write!(f, "rational"),
            ScalarMode::Integer => write!(f, "integer"),
        }
    }
}

impl std::str::FromStr for ScalarMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(ScalarMode::Rational),
            "integer" => Ok(ScalarMode::Integer),
            other => Err(format!("unknown scalar mode '{other}'")),
        }
    }
}
