//! Scalar backends.
//!
//! Every matrix in the crate is generic over a [`Scalar`]. Two backends are
//! provided: `f64`, where rank and equality decisions go through
//! [`Tolerances`](crate::Tolerances), and [`Rational`], an arbitrary
//! precision fraction type on which every decision is exact.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::pinv;
use crate::tolerance::Tolerances;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Float,
    Rational,
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Float => f.write_str("float"),
            Backend::Rational => f.write_str("rational"),
        }
    }
}

pub trait Scalar:
    Num + Signed + Clone + Debug + Display + PartialOrd + Send + Sync + 'static
{
    const BACKEND: Backend;
    /// True when arithmetic and zero tests are exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn is_finite_value(&self) -> bool {
        true
    }

    /// Draw one generator entry: a standard normal for `f64`, a small
    /// integer in `[-5, 5]` for rationals.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn pinv(m: &Matrix<Self>, tol: &Tolerances) -> Matrix<Self>;

    fn rank(m: &Matrix<Self>, tol: &Tolerances) -> usize;
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn pinv(m: &Matrix<Self>, tol: &Tolerances) -> Matrix<Self> {
        pinv::svd_pinv(m, tol)
    }

    fn rank(m: &Matrix<Self>, tol: &Tolerances) -> usize {
        pinv::svd_rank(m, tol)
    }
}

/// Largest magnitude of an integer entry drawn by the rational generator.
pub const RATIONAL_SAMPLE_BOUND: i64 = 5;

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_i64(rng.random_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND))
    }

    fn pinv(m: &Matrix<Self>, _tol: &Tolerances) -> Matrix<Self> {
        pinv::full_rank_pinv(m)
    }

    fn rank(m: &Matrix<Self>, _tol: &Tolerances) -> usize {
        m.rref().1.len()
    }
}

/// `p / q` as a rational. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}
