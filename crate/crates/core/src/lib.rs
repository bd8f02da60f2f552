//! Moore-Penrose pseudoinverses of 2x2 block matrices.
//!
//! Every routine is generic over [`Scalar`]: `f64` for floating-point work
//! and [`Rational`] for exact arithmetic. The crate provides
//!
//! - `pinv`, rank and Penrose certificates for plain matrices,
//! - range-inclusion tests for the block conditions,
//! - pseudo-Schur complements, the principal pseudo-pivot transform and its
//!   complementary counterpart,
//! - block pseudoinverse formulas with their hypothesis checks,
//! - a seeded generator and a verification harness.

pub mod block;
pub mod blockinv;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod matrix;
pub mod pinv;
pub mod range;
pub mod scalar;
pub mod tolerance;

pub use block::{
    complementary_pseudo_schur, cpppt, exchange_backward, exchange_backward_complementary, exchange_forward,
    exchange_forward_complementary, pppt, pseudo_schur, BlockMatrix, Blocks, Exchange, Pivot, PseudoSchurResult,
};
pub use blockinv::{
    block_pinv, block_pinv_mixed, block_pinv_via_f, block_pinv_via_g, pppt_pinv_vs_cpppt, quotient_identities,
    via_f_products, BlockPinvResult, Formula, PivotComparison, QuotientResiduals, ViaFProducts,
};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use pinv::{certificate, one_inverse_sample, pinv, pinv_with, rank, rank_with, singular_values, PinvCertificate};
pub use range::{condition_report, range_included, range_included_by_rank, Inclusion, InclusionReport, Verdict};
pub use scalar::{ratio, Backend, Rational, Scalar};
pub use tolerance::Tolerances;
