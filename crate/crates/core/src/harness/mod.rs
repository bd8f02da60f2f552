//! Seeded instance generation and verification of the block identities.

pub mod gen;
pub mod probe;
pub mod verify;

pub use gen::{derive_seed, gen_block, gen_block_detailed, gen_matrix, Dims, GenSpec, Generated, RankBounds, Strategy};
pub use probe::{invariance_probe, InvarianceProbe};
pub use verify::{
    find_pivot_counterexample, run_check, run_many, verify_all, Check, CheckOutcome, CheckStats, FixtureOutcome,
    VerifyConfig, VerifyReport,
};
