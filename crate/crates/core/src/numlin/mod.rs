//! Dense numerical linear algebra: numerical rank, rank-revealing QR,
//! least squares and minimal-norm solves.

mod lsq;
mod rank;
mod rrqr;

pub use lsq::{least_squares, min_norm_solve, LsqFactor};
pub(crate) use rank::check_thresholds;
pub use rank::{
    has_full_numerical_rank, numerical_rank, numerical_rank_with, q_factor, singular_values,
    spectral_norm, GapPolicy, RankDecision,
};
pub use rrqr::{permute_columns, rrqr_partition, RrqrPartition, SWAP_THRESHOLD};
