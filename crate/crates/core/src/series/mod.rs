//! Formal power series over exact rationals and over cell-constant grid
//! functions, integer partitions, and the geometric-mean form of `E_n`.

mod appendix;
mod partitions;
mod power;

pub use appendix::{
    en_equal, extract_en_via_series, geometric_mean_coeffs, moment, MomentVector, PrimesEncoding,
    EQUAL_DEGREE_CAP, EXTRACT_CAP, EXTRACT_CAP_OVERRIDE, PRIMES_CAP,
};
pub use partitions::{partitions_of, z_lambda, IntPartition, PARTITION_N_CAP};
pub use power::{series_exp, series_log, GridSeries, TruncatedSeries};
