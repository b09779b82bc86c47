//! `E_n` and its relatives, computed exactly from subset moments.
//!
//! Every backend is generic over an [`ExpectationOracle`], which supplies
//! `E(∏_{i∈B} f^i)` for nonempty index sets `B`. Function indices are
//! 0-based here and sets are `u32` bitmasks.

mod backends;
mod oracle;
mod perm;
mod setpart;

pub use backends::{
    e_sigma, en, en_constant_closed_form, en_naive, en_partition, en_recursive, en_with_unit,
    kappa3, partial_cycle_sum, Backend, EnResult, NAIVE_CAP, PARTITION_CAP, RECURSIVE_CAP,
};
pub use oracle::{
    ExpectationOracle, GridFunctionOracle, IndicatorOracle, Mask, MomentTable, RectangleOracle,
    Restricted, StaircaseOracle, WithUnit, MAX_ARITY,
};
pub use perm::{permutations_by_cycles, CycleDecomposition};
pub use setpart::{bell_number, set_partitions, SetPartition};
