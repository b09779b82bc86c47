use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{factorial, int, is_in_unit_interval, serde_pq, Rational};

use super::oracle::{ExpectationOracle, Mask, MomentTable, Restricted, WithUnit};
use super::perm::{next_permutation, CycleDecomposition};
use super::setpart::{check_partition_n, GrowthStrings};

/// Largest `n` for the literal sum over `S_n` (9! = 362880 terms).
pub const NAIVE_CAP: usize = 9;
/// Largest `n` for the set-partition sum (Bell(14) = 190899322 terms).
pub const PARTITION_CAP: usize = 14;
/// Largest `n` for the block-merging recursion (about `e·n!` nodes).
pub const RECURSIVE_CAP: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Naive,
    Partition,
    Recursive,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Naive, Backend::Partition, Backend::Recursive];

    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Naive => "naive",
            Backend::Partition => "partition",
            Backend::Recursive => "recursive",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Backend::Naive),
            "partition" => Ok(Backend::Partition),
            "recursive" => Ok(Backend::Recursive),
            other => Err(Error::InvalidArgument(format!("unknown backend {other:?}"))),
        }
    }
}

/// An exact `E_n` value with the backend that produced it and the number of
/// terms (permutations, set partitions, or recursion nodes) it visited.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnResult {
    #[serde(with = "serde_pq")]
    pub value: Rational,
    pub backend: Backend,
    pub terms: u64,
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded { what, n, cap });
    }
    Ok(())
}

/// `Σ_c (-1)^{c-1} sums[c] / den^c`.
fn combine_by_block_count(sums: &[BigInt], den: &BigInt) -> Rational {
    let mut value = Rational::zero();
    let mut den_pow = BigInt::one();
    for (c, s) in sums.iter().enumerate().skip(1) {
        den_pow *= den;
        let term = Rational::new(s.clone(), den_pow.clone());
        if c % 2 == 1 {
            value += term;
        } else {
            value -= term;
        }
    }
    value
}

fn add_into(mut a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// `E_σ = ∏_{cycles} E(∏_{i∈cycle} f^i)`.
pub fn e_sigma<O: ExpectationOracle + ?Sized>(
    oracle: &O,
    sigma: &CycleDecomposition,
) -> Result<Rational> {
    if sigma.n() != oracle.arity() {
        return Err(Error::InvalidArgument(format!(
            "permutation of {} points for a family of {}",
            sigma.n(),
            oracle.arity()
        )));
    }
    Ok(sigma
        .supports()
        .fold(Rational::one(), |acc, b| acc * oracle.moment(b)))
}

/// The defining sum `Σ_{σ∈S_n} (-1)^{C_σ-1} E_σ`, term by term.
pub fn en_naive<O: ExpectationOracle + ?Sized>(oracle: &O) -> Result<EnResult> {
    let n = oracle.arity();
    check_cap("naive backend", n, NAIVE_CAP)?;
    let table = MomentTable::build(oracle)?;
    let (den, nums) = table.scaled();

    // Permutations are split by σ(0); each worker walks its block of the
    // lexicographic order and buckets products by cycle count.
    let sums = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut acc = vec![BigInt::zero(); n + 1];
            let mut perm: Vec<usize> = std::iter::once(first)
                .chain((0..n).filter(|&x| x != first))
                .collect();
            loop {
                let mut visited: Mask = 0;
                let mut cycles = 0;
                let mut prod = BigInt::one();
                for start in 0..n {
                    if visited >> start & 1 == 1 {
                        continue;
                    }
                    let mut support: Mask = 0;
                    let mut i = start;
                    while support >> i & 1 == 0 {
                        support |= 1 << i;
                        i = perm[i];
                    }
                    visited |= support;
                    cycles += 1;
                    prod *= &nums[support as usize];
                }
                acc[cycles] += prod;
                if !next_permutation(&mut perm[1..]) {
                    break;
                }
            }
            acc
        })
        .reduce(|| vec![BigInt::zero(); n + 1], add_into);

    Ok(EnResult {
        value: combine_by_block_count(&sums, &den),
        backend: Backend::Naive,
        terms: (1..=n as u64).product(),
    })
}

/// The permutation sum grouped by cycle supports: a block `B` of a set
/// partition stands for the `(|B|-1)!` cycles on `B`, all with the same
/// `E_σ`, so
/// `E_n = Σ_π (-1)^{|π|-1} ∏_{B∈π} (|B|-1)! · E(∏_{i∈B} f^i)`.
pub fn en_partition<O: ExpectationOracle + ?Sized>(oracle: &O) -> Result<EnResult> {
    let n = oracle.arity();
    check_partition_n(n)?;
    let table = MomentTable::build(oracle)?;
    let (den, nums) = table.scaled();
    let cyclic: Vec<BigInt> = (0..=n).map(|p| factorial(p.saturating_sub(1))).collect();

    let mut sums = vec![BigInt::zero(); n + 1];
    let mut rgs = GrowthStrings::new(n);
    let mut blocks = Vec::with_capacity(n);
    let mut terms = 0u64;
    while rgs.advance() {
        rgs.blocks_into(&mut blocks);
        let mut prod = BigInt::one();
        for &b in &blocks {
            let size = b.count_ones() as usize;
            if size > 2 {
                prod *= &cyclic[size];
            }
            prod *= &nums[b as usize];
        }
        sums[blocks.len()] += prod;
        terms += 1;
    }

    Ok(EnResult {
        value: combine_by_block_count(&sums, &den),
        backend: Backend::Partition,
        terms,
    })
}

/// Peels off the last function: `E_n(f^1..f^{n-1}, f) = Σ_{i<n} E_{n-1}(…, f^i f, …)
/// − E_{n-1}(f^1..f^{n-1})·E(f)`, applied recursively to lists of index
/// blocks whose products stand in for single functions.
pub fn en_recursive<O: ExpectationOracle + ?Sized>(oracle: &O) -> Result<EnResult> {
    let n = oracle.arity();
    check_cap("recursive backend", n, RECURSIVE_CAP)?;
    let table = MomentTable::build(oracle)?;

    fn go(blocks: &mut Vec<Mask>, table: &MomentTable, nodes: &mut u64) -> Rational {
        *nodes += 1;
        if blocks.len() == 1 {
            return table.get(blocks[0]).clone();
        }
        let last = blocks.pop().expect("at least two blocks");
        let mut value = Rational::zero();
        for i in 0..blocks.len() {
            let saved = blocks[i];
            blocks[i] |= last;
            value += go(blocks, table, nodes);
            blocks[i] = saved;
        }
        value -= go(blocks, table, nodes) * table.get(last);
        blocks.push(last);
        value
    }

    let mut blocks: Vec<Mask> = (0..n).map(|i| 1 << i).collect();
    let mut nodes = 0;
    let value = go(&mut blocks, &table, &mut nodes);
    Ok(EnResult {
        value,
        backend: Backend::Recursive,
        terms: nodes,
    })
}

pub fn en<O: ExpectationOracle + ?Sized>(oracle: &O, backend: Backend) -> Result<EnResult> {
    match backend {
        Backend::Naive => en_naive(oracle),
        Backend::Partition => en_partition(oracle),
        Backend::Recursive => en_recursive(oracle),
    }
}

/// `P_c`: the part of the permutation sum over permutations containing the
/// cycle `c` (0-based indices).
pub fn partial_cycle_sum<O: ExpectationOracle + ?Sized>(
    oracle: &O,
    c: &[usize],
) -> Result<Rational> {
    let n = oracle.arity();
    if c.is_empty() {
        return Err(Error::InvalidArgument("empty cycle".into()));
    }
    let mut support: Mask = 0;
    for &i in c {
        if i >= n || support >> i & 1 == 1 {
            return Err(Error::InvalidArgument(format!(
                "cycle index {i} repeated or out of range 0..{n}"
            )));
        }
        support |= 1 << i;
    }
    if c.len() == n {
        return Ok(oracle.moment(support));
    }
    let rest: Vec<usize> = (0..n).filter(|&i| support >> i & 1 == 0).collect();
    let complement = en_partition(&Restricted::new(oracle, rest)?)?.value;
    Ok(-(oracle.moment(support) * complement))
}

/// The third joint cumulant
/// `E(fgh) + 2E(f)E(g)E(h) − E(f)E(gh) − E(g)E(fh) − E(h)E(fg)`.
pub fn kappa3<O: ExpectationOracle + ?Sized>(oracle: &O) -> Result<Rational> {
    if oracle.arity() != 3 {
        return Err(Error::InvalidArgument(format!(
            "kappa3 needs exactly 3 functions, got {}",
            oracle.arity()
        )));
    }
    let e = |mask: Mask| oracle.moment(mask);
    Ok(e(0b111) + int(2) * e(0b001) * e(0b010) * e(0b100)
        - e(0b001) * e(0b110)
        - e(0b010) * e(0b101)
        - e(0b100) * e(0b011))
}

/// `α_1 (1 − α_2)(2 − α_3) ⋯ (n − 1 − α_n)` for `0 ≤ α_1 ≤ ⋯ ≤ α_n ≤ 1`:
/// the value of `E_n` on nested intervals `[0, α_j]` or on constant
/// staircases `a^j ≡ m·α_j`.
pub fn en_constant_closed_form(alphas: &[Rational]) -> Result<Rational> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("need at least one value".into()));
    }
    if let Some(x) = alphas.iter().find(|x| !is_in_unit_interval(x)) {
        return Err(Error::InvalidArgument(format!("{x} outside [0,1]")));
    }
    if alphas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "values must be weakly increasing".into(),
        ));
    }
    Ok(alphas
        .iter()
        .enumerate()
        .skip(1)
        .fold(alphas[0].clone(), |acc, (j, a)| acc * (int(j as i64) - a)))
}

/// `E_n(f^1, …, f^{n-1}, 1)`, checked against `(n − 2)·E_{n-1}(f^1, …, f^{n-1})`.
///
/// A mismatch means the engine is broken and is reported as
/// [`Error::Invariant`].
pub fn en_with_unit<O: ExpectationOracle>(oracle: O) -> Result<Rational> {
    let prev = en_partition(&oracle)?.value;
    let n = oracle.arity() + 1;
    let extended = WithUnit::new(oracle)?;
    let value = en_partition(&extended)?.value;
    let expected = int(n as i64 - 2) * prev;
    if value != expected {
        return Err(Error::Invariant(format!(
            "E_{n}(..., 1) = {value} but (n-2)·E_{} = {expected}",
            n - 1
        )));
    }
    Ok(value)
}
