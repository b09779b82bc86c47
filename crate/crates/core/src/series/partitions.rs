use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

pub const PARTITION_N_CAP: usize = 30;

/// `λ_1 ≥ λ_2 ≥ ⋯ ≥ λ_l > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPartition {
    parts: Vec<usize>,
}

impl IntPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidArgument(
                "parts must be positive and nonempty".into(),
            ));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "parts must be weakly decreasing".into(),
            ));
        }
        Ok(IntPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `|λ|`
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `l(λ)`
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `m_i(λ)`, the number of parts equal to `i`.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.parts.iter().filter(|&&p| p == i).count()
    }
}

impl fmt::Display for IntPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All partitions of `n` in reverse lexicographic order, starting at `(n)`.
pub fn partitions_of(n: usize) -> Result<impl Iterator<Item = IntPartition>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > PARTITION_N_CAP {
        return Err(Error::CapExceeded {
            what: "integer partitions",
            n,
            cap: PARTITION_N_CAP,
        });
    }
    let mut current = Some(vec![n]);
    Ok(std::iter::from_fn(move || {
        let parts = current.take()?;
        current = next_partition(&parts);
        Some(IntPartition { parts })
    }))
}

fn next_partition(parts: &[usize]) -> Option<Vec<usize>> {
    // Drop trailing ones, decrement the last part > 1, then refill greedily
    // with parts no larger than it.
    let ones = parts.iter().rev().take_while(|&&p| p == 1).count();
    let k = parts.len() - ones;
    if k == 0 {
        return None;
    }
    let mut out = parts[..k - 1].to_vec();
    let cap = parts[k - 1] - 1;
    let mut rest = cap + 1 + ones;
    while rest > 0 {
        let p = cap.min(rest);
        out.push(p);
        rest -= p;
    }
    Some(out)
}

/// `z_λ = ∏_i i^{m_i} m_i!`, so that `n!/z_λ` is the size of the conjugacy
/// class of cycle type `λ` in `S_n`.
pub fn z_lambda(lam: &IntPartition) -> BigUint {
    let mut z = BigUint::one();
    let mut i = 0;
    while i < lam.parts.len() {
        let part = lam.parts[i];
        let mult = lam.parts[i..].iter().take_while(|&&p| p == part).count();
        for k in 1..=mult {
            z *= BigUint::from(part) * BigUint::from(k);
        }
        i += mult;
    }
    z
}
