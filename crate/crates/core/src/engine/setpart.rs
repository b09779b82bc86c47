use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

use super::Mask;

/// A set partition of `0..n`; blocks are sorted by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Mask>,
}

impl SetPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_masks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|&b| (0..self.n).filter(|&i| b >> i & 1 == 1).collect())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, block) in self.blocks().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (t, i) in block.iter().enumerate() {
                if t > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Restricted growth strings `r` with `r[0] = 0`, `r[i] <= 1 + max(r[..i])`,
/// stepped in lexicographic order.
pub(crate) struct GrowthStrings {
    r: Vec<usize>,
    // prefix[i] = max(r[..i]), prefix[0] unused
    prefix: Vec<usize>,
    started: bool,
}

impl GrowthStrings {
    pub(crate) fn new(n: usize) -> Self {
        GrowthStrings {
            r: vec![0; n],
            prefix: vec![0; n],
            started: false,
        }
    }

    /// Advances to the next string; `false` once exhausted.
    pub(crate) fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return !self.r.is_empty();
        }
        let n = self.r.len();
        for i in (1..n).rev() {
            if self.r[i] <= self.prefix[i] {
                self.r[i] += 1;
                for j in i + 1..n {
                    self.r[j] = 0;
                    self.prefix[j] = self.prefix[j - 1].max(self.r[j - 1]);
                }
                return true;
            }
        }
        false
    }

    /// Block masks of the current string, written into `out`.
    pub(crate) fn blocks_into(&self, out: &mut Vec<Mask>) {
        out.clear();
        for (i, &b) in self.r.iter().enumerate() {
            if b == out.len() {
                out.push(0);
            }
            out[b] |= 1 << i;
        }
    }
}

/// Every set partition of `0..n`, in restricted-growth-string order.
pub fn set_partitions(n: usize) -> Result<impl Iterator<Item = SetPartition>> {
    check_partition_n(n)?;
    let mut rgs = GrowthStrings::new(n);
    Ok(std::iter::from_fn(move || {
        if !rgs.advance() {
            return None;
        }
        let mut blocks = Vec::new();
        rgs.blocks_into(&mut blocks);
        Some(SetPartition { n, blocks })
    }))
}

pub(crate) fn check_partition_n(n: usize) -> Result<()> {
    let cap = super::PARTITION_CAP;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "set partition enumeration",
            n,
            cap,
        });
    }
    Ok(())
}

/// `Bell(n)` via the Bell triangle.
pub fn bell_number(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![row.last().expect("nonempty").clone()];
        for x in &row {
            let v = next.last().expect("nonempty") + x;
            next.push(v);
        }
        row = next;
    }
    row[0].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn bell_counts() {
        let bells = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for (n, &b) in bells.iter().enumerate() {
            assert_eq!(bell_number(n), BigUint::from(b));
        }
        for n in 1..=9 {
            assert_eq!(
                BigUint::from(set_partitions(n).unwrap().count()),
                bell_number(n)
            );
        }
    }

    #[test]
    fn examples() {
        let p: Vec<_> = set_partitions(1).unwrap().collect();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].to_string(), "{{1}}");
        let p: Vec<String> = set_partitions(3).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(
            p,
            [
                "{{1,2,3}}",
                "{{1,2},{3}}",
                "{{1,3},{2}}",
                "{{1},{2,3}}",
                "{{1},{2},{3}}"
            ]
        );
        assert_eq!(set_partitions(4).unwrap().count(), 15);
        assert!(set_partitions(0).is_err());
        assert!(set_partitions(15).is_err());
    }

    #[test]
    fn partitions_are_valid_and_distinct() {
        let all: Vec<_> = set_partitions(6).unwrap().collect();
        let distinct: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), all.len());
        for p in &all {
            let union = p.block_masks().iter().fold(0, |acc, b| {
                assert_eq!(acc & b, 0);
                acc | b
            });
            assert_eq!(union, 0b111111);
            let mins: Vec<u32> = p.block_masks().iter().map(|b| b.trailing_zeros()).collect();
            assert!(mins.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
