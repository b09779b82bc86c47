use std::fmt;

use crate::error::{Error, Result};

use super::Mask;

/// A permutation of `0..n` written as disjoint cycles.
///
/// Each cycle starts at its smallest element and cycles are ordered by that
/// element, so the representation is unique. `Display` prints 1-based labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleDecomposition {
    n: usize,
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    /// From one-line notation `perm[i] = σ(i)`.
    pub fn from_one_line(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &x in perm {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
        }
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                cycle.push(i);
                i = perm[i];
            }
            cycles.push(cycle);
        }
        Ok(CycleDecomposition { n, cycles })
    }

    /// From explicit cycles (0-based). Cycles are normalized to the canonical
    /// rotation and order.
    pub fn from_cycles(n: usize, cycles: Vec<Vec<usize>>) -> Result<Self> {
        let mut perm = vec![usize::MAX; n];
        for c in &cycles {
            if c.is_empty() {
                return Err(Error::InvalidArgument("empty cycle".into()));
            }
            for (k, &x) in c.iter().enumerate() {
                if x >= n || perm[x] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "index {x} repeated or out of range 0..{n}"
                    )));
                }
                perm[x] = c[(k + 1) % c.len()];
            }
        }
        if perm.contains(&usize::MAX) {
            return Err(Error::InvalidArgument("cycles do not cover 0..n".into()));
        }
        Self::from_one_line(&perm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// `C_σ`.
    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Cycle supports as index masks.
    pub fn supports(&self) -> impl Iterator<Item = Mask> + '_ {
        self.cycles
            .iter()
            .map(|c| c.iter().fold(0, |acc, &i| acc | 1 << i))
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles.iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            write!(f, "(")?;
            for (k, i) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Advances `xs` to the next permutation in lexicographic order; returns
/// `false` after the last one.
pub(crate) fn next_permutation(xs: &mut [usize]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..n)
        .rev()
        .find(|&j| xs[j] > xs[i])
        .expect("pivot exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// All `n!` permutations of `0..n`, in lexicographic order of their one-line
/// notation, each as a cycle decomposition.
pub fn permutations_by_cycles(n: usize) -> Result<impl Iterator<Item = CycleDecomposition>> {
    let cap = super::NAIVE_CAP;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "permutation enumeration",
            n,
            cap,
        });
    }
    let mut current: Option<Vec<usize>> = Some((0..n).collect());
    Ok(std::iter::from_fn(move || {
        let perm = current.take()?;
        let out = CycleDecomposition::from_one_line(&perm).expect("valid permutation");
        let mut next = perm;
        if next_permutation(&mut next) {
            current = Some(next);
        }
        Some(out)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        let one: Vec<_> = permutations_by_cycles(1).unwrap().collect();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].cycles(), &[vec![0]]);

        let three: Vec<_> = permutations_by_cycles(3).unwrap().collect();
        assert_eq!(three.len(), 6);
        assert_eq!(
            three.iter().filter(|s| s.cycle_type() == vec![3]).count(),
            2
        );

        assert_eq!(permutations_by_cycles(4).unwrap().count(), 24);
        let distinct: HashSet<_> = permutations_by_cycles(5).unwrap().collect();
        assert_eq!(distinct.len(), 120);
    }

    #[test]
    fn caps() {
        assert!(permutations_by_cycles(0).is_err());
        assert!(matches!(
            permutations_by_cycles(10),
            Err(Error::CapExceeded { n: 10, cap: 9, .. })
        ));
    }

    #[test]
    fn canonical_form() {
        let a = CycleDecomposition::from_cycles(3, vec![vec![1, 2, 0]]).unwrap();
        let b = CycleDecomposition::from_cycles(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(1 2 3)");
        let c = CycleDecomposition::from_cycles(3, vec![vec![2], vec![1, 0]]).unwrap();
        assert_eq!(c.to_string(), "(1 2)(3)");
        assert_eq!(c.cycle_count(), 2);
        assert!(CycleDecomposition::from_cycles(3, vec![vec![0, 1]]).is_err());
        assert!(CycleDecomposition::from_cycles(2, vec![vec![0, 1], vec![1]]).is_err());
    }
}
