use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::GridIndicator;

/// A weakly decreasing sequence `m >= a_1 >= ... >= a_m >= 0`.
///
/// It encodes the monotone set `S_a`, the union of the cells `D(i,j)` with
/// `j <= a_i`. The derived ordering (resolution first, then lexicographic on
/// the entries) is the canonical order used for tuples in scan reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawStaircase", into = "RawStaircase")]
pub struct StaircaseSeq {
    m: usize,
    a: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawStaircase {
    m: usize,
    a: Vec<usize>,
}

impl TryFrom<RawStaircase> for StaircaseSeq {
    type Error = Error;

    fn try_from(raw: RawStaircase) -> Result<Self> {
        StaircaseSeq::new(raw.m, raw.a)
    }
}

impl From<StaircaseSeq> for RawStaircase {
    fn from(s: StaircaseSeq) -> Self {
        RawStaircase { m: s.m, a: s.a }
    }
}

/// The three single-entry perturbations at a descent `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Perturbation {
    /// `a_i <- a_{i+1}`
    Minus,
    /// `a_{i+1} <- a_i`
    Plus,
    /// `a_{i+1} <- a_{i+1} + 1`
    Star,
}

impl StaircaseSeq {
    pub fn new(m: usize, values: Vec<usize>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidStaircase(
                "resolution m must be positive".into(),
            ));
        }
        if values.len() != m {
            return Err(Error::InvalidStaircase(format!(
                "expected {m} entries, got {}",
                values.len()
            )));
        }
        for (pos, &v) in values.iter().enumerate() {
            if v > m {
                return Err(Error::InvalidStaircase(format!(
                    "entry {v} at index {pos} out of range [0, {m}]"
                )));
            }
            if pos > 0 && values[pos - 1] < v {
                return Err(Error::InvalidStaircase(format!(
                    "not weakly decreasing at index {pos}"
                )));
            }
        }
        Ok(StaircaseSeq { m, a: values })
    }

    pub fn constant(m: usize, value: usize) -> Result<Self> {
        Self::new(m, vec![value; m])
    }

    /// The whole square, the identity for [`meet`](Self::meet).
    pub fn full(m: usize) -> Self {
        StaircaseSeq { m, a: vec![m; m] }
    }

    pub fn empty(m: usize) -> Self {
        StaircaseSeq { m, a: vec![0; m] }
    }

    /// Every element of `A(m)` in lexicographic order. There are `C(2m, m)`.
    pub fn all(m: usize) -> Vec<StaircaseSeq> {
        fn rec(m: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<StaircaseSeq>) {
            if cur.len() == m {
                out.push(StaircaseSeq { m, a: cur.clone() });
                return;
            }
            for v in 0..=cap {
                cur.push(v);
                rec(m, v, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if m > 0 {
            rec(m, m, &mut Vec::with_capacity(m), &mut out);
        }
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[usize] {
        &self.a
    }

    /// `a_i`, 1-based.
    pub fn value(&self, i: usize) -> usize {
        self.a[i - 1]
    }

    /// Number of cells in `S_a`.
    pub fn cell_count(&self) -> usize {
        self.a.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.a.windows(2).all(|w| w[0] == w[1])
    }

    /// Whether cell `(i,j)` (1-based) lies in `S_a`.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        (1..=self.m).contains(&i) && j >= 1 && j <= self.a[i - 1]
    }

    fn check_same_m(&self, other: &StaircaseSeq) -> Result<()> {
        if self.m != other.m {
            return Err(Error::MismatchedResolution(self.m, other.m));
        }
        Ok(())
    }

    /// Component-wise minimum; the set-level intersection `S_a ∩ S_b`.
    pub fn meet(&self, other: &StaircaseSeq) -> Result<StaircaseSeq> {
        self.check_same_m(other)?;
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| *x.min(y))
            .collect();
        Ok(StaircaseSeq { m: self.m, a })
    }

    /// Lebesgue measure of `S_a`, i.e. `(a_1 + ... + a_m) / m^2`.
    pub fn expect(&self) -> Rational {
        Rational::new(
            BigInt::from(self.cell_count()),
            BigInt::from(self.m * self.m),
        )
    }

    /// 1-based positions `i` in `[1, m-1]` with `a_i > a_{i+1}`, ascending.
    pub fn descents(&self) -> Vec<usize> {
        (1..self.m).filter(|&i| self.has_descent(i)).collect()
    }

    pub fn has_descent(&self, i: usize) -> bool {
        i >= 1 && i < self.m && self.a[i - 1] > self.a[i]
    }

    /// Applies one of the perturbations at the descent `i` (1-based).
    pub fn perturb(&self, i: usize, kind: Perturbation) -> Result<StaircaseSeq> {
        if !self.has_descent(i) {
            return Err(Error::InvalidArgument(format!("no descent at {i}")));
        }
        let mut a = self.a.clone();
        match kind {
            Perturbation::Minus => a[i - 1] = a[i],
            Perturbation::Plus => a[i] = a[i - 1],
            Perturbation::Star => a[i] += 1,
        }
        debug_assert!(StaircaseSeq::new(self.m, a.clone()).is_ok());
        Ok(StaircaseSeq { m: self.m, a })
    }

    /// The same set on the `t·m` grid: each entry is repeated `t` times and
    /// scaled by `t`.
    pub fn refine(&self, t: usize) -> Result<StaircaseSeq> {
        if t == 0 {
            return Err(Error::InvalidArgument(
                "refinement factor must be >= 1".into(),
            ));
        }
        let a = self
            .a
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v * t, t))
            .collect();
        Ok(StaircaseSeq { m: self.m * t, a })
    }

    pub fn indicator(&self) -> GridIndicator {
        GridIndicator::from_staircase(self)
    }
}

impl fmt::Display for StaircaseSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.a.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}
