use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{GridFunction, GridIndicator, RectangleFamily, StaircaseSeq};
use crate::rational::Rational;

/// Subset of function indices; bit `i` stands for `f^i`.
pub type Mask = u32;

/// Widest family an oracle may describe.
pub const MAX_ARITY: usize = 24;

/// Exact mixed moments `E(∏_{i∈B} f^i)` of a family of `arity()` functions.
pub trait ExpectationOracle: Sync {
    fn arity(&self) -> usize;

    /// Moment of the nonempty index set `mask ⊆ 0..arity()`.
    fn moment(&self, mask: Mask) -> Rational;
}

impl<O: ExpectationOracle + ?Sized> ExpectationOracle for &O {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn moment(&self, mask: Mask) -> Rational {
        (**self).moment(mask)
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "a family needs at least one function".into(),
        ));
    }
    if n > MAX_ARITY {
        return Err(Error::CapExceeded {
            what: "oracle arity",
            n,
            cap: MAX_ARITY,
        });
    }
    Ok(())
}

fn members(mask: Mask) -> impl Iterator<Item = usize> {
    (0..Mask::BITS as usize).filter(move |&i| mask >> i & 1 == 1)
}

const PAR_MIN_ARITY: usize = 10;

/// Memoized moments for every nonempty subset, indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    n: usize,
    table: Vec<Rational>,
}

impl MomentTable {
    /// Evaluates all `2^n - 1` moments of `oracle` once.
    pub fn build<O: ExpectationOracle + ?Sized>(oracle: &O) -> Result<Self> {
        let n = oracle.arity();
        check_arity(n)?;
        // slot 0 is the empty product
        let mut table = vec![Rational::one()];
        let masks = 1..(1 as Mask) << n;
        if n < PAR_MIN_ARITY {
            table.extend(masks.map(|mask| oracle.moment(mask)));
        } else {
            let rest: Vec<Rational> = masks
                .into_par_iter()
                .map(|mask| oracle.moment(mask))
                .collect();
            table.extend(rest);
        }
        Ok(MomentTable { n, table })
    }

    /// A table from explicit values; `values[mask - 1]` is the moment of
    /// `mask`, so `values.len()` must be `2^n - 1`.
    pub fn from_values(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_arity(n)?;
        if values.len() != (1usize << n) - 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} moments for n = {n}, got {}",
                (1usize << n) - 1,
                values.len()
            )));
        }
        let mut table = vec![Rational::one()];
        table.extend(values);
        Ok(MomentTable { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: Mask) -> &Rational {
        &self.table[mask as usize]
    }

    /// Moments over a common denominator: `moment(B) = nums[B] / den`.
    pub(crate) fn scaled(&self) -> (BigInt, Vec<BigInt>) {
        let den = self
            .table
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let nums = self
            .table
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        (den, nums)
    }
}

impl ExpectationOracle for MomentTable {
    fn arity(&self) -> usize {
        self.n
    }

    fn moment(&self, mask: Mask) -> Rational {
        self.table[mask as usize].clone()
    }
}

/// Staircase indicators `χ_{a^1}, …, χ_{a^n}` on one grid.
#[derive(Clone, Debug)]
pub struct StaircaseOracle {
    m: usize,
    fns: Vec<StaircaseSeq>,
}

impl StaircaseOracle {
    pub fn new(fns: Vec<StaircaseSeq>) -> Result<Self> {
        check_arity(fns.len())?;
        let m = fns[0].m();
        if let Some(other) = fns.iter().find(|a| a.m() != m) {
            return Err(Error::MismatchedResolution(m, other.m()));
        }
        Ok(StaircaseOracle { m, fns })
    }

    pub fn functions(&self) -> &[StaircaseSeq] {
        &self.fns
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

impl ExpectationOracle for StaircaseOracle {
    fn arity(&self) -> usize {
        self.fns.len()
    }

    fn moment(&self, mask: Mask) -> Rational {
        let cells: usize = (0..self.m)
            .map(|pos| {
                members(mask)
                    .map(|i| self.fns[i].values()[pos])
                    .min()
                    .expect("nonempty mask")
            })
            .sum();
        Rational::new(BigInt::from(cells), BigInt::from(self.m * self.m))
    }
}

/// Arbitrary cell-set indicators on one grid.
#[derive(Clone, Debug)]
pub struct IndicatorOracle {
    m: usize,
    fns: Vec<GridIndicator>,
}

impl IndicatorOracle {
    pub fn new(fns: Vec<GridIndicator>) -> Result<Self> {
        check_arity(fns.len())?;
        let m = fns[0].m();
        if let Some(other) = fns.iter().find(|a| a.m() != m) {
            return Err(Error::MismatchedResolution(m, other.m()));
        }
        Ok(IndicatorOracle { m, fns })
    }
}

impl ExpectationOracle for IndicatorOracle {
    fn arity(&self) -> usize {
        self.fns.len()
    }

    fn moment(&self, mask: Mask) -> Rational {
        let words = self.fns[0].raw_bits().len();
        let count: u32 = (0..words)
            .map(|w| {
                members(mask)
                    .map(|i| self.fns[i].raw_bits()[w])
                    .fold(u64::MAX, |acc, x| acc & x)
                    .count_ones()
            })
            .sum();
        Rational::new(BigInt::from(count), BigInt::from(self.m * self.m))
    }
}

/// Nonnegative cell-constant functions on one grid.
#[derive(Clone, Debug)]
pub struct GridFunctionOracle {
    m: usize,
    fns: Vec<GridFunction>,
}

impl GridFunctionOracle {
    pub fn new(fns: Vec<GridFunction>) -> Result<Self> {
        check_arity(fns.len())?;
        let m = fns[0].m();
        if let Some(other) = fns.iter().find(|a| a.m() != m) {
            return Err(Error::MismatchedResolution(m, other.m()));
        }
        Ok(GridFunctionOracle { m, fns })
    }

    pub fn functions(&self) -> &[GridFunction] {
        &self.fns
    }
}

impl ExpectationOracle for GridFunctionOracle {
    fn arity(&self) -> usize {
        self.fns.len()
    }

    fn moment(&self, mask: Mask) -> Rational {
        let idx: Vec<usize> = members(mask).collect();
        let total: Rational = (0..self.m * self.m)
            .map(|c| {
                idx.iter()
                    .map(|&i| &self.fns[i].values()[c])
                    .fold(Rational::one(), |acc, x| acc * x)
            })
            .sum();
        total / Rational::from_integer(BigInt::from(self.m * self.m))
    }
}

/// Characteristic functions of down-rectangles.
#[derive(Clone, Debug)]
pub struct RectangleOracle {
    fam: RectangleFamily,
}

impl RectangleOracle {
    pub fn new(fam: RectangleFamily) -> Result<Self> {
        check_arity(fam.len())?;
        Ok(RectangleOracle { fam })
    }

    pub fn family(&self) -> &RectangleFamily {
        &self.fam
    }
}

impl ExpectationOracle for RectangleOracle {
    fn arity(&self) -> usize {
        self.fam.len()
    }

    fn moment(&self, mask: Mask) -> Rational {
        let idx: Vec<usize> = members(mask).collect();
        self.fam
            .intersection_volume(&idx)
            .expect("mask within arity")
    }
}

/// Appends the constant function 1 as the last index.
#[derive(Clone, Debug)]
pub struct WithUnit<O> {
    inner: O,
}

impl<O: ExpectationOracle> WithUnit<O> {
    pub fn new(inner: O) -> Result<Self> {
        check_arity(inner.arity() + 1)?;
        Ok(WithUnit { inner })
    }
}

impl<O: ExpectationOracle> ExpectationOracle for WithUnit<O> {
    fn arity(&self) -> usize {
        self.inner.arity() + 1
    }

    fn moment(&self, mask: Mask) -> Rational {
        let rest = mask & !(1 << self.inner.arity());
        if rest == 0 {
            Rational::one()
        } else {
            self.inner.moment(rest)
        }
    }
}

/// The sub-family `f^{indices[0]}, f^{indices[1]}, …` of another oracle.
/// A permutation of `0..n` gives a relabelled copy of the whole family.
#[derive(Clone, Debug)]
pub struct Restricted<O> {
    inner: O,
    indices: Vec<usize>,
}

impl<O: ExpectationOracle> Restricted<O> {
    pub fn new(inner: O, indices: Vec<usize>) -> Result<Self> {
        check_arity(indices.len())?;
        let n = inner.arity();
        let mut seen = 0 as Mask;
        for &i in &indices {
            if i >= n || seen >> i & 1 == 1 {
                return Err(Error::InvalidArgument(format!(
                    "index {i} repeated or out of range 0..{n}"
                )));
            }
            seen |= 1 << i;
        }
        Ok(Restricted { inner, indices })
    }
}

impl<O: ExpectationOracle> ExpectationOracle for Restricted<O> {
    fn arity(&self) -> usize {
        self.indices.len()
    }

    fn moment(&self, mask: Mask) -> Rational {
        let global = members(mask).fold(0 as Mask, |acc, i| acc | 1 << self.indices[i]);
        self.inner.moment(global)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn s(m: usize, v: &[usize]) -> StaircaseSeq {
        StaircaseSeq::new(m, v.to_vec()).unwrap()
    }

    #[test]
    fn staircase_and_indicator_oracles_agree() {
        let fns = vec![s(3, &[3, 2, 0]), s(3, &[2, 2, 1]), s(3, &[1, 1, 1])];
        let st = StaircaseOracle::new(fns.clone()).unwrap();
        let ind = IndicatorOracle::new(fns.iter().map(|a| a.indicator()).collect()).unwrap();
        let gf = GridFunctionOracle::new(fns.iter().map(GridFunction::from_staircase).collect())
            .unwrap();
        for mask in 1..8 {
            assert_eq!(st.moment(mask), ind.moment(mask));
            assert_eq!(st.moment(mask), gf.moment(mask));
        }
        assert_eq!(st.moment(0b011), rat(4, 9));
    }

    #[test]
    fn oracle_construction_errors() {
        assert_eq!(
            StaircaseOracle::new(vec![s(2, &[1, 1]), s(3, &[1, 1, 1])]).unwrap_err(),
            Error::MismatchedResolution(2, 3)
        );
        assert!(StaircaseOracle::new(vec![]).is_err());
        let st = StaircaseOracle::new(vec![s(2, &[1, 1])]).unwrap();
        assert!(Restricted::new(&st, vec![1]).is_err());
        assert!(Restricted::new(&st, vec![0, 0]).is_err());
    }

    #[test]
    fn unit_and_restriction() {
        let st = StaircaseOracle::new(vec![s(2, &[2, 1]), s(2, &[1, 0])]).unwrap();
        let u = WithUnit::new(&st).unwrap();
        assert_eq!(u.arity(), 3);
        assert_eq!(u.moment(0b100), int(1));
        assert_eq!(u.moment(0b101), rat(3, 4));
        let r = Restricted::new(&st, vec![1, 0]).unwrap();
        assert_eq!(r.moment(0b01), rat(1, 4));
        assert_eq!(r.moment(0b10), rat(3, 4));
    }

    #[test]
    fn table_memoizes_and_scales() {
        let st = StaircaseOracle::new(vec![s(2, &[2, 1]), s(2, &[1, 0])]).unwrap();
        let t = MomentTable::build(&st).unwrap();
        for mask in 1..4 {
            assert_eq!(t.moment(mask), st.moment(mask));
        }
        let (den, nums) = t.scaled();
        assert_eq!(den, BigInt::from(4));
        assert_eq!(nums[1], BigInt::from(3));
        assert!(MomentTable::from_values(2, vec![int(1)]).is_err());
    }

    #[test]
    fn rectangle_oracle_is_intersection_volume() {
        let fam = RectangleFamily::new(2, vec![vec![rat(1, 2), int(1)], vec![int(1), rat(1, 3)]])
            .unwrap();
        let o = RectangleOracle::new(fam).unwrap();
        assert_eq!(o.moment(0b11), rat(1, 6));
        assert_eq!(o.moment(0b01), rat(1, 2));
    }
}
