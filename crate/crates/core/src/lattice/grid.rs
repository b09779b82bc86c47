use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{serde_pq_matrix, Rational};

use super::StaircaseSeq;

/// An arbitrary subset of the `m × m` cells, stored as a row-major bitset
/// (cell `(i,j)` sits at bit `(i-1)·m + (j-1)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawIndicator", into = "RawIndicator")]
pub struct GridIndicator {
    m: usize,
    bits: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawIndicator {
    m: usize,
    cells: Vec<[usize; 2]>,
}

impl TryFrom<RawIndicator> for GridIndicator {
    type Error = Error;

    fn try_from(raw: RawIndicator) -> Result<Self> {
        GridIndicator::new(raw.m, raw.cells.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<GridIndicator> for RawIndicator {
    fn from(g: GridIndicator) -> Self {
        RawIndicator {
            m: g.m,
            cells: g.cells().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl GridIndicator {
    pub fn empty(m: usize) -> Self {
        GridIndicator {
            m,
            bits: vec![0; (m * m).div_ceil(64)],
        }
    }

    /// Builds an indicator from 1-based cell coordinates. Duplicates are
    /// harmless; out-of-range cells are rejected.
    pub fn new(m: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "resolution m must be positive".into(),
            ));
        }
        let mut g = Self::empty(m);
        for (i, j) in cells {
            if !(1..=m).contains(&i) || !(1..=m).contains(&j) {
                return Err(Error::InvalidArgument(format!(
                    "cell ({i},{j}) outside the {m}x{m} grid"
                )));
            }
            g.set(i, j);
        }
        Ok(g)
    }

    pub fn from_staircase(a: &StaircaseSeq) -> Self {
        let m = a.m();
        let mut g = Self::empty(m);
        for i in 1..=m {
            for j in 1..=a.value(i) {
                g.set(i, j);
            }
        }
        g
    }

    fn pos(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.m + (j - 1)
    }

    fn set(&mut self, i: usize, j: usize) {
        let p = self.pos(i, j);
        self.bits[p / 64] |= 1 << (p % 64);
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        if !(1..=self.m).contains(&i) || !(1..=self.m).contains(&j) {
            return false;
        }
        let p = self.pos(i, j);
        self.bits[p / 64] >> (p % 64) & 1 == 1
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.m;
        (1..=m)
            .flat_map(move |i| (1..=m).map(move |j| (i, j)))
            .filter(|&(i, j)| self.contains(i, j))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check_same_m(&self, other: &GridIndicator) -> Result<()> {
        if self.m != other.m {
            return Err(Error::MismatchedResolution(self.m, other.m));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &GridIndicator) -> Result<GridIndicator> {
        self.check_same_m(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(x, y)| x & y)
            .collect();
        Ok(GridIndicator { m: self.m, bits })
    }

    pub fn union(&self, other: &GridIndicator) -> Result<GridIndicator> {
        self.check_same_m(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(x, y)| x | y)
            .collect();
        Ok(GridIndicator { m: self.m, bits })
    }

    /// Cells not in `self`.
    pub fn complement(&self) -> GridIndicator {
        let mut g = GridIndicator::empty(self.m);
        for i in 1..=self.m {
            for j in 1..=self.m {
                if !self.contains(i, j) {
                    g.set(i, j);
                }
            }
        }
        g
    }

    pub fn is_disjoint(&self, other: &GridIndicator) -> Result<bool> {
        Ok(self.intersect(other)?.count() == 0)
    }

    /// Every subset of `self`'s cells, in binary-counter order over the
    /// row-major cell list.
    pub fn subsets(&self) -> Vec<GridIndicator> {
        let cells: Vec<_> = self.cells().collect();
        assert!(cells.len() < 32, "too many cells to enumerate subsets");
        (0u32..1 << cells.len())
            .map(|mask| {
                let mut g = GridIndicator::empty(self.m);
                for (k, &(i, j)) in cells.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        g.set(i, j);
                    }
                }
                g
            })
            .collect()
    }

    pub fn expect(&self) -> Rational {
        Rational::new(BigInt::from(self.count()), BigInt::from(self.m * self.m))
    }

    /// The set of cells as a bitset over positions `0..m*m`, for oracles.
    pub fn raw_bits(&self) -> &[u64] {
        &self.bits
    }
}

/// A nonnegative function that is constant on each cell.
///
/// `values[(i-1)·m + (j-1)]` is the value on `D(i,j)`. With `monotone` set,
/// values must be non-increasing in both `i` and `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGridFunction", into = "RawGridFunction")]
pub struct GridFunction {
    m: usize,
    values: Vec<Rational>,
    monotone: bool,
}

#[derive(Serialize, Deserialize)]
struct RawGridFunction {
    m: usize,
    #[serde(with = "serde_pq_matrix")]
    values: Vec<Vec<Rational>>,
    #[serde(default)]
    monotone: bool,
}

impl TryFrom<RawGridFunction> for GridFunction {
    type Error = Error;

    fn try_from(raw: RawGridFunction) -> Result<Self> {
        if raw.values.len() != raw.m || raw.values.iter().any(|r| r.len() != raw.m) {
            return Err(Error::InvalidArgument(format!(
                "grid function values must be an {0}x{0} matrix",
                raw.m
            )));
        }
        GridFunction::new(
            raw.m,
            raw.values.into_iter().flatten().collect(),
            raw.monotone,
        )
    }
}

impl From<GridFunction> for RawGridFunction {
    fn from(g: GridFunction) -> Self {
        let values = g.values.chunks(g.m).map(|c| c.to_vec()).collect();
        RawGridFunction {
            m: g.m,
            values,
            monotone: g.monotone,
        }
    }
}

impl GridFunction {
    pub fn new(m: usize, values: Vec<Rational>, monotone: bool) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "resolution m must be positive".into(),
            ));
        }
        if values.len() != m * m {
            return Err(Error::InvalidArgument(format!(
                "expected {} cell values, got {}",
                m * m,
                values.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::InvalidArgument(format!(
                "negative value at cell ({},{})",
                p / m + 1,
                p % m + 1
            )));
        }
        let g = GridFunction {
            m,
            values,
            monotone,
        };
        if monotone {
            for i in 1..=m {
                for j in 1..=m {
                    let v = g.value(i, j);
                    if (i < m && g.value(i + 1, j) > v) || (j < m && g.value(i, j + 1) > v) {
                        return Err(Error::InvalidArgument(format!(
                            "not monotone decreasing at cell ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn constant(m: usize, c: Rational) -> Result<Self> {
        Self::new(m, vec![c; m * m], true)
    }

    pub fn from_indicator(g: &GridIndicator, monotone: bool) -> Result<Self> {
        let m = g.m();
        let mut values = vec![Rational::zero(); m * m];
        for (i, j) in g.cells() {
            values[(i - 1) * m + (j - 1)] = Rational::from_integer(1.into());
        }
        Self::new(m, values, monotone)
    }

    pub fn from_staircase(a: &StaircaseSeq) -> Self {
        Self::from_indicator(&a.indicator(), true).expect("staircase indicators are monotone")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn value(&self, i: usize, j: usize) -> &Rational {
        &self.values[(i - 1) * self.m + (j - 1)]
    }

    /// Row-major cell values.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn expect(&self) -> Rational {
        let total: Rational = self.values.iter().sum();
        total / Rational::from_integer(BigInt::from(self.m * self.m))
    }

    /// Cell-wise sum. The result is flagged monotone iff both inputs are.
    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.m != other.m {
            return Err(Error::MismatchedResolution(self.m, other.m));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x + y)
            .collect();
        GridFunction::new(self.m, values, self.monotone && other.monotone)
    }

    pub fn scale(&self, c: &Rational) -> Result<GridFunction> {
        let values = self.values.iter().map(|x| x * c).collect();
        GridFunction::new(self.m, values, self.monotone)
    }
}

/// A borrowed 0/1 cell function, either a staircase or an arbitrary set.
#[derive(Clone, Copy, Debug)]
pub enum CellFn<'a> {
    Staircase(&'a StaircaseSeq),
    Indicator(&'a GridIndicator),
}

impl CellFn<'_> {
    pub fn m(&self) -> usize {
        match self {
            CellFn::Staircase(a) => a.m(),
            CellFn::Indicator(g) => g.m(),
        }
    }
}

impl<'a> From<&'a StaircaseSeq> for CellFn<'a> {
    fn from(a: &'a StaircaseSeq) -> Self {
        CellFn::Staircase(a)
    }
}

impl<'a> From<&'a GridIndicator> for CellFn<'a> {
    fn from(g: &'a GridIndicator) -> Self {
        CellFn::Indicator(g)
    }
}

/// `E(χ_1 ⋯ χ_p)`: the measure of the common intersection.
///
/// Pure staircase lists go through the component-wise meet; anything else
/// intersects bitsets.
pub fn product_expect(fs: &[CellFn<'_>]) -> Result<Rational> {
    let first = fs
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
    let m = first.m();
    if let Some(other) = fs.iter().find(|f| f.m() != m) {
        return Err(Error::MismatchedResolution(m, other.m()));
    }
    let staircases: Option<Vec<&StaircaseSeq>> = fs
        .iter()
        .map(|f| match f {
            CellFn::Staircase(a) => Some(*a),
            CellFn::Indicator(_) => None,
        })
        .collect();
    if let Some(stairs) = staircases {
        let mut acc = stairs[0].clone();
        for a in &stairs[1..] {
            acc = acc.meet(a)?;
        }
        return Ok(acc.expect());
    }
    let mut acc = GridIndicator::new(m, (1..=m).flat_map(|i| (1..=m).map(move |j| (i, j))))?;
    for f in fs {
        let g = match f {
            CellFn::Staircase(a) => a.indicator(),
            CellFn::Indicator(g) => (*g).clone(),
        };
        acc = acc.intersect(&g)?;
    }
    Ok(acc.expect())
}

/// Inner approximation of a monotone lower set `S ⊆ [0,1]^2` on the `m × m`
/// grid: cell `D(i,j)` is kept iff its top-right corner `(i/m, j/m)` lies in
/// `S`.
///
/// A predicate that is not a lower set can produce a cell pattern that is not
/// a staircase; that is reported as [`Error::InvalidStaircase`].
pub fn discretize_monotone<P>(pred: P, m: usize) -> Result<StaircaseSeq>
where
    P: Fn(&Rational, &Rational) -> bool,
{
    if m == 0 {
        return Err(Error::InvalidStaircase(
            "resolution m must be positive".into(),
        ));
    }
    let den = BigInt::from(m);
    let mut a = Vec::with_capacity(m);
    for i in 1..=m {
        let x = Rational::new(BigInt::from(i), den.clone());
        let inside: Vec<bool> = (1..=m)
            .map(|j| pred(&x, &Rational::new(BigInt::from(j), den.clone())))
            .collect();
        let height = inside.iter().take_while(|&&b| b).count();
        if inside[height..].iter().any(|&b| b) {
            return Err(Error::InvalidStaircase(format!(
                "column {i} is not a down-set; predicate is not monotone"
            )));
        }
        a.push(height);
    }
    StaircaseSeq::new(m, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn s(m: usize, v: &[usize]) -> StaircaseSeq {
        StaircaseSeq::new(m, v.to_vec()).unwrap()
    }

    #[test]
    fn indicator_from_staircase() {
        let g = s(3, &[3, 1, 0]).indicator();
        let cells: Vec<_> = g.cells().collect();
        assert_eq!(cells, vec![(1, 1), (1, 2), (1, 3), (2, 1)]);
        assert_eq!(g.expect(), rat(4, 9));
        assert!(GridIndicator::new(2, [(3, 1)]).is_err());
    }

    #[test]
    fn indicator_json_is_row_major() {
        let g = GridIndicator::new(2, [(2, 1), (1, 2), (1, 1)]).unwrap();
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"m":2,"cells":[[1,1],[1,2],[2,1]]}"#
        );
        let back: GridIndicator =
            serde_json::from_str(r#"{"m":2,"cells":[[2,1],[1,1],[1,2]]}"#).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn product_expect_examples() {
        let a = s(2, &[2, 1]);
        let b = s(2, &[1, 1]);
        assert_eq!(
            product_expect(&[(&a).into(), (&b).into()]).unwrap(),
            rat(1, 2)
        );
        let full = StaircaseSeq::full(2);
        assert_eq!(
            product_expect(&[(&a).into(), (&full).into()]).unwrap(),
            a.expect()
        );
        let chi_b = b.indicator();
        let chi_s = chi_b.complement();
        assert_eq!(
            product_expect(&[(&chi_b).into(), (&chi_s).into()]).unwrap(),
            int(0)
        );
        assert_eq!(
            product_expect(&[(&a).into(), (&chi_b).into()]).unwrap(),
            rat(1, 2)
        );
        assert!(product_expect(&[]).is_err());
        let c = s(3, &[1, 1, 1]);
        assert_eq!(
            product_expect(&[(&a).into(), (&c).into()]).unwrap_err(),
            Error::MismatchedResolution(2, 3)
        );
    }

    #[test]
    fn discretization_examples() {
        let one = int(1);
        let tri = |x: &Rational, y: &Rational| x + y <= one;
        assert_eq!(discretize_monotone(tri, 2).unwrap(), s(2, &[1, 0]));
        assert_eq!(
            discretize_monotone(|_, _| true, 3).unwrap(),
            StaircaseSeq::full(3)
        );
        assert_eq!(
            discretize_monotone(|_, _| false, 3).unwrap(),
            StaircaseSeq::empty(3)
        );
        // An upper set is not monotone decreasing.
        let half = rat(1, 2);
        assert!(discretize_monotone(|x, _| *x >= half, 4).is_err());
    }

    // Exact areas of a few monotone sets; the inner approximation misses at
    // most the 2m-1 boundary cells.
    #[test]
    fn inner_approximation_converges() {
        let one = int(1);
        let half = rat(1, 2);
        let third = rat(1, 3);
        type Pred = Box<dyn Fn(&Rational, &Rational) -> bool>;
        let cases: Vec<(Pred, Rational)> = vec![
            (Box::new(move |x, y| x + y <= one), rat(1, 2)),
            (Box::new(|x, y| x + &(y * int(2)) <= int(1)), rat(1, 4)),
            (
                Box::new(move |x, y| *x <= half || *y <= third),
                rat(1, 2) + rat(1, 2) * rat(1, 3),
            ),
        ];
        for (pred, area) in cases {
            for m in [1usize, 2, 3, 4, 6, 8, 12, 16, 24] {
                let a = discretize_monotone(&pred, m).unwrap();
                let gap = &area - a.expect();
                assert!(gap >= int(0), "m={m}: gap {gap}");
                assert!(gap <= rat(2, m as i64), "m={m}: gap {gap}");
                // refining the grid can only grow the inner approximation
                if m % 2 == 0 {
                    let fine = discretize_monotone(&pred, m / 2)
                        .unwrap()
                        .refine(2)
                        .unwrap();
                    let fine = fine.indicator();
                    assert_eq!(fine.intersect(&a.indicator()).unwrap(), fine);
                }
            }
        }
    }

    #[test]
    fn grid_function_validation() {
        assert!(GridFunction::new(2, vec![int(1), int(1), int(1), int(-1)], false).is_err());
        assert!(GridFunction::new(2, vec![int(0), int(1), int(0), int(0)], true).is_err());
        let f = GridFunction::new(2, vec![int(2), int(1), int(1), int(0)], true).unwrap();
        assert_eq!(f.expect(), int(1));
        let g = GridFunction::from_staircase(&s(2, &[2, 1]));
        assert_eq!(g.expect(), rat(3, 4));
        assert_eq!(f.add(&g).unwrap().expect(), rat(7, 4));
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"m":2,"values":[["2/1","1/1"],["1/1","0/1"]],"monotone":true}"#
        );
        let back: GridFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
