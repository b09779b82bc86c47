use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{is_in_unit_interval, serde_pq_matrix, to_pq, Rational};

/// Down-rectangles `[0,r_1] × ⋯ × [0,r_k]` in the unit cube, one per
/// function.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawRectangles", into = "RawRectangles")]
pub struct RectangleFamily {
    k: usize,
    rects: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct RawRectangles {
    k: usize,
    #[serde(with = "serde_pq_matrix")]
    rects: Vec<Vec<Rational>>,
}

impl TryFrom<RawRectangles> for RectangleFamily {
    type Error = Error;

    fn try_from(raw: RawRectangles) -> Result<Self> {
        RectangleFamily::new(raw.k, raw.rects)
    }
}

impl From<RectangleFamily> for RawRectangles {
    fn from(f: RectangleFamily) -> Self {
        RawRectangles {
            k: f.k,
            rects: f.rects,
        }
    }
}

impl RectangleFamily {
    pub fn new(k: usize, rects: Vec<Vec<Rational>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "dimension k must be positive".into(),
            ));
        }
        for (idx, r) in rects.iter().enumerate() {
            if r.len() != k {
                return Err(Error::InvalidArgument(format!(
                    "rectangle {idx} has {} corners, expected {k}",
                    r.len()
                )));
            }
            if let Some(x) = r.iter().find(|x| !is_in_unit_interval(x)) {
                return Err(Error::InvalidArgument(format!(
                    "rectangle {idx} corner {} outside [0,1]",
                    to_pq(x)
                )));
            }
        }
        Ok(RectangleFamily { k, rects })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn rects(&self) -> &[Vec<Rational>] {
        &self.rects
    }

    /// Volume of `∩_{i∈B} R_i = ∏_j min_{i∈B} r^(i)_j`, for 0-based indices.
    pub fn intersection_volume(&self, indices: &[usize]) -> Result<Rational> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty index set".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.rects.len()) {
            return Err(Error::InvalidArgument(format!(
                "rectangle index {bad} out of range 0..{}",
                self.rects.len()
            )));
        }
        let mut vol = Rational::one();
        for axis in 0..self.k {
            let side = indices
                .iter()
                .map(|&i| &self.rects[i][axis])
                .min()
                .expect("nonempty");
            vol *= side;
        }
        Ok(vol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn volume_examples() {
        let f = RectangleFamily::new(1, vec![vec![rat(1, 2)]]).unwrap();
        assert_eq!(f.intersection_volume(&[0]).unwrap(), rat(1, 2));

        let g = RectangleFamily::new(
            2,
            vec![
                vec![rat(1, 2), int(1)],
                vec![int(1), rat(1, 3)],
                vec![int(1), int(1)],
            ],
        )
        .unwrap();
        assert_eq!(g.intersection_volume(&[0, 1]).unwrap(), rat(1, 6));
        assert_eq!(
            g.intersection_volume(&[0, 1, 2]).unwrap(),
            g.intersection_volume(&[0, 1]).unwrap()
        );
        assert!(g.intersection_volume(&[3]).is_err());
        assert!(g.intersection_volume(&[]).is_err());
    }

    #[test]
    fn validation_and_json() {
        assert!(RectangleFamily::new(1, vec![vec![rat(3, 2)]]).is_err());
        assert!(RectangleFamily::new(2, vec![vec![rat(1, 2)]]).is_err());
        let f = RectangleFamily::new(2, vec![vec![rat(1, 2), int(1)]]).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"k":2,"rects":[["1/2","1/1"]]}"#);
        assert_eq!(serde_json::from_str::<RectangleFamily>(&json).unwrap(), f);
    }

    proptest! {
        #[test]
        fn volume_shrinks_as_indices_are_added(
            corners in proptest::collection::vec(proptest::collection::vec(0i64..=8, 3), 1..6),
            extra in 0usize..6,
        ) {
            let rects = corners.iter().map(|r| r.iter().map(|&p| rat(p, 8)).collect()).collect();
            let fam = RectangleFamily::new(3, rects).unwrap();
            let n = fam.len();
            let base: Vec<usize> = (0..n.div_ceil(2)).collect();
            let mut more = base.clone();
            more.push(extra % n);
            prop_assert!(fam.intersection_volume(&more).unwrap() <= fam.intersection_volume(&base).unwrap());
        }
    }
}
