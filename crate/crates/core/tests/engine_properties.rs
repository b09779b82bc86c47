use fkg_core::engine::{
    e_sigma, en_constant_closed_form, en_naive, en_partition, en_recursive, permutations_by_cycles,
    GridFunctionOracle, RectangleOracle, Restricted, StaircaseOracle,
};
use fkg_core::lattice::{GridFunction, RectangleFamily, StaircaseSeq};
use fkg_core::rational::{int, rat};
use fkg_core::verify::{random_staircase, seeded_rng};
use fkg_core::Rational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

fn staircases(m: usize, n: usize, seed: u64) -> Vec<StaircaseSeq> {
    let mut rng = seeded_rng(seed);
    (0..n).map(|_| random_staircase(m, &mut rng)).collect()
}

fn random_grid_function(m: usize, rng: &mut impl Rng) -> GridFunction {
    let values = (0..m * m)
        .map(|_| rat(rng.gen_range(0..6), rng.gen_range(1..4)))
        .collect();
    GridFunction::new(m, values, false).unwrap()
}

// Independent oracle: E_n straight from the definition, cycle supports
// multiplied out cell by cell without the moment table.
fn en_by_cells(seqs: &[StaircaseSeq]) -> Rational {
    let n = seqs.len();
    let m = seqs[0].m();
    let moment = |idx: &[usize]| -> Rational {
        let mut count = 0i64;
        for i in 1..=m {
            for j in 1..=m {
                if idx.iter().all(|&k| seqs[k].contains(i, j)) {
                    count += 1;
                }
            }
        }
        rat(count, (m * m) as i64)
    };
    let mut total = Rational::zero();
    for sigma in permutations_by_cycles(n).unwrap() {
        let mut term = Rational::from_integer(1.into());
        for cycle in sigma.cycles() {
            term *= moment(cycle);
        }
        if sigma.cycle_count() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn backends_agree(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=5) {
        let oracle = StaircaseOracle::new(staircases(m, n, seed)).unwrap();
        let a = en_naive(&oracle).unwrap().value;
        let b = en_partition(&oracle).unwrap().value;
        let c = en_recursive(&oracle).unwrap().value;
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
    }

    #[test]
    fn matches_cellwise_definition(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=4) {
        let seqs = staircases(m, n, seed);
        let oracle = StaircaseOracle::new(seqs.clone()).unwrap();
        prop_assert_eq!(en_partition(&oracle).unwrap().value, en_by_cells(&seqs));
    }

    #[test]
    fn symmetric_under_relabeling(seed in any::<u64>(), n in 2usize..=6) {
        let oracle = StaircaseOracle::new(staircases(4, n, seed)).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed % n as u64) as usize);
        perm.swap(0, n - 1);
        let permuted = Restricted::new(&oracle, perm).unwrap();
        prop_assert_eq!(en_partition(&oracle).unwrap().value, en_partition(&permuted).unwrap().value);
    }

    #[test]
    fn multilinear_in_each_argument(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = seeded_rng(seed);
        let m = 3;
        let g = random_grid_function(m, &mut rng);
        let h = random_grid_function(m, &mut rng);
        let rest: Vec<GridFunction> = (1..n).map(|_| random_grid_function(m, &mut rng)).collect();
        let with = |first: GridFunction| {
            let mut fs = vec![first];
            fs.extend(rest.iter().cloned());
            en_partition(&GridFunctionOracle::new(fs).unwrap()).unwrap().value
        };
        let c = rat(2, 3);
        prop_assert_eq!(with(g.add(&h).unwrap()), with(g.clone()) + with(h));
        prop_assert_eq!(with(g.scale(&c).unwrap()), &c * with(g));
    }

    #[test]
    fn covariance_of_staircases_is_nonnegative(seed in any::<u64>(), m in 1usize..=8) {
        let oracle = StaircaseOracle::new(staircases(m, 2, seed)).unwrap();
        prop_assert!(!en_partition(&oracle).unwrap().value.is_negative());
    }

    #[test]
    fn staircase_functionals_are_nonnegative(seed in any::<u64>(), n in 3usize..=6, m in 1usize..=6) {
        let oracle = StaircaseOracle::new(staircases(m, n, seed)).unwrap();
        prop_assert!(!en_partition(&oracle).unwrap().value.is_negative());
    }

    #[test]
    fn intervals_match_closed_form(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = seeded_rng(seed);
        let mut alphas: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(0..=12), 12)).collect();
        alphas.sort();
        let rects = alphas.iter().map(|a| vec![a.clone()]).collect();
        let fam = RectangleFamily::new(1, rects).unwrap();
        let value = en_naive(&RectangleOracle::new(fam).unwrap()).unwrap().value;
        prop_assert_eq!(value, en_constant_closed_form(&alphas).unwrap());
    }

    #[test]
    fn planar_rectangles_match_staircases(seed in any::<u64>(), n in 1usize..=5) {
        let m = 4;
        let mut rng = seeded_rng(seed);
        let mut rects = Vec::new();
        let mut seqs = Vec::new();
        for _ in 0..n {
            let (p, q) = (rng.gen_range(0..=m), rng.gen_range(0..=m));
            rects.push(vec![rat(p as i64, m as i64), rat(q as i64, m as i64)]);
            let a: Vec<usize> = (0..m).map(|i| if i < p { q } else { 0 }).collect();
            seqs.push(StaircaseSeq::new(m, a).unwrap());
        }
        let fam = RectangleFamily::new(2, rects).unwrap();
        let r = en_partition(&RectangleOracle::new(fam).unwrap()).unwrap().value;
        let s = en_partition(&StaircaseOracle::new(seqs).unwrap()).unwrap().value;
        prop_assert_eq!(&r, &s);
        prop_assert!(!r.is_negative());
    }
}

#[test]
fn e_sigma_of_identity_is_product_of_means() {
    let seqs = staircases(3, 3, 7);
    let oracle = StaircaseOracle::new(seqs.clone()).unwrap();
    let id = permutations_by_cycles(3).unwrap().next().unwrap();
    assert_eq!(id.cycle_count(), 3);
    let expected: Rational = seqs.iter().map(StaircaseSeq::expect).product();
    assert_eq!(e_sigma(&oracle, &id).unwrap(), expected);
}

#[test]
fn unit_functions_vanish_beyond_two() {
    for n in 2..=6 {
        let ones = vec![StaircaseSeq::full(3); n];
        let v = en_partition(&StaircaseOracle::new(ones).unwrap())
            .unwrap()
            .value;
        assert_eq!(v, int(0), "n = {n}");
    }
}
