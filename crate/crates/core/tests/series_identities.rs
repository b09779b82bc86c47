use fkg_core::engine::{en_naive, en_partition, GridFunctionOracle};
use fkg_core::lattice::{GridFunction, StaircaseSeq};
use fkg_core::rational::{factorial, rat};
use fkg_core::series::{
    en_equal, extract_en_via_series, geometric_mean_coeffs, series_exp, series_log, GridSeries,
    PrimesEncoding, TruncatedSeries,
};
use fkg_core::verify::{random_staircase, seeded_rng};
use fkg_core::{Error, Rational};
use rand::Rng;

fn staircase_fn(m: usize, rng: &mut impl Rng) -> GridFunction {
    GridFunction::from_staircase(&random_staircase(m, rng))
}

fn en_of(fs: Vec<GridFunction>) -> Rational {
    en_partition(&GridFunctionOracle::new(fs).unwrap())
        .unwrap()
        .value
}

#[test]
fn equal_argument_formula_matches_partition_backend() {
    let mut rng = seeded_rng(11);
    for _ in 0..6 {
        let values = (0..9)
            .map(|_| rat(rng.gen_range(0..5), rng.gen_range(1..4)))
            .collect();
        let f = GridFunction::new(3, values, false).unwrap();
        for n in 1..=6 {
            assert_eq!(
                en_equal(&f, n).unwrap(),
                en_of(vec![f.clone(); n]),
                "n = {n}"
            );
        }
    }
}

#[test]
fn single_function_coefficients_are_scaled_functionals() {
    let mut rng = seeded_rng(12);
    for _ in 0..4 {
        let f = staircase_fn(3, &mut rng);
        let c = geometric_mean_coeffs(std::slice::from_ref(&f), 6).unwrap();
        for n in 1..=6 {
            let expected = en_of(vec![f.clone(); n]) / Rational::from_integer(factorial(n));
            assert_eq!(c[n - 1], expected, "n = {n}");
        }
    }
}

// With F = 1 − f t − g t², the t³ coefficient collects E_2(f, g) from the
// two orderings of (1, 2) and E_3(f, f, f)/3! from (1, 1, 1).
#[test]
fn two_function_coefficient_expands_over_compositions() {
    let mut rng = seeded_rng(13);
    for _ in 0..4 {
        let f = staircase_fn(3, &mut rng);
        let g = staircase_fn(3, &mut rng);
        let c = geometric_mean_coeffs(&[f.clone(), g.clone()], 3).unwrap();
        assert_eq!(c[0], f.expect());
        let c2 = en_of(vec![g.clone()]) + en_of(vec![f.clone(), f.clone()]) / rat(2, 1);
        assert_eq!(c[1], c2);
        let c3 = en_of(vec![f.clone(), g.clone()]) + en_of(vec![f.clone(); 3]) / rat(6, 1);
        assert_eq!(c[2], c3);
    }
}

#[test]
fn primes_encoding_targets() {
    let cases = [
        (2, vec![3, 2], 5),
        (3, vec![15, 10, 6], 31),
        (4, vec![105, 70, 42, 30], 247),
    ];
    for (n, ks, target) in cases {
        let enc = PrimesEncoding::new(n).unwrap();
        assert_eq!(enc.exponents, ks);
        assert_eq!(enc.target, target);
        assert_eq!(enc.solutions(), vec![vec![1; n]]);
    }
}

#[test]
fn extraction_matches_naive_backend() {
    let mut rng = seeded_rng(14);
    for n in [2, 3] {
        for _ in 0..3 {
            let fs: Vec<GridFunction> = (0..n).map(|_| staircase_fn(3, &mut rng)).collect();
            let naive = en_naive(&GridFunctionOracle::new(fs.clone()).unwrap())
                .unwrap()
                .value;
            assert_eq!(extract_en_via_series(&fs, false).unwrap(), naive);
        }
    }
}

#[test]
fn extraction_cap_is_enforced() {
    let f = GridFunction::from_staircase(&StaircaseSeq::full(2));
    let err = extract_en_via_series(&vec![f; 4], false).unwrap_err();
    assert!(matches!(err, Error::CapExceeded { .. }));
}

#[test]
fn log_of_grid_series_matches_cellwise_log() {
    let mut rng = seeded_rng(15);
    let f = staircase_fn(2, &mut rng);
    let g = staircase_fn(2, &mut rng);
    let s = GridSeries::one_minus(&[(1, &f), (2, &g)], 5).unwrap();
    let l = s.log().unwrap();
    for i in 1..=2 {
        for j in 1..=2 {
            let direct = series_log(s.cell(i, j)).unwrap();
            assert_eq!(l.cell(i, j), &direct);
            assert_eq!(&series_exp(&direct).unwrap(), s.cell(i, j));
        }
    }
    let averaged = s.expect_log().unwrap();
    let mut total = TruncatedSeries::zero(5);
    for i in 1..=2 {
        for j in 1..=2 {
            total = total.add(l.cell(i, j)).unwrap();
        }
    }
    assert_eq!(averaged, total.scale(&rat(1, 4)));
}
