mod support;

use ncagm::ncpoly::distinct_product_sum;
use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn free_algebra_laws(case in algebra_case()) {
        check_algebra_laws(case)?;
    }

    #[test]
    fn evaluation_is_multiplicative(
        n in 1usize..4,
        dim in 1usize..4,
        a in terms(),
        b in terms(),
        vals in prop::collection::vec(-1.0f64..1.0, 48),
    ) {
        let (p, r) = (poly(n, a), poly(n, b));
        let mats: Vec<_> = (0..n).map(|i| sym(dim, &vals[i * 16..])).collect();
        let lhs = to_f64(&(&p * &r)).evaluate(&mats).unwrap();
        let rhs = to_f64(&p).evaluate(&mats).unwrap() * to_f64(&r).evaluate(&mats).unwrap();
        prop_assert!((&lhs - &rhs).amax() <= 1e-9 * (1.0 + rhs.amax()));
        // on symmetric inputs the polynomial transpose is the matrix transpose
        let t = to_f64(&p.transpose()).evaluate(&mats).unwrap();
        let e = to_f64(&p).evaluate(&mats).unwrap().transpose();
        prop_assert!((&t - &e).amax() <= 1e-9 * (1.0 + e.amax()));
    }

    #[test]
    fn distinct_sum_counts(pair in degree_pair(6)) {
        check_distinct_counts(pair)?;
    }
}

#[test]
fn distinct_sum_rejects_bad_degrees() {
    assert!(distinct_product_sum::<f64>(0, 3).is_err());
    assert!(distinct_product_sum::<f64>(4, 3).is_err());
}
