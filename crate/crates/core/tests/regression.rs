use plopt_core::numkit::RandomStream;
use plopt_core::objectives::{check_gradients, check_mean_squared_smoothness, LocalObjectiveSet};
use plopt_core::regression::{parse_libsvm, partitioned_regression_set, synth_regression, Loss, RegressionError};
use proptest::prelude::*;

#[test]
fn libsvm_parsing() {
    let text = "+1 1:0.5 3:-2\n-1 2:1e-1\n\n0.25 1:1 2:2 3:3\n";
    let ds = parse_libsvm(text, None).unwrap();
    assert_eq!(ds.samples(), 3);
    assert_eq!(ds.dim(), 3);
    assert_eq!(ds.labels(), &[1.0, -1.0, 0.25]);
    assert_eq!(ds.dense_row(0), vec![0.5, 0.0, -2.0]);
    assert_eq!(parse_libsvm(text, Some(5)).unwrap().dim(), 5);
    match parse_libsvm("1 1:2\n1 0:3\n", None) {
        Err(RegressionError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse_libsvm("1 2:1 1:1\n", None).is_err());
    assert!(parse_libsvm("1 2:1 2:1\n", None).is_err());
    assert_eq!(parse_libsvm("", None).unwrap().samples(), 0);
    assert!(parse_libsvm("x 1:1\n", None).is_err());
    assert!(parse_libsvm("1 1:1\n", Some(0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gradients_and_smoothness(
        m in 20usize..120,
        d in 1usize..12,
        n in 1usize..9,
        logistic in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let loss = if logistic { Loss::Logistic } else { Loss::Square };
        let data = synth_regression(m, d, 0.1, seed, loss).unwrap();
        let set = partitioned_regression_set(data, n, loss).unwrap();
        let mut rng = RandomStream::new(seed ^ 1);
        let g = check_gradients(&set, 10, 1e-6, None, &mut rng);
        prop_assert!(g.passed, "{g:?}");
        let s = check_mean_squared_smoothness(&set, 60, 1e-9, None, &mut rng);
        prop_assert!(s.passed, "{s:?}");
        prop_assert!(set.constants().f_star.known().is_none());
    }

    #[test]
    fn partition_covers_every_sample_once(m in 1usize..200, n in 1usize..40) {
        prop_assume!(n <= m);
        let data = synth_regression(m, 3, 0.0, 9, Loss::Square).unwrap();
        let set = partitioned_regression_set(data, n, Loss::Square).unwrap();
        let mut covered = 0;
        for i in 0..n {
            let b = set.block(i);
            prop_assert_eq!(b.start, covered.min(m));
            covered = b.end;
        }
        prop_assert_eq!(covered, m);
        // The average of the local objectives is the empirical risk.
        let x = [0.3, -0.2, 1.0];
        let avg = plopt_core::objectives::mean_value(&set, &x);
        prop_assert!((avg - set.empirical_risk(&x)).abs() <= 1e-12 * (1.0 + avg.abs()));
    }
}

#[test]
fn more_agents_than_samples_is_rejected() {
    let data = synth_regression(3, 2, 0.0, 1, Loss::Square).unwrap();
    assert!(partitioned_regression_set(data, 4, Loss::Square).is_err());
}
