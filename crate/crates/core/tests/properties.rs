use proptest::prelude::*;

use discrete_pareto::estimation::{fit_mle, log_likelihood, log_likelihood_ratio};
use discrete_pareto::gof::{build_bins, chi_square_test, ks_statistic, MergeRule};
use discrete_pareto::{DgpParams, FrequencyTable, SampleSeed};

fn params() -> impl Strategy<Value = DgpParams> {
    (-2.0f64..3.5, -4.0f64..4.0, 0u64..100)
        .prop_map(|(la, ll, mu)| DgpParams::new(la.exp(), ll.exp(), mu).unwrap())
}

fn table(mu: u64) -> impl Strategy<Value = FrequencyTable> {
    prop::collection::btree_map(0u64..60, 1u64..200, 1..15).prop_map(move |m| {
        FrequencyTable::new("", m.into_iter().map(|(v, c)| (v + mu, c)).collect()).unwrap()
    })
}

/// Data drawn from a model, so fits behave like real use.
fn fitted_sample() -> impl Strategy<Value = FrequencyTable> {
    (1.0f64..12.0, -2.5f64..1.0, 0u64..6, 200usize..1500, any::<u64>()).prop_map(
        |(alpha, ll, mu, n, seed)| {
            let d = DgpParams::new(alpha, ll.exp(), mu).unwrap();
            FrequencyTable::from_values("", d.sample(n, SampleSeed(seed)).unwrap()).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quantile_is_the_least_point_reaching_the_level(d in params(), gamma in 1e-9f64..0.999_999) {
        let q = d.quantile(gamma).unwrap();
        prop_assume!(q < 1 << 52);
        let q = q as i64;
        prop_assert!(d.cdf(q) >= gamma);
        prop_assert!(q == d.mu() as i64 || d.cdf(q - 1) < gamma);
    }

    #[test]
    fn pmf_is_survival_difference(d in params(), k in 0i64..10_000) {
        let x = d.mu() as i64 + k;
        let diff = d.survival(x).unwrap() - d.survival(x + 1).unwrap();
        prop_assert!((d.pmf(x) - diff).abs() <= 1e-15);
        prop_assert!(d.pmf(x) >= 0.0);
        prop_assert_eq!(d.pmf(d.mu() as i64 - 1), 0.0);
    }

    #[test]
    fn samples_stay_on_the_support(d in params(), seed in any::<u64>()) {
        let xs = d.sample(200, SampleSeed(seed)).unwrap();
        prop_assert!(xs.iter().all(|&x| x >= d.mu()));
        prop_assert_eq!(xs, d.sample(200, SampleSeed(seed)).unwrap());
    }

    #[test]
    fn likelihood_ratio_matches_difference(d in params(), e in params(), data in table(0)) {
        let d = d.with_mu(0).unwrap();
        let e = e.with_mu(0).unwrap();
        let direct = log_likelihood(&e, &data).unwrap() - log_likelihood(&d, &data).unwrap();
        let ratio = log_likelihood_ratio(&e, &d, &data).unwrap();
        let scale = log_likelihood(&d, &data).unwrap().abs().max(1.0);
        prop_assert!((direct - ratio).abs() <= 1e-10 * scale, "{} vs {}", direct, ratio);
    }

    #[test]
    fn ks_statistic_is_bounded(d in params(), data in table(0)) {
        let d = d.with_mu(0).unwrap();
        let k = ks_statistic(&d, &data).unwrap();
        let n = data.total() as f64;
        prop_assert!(k >= 0.0 && k / n.sqrt() <= 1.0);
    }

    #[test]
    fn bins_partition_the_support(d in params(), data in table(0), expected_rule in any::<bool>()) {
        let d = d.with_mu(data.min_value()).unwrap();
        let rule = if expected_rule { MergeRule::Expected } else { MergeRule::Observed };
        let Ok(spec) = build_bins(&d, &data, rule) else { return Ok(()) };
        prop_assert_eq!(spec.bins[0].lo, d.mu());
        prop_assert!(spec.bins.last().unwrap().hi.is_none());
        for w in spec.bins.windows(2) {
            prop_assert_eq!(w[0].hi, Some(w[1].lo));
        }
        let observed: u64 = spec.bins.iter().map(|b| b.observed).sum();
        let expected: f64 = spec.bins.iter().map(|b| b.expected).sum();
        prop_assert_eq!(observed, data.total());
        prop_assert!((expected - data.total() as f64).abs() < 1e-6);
    }

    #[test]
    fn chi_square_is_shift_invariant(d in params(), data in table(0), c in 1u64..1000) {
        let d = d.with_mu(0).unwrap();
        let shifted = d.with_mu(c).unwrap();
        let a = chi_square_test(&d, &data, 2, MergeRule::Observed);
        let b = chi_square_test(&shifted, &data.shifted(c), 2, MergeRule::Observed);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.df, b.df);
                prop_assert_eq!(a.statistic, b.statistic);
                prop_assert!(a.statistic >= 0.0);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "shift changed whether the test is defined"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_is_shift_equivariant(data in fitted_sample(), c in 1u64..500) {
        let a = fit_mle(&data, None).unwrap();
        let b = fit_mle(&data.shifted(c), None).unwrap();
        prop_assert_eq!(a.params.alpha(), b.params.alpha());
        prop_assert_eq!(a.params.lambda(), b.params.lambda());
        prop_assert_eq!(a.params.mu() + c, b.params.mu());
    }

    #[test]
    fn accepted_iterates_never_lose_likelihood(data in fitted_sample()) {
        let fit = fit_mle(&data, None).unwrap();
        prop_assert!(fit.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn converged_fits_are_stationary(data in fitted_sample()) {
        let fit = fit_mle(&data, None).unwrap();
        if fit.converged {
            let n = data.total() as f64;
            prop_assert!(fit.gradient[0].hypot(fit.gradient[1]) / n < 1e-6);
            prop_assert!(fit.standard_errors.is_some());
        }
    }
}
