use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};
use varscale_core::statfun::{chisq_cdf, chisq_quantile, normal_cdf, normal_quantile, t_cdf, t_quantile};

#[test]
fn paper_critical_values_to_three_decimals() {
    for (q, df, expect) in [(0.95, 1.0, 3.841), (0.95, 2.0, 5.991), (0.99, 1.0, 6.635), (0.99, 2.0, 9.210)] {
        let c = chisq_quantile(q, df).unwrap();
        assert_eq!(format!("{c:.3}"), format!("{expect:.3}"));
    }
}

#[test]
fn normal_extreme_tail() {
    let z = normal_quantile(1e-10).unwrap();
    assert!((z + 6.361_340_902_404_056).abs() < 1e-9);
    assert!(normal_quantile(0.0).is_err());
    // high-precision reference values
    for (q, z) in [
        (1e-8, -5.612_001_244_174_789),
        (0.001, -3.090_232_306_167_813),
        (0.01, -2.326_347_874_040_840_8),
        (0.05, -1.644_853_626_951_472_9),
        (0.3, -0.524_400_512_708_040_9),
        (0.975, 1.959_963_984_540_054),
    ] {
        let got = normal_quantile(q).unwrap();
        assert!((got - z).abs() <= 1e-13 * z.abs(), "q {q}: {got} vs {z}");
    }
    assert!(normal_quantile(1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn normal_matches_statrs(q in 1e-12f64..(1.0 - 1e-12)) {
        let n = Normal::new(0.0, 1.0).unwrap();
        let z = normal_quantile(q).unwrap();
        // statrs' own CDF is good to roughly 1e-10 relative
        prop_assert!((n.cdf(z) - q).abs() <= 1e-9 * q.min(1.0 - q) + 1e-15, "q {q} z {z}");
        prop_assert!((normal_cdf(z) - n.cdf(z)).abs() <= 1e-9 * n.cdf(z).min(n.sf(z)) + 1e-15);
    }

    #[test]
    fn t_quantile_inverts_statrs_cdf(q in 1e-6f64..(1.0 - 1e-6), v in 2.05f64..200.0) {
        let d = StudentsT::new(0.0, 1.0, v).unwrap();
        let x = t_quantile(q, v).unwrap();
        let back = d.cdf(x);
        prop_assert!((back - q).abs() <= 1e-10 * q.min(1.0 - q).max(1e-3), "q {q} v {v} x {x} back {back}");
        prop_assert!((t_cdf(x, v) - back).abs() < 1e-11);
    }

    #[test]
    fn t_quantile_heavy_tails(q in 1e-4f64..0.5, v in 0.6f64..2.05) {
        let x = t_quantile(q, v).unwrap();
        prop_assert!(x <= 0.0);
        let back = t_cdf(x, v);
        prop_assert!((back - q).abs() <= 1e-10 * q.max(1e-3));
    }

    #[test]
    fn chisq_matches_statrs(q in 1e-6f64..(1.0 - 1e-6), df in 0.5f64..60.0) {
        let d = ChiSquared::new(df).unwrap();
        let x = chisq_quantile(q, df).unwrap();
        prop_assert!((d.cdf(x) - q).abs() < 1e-9, "q {q} df {df} x {x}");
        prop_assert!((chisq_cdf(x, df) - d.cdf(x)).abs() < 1e-10);
    }

    #[test]
    fn t_quantile_monotone_in_probability(a in 0.001f64..0.999, b in 0.001f64..0.999, v in 2.5f64..50.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(t_quantile(lo, v).unwrap() <= t_quantile(hi, v).unwrap());
    }
}
