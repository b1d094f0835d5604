use chrono::NaiveDate;
use proptest::prelude::*;
use varscale_core::market_data::{
    descriptive_stats, jarque_bera, load_prices, log_returns, mean_zero_ttest, PriceSeries,
};
use varscale_core::simgen::{generate, prices_from_returns, simulate_values, SimKind, SimOutput, SimSpec};
use varscale_core::VarError;

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2001, 1, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ten_day_return_telescopes(daily in prop::collection::vec(-0.08f64..0.08, 11..80), level in 1.0f64..5000.0) {
        let px = prices_from_returns(&daily, level, start()).unwrap();
        let r1 = log_returns(&px, 1).unwrap();
        let r10 = log_returns(&px, 10).unwrap();
        prop_assert_eq!(r10.len() + 9, r1.len());
        for (j, v) in r10.values().iter().enumerate() {
            let sum: f64 = r1.values()[j..j + 10].iter().sum();
            prop_assert!((v - sum).abs() < 1e-12);
            prop_assert_eq!(r10.dates()[j], r1.dates()[j + 9]);
        }
    }

    #[test]
    fn price_csv_round_trip(daily in prop::collection::vec(-0.05f64..0.05, 1..60)) {
        let px = prices_from_returns(&daily, 100.0, start()).unwrap();
        let mut buf = Vec::new();
        px.write_csv(&mut buf).unwrap();
        let back = load_prices(buf.as_slice()).unwrap();
        prop_assert_eq!(back, px);
    }
}

#[test]
fn malformed_rows_report_line_numbers() {
    let text = "date,price\n2020-01-02,100\n2020-01-03,abc\n";
    assert!(matches!(load_prices(text.as_bytes()), Err(VarError::MalformedRow { line: 3, .. })));
    let text = "date,price\n2020-01-02,100\n2020-01-03,-1\n";
    assert!(matches!(load_prices(text.as_bytes()), Err(VarError::NonPositivePrice { line: 3, .. })));
    let text = "date,price\n2020-01-02,100\n2020-01-02,101\n";
    assert!(matches!(load_prices(text.as_bytes()), Err(VarError::DuplicateDate(_))));
    assert!(matches!(load_prices("when,what\n".as_bytes()), Err(VarError::BadHeader { .. })));
}

#[test]
fn iid_normal_moments() {
    let v = simulate_values(&SimSpec { kind: SimKind::IidNormal { mu: 0.0, sigma: 0.01 }, n: 1_000_000, seed: 7 }).unwrap();
    let s = descriptive_stats(&v).unwrap();
    assert!((s.sd / 0.01 - 1.0).abs() < 0.005, "sd {}", s.sd);
    assert!(s.mean.abs() < 5.0 * 0.01 / 1000.0);
    assert!((s.kurtosis - 3.0).abs() < 0.05);
}

#[test]
fn normal_samples_usually_pass_normality_and_zero_mean() {
    let mut jb_rejections = 0;
    let mut t_rejections = 0;
    for seed in 0..40 {
        let v = simulate_values(&SimSpec { kind: SimKind::IidNormal { mu: 0.0, sigma: 0.01 }, n: 2500, seed }).unwrap();
        jb_rejections += usize::from(jarque_bera(&v, 0.05).unwrap().reject);
        t_rejections += usize::from(mean_zero_ttest(&v, 0.05).unwrap().reject);
    }
    assert!(jb_rejections <= 8, "{jb_rejections}");
    assert!(t_rejections <= 8, "{t_rejections}");
}

#[test]
fn garch_without_dynamics_matches_iid_moments() {
    let g = simulate_values(&SimSpec {
        kind: SimKind::GarchNormal { mu: 0.0, omega: 1e-4, alpha: 0.0, beta: 0.0 },
        n: 200_000,
        seed: 1,
    })
    .unwrap();
    let s = descriptive_stats(&g).unwrap();
    assert!((s.sd / 0.01 - 1.0).abs() < 0.01);
    assert!((s.kurtosis - 3.0).abs() < 0.1);
}

#[test]
fn garch_t_is_leptokurtic() {
    let g = simulate_values(&SimSpec {
        kind: SimKind::GarchT { mu: 0.0, omega: 1e-6, alpha: 0.08, beta: 0.90, dof: 5.0 },
        n: 20_000,
        seed: 12,
    })
    .unwrap();
    assert!(descriptive_stats(&g).unwrap().kurtosis > 3.0);
    let jb = jarque_bera(&g, 0.05).unwrap();
    assert!(jb.reject);
}

#[test]
fn simulation_is_reproducible() {
    for kind in [
        SimKind::IidNormal { mu: 0.0, sigma: 0.01 },
        SimKind::IidT { mu: 0.0, scale: 0.01, dof: 4.0 },
        SimKind::GarchNormal { mu: 0.0, omega: 1e-6, alpha: 0.1, beta: 0.85 },
        SimKind::GbmPrices { drift: 0.0, vol: 0.01, start_price: 50.0 },
    ] {
        let spec = SimSpec { kind, n: 1000, seed: 31 };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }
    let SimOutput::Prices(px) = generate(&SimSpec {
        kind: SimKind::GbmPrices { drift: 0.0, vol: 0.01, start_price: 50.0 },
        n: 10,
        seed: 1,
    })
    .unwrap() else {
        panic!("expected prices")
    };
    let _: &PriceSeries = &px;
    assert_eq!(px.len(), 11);
}
