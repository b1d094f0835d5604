use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use varscale_core::simgen::business_days;

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["varscale"];
    full.extend_from_slice(args);
    varscale_cli::run(full)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, name: &str, kind: &str, n: usize, seed: u64) -> PathBuf {
    let code = run(&[
        "simulate", "--kind", kind, "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", s(dir), "--name", name,
    ]);
    assert_eq!(code, 0);
    dir.join(format!("{name}.csv"))
}

fn lines(p: &Path) -> Vec<String> {
    std::fs::read_to_string(p).unwrap().lines().map(str::to_string).collect()
}

fn write_prices(path: &Path, start: NaiveDate, prices: &[f64]) {
    let mut text = String::from("date,price\n");
    for (d, p) in business_days(start, prices.len()).iter().zip(prices) {
        text.push_str(&format!("{},{p}\n", d.format("%Y-%m-%d")));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn simulate_writes_requested_length_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    simulate(&a, "sim", "iid-normal", 100_000, 9);
    simulate(&b, "sim", "iid-normal", 100_000, 9);
    let returns = lines(&a.join("sim_returns.csv"));
    assert_eq!(returns.len(), 100_001);
    for f in ["sim_returns.csv", "sim.csv", "sim_spec.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(lines(&a.join("sim.csv")).len(), 100_002);
}

#[test]
fn simulate_rejects_explosive_garch() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run(&[
        "simulate", "--kind", "garch-normal", "--n", "100", "--alpha", "0.2", "--beta", "0.8", "--out", s(tmp.path()),
    ]);
    assert_eq!(code, 1);
    assert!(!tmp.path().join("sim.csv").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["var", "--methods", "HS,EWMA"]), 1);
    assert_eq!(run(&["var", "--confidence", "1.5", "--input", "x.csv"]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn stats_tables_and_bad_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(&tmp.path().join("data"), "idx", "garch-t", 700, 1);
    let out = tmp.path().join("stats");
    assert_eq!(run(&["stats", "--input", s(&input), "--out", s(&out)]), 0);
    for f in ["stats_1d.csv", "stats_10d.csv"] {
        let t = lines(&out.join(f));
        assert_eq!(t[0], "dataset,observations,mean,sd,min,max,skewness,kurtosis");
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].split(',').count(), 8);
    }
    assert!(lines(&out.join("stats_1d.csv"))[1].starts_with("idx,700,"));
    assert!(lines(&out.join("stats_10d.csv"))[1].starts_with("idx,691,"));
    assert_eq!(lines(&out.join("stats_tests.csv")).len(), 5);

    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "date,price\n2020-01-02,100\n2020-01-03,abc\n2020-01-06,101\n").unwrap();
    assert_eq!(run(&["stats", "--input", s(&bad), "--out", s(&out)]), 2);
    assert_eq!(run(&["stats", "--input", s(&tmp.path().join("missing.csv")), "--out", s(&out)]), 2);
}

#[test]
fn var_backtest_plotdata_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(&tmp.path().join("data"), "idx", "garch-t", 2610, 4);
    let fc = tmp.path().join("fc");
    let common = ["--input", s(&input), "--methods", "HS,VC-normal,VC-t", "--window", "250"];
    let mut args = vec!["var", "--out", s(&fc)];
    args.extend_from_slice(&common);
    assert_eq!(run(&args), 0);

    let forecast_files: Vec<_> = std::fs::read_dir(&fc)
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.starts_with("var__"))
        .collect();
    assert_eq!(forecast_files.len(), 3 * 2 * 2);
    let direct = lines(&fc.join("var__idx__HS__direct__0.99.csv"));
    let scaled = lines(&fc.join("var__idx__HS__scaled__0.99.csv"));
    assert_eq!(direct.len() - 1, 2601 - 250);
    assert_eq!(scaled.len() - 1, 2610 - 250);

    let bt = tmp.path().join("bt");
    let mut args = vec!["backtest", "--forecasts", s(&fc), "--out", s(&bt)];
    args.extend_from_slice(&common);
    assert_eq!(run(&args), 0);
    let long = lines(&bt.join("backtest.csv"));
    assert_eq!(long.len(), 1 + 12);
    let table = lines(&bt.join("backtest_exceedances_0.95.csv"));
    assert_eq!(
        table[0],
        "dataset,quantity,HS direct,HS scaled,VC-normal direct,VC-normal scaled,VC-t direct,VC-t scaled"
    );
    let n_row = table.iter().find(|l| l.starts_with("idx,N,")).unwrap();
    assert_eq!(n_row, "idx,N,2341,2350,2341,2350,2341,2350");
    let expected_row = table.iter().find(|l| l.starts_with("idx,expected,")).unwrap();
    assert_eq!(expected_row, "idx,expected,117,118,117,118,117,118");
    assert!(bt.join("backtest_lr_cc_0.99.csv").exists());

    let pd = tmp.path().join("pd");
    let mut args = vec!["plotdata", "--forecasts", s(&fc), "--out", s(&pd)];
    args.extend_from_slice(&common);
    assert_eq!(run(&args), 0);
    let plot = lines(&pd.join("plot__idx__HS__0.99.csv"));
    assert_eq!(plot[0], "date,realized,direct,scaled");
    assert_eq!(plot.len() - 1, 2341);
    assert!(plot[1..].iter().all(|l| l.split(',').count() == 4));
    assert!(plot[1..].windows(2).all(|w| w[0] < w[1]));
    let differ = plot[1..]
        .iter()
        .filter(|l| {
            let f: Vec<&str> = l.split(',').collect();
            f[2] != f[3]
        })
        .count();
    assert!(differ > plot.len() / 2, "direct and scaled agree on most dates");
    assert_eq!(std::fs::read_dir(&pd).unwrap().count(), 3 * 2);
}

#[test]
fn single_method_backtest_gives_one_cell_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(&tmp.path().join("data"), "one", "iid-t", 600, 2);
    let fc = tmp.path().join("fc");
    let common = ["--input", s(&input), "--methods", "HS", "--modes", "scaled", "--confidence", "0.99"];
    let mut args = vec!["var", "--out", s(&fc)];
    args.extend_from_slice(&common);
    assert_eq!(run(&args), 0);
    let mut args = vec!["backtest", "--out", s(&fc)];
    args.extend_from_slice(&common);
    assert_eq!(run(&args), 0);
    let table = lines(&fc.join("backtest_exceedances_0.99.csv"));
    assert_eq!(table[0], "dataset,quantity,HS scaled");
    assert!(table[1..].iter().all(|l| l.split(',').count() == 3));
    assert!(!fc.join("backtest_exceedances_0.95.csv").exists());
}

#[test]
fn backtest_against_other_dates_is_an_alignment_error() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(&tmp.path().join("data"), "idx", "iid-normal", 400, 3);
    let fc = tmp.path().join("fc");
    assert_eq!(run(&["var", "--input", s(&input), "--methods", "HS", "--out", s(&fc)]), 0);

    // same dataset name, disjoint calendar
    let other_dir = tmp.path().join("other");
    std::fs::create_dir_all(&other_dir).unwrap();
    let other = other_dir.join("idx.csv");
    let prices: Vec<f64> = (0..400).map(|i| 100.0 + (i % 7) as f64).collect();
    write_prices(&other, NaiveDate::from_ymd_opt(2030, 1, 1).unwrap(), &prices);
    let out = tmp.path().join("bt");
    assert_eq!(
        run(&["backtest", "--input", s(&other), "--methods", "HS", "--forecasts", s(&fc), "--out", s(&out)]),
        2
    );
}

#[test]
fn failing_first_window_aborts_only_that_combination() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("flat.csv");
    let mut prices = vec![100.0; 300];
    let mut p: f64 = 100.0;
    for i in 0..300 {
        p *= 1.0 + 0.01 * ((i * 37 % 11) as f64 - 5.0) / 5.0;
        prices.push(p);
    }
    write_prices(&path, NaiveDate::from_ymd_opt(2010, 1, 4).unwrap(), &prices);
    let out = tmp.path().join("fc");
    let code = run(&[
        "var", "--input", s(&path), "--methods", "HS,VC-normal", "--modes", "scaled", "--confidence", "0.95",
        "--out", s(&out),
    ]);
    assert_eq!(code, 3);
    assert!(out.join("var__flat__HS__scaled__0.95.csv").exists());
    assert!(!out.join("var__flat__VC-normal__scaled__0.95.csv").exists());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("var_report.json")).unwrap()).unwrap();
    assert_eq!(report["aborted"], 1);
}

#[test]
fn garch_uses_recent_span_only() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(&tmp.path().join("data"), "long", "garch-normal", 2610, 6);
    let out = tmp.path().join("fc");
    let code = run(&[
        "var", "--input", s(&input), "--methods", "GARCH-normal", "--modes", "scaled", "--confidence", "0.99",
        "--garch-span-years", "5", "--out", s(&out),
    ]);
    assert_eq!(code, 0);
    let rows = lines(&out.join("var__long__GARCH-normal__scaled__0.99.csv"));
    let first = NaiveDate::parse_from_str(rows[1].split(',').next().unwrap(), "%Y-%m-%d").unwrap();
    let last = NaiveDate::parse_from_str(rows.last().unwrap().split(',').next().unwrap(), "%Y-%m-%d").unwrap();
    // first forecast needs a full window inside the five-year span
    assert!(first >= last - chrono::Months::new(60));
    assert!(rows.len() - 1 < 1310 - 250);

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("var_report.json")).unwrap()).unwrap();
    assert!(report["garch_orders"][0]["order"].is_string());
    assert!(report["garch_fits"][0]["summary"]["alpha"].is_number());
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(&tmp.path().join("data"), "cfg", "iid-normal", 500, 5);
    let out = tmp.path().join("fc");
    let config = tmp.path().join("run.toml");
    std::fs::write(
        &config,
        format!(
            "input = [\"{}\"]\nout = \"{}\"\nwindow = 300\nmethods = [\"HS\"]\nmodes = [\"scaled\"]\nconfidence = [0.99]\n",
            s(&input),
            s(&out)
        ),
    )
    .unwrap();
    assert_eq!(run(&["var", "--config", s(&config), "--window", "260"]), 0);
    let rows = lines(&out.join("var__cfg__HS__scaled__0.99.csv"));
    assert_eq!(rows.len() - 1, 500 - 260);
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 2);

    std::fs::write(&config, "window = 300\ncolour = \"red\"\n").unwrap();
    assert_eq!(run(&["var", "--config", s(&config), "--input", s(&input)]), 1);
}
