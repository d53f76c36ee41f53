use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdsopt"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn cdsopt")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "cdsopt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Table {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header = rdr.headers().unwrap().iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|r| r.unwrap().iter().map(String::from).collect())
            .collect();
        Table { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    fn f(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }

    fn column(&self, name: &str) -> Vec<f64> {
        (0..self.rows.len()).map(|i| self.f(i, name)).collect()
    }
}

fn assert_matches_golden(actual: &str, golden: &str) {
    let a = Table::parse(actual);
    let g = Table::parse(&std::fs::read_to_string(fixture(golden)).unwrap());
    assert_eq!(a.header, g.header, "{golden}: header");
    assert_eq!(a.rows.len(), g.rows.len(), "{golden}: row count");
    for (i, (ra, rg)) in a.rows.iter().zip(&g.rows).enumerate() {
        for (j, (x, y)) in ra.iter().zip(rg).enumerate() {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!(
                (x - y).abs() <= 1e-9 * (1.0 + y.abs()),
                "{golden} row {i} col {}: {x} vs {y}",
                g.header[j]
            );
        }
    }
}

fn cfg(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn fig1_density_golden() {
    let out = ok_stdout(&["recovery", "--config", &cfg("fig1.json")]);
    assert_matches_golden(&out, "fig1.csv");
}

#[test]
fn fig2_strike_scan_golden() {
    let out = ok_stdout(&["single", "--config", &cfg("fig2.json")]);
    assert_matches_golden(&out, "fig2.csv");
}

#[test]
fn fig3_strike_scan_golden() {
    let out = ok_stdout(&["single", "--config", &cfg("fig3.json")]);
    assert_matches_golden(&out, "fig3.csv");
}

#[test]
fn fig2_scan_shape() {
    let t = Table::parse(&ok_stdout(&["single", "--config", &cfg("fig2.json")]));
    let n = t.rows.len();
    assert_eq!(n, 11);
    // all-running end: knockout payer and receiver coincide at the forward
    assert!((t.f(0, "ko_payer_bp") - t.f(0, "ko_receiver_bp")).abs() < 1e-9);
    assert_eq!(t.f(0, "upfront_strike_pct"), 0.0);
    assert_eq!(t.f(n - 1, "running_strike_bp"), 0.0);
    // moving strike into upfront lowers both sides, receivers more
    let dp = t.f(0, "ko_payer_bp") - t.f(n - 1, "ko_payer_bp");
    let dr = t.f(0, "ko_receiver_bp") - t.f(n - 1, "ko_receiver_bp");
    assert!(dp > 0.0 && dr > dp, "dp={dp} dr={dr}");
    for i in 0..n {
        assert!(t.f(i, "nko_payer_bp") > t.f(i, "ko_payer_bp"));
        assert!(t.f(i, "nko_receiver_bp") >= t.f(i, "ko_receiver_bp") - 1e-9);
    }
}

#[test]
fn single_point_scan_gives_one_row() {
    let t = Table::parse(&ok_stdout(&[
        "single",
        "--config",
        &cfg("fig2.json"),
        "--scan",
        "500:500:0",
    ]));
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.f(0, "running_strike_bp"), 500.0);
}

#[test]
fn scan_outside_total_strike_is_config_error() {
    let out = run(&["single", "--config", &cfg("fig2.json"), "--scan", "0:900:3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let out = run(&["single", "--config", &cfg("fig2.json"), "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_matches_golden(&std::fs::read_to_string(path).unwrap(), "fig2.csv");
}

#[test]
fn density_integrates_to_one() {
    let t = Table::parse(&ok_stdout(&["recovery", "--config", &cfg("fig1.json")]));
    let x = t.column("recovery");
    assert_eq!((x[0], x[x.len() - 1]), (0.0, 1.0));
    for name in ["density_b0.5", "density_b0.6", "density_b0.7"] {
        let y = t.column(name);
        let area: f64 = (1..x.len()).map(|i| 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1])).sum();
        assert!((area - 1.0).abs() < 1e-4, "{name}: {area}");
    }
}

#[test]
fn ig13_index_parity() {
    let t = Table::parse(&ok_stdout(&["index", "--config", &cfg("ig13.json")]));
    assert_eq!(t.rows.len(), 8);
    for i in 0..t.rows.len() {
        assert!(t.f(i, "parity_residual").abs() < 1e-12);
        assert!(t.f(i, "payer_bp") > 0.0 && t.f(i, "receiver_bp") > 0.0);
    }
    let payer = t.column("payer_bp");
    assert!(
        payer.windows(2).all(|w| w[1] < w[0]),
        "payer not decreasing in strike: {payer:?}"
    );
}

#[test]
fn hy13_price_quoted_index() {
    let t = Table::parse(&ok_stdout(&["index", "--config", &cfg("hy13.json")]));
    assert_eq!(t.rows.len(), 5);
    // price strikes: a payer pays off when the price falls below the strike
    let payer = t.column("payer_bp");
    assert!(
        payer.windows(2).all(|w| w[1] > w[0]),
        "HY payer not increasing in price strike: {payer:?}"
    );
    for i in 0..t.rows.len() {
        assert!(t.f(i, "parity_residual").abs() < 1e-12);
    }
}

#[test]
fn implied_vol_round_trip_and_row_errors() {
    let prices = Table::parse(&ok_stdout(&[
        "index",
        "--config",
        &cfg("ig13.json"),
        "--scan",
        "100:100:0",
    ]));
    let payer = prices.f(0, "payer_bp");
    let dir = tempfile::tempdir().unwrap();
    let quotes = dir.path().join("quotes.csv");
    std::fs::write(
        &quotes,
        format!("strike,side,premium_bp\n100,payer,{payer}\n70,payer,0.01\n100,payer,100000\n"),
    )
    .unwrap();
    let t = Table::parse(&ok_stdout(&[
        "index",
        "--config",
        &cfg("ig13.json"),
        "--mode",
        "implied-vol",
        "--quotes",
        quotes.to_str().unwrap(),
    ]));
    assert_eq!(t.rows.len(), 3);
    assert!((t.f(0, "implied_pv_vol") - 0.45).abs() < 1e-8);
    let err = t.col("error");
    assert!(t.rows[1][err].contains("intrinsic"), "{:?}", t.rows[1]);
    assert!(t.rows[2][err].contains("cap"), "{:?}", t.rows[2]);
    assert!(t.rows[1][t.col("implied_pv_vol")].is_empty());
}

#[test]
fn implied_vol_needs_quotes() {
    let out = run(&["index", "--config", &cfg("ig13.json"), "--mode", "implied-vol"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn recovery_fit_on_hy9() {
    let t = Table::parse(&ok_stdout(&[
        "recovery",
        "--config",
        &cfg("fig1.json"),
        "--mode",
        "fit",
        "--samples",
        &cfg("hy9_recoveries.csv"),
    ]));
    let b = t.f(0, "b");
    assert!((0.60..=0.90).contains(&b), "b = {b}");
    // 5% Kolmogorov-Smirnov critical value for n = 9
    assert!(t.f(0, "ks") < 0.43);

    let fixed = Table::parse(&ok_stdout(&[
        "recovery",
        "--config",
        &cfg("fig1.json"),
        "--mode",
        "fit",
        "--samples",
        &cfg("hy9_recoveries.csv"),
        "--fixed-mean",
        "0.175",
    ]));
    assert!((fixed.f(0, "mean") - 0.175).abs() < 1e-9);
    let b = fixed.f(0, "b");
    assert!((0.60..=0.90).contains(&b), "b = {b}");
}

#[test]
fn recovery_price_parity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rec.json");
    std::fs::write(
        &path,
        r#"{"valuation_date": "2009-11-09", "expiry": "2010-03-20", "maturity": "2014-12-20",
            "riskfree_rate": 0.03, "spot_spread_bp": 500, "marking_recovery": 0.4,
            "recovery": {"mean": 0.4, "b": 0.6, "strikes": [0.1, 0.3, 0.4, 0.6, 0.9]}}"#,
    )
    .unwrap();
    let t = Table::parse(&ok_stdout(&[
        "recovery",
        "--config",
        path.to_str().unwrap(),
        "--mode",
        "price",
    ]));
    assert!(!t.rows.is_empty());
    for i in 0..t.rows.len() {
        let lhs = t.f(i, "call_expect") - t.f(i, "put_expect");
        let rhs = 0.4 - t.f(i, "strike");
        assert!((lhs - rhs).abs() < 1e-10, "row {i}: {lhs} vs {rhs}");
    }
}

#[test]
fn copula_sample_is_deterministic() {
    let a = ok_stdout(&["copula-sample", "--config", &cfg("copula.json")]);
    let b = ok_stdout(&["copula-sample", "--config", &cfg("copula.json")]);
    let c = ok_stdout(&["copula-sample", "--config", &cfg("copula.json"), "--seed", "43"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let t = Table::parse(&a);
    assert_eq!(t.rows.len(), 1000);
    let (d, r) = (t.col("defaulted"), t.col("recovery"));
    for row in &t.rows {
        assert_eq!(row[d] == "true", !row[r].is_empty());
    }
}

#[test]
fn validate_writes_agreeing_reports() {
    let out = ok_stdout(&["validate", "--config", &cfg("ig13.json"), "--paths", "200000"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let reports = v.as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        assert_eq!(r["agrees"], true, "{r}");
    }
}

#[test]
fn missing_config_exits_2() {
    let out = run(&["single", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_field_exits_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"valuation_date": "2009-11-09", "expiry": "2010-03-20", "maturity": "2014-12-20",
            "riskfree_rate": 0.03, "spot_spread_bp": "wide"}"#,
    )
    .unwrap();
    let out = run(&["single", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spot_spread_bp"));
}

#[test]
fn degenerate_index_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(
        &path,
        r#"{"valuation_date": "2009-11-09", "expiry": "2010-03-20", "maturity": "2014-12-20",
            "riskfree_rate": 0.03,
            "index": {"n00": 100, "n0": 100, "nt": 100, "coupon_bp": 0, "price": 100,
                      "recovery": 0.3, "pv_vol": 0.3, "strikes": [100]}}"#,
    )
    .unwrap();
    let out = run(&["index", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
