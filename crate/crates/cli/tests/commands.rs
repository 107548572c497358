use std::process::{Command, Output};

use growthprice_cli::OutputRecord;

fn growthprice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_growthprice"))
        .args(args)
        .env_remove("GROWTHPRICE_QUAD_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn table(text: &str) -> std::collections::HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(char::is_whitespace))
        .map(|(k, v)| (k.to_string(), v.trim().to_string()))
        .collect()
}

fn json_record(args: &[&str]) -> OutputRecord {
    let mut full = args.to_vec();
    full.push("--json");
    let out = growthprice(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn geometric_price_of_the_full_investment_claim() {
    let out = growthprice(&["price", "--method", "geometric", "--rate", "0.2", "--two-point", "12,1.1,0.99"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = table(&stdout(&out));
    assert_eq!(rows["price"], "9.764");
    assert_eq!(rows["z"], "1.000");
    assert_eq!(rows["branch"], "full_investment");
}

#[test]
fn martingale_price() {
    let rec = json_record(&["price", "--method", "martingale", "--rate", "0.2", "--two-point", "12,1.1,0.99"]);
    assert!((rec.price - 9.909).abs() < 1e-3);
}

#[test]
fn rational_price_with_hedge() {
    let rec = json_record(&[
        "price", "--method", "rational", "--market", "0.1,11,1,1", "--rate", "0.2", "--two-point", "108,-1",
    ]);
    assert!(rec.price.abs() < 1e-9);
    assert!((rec.diagnostics["riskless_units"] + 10.0).abs() < 1e-9);
    assert!((rec.diagnostics["risky_units"] - 10.0).abs() < 1e-9);
}

#[test]
fn martingale_price_under_market_measure() {
    // p* = 0.1/10.9 regardless of the quoted probability.
    let rec = json_record(&[
        "price", "--method", "martingale", "--market", "0.1,11,1,1", "--rate", "0.2", "--two-point", "12,1.1,0.5",
    ]);
    assert!((rec.price - 1.0).abs() < 1e-12);
}

#[test]
fn claim_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("claim.json");
    std::fs::write(&path, r#"{"type":"discrete","outcomes":[{"payoff":2.7,"prob":0.25},{"payoff":1.0,"prob":0.5},{"payoff":0.3,"prob":0.25}]}"#).unwrap();
    let rec = json_record(&["price", "--method", "geometric", "--rate", "0.05", "--claim", path.to_str().unwrap()]);
    assert!(rec.price > 0.0 && rec.price < 1.175 / 1.05);
    assert!(rec.diagnostics["growth_residual"].abs() < 1e-9);
}

#[test]
fn kelly_fraction_of_fair_coin_gamble() {
    let out = growthprice(&["kelly", "--two-point", "2.7,0.3,0.5", "--price", "1"]);
    let rows = table(&stdout(&out));
    assert_eq!(rows["z"], "0.420");
    assert_eq!(rows["growth"], "1.100");

    let overpriced = json_record(&["kelly", "--two-point", "2.7,0.3,0.5", "--price", "1000"]);
    assert_eq!((overpriced.z, overpriced.diagnostics["growth"]), (Some(0.0), 1.0));

    let constant = json_record(&["kelly", "--two-point", "5,5,0.5", "--price", "4"]);
    assert_eq!(constant.z, Some(1.0));
}

#[test]
fn lognormal_band_and_small_volatility() {
    // The band peaks near t = 1 at 1.0003366, just past the printed 1.00033.
    let rec = json_record(&["lognormal", "--r", "0.04", "--sigma", "0.4", "--c", "0.00616", "--t", "1"]);
    assert!((1.0..1.00033 + 1e-4).contains(&rec.price), "{}", rec.price);
    assert!((rec.price - 1.000_336_56).abs() < 1e-8);
    assert_eq!(rec.branch.as_deref(), Some("large_volatility"));

    let rec = json_record(&["lognormal", "--r", "0.2", "--sigma", "0.4", "--c", "0", "--t", "5", "--s0", "3"]);
    assert_eq!((rec.price, rec.z), (3.0, Some(1.0)));

    let rec = json_record(&["lognormal", "--r", "0.04", "--sigma", "0.4", "--t", "1e-6"]);
    assert!((rec.price - 1.0).abs() < 1e-4);
}

#[test]
fn quadrature_order_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_growthprice"))
        .args(["lognormal", "--r", "0.04", "--sigma", "0.4", "--t", "1", "--json"])
        .env("GROWTHPRICE_QUAD_ORDER", "48")
        .output()
        .unwrap();
    let rec: OutputRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec.diagnostics["quadrature_nodes"], 48.0);
}

#[test]
fn calibrate_appends_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cal.csv");
    let csv_arg = csv.to_str().unwrap();
    let out = growthprice(&["calibrate", "--r", "0.04", "--sigma", "0.4", "--t-max", "2", "--out", csv_arg]);
    assert_eq!(out.status.code(), Some(0));
    let c: f64 = table(&stdout(&out))["c"].parse().unwrap();
    assert!((c - 0.00616).abs() < 5e-4);
    growthprice(&["calibrate", "--r", "0.01", "--sigma", "0.5", "--t-max", "1", "--out", csv_arg]);

    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "{text}");
    assert_eq!(lines[0], "sigma,r,t_max,c,band_hi,grid_size,quadrature_nodes");
    let fields: Vec<f64> = lines[2].split(',').map(|f| f.parse().unwrap()).collect();
    assert!(fields[4] < 1.0052);
}

#[test]
fn calibrate_small_volatility_notice() {
    let out = growthprice(&["calibrate", "--r", "0.2", "--sigma", "0.4", "--t-max", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c = 0"));
    let row: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(row["c"], 0.0);
}

#[test]
fn exit_codes() {
    let no_solution = growthprice(&["price", "--method", "geometric", "--rate", "0.2", "--two-point", "2,-1,0.6"]);
    assert_eq!(no_solution.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&no_solution.stderr).contains("1.160"));

    let bad_probability = growthprice(&["price", "--method", "geometric", "--rate", "0.2", "--two-point", "2,1,1.5"]);
    assert_eq!(bad_probability.status.code(), Some(2));
    let unparsable = growthprice(&["price", "--method", "geometric", "--rate", "x", "--two-point", "2,1"]);
    assert_eq!(unparsable.status.code(), Some(2));
    let no_market = growthprice(&["price", "--method", "rational", "--rate", "0.2", "--two-point", "2,1"]);
    assert_eq!(no_market.status.code(), Some(2));
    let missing_file = growthprice(&["kelly", "--claim", "/nonexistent/claim.json", "--price", "1"]);
    assert_eq!(missing_file.status.code(), Some(2));
}

#[test]
fn json_output_round_trips() {
    let out = growthprice(&["price", "--method", "geometric", "--rate", "0.2", "--two-point", "160,-40", "--json"]);
    let raw: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rec: OutputRecord = serde_json::from_value(raw.clone()).unwrap();
    assert!((rec.price - 4.723).abs() < 1e-3);
    assert_eq!(serde_json::to_value(&rec).unwrap(), raw);
}

#[test]
fn paper_tables_reproduce_deterministically() {
    let first = growthprice(&["paper-tables", "--seed", "5"]);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    let second = growthprice(&["paper-tables", "--seed", "5"]);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    for value in ["9.764", "86.079", "9.909", "27.387", "26.834", "4.723", "0.420", "1.100", "0.00616"] {
        assert!(text.contains(value), "{value} missing");
    }

    let json = growthprice(&["paper-tables", "--json"]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&json.stdout).unwrap();
    assert!(rows.iter().all(|r| r["pass"] == true));
    assert!(rows[0].get("check_name").is_some() && rows[0].get("tolerance").is_some());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("price.json");
    let out = growthprice(&[
        "price", "--method", "martingale", "--rate", "0.2", "--two-point", "60,60", "--json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rec: OutputRecord = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rec.price, 50.0);
}
