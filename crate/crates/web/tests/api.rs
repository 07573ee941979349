use mrs_web::{one_or_all_report, rate_curve_report, sweep_report};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn one_or_all_reports_witness_when_feasible() {
    let v = parse(one_or_all_report("1, 1", "1", "1/2, 1/2").unwrap());
    assert_eq!(v["feasible"], true);
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
    let v = parse(one_or_all_report("1,1", "2", "1,1").unwrap());
    assert_eq!(v["feasible"], false);
    assert!(v.get("witness").is_none());
    assert!(one_or_all_report("1,x", "1", "0,0")
        .unwrap_err()
        .starts_with("w:"));
}

#[test]
fn rate_curve_of_multiplexed_function_is_tight() {
    let v = parse(rate_curve_report("1/3, 1", "1/4, 1/2").unwrap());
    assert_eq!(v["integral"]["exact"], "1");
    assert_eq!(v["achievable"], true);
    let atoms = v["atoms"].as_array().unwrap();
    let mass: f64 = atoms
        .iter()
        .map(|a| a["probability"]["value"].as_f64().unwrap())
        .sum();
    assert!((mass - 1.0).abs() < 1e-12);
    let v = parse(rate_curve_report("1/2", "3/4").unwrap());
    assert_eq!(v["achievable"], false);
}

#[test]
fn sweep_report_tracks_theory_at_full_capacity() {
    let v = parse(sweep_report(16, 32, 0, 4, 2000, 2, 1).unwrap());
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 4);
    let last = &pts[3];
    assert_eq!(last["c"], 1.0);
    assert_eq!(last["theory"], 0.5);
    assert!((last["mean_strict_rate"].as_f64().unwrap() - 0.5).abs() < 0.02);
    assert!(sweep_report(16, 32, 0, 0, 2000, 2, 1).is_err());
}
