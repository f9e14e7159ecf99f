use std::process::{Command, Output};

fn forested(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forested")).args(args).env_remove("FORESTED_PRECISION").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn coeffs_prints_cubic_records() {
    let o = forested(&["coeffs", "--p", "3", "--order", "4", "--u", "symbolic"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("(6+4u)"), "{s}");
    assert!(s.contains("(140+234u+144u²+32u³)"), "{s}");
    let v = json(&o);
    assert_eq!(v["quantity"], "series_coefficients");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["args"]["u"], "symbolic");
    let rec = v["data"]["records"].as_array().unwrap().iter().find(|r| r["n"] == 4).unwrap().clone();
    assert_eq!(rec["u_coefficients"], serde_json::json!(["140", "234", "144", "32"]));
}

#[test]
fn specialized_coefficients_are_rational_strings() {
    let o = forested(&["coeffs", "--p", "4", "--order", "3", "--u", "-1/2", "--series", "f,r"]);
    assert!(o.status.success());
    let v = json(&o);
    for r in v["data"]["records"].as_array().unwrap() {
        for c in r["u_coefficients"].as_array().unwrap() {
            assert!(c.as_str().unwrap().parse::<forested_core::exact::ExactRational>().is_ok());
        }
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["coeffs", "--p", "3", "--order", "6", "--series", "f,h,s-tilde"];
    assert_eq!(forested(&args).stdout, forested(&args).stdout);
    let args = ["radius", "--p", "4", "--u", "1/2"];
    assert_eq!(forested(&args).stdout, forested(&args).stdout);
}

#[test]
fn radius_at_minus_one() {
    let o = forested(&["radius", "--p", "4", "--u", "-1"]);
    assert!(o.status.success());
    let v = json(&o);
    let rho = v["data"]["points"][0]["rho_f64"].as_f64().unwrap();
    assert!((rho - 0.04594407).abs() < 1e-8, "{rho}");
}

#[test]
fn radius_grid_is_decreasing() {
    let o = forested(&["radius", "--p", "3", "--u", "-1,-1/2,0,1/2,1"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["data"]["strictly_decreasing_in_u"], true);
}

#[test]
fn precision_from_environment() {
    let run = |digits: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_forested"))
            .args(["radius", "--p", "4", "--u", "-1"])
            .env("FORESTED_PRECISION", digits)
            .output()
            .unwrap();
        json(&o)["config"]["precision_digits"].as_u64().unwrap()
    };
    assert_eq!(run("30"), 30);
    assert_eq!(run("80"), 80);
}

#[test]
fn verify_reports_zero_residuals() {
    let o = forested(&["verify", "--identity", "phi_second", "--identity", "pp1", "--de", "de_4valent_h", "--order", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["data"]["all_zero"], true);
    assert_eq!(v["data"]["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn csv_has_header_row() {
    let o = forested(&["mu-expand", "--p", "3", "--order", "4", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next().unwrap(), "series,n,mu_polynomial,nonnegative");
    assert!(s.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn oracle_matches_series() {
    let dir = std::env::temp_dir().join(format!("forested-dump-{}.json", std::process::id()));
    let o = forested(&["oracle", "--p", "3", "--n", "3", "--variant", "tree-rooted-activity", "--dump", dir.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(json(&o)["data"]["equal"], true);
    let dumped: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dir).unwrap()).unwrap();
    assert_eq!(dumped.as_array().unwrap().len(), 4);
    std::fs::remove_file(dir).ok();
}

#[test]
fn exit_status_for_bad_flags() {
    assert_eq!(forested(&["coeffs", "--order", "61"]).status.code(), Some(2));
    assert_eq!(forested(&["coeffs", "--p", "4", "--series", "g"]).status.code(), Some(2));
    assert_eq!(forested(&["radius", "--p", "4", "--u", "abc"]).status.code(), Some(2));
    assert_eq!(forested(&["verify"]).status.code(), Some(2));
    assert_eq!(forested(&["repro", "--only", "13"]).status.code(), Some(2));
    let o = forested(&["coeffs", "--order", "61"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("specialize"));
}

#[test]
fn exit_status_for_refusals() {
    assert_eq!(forested(&["oracle", "--p", "4", "--n", "6", "--limit", "1000"]).status.code(), Some(3));
    assert_eq!(forested(&["asymptotics", "--p", "3", "--u", "-1/2"]).status.code(), Some(3));
    assert_eq!(forested(&["asymptotics", "--p", "4", "--u", "-1/2", "--log-probe", "--z", "0.9999", "--max-terms", "3000"]).status.code(), Some(3));
}

#[test]
fn repro_subset_prints_table() {
    let o = forested(&["repro", "--only", "1,9"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("id"));
    assert_eq!(s.matches("PASS").count(), 2);
}
