use std::process::{Command, Output};

use serde_json::Value;

fn knotasym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knotasym"))
        .args(args)
        .env_remove("KNOTASYM_PREC")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn num(v: &Value, k: &str) -> f64 {
    v[k].as_f64().unwrap_or_else(|| panic!("{k} in {v}"))
}

#[test]
fn jones_emits_one_record_per_n_in_order() {
    let recs = records(&knotasym(&["jones", "--knot", "fig8", "--u", "kappa", "--p", "1", "--n", "5..10"]));
    assert_eq!(recs.len(), 6);
    let ns: Vec<u64> = recs.iter().map(|r| r["N"].as_u64().unwrap()).collect();
    assert_eq!(ns, vec![5, 6, 7, 8, 9, 10]);
    for r in &recs {
        let (re, im) = (num(r, "re"), num(r, "im"));
        assert!((re.hypot(im).ln() - num(r, "log_abs")).abs() < 1e-12);
        assert!((im.atan2(re) - num(r, "arg")).abs() < 1e-12);
    }
}

#[test]
fn csv_header_and_round_trip() {
    let args = ["jones", "--knot", "st", "--u", "-log2", "--n", "2..12"];
    let csv_out = knotasym(&[&args[..], &["--format", "csv"]].concat());
    assert!(csv_out.status.success());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("N,re,im,log_abs,arg"));
    assert!(!text.contains('\r'));
    let json = records(&knotasym(&args));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), json.len());
    for (row, rec) in rows.iter().zip(&json) {
        for (i, k) in ["re", "im", "log_abs", "arg"].iter().enumerate() {
            assert_eq!(row[i + 1].parse::<f64>().unwrap(), num(rec, k));
        }
    }
}

#[test]
fn output_is_deterministic_and_digits_are_honoured() {
    let args = ["jones", "--knot", "st", "--u", "log2", "--n", "2..25", "--threads", "2"];
    assert_eq!(knotasym(&args).stdout, knotasym(&args).stdout);
    let short = records(&knotasym(&[&args[..], &["--digits", "4"]].concat()));
    for r in &short {
        let s = r["re"].to_string();
        let digits = s.split(['e', 'E']).next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect::<String>();
        assert!(digits.trim_matches('0').len() <= 4, "{s}");
    }
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(knotasym(&["jones", "--knot", "fig8", "--u", "bogus", "--n", "2..3"]).status.code(), Some(2));
    assert_eq!(knotasym(&["stevedore-scan", "--m-steps", "5"]).status.code(), Some(2));
    assert_eq!(knotasym(&["fit", "--knot", "fig8", "--u", "kappa", "--n-max", "20"]).status.code(), Some(2));
    assert_eq!(knotasym(&["--prec", "32", "verify", "--suite", "saddle"]).status.code(), Some(2));
}

#[test]
fn precision_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_knotasym"))
        .args(["verify", "--suite", "saddle"])
        .env("KNOTASYM_PREC", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn saddle_and_gvc_suites_pass() {
    for suite in ["saddle", "gvc"] {
        let recs = records(&knotasym(&["verify", "--suite", suite]));
        assert!(!recs.is_empty());
        for r in &recs {
            assert_eq!(r["pass"], Value::Bool(true), "{r}");
            for k in ["check_name", "measured", "expected", "tolerance"] {
                assert!(r.get(k).is_some(), "{k} missing in {r}");
            }
        }
    }
    let f3 = records(&knotasym(&["verify", "--suite", "saddle"]));
    assert!(f3.iter().any(|r| r["check_name"].as_str().unwrap().starts_with("F'''(sigma_0) = -2 xi^2")));
}

#[test]
fn fits_reproduce_the_growth_rates() {
    let fig8 = records(&knotasym(&["fit", "--knot", "fig8", "--u", "kappa", "--n-min", "100", "--n-max", "200"]));
    let two_kappa_pi = 2.0 * 0.962_423_650_119_206_9 * std::f64::consts::PI;
    assert!(num(&fig8[0], "canonical_re").abs() < 1e-4);
    assert!((num(&fig8[0], "canonical_im") - two_kappa_pi).abs() < 1e-4);

    let st = records(&knotasym(&["fit", "--knot", "st", "--u", "log2", "--n-max", "200"]));
    assert!((num(&st[0], "S_re") + 6.485).abs() < 0.01, "{}", st[0]);
    assert!((num(&st[0], "S_im") - 5.697).abs() < 0.01, "{}", st[0]);
}

#[test]
fn stevedore_scan_records() {
    let recs = records(&knotasym(&["stevedore-scan", "--m-steps", "10"]));
    let us: Vec<&Value> = recs.iter().filter(|r| r["kind"] == "u").collect();
    let ms: Vec<&Value> = recs.iter().filter(|r| r["kind"] == "m").collect();
    assert_eq!((us.len(), ms.len()), (11, 11));
    assert_eq!((num(us[0], "CS_re"), num(us[0], "CS_im")), (-6.791, 3.164));
    let last = us[10];
    assert!((num(last, "S_re") + 6.569).abs() < 5e-3 && (num(last, "S_im") - 5.653).abs() < 5e-3);
    let top = ms[10];
    assert_eq!(num(top, "m"), 2.0);
    let reals: Vec<f64> = ["d3", "d4"].iter().map(|d| num(top, &format!("{d}_re"))).collect();
    assert!(reals[0].abs() < 1e-12 && (reals[1] - 0.3189).abs() < 1e-3);
    assert!(recs.iter().all(|r| r["collision"] == false));

    let csv = knotasym(&["stevedore-scan", "--m-steps", "10", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("kind,u,v_re,v_im,CS_re,CS_im,S_re,S_im,m,"));
    assert_eq!(text.lines().count(), 23);
}
