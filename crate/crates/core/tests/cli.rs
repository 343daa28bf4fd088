use std::process::{Command, Output};

use serde_json::Value;

fn cohent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohent")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const C_HALF: f64 = 0.649_519_052_838_329; // 3 sqrt3 / 8

#[test]
fn bound_lossless_is_flat() {
    let o = cohent(&["bound", "--T", "1", "--grid", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("curve,p_s,e_bar,ps_times_ebar,T,theta,monotone,alpha,beta\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 5);
    for row in &r {
        assert_eq!(row[0], "(i)-optimal-bound");
        assert!((num(&row[2]) - 1.0).abs() < 1e-12);
        assert_eq!(row[7], "");
    }
}

#[test]
fn bound_half_transmittance_and_length() {
    let by_t = rows(&stdout(&cohent(&["bound", "--T", "0.5", "--grid", "0.2,0.5"])));
    let row = by_t.iter().find(|r| num(&r[1]) == 0.5).unwrap();
    assert!((num(&row[2]) - C_HALF).abs() < 1e-12);

    let by_l = rows(&stdout(&cohent(&["bound", "--loss-km", "17.328680", "--l0-km", "25", "--grid", "0.5"])));
    assert!((num(&by_l[0][4]) - 0.5).abs() < 1e-7);
    assert!((num(&by_l[0][2]) - C_HALF).abs() < 1e-7);
}

#[test]
fn golden_bound_csv() {
    let o = cohent(&["bound", "--T", "0.5", "--grid", "5", "--monotone", "eof"]);
    assert_eq!(stdout(&o), include_str!("golden/bound_eof_T0.5_grid5.csv"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bound", "--grid", "5"],
        vec!["bound", "--T", "0.5", "--loss-km", "3"],
        vec!["bound", "--T", "0.5", "--grid", "0.5,1.5"],
        vec!["bound", "--T", "1.5"],
        vec!["bound", "--T", "0.5", "--monotone", "negativity"],
        vec!["no-such-command"],
        vec!["protocol-near-optimal", "--T", "0.5", "--p-s", "0.5", "--tail-tol", "0.5"],
    ] {
        assert_eq!(cohent(&args).status.code(), Some(2), "{args:?}");
    }
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn protocol_reports() {
    let o = cohent(&["protocol-optimal", "--T", "1", "--p-s", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert!((v["points"][0]["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let v = json(&cohent(&["protocol-optimal", "--T", "0.5", "--p-s", "0.5", "--theta", "0.01"]));
    let pt = &v["points"][0];
    assert!((pt["concurrence"].as_f64().unwrap() - C_HALF).abs() < 1e-9);
    assert!((pt["params"]["u_alpha"].as_f64().unwrap() - 0.75).abs() < 1e-12);

    let v = json(&cohent(&["protocol-near-optimal", "--T", "0.5", "--p-s", "0.5"]));
    let pt = &v["points"][0];
    let e = pt["e_bar"].as_f64().unwrap();
    assert!(e <= C_HALF + 1e-9 && e > 0.5);
    assert!((pt["e_bar_enumerated"].as_f64().unwrap() - e).abs() < 1e-9);
    let top = pt["top_outcomes"].as_array().unwrap();
    assert_eq!(top.len(), 10);
    assert!(top.windows(2).all(|w| w[0]["probability"].as_f64() >= w[1]["probability"].as_f64()));
}

#[test]
fn sweep_shape_dominance_determinism() {
    let t = (-2.0f64).exp().to_string();
    let args = ["sweep", "--T", &t, "--theta", "0.01", "--grid", "50", "--curves", "i,ii"];
    let first = stdout(&cohent(&args));
    let r = rows(&first);
    assert_eq!(r.len(), 100);
    let (bound, near) = r.split_at(50);
    for (b, n) in bound.iter().zip(near) {
        assert_eq!(b[0], "(i)-optimal-bound");
        assert_eq!(n[0], "(ii)-near-optimal");
        assert_eq!(b[1], n[1]);
        assert!(num(&n[3]) <= num(&b[3]) + 1e-9);
    }
    assert_eq!(first, stdout(&cohent(&args)));
}

#[test]
fn oracle_verify_exit_codes() {
    let o = cohent(&["oracle-verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["max_discrepancy"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["points"].as_array().unwrap().len(), 54);

    assert_eq!(cohent(&["oracle-verify", "--oracle-tol", "1e-15"]).status.code(), Some(1));

    let o = cohent(&["oracle-verify", "--nmax", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let truncated = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["error"].as_str().is_some_and(|e| e.contains("truncation insufficient")))
        .count();
    assert!(truncated > 0);
}

#[test]
fn audit_is_seeded() {
    let a = cohent(&["audit", "--trials", "2000", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, cohent(&["audit", "--trials", "2000", "--seed", "7"]).stdout);
    let v = json(&a);
    assert!(v["max_violation"].as_f64().unwrap() <= 1e-9);
    assert_ne!(v["max_violation"], json(&cohent(&["audit", "--trials", "2000", "--seed", "8"]))["max_violation"]);
    assert_eq!(cohent(&["audit", "--f", "0.2"]).status.code(), Some(2));
}
