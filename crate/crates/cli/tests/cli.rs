use std::process::{Command, Output};

fn szego(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego"))
        .args(args)
        .env_remove("SZEGO_ZERO_DIR")
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_value(o: &Output, col: &str) -> f64 {
    let s = stdout(o);
    let mut lines = s.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == col).unwrap();
    lines.next().unwrap().split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn phi_at_origin() {
    let o = szego(&["--m", "1", "phi", "--x", "0"]);
    assert!(o.status.success());
    assert!((first_value(&o, "phi_re") - 1.2533141373155).abs() < 1e-10);
    let o = szego(&["phi", "--x", "0"]);
    assert!((first_value(&o, "phi_re") - 1.5243811874660).abs() < 1e-10);
}

#[test]
fn csv_ends_with_metadata() {
    let o = szego(&["phi", "--grid", "-1:1:3"]);
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 5);
    assert!(s.lines().last().unwrap().starts_with("# m=2 rel_tol=1e-9"));
}

#[test]
fn json_output() {
    let o = szego(&["--format", "json", "phi", "--x", "1,0.5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["x_im"], serde_json::json!(0.5));
    assert_eq!(v["meta"]["m"], serde_json::json!(2));
}

#[test]
fn zeros_for_m1_is_a_domain_error() {
    let o = szego(&["--m", "1", "zeros"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn zeros_then_kernel_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("z.json");
    let t = table.to_str().unwrap();
    let o = szego(&["zeros", "--count", "60", "--out", t]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("c2_hat="));
    let a = szego(&["--table", t, "kernel", "--ratio"]);
    let b = szego(&["--table", t, "kernel", "--ratio"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let spread: f64 = stdout(&a)
        .lines()
        .find(|l| l.contains("spread="))
        .and_then(|l| l.split("spread=").nth(1))
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(spread < 1e-3);
}

#[test]
fn singular_support_rows_are_marked() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("z.json");
    let t = t.to_str().unwrap();
    assert!(szego(&["zeros", "--count", "60", "--out", t]).status.success());
    let o = szego(&["--table", t, "kernel", "--point", "0,0,0", "--point", "0,1,0.3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("0,0,0,") && l.contains("error")));
    let o = szego(&["--table", t, "kernel", "--point", "0,0,0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(szego(&["phi"]).status.code(), Some(2));
    assert_eq!(szego(&["phi", "--x", "a,b"]).status.code(), Some(2));
    assert_eq!(szego(&["--rel-tol", "-1", "phi", "--x", "0"]).status.code(), Some(2));
    assert_eq!(szego(&["--table", "/nonexistent/z.json", "kernel"]).status.code(), Some(2));
}

#[test]
fn plot_script_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("p.csv");
    let plot = dir.path().join("p.gp");
    let o = szego(&[
        "-o",
        data.to_str().unwrap(),
        "--plot-script",
        plot.to_str().unwrap(),
        "phi",
        "--grid",
        "0:2:5",
    ]);
    assert!(o.status.success());
    let s = std::fs::read_to_string(plot).unwrap();
    assert!(s.contains("plot '") && s.contains("using 1:3"));
}
