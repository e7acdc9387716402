use std::path::PathBuf;
use std::process::{Command, Output};

fn hhbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhbounds")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hhbounds-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const HEADER: &str = "case_id,x,y,lhs,rhs_main,error_term,margin,theorem";

#[test]
fn phi_table_has_one_row_per_step() {
    let o = hhbounds(&["phi-table", "--from", "0", "--to", "1", "--step", "0.01", "--tol", "1e-6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let r = rows(&text);
    assert_eq!(r[0], ["sigma", "phi"]);
    assert_eq!(r.len(), 102);
    let last = &r[101];
    assert_eq!(last[0], "1");
    assert!(last[1].parse::<f64>().unwrap() <= 1e-6);
}

#[test]
fn classic_bounds_of_the_square() {
    let o = hhbounds(&["classic-bounds", "--system", "linear", "--rho", "const:1", "--f", "poly:0,0,1", "--x", "0", "--y", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some(HEADER));
    let r = rows(&text);
    let num = |row: usize, col: usize| r[row][col].parse::<f64>().unwrap();
    assert_eq!(r[1][7], "classic-lower");
    assert_eq!(r[2][7], "classic-upper");
    assert!((num(1, 3) - 0.25).abs() < 1e-12);
    assert!((num(1, 4) - 1.0 / 3.0).abs() < 1e-12);
    assert!((num(2, 4) - 0.5).abs() < 1e-12);
}

#[test]
fn bound_commands_emit_one_row_per_pair() {
    let out = scratch("thm3.csv");
    let o = hhbounds(&[
        "lower-thm3", "--system", "exp", "--f", "exp:2", "--x", "-0.5", "--y", "1", "--x", "0", "--y", "0.5",
        "--error", "measured:9", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r.len(), 3);
    assert!(r[1..].iter().all(|row| row[7] == "thm3" && row[6].parse::<f64>().unwrap() >= -1e-8));

    for cmd in ["lower-thm4", "upper-thm6"] {
        let o = hhbounds(&[cmd, "--f", "abs:0.3", "--x", "0", "--y", "1", "--measure", "atoms:[(0,0.5),(1,0.5)]"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(rows(&stdout(&o)).len(), 2);
    }
    let o = hhbounds(&["upper-thm5", "--system", "linear", "--f", "poly:0,0,1", "--x", "0", "--y", "1"]);
    let r = rows(&stdout(&o));
    assert!((r[1][3].parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let o = hhbounds(&["upper-cor6b", "--f", "poly:0,0,1", "--x", "0", "--y", "1", "--power3", "[(1,1,0,1)]"]);
    let r = rows(&stdout(&o));
    assert!((r[1][5].parse::<f64>().unwrap() - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn json_reports_for_system_and_residual() {
    let o = hhbounds(&["check-system", "--system", "trig"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let o = hhbounds(&["residual", "--system", "linear", "--f", "sin:3", "--grid", "9"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert!(v["measured_sup"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    assert_eq!(hhbounds(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hhbounds(&["phi-table", "--bogus"]).status.code(), Some(2));
    assert_eq!(hhbounds(&["classic-bounds", "--system", "wobbly", "--f", "exp", "--x", "0", "--y", "1"]).status.code(), Some(2));
    assert_eq!(hhbounds(&["lower-thm4", "--f", "exp", "--x", "1", "--y", "0"]).status.code(), Some(2));
    assert_eq!(hhbounds(&["verify", "--config", "/nonexistent/suite.cfg"]).status.code(), Some(2));

    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "theorems = thm3\nsystems = linear\nfunctions = span\nerror = power2:[(1,1)]\n").unwrap();
    let o = hhbounds(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn verify_exit_status_tracks_margins() {
    let good = scratch("good.cfg");
    std::fs::write(
        &good,
        "theorems = classic, thm3\nsystems = linear\nfunctions = span; convex:quadratic\nspecimens = 2\npairs = 3\nerror = const:0\n",
    )
    .unwrap();
    let o = hhbounds(&["verify", "--config", good.to_str().unwrap(), "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["cells"].as_array().unwrap().len(), 3 * 2 * 2 * 3);
    assert_eq!(v["summary"]["per_theorem"]["thm3"]["count"], 12);

    let bad = scratch("bad-margins.cfg");
    std::fs::write(
        &bad,
        "theorems = cor4c2\nsystems = linear\nfunctions = perturbed:quadratic:0.2\nspecimens = 2\npairs = 5\npower2 = [(1,1,0.001)]\n",
    )
    .unwrap();
    let o = hhbounds(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["summary"]["per_theorem"]["cor4c2"]["failures"].as_u64().unwrap() > 0);
}

#[test]
fn quadrature_panels_come_from_the_environment() {
    let run = |panels: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_hhbounds"));
        c.args(["upper-thm6", "--f", "exp:3", "--x", "0", "--y", "1"]);
        match panels {
            Some(p) => c.env("HH_QUAD_PANELS", p),
            None => c.env_remove("HH_QUAD_PANELS"),
        };
        c.output().unwrap()
    };
    let default = run(None);
    assert_eq!(default.status.code(), Some(0));
    assert_eq!(run(Some("64")).stdout, default.stdout);
    assert_ne!(run(Some("1")).stdout, default.stdout);
    assert_eq!(run(Some("zero")).status.code(), Some(2));
}
