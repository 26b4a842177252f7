use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qudit");

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const GIE_SMALL: &str = r#"
[ensemble]
n = 40
m = 2

[protocol]
kind = "gie"

[protocol.tau_grid]
start = 0.0
stop = 0.2
count = 41
"#;

const GID_SMALL: &str = r#"
[ensemble]
n = 30
m = 2

[protocol]
kind = "gid"
tau_rot = 0.05
beta = "pi/24"
prep_points = 5

[protocol.tau_grid]
start = 0.0
stop = 0.05
count = 11

[metrology]
compute_tilde = true
"#;

fn csv_out(dir: &Path, sub: &str, cfg: &str, name: &str, extra: &[&str]) -> String {
    let out = dir.join(name);
    let mut args = vec![sub, "--config", cfg, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn csv_headers_are_exact() {
    let dir = tempfile::tempdir().unwrap();
    let gie = write(dir.path(), "gie.toml", GIE_SMALL);
    let gid = write(dir.path(), "gid.toml", GID_SMALL);
    let a = csv_out(dir.path(), "gie", &gie, "a.csv", &[]);
    assert_eq!(a.lines().next().unwrap(), "tau,xi2_loc,xi2_col,gamma_loc,f_col,c1,c2");
    assert_eq!(a.lines().count(), 42);
    let b = csv_out(dir.path(), "gid", &gid, "b.csv", &[]);
    assert_eq!(
        b.lines().next().unwrap(),
        "tau,xi2_loc,xi2_col,gamma_loc,f_col,c1,c2,f_loc,c1_tilde,c2_tilde,beta,theta,theta0,purity"
    );
    let first: Vec<&str> = a.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0], "0.0000000000000000e0");
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let gid = write(dir.path(), "gid.toml", GID_SMALL);
    let a = csv_out(dir.path(), "gid", &gid, "a.csv", &["--threads", "1"]);
    let b = csv_out(dir.path(), "gid", &gid, "b.csv", &["--threads", "3"]);
    let c = csv_out(dir.path(), "gid", &gid, "c.csv", &[]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn json_output_matches_published_columns() {
    let dir = tempfile::tempdir().unwrap();
    let gid = write(dir.path(), "gid.toml", GID_SMALL);
    let text = csv_out(dir.path(), "gid", &gid, "r.json", &["--format", "json", "--seed", "7"]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["kind"], "gid");
    assert_eq!(doc["meta"]["seed"], 7);
    assert!(doc["meta"]["schedule"]["theta0"].is_number());

    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(workspace().join("docs/schema/records.schema.json")).unwrap()).unwrap();
    let allowed: Vec<&str> =
        schema["$defs"]["run_column"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let columns: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(columns, allowed);
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 16);
    for r in records {
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), columns.len());
        assert!(keys.iter().all(|k| allowed.contains(k)));
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.toml", GIE_SMALL.replace("m = 2", "m = 2\nmass = 3")),
        ("both.toml", GID_SMALL.replace("beta = \"pi/24\"", "beta = 0.1\ntheta = 0.2")),
        ("neither.toml", GID_SMALL.replace("beta = \"pi/24\"", "")),
        ("bad_n.toml", GIE_SMALL.replace("n = 40", "n = 0")),
        ("syntax.toml", "[ensemble\n".to_owned()),
    ];
    for (name, body) in cases {
        let cfg = write(dir.path(), name, &body);
        let sub = if body.contains("gid") { "gid" } else { "gie" };
        let o = run(&[sub, "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let missing = dir.path().join("absent.toml");
    assert_eq!(run(&["gie", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let gie = write(dir.path(), "gie.toml", GIE_SMALL);
    assert_eq!(run(&["gid", "--config", &gie]).status.code(), Some(2));
    assert_eq!(run(&["network", "--config", &gie]).status.code(), Some(2));
}

#[test]
fn oracle_check_passes_and_respects_the_size_cap() {
    let configs = workspace().join("configs");
    for name in ["oracle_gie_n4_m2.toml", "oracle_gie_n3_m3.toml", "oracle_gid_n4_m2.toml"] {
        let o = run(&["oracle-check", "--config", configs.join(name).to_str().unwrap(), "--format", "json"]);
        assert!(o.status.success(), "{name}");
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report["pass"], true);
        assert!(report["max_deviation"].as_f64().unwrap() < 1e-10);
    }
    let o = run(&["oracle-check", "--config", configs.join("oracle_too_large.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn single_value_sweep_reproduces_a_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let gie = write(dir.path(), "gie.toml", GIE_SMALL);
    let direct = csv_out(dir.path(), "gie", &gie, "direct.csv", &[]);
    let sweep_cfg = format!("{GIE_SMALL}\n[sweep]\nparameter = \"n\"\nvalues = [40]\n");
    let sw = write(dir.path(), "sweep.toml", &sweep_cfg);
    let summary = csv_out(dir.path(), "sweep", &sw, "sw/out.csv", &[]);
    let per_value = std::fs::read_to_string(dir.path().join("sw/out_n40.csv")).unwrap();
    assert_eq!(direct, per_value);
    assert_eq!(summary.lines().next().unwrap(), "n,tau_deph,min_c1,tau_min_c1,min_c2,tau_min_c2");
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn params_without_dipolar_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(workspace().join("configs/params_harmonic.toml")).unwrap();
    let cfg = write(dir.path(), "p.toml", &base.replace("displacement = [0.0, 4.0e-6, 0.0]", "displacement = [0.0, 4.0e-6, 0.0]\nc_dd = 0.0"));
    let o = run(&["params", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let hz = &r["couplings"]["hz"];
    assert_eq!(hz["chi_nloc"].as_f64().unwrap(), 0.0);
    assert_eq!(hz["chi_loc"].as_f64().unwrap(), 0.0);
    assert!(hz["chi_cont_per_a0"].as_f64().unwrap() > 0.0);

    let full = run(&["params", "--config", workspace().join("configs/params_harmonic.toml").to_str().unwrap()]);
    let r: Value = serde_json::from_slice(&full.stdout).unwrap();
    let i = &r["couplings"]["integrals"];
    let (a, b) = (i["d_lalb"].as_f64().unwrap(), i["d_rarb"].as_f64().unwrap());
    assert!((a - b).abs() <= 1e-8 * a.abs(), "{a} {b}");
}

#[test]
fn checked_in_configs_load_and_share_the_rotation_time() {
    for entry in std::fs::read_dir(workspace().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.starts_with("params") {
            continue;
        }
        qudit_net_cli::config::RunConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        if name.starts_with("gid_") {
            assert!(text.contains("tau_rot = 2.0e-3"), "{name}");
        }
    }
}

#[test]
fn witness_minimum_time_in_both_unit_readings() {
    let o = run(&["params", "--config", workspace().join("configs/params_tmin.toml").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let t = &r["t_min"];
    let tau = t["tau_min"].as_f64().unwrap();
    assert!((1.3e-3..1.5e-3).contains(&tau), "{tau}");
    assert!((0.73..0.77).contains(&t["c1_min"].as_f64().unwrap()));
    let rad = t["seconds_if_value_is_rad_per_s"].as_f64().unwrap();
    let hz = t["seconds"].as_f64().unwrap();
    assert!((rad - tau / 4.5e-4).abs() < 1e-12 * rad);
    assert!((rad / hz - 2.0 * std::f64::consts::PI).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "t.toml", "[t_min]\nn = 1000\n");
    assert_eq!(run(&["params", "--config", &bad]).status.code(), Some(2));
}
