//! End-to-end tests against the built binary: config validation, file
//! outputs, determinism, and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn edurace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edurace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_ok(cmd: &str, config: &str, out: &Path) {
    let out_s = out.to_str().unwrap();
    let o = edurace(&[cmd, "--config", config, "--out", out_s]);
    assert!(
        o.status.success(),
        "{cmd} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(|s| s.to_string()).collect())
        .collect()
}

fn close(actual: f64, expected: f64, tol: f64) -> bool {
    (actual - expected).abs() <= tol
}

const GAME_TABLE: &str = r#"
[game]
gamma1 = 5.0
gamma2 = 4.0
p1 = 0.5
p2 = 0.5
t_obey = 2.0
"#;

#[test]
fn game_reproduces_published_payoff_table() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), GAME_TABLE);
    run_ok("game", &config, &tmp.path().join("out"));

    let rows = csv_rows(&tmp.path().join("out/game_payoffs.csv"));
    assert_eq!(rows.len(), 4);
    let cell = |key: &str| -> (f64, f64) {
        let r = rows.iter().find(|r| r[0] == key).unwrap();
        assert_eq!(r[5], "finite", "{key} should be finite");
        (r[3].parse().unwrap(), r[4].parse().unwrap())
    };
    let (oo1, oo2) = cell("cell_obey_obey");
    let (do1, do2) = cell("cell_disobey_obey");
    let (od1, od2) = cell("cell_obey_disobey");
    assert!(close(oo1, 0.1, 0.005) && close(oo2, -1.0, 0.005));
    assert!(close(do1, 0.21, 0.005) && close(do2, -1.0, 0.005));
    assert!(close(od1, -1.0, 0.005) && close(od2, -0.36, 0.005));

    let dd = rows.iter().find(|r| r[0] == "cell_disobey_disobey").unwrap();
    assert_eq!(dd[5], "divergent");
    assert_eq!(dd[6], "2.000");
}

#[test]
fn missing_field_is_reported_by_name() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "[game]\ngamma1 = 5.0\ngamma2 = 4.0\np1 = 0.5\nt_obey = 2.0\n",
    );
    let o = edurace(&["game", "--config", &config]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("p2"), "stderr should name the field: {stderr}");
}

#[test]
fn unknown_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &format!("{GAME_TABLE}gamm3 = 1.0\n"));
    let o = edurace(&["game", "--config", &config]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("gamm3"), "stderr should name the key: {stderr}");
}

#[test]
fn validate_config_accepts_valid_file() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), GAME_TABLE);
    let o = edurace(&["validate-config", "--config", &config]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("config OK"));
}

const SIMULATE: &str = r#"
[simulate.population]
n = 30
seed = 7
rationality = "bounded"
gamma_dist = { kind = "uniform", lo = 3.0, hi = 6.0 }
p_dist = { kind = "uniform", lo = 0.5, hi = 1.5 }

[simulate.sim]
rounds_max = 8
threshold = { mode = "mean_plus_k_sigma", k = 0.5 }
"#;

#[test]
fn simulate_is_deterministic_per_seed() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), SIMULATE);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    run_ok("simulate", &config, &a);
    run_ok("simulate", &config, &b);
    let trace_a = fs::read(a.join("trace.jsonl")).unwrap();
    assert_eq!(trace_a, fs::read(b.join("trace.jsonl")).unwrap());
    assert_eq!(
        fs::read(a.join("trace.csv")).unwrap(),
        fs::read(b.join("trace.csv")).unwrap()
    );

    // --seed beats the population block's own seed.
    let o = edurace(&[
        "simulate", "--config", &config, "--out", c.to_str().unwrap(), "--seed", "99",
    ]);
    assert!(o.status.success());
    assert_ne!(trace_a, fs::read(c.join("trace.jsonl")).unwrap());
}

#[test]
fn single_round_trace_has_initial_and_updated_rounds() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &SIMULATE.replace("rounds_max = 8", "rounds_max = 1"));
    let out = tmp.path().join("out");
    run_ok("simulate", &config, &out);
    let trace = fs::read_to_string(out.join("trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 2, "round 0 plus one update");
}

#[test]
fn figure1_argmax_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "[figure1]\ngamma = 3.0\np = 0.5\ns_cut_values = [0.0, 3.0]\n",
    );
    let out = tmp.path().join("out");
    run_ok("figure1", &config, &out);
    let rows = csv_rows(&out.join("figure1_argmax.csv"));
    assert_eq!(rows[0], vec!["0.000", "1.333", "1.1251"]);
    assert_eq!(rows[1], vec!["3.000", "2.333", "0.6251"]);
}

#[test]
fn figure2_cutoffs_scale_with_dispersion() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "[figure2]\ngamma = 3.0\np = 0.5\nmean_score = 6.0\nk = 1.645\nsigma_values = [1.0, 3.0]\nt_max = 12.0\n",
    );
    let out = tmp.path().join("out");
    run_ok("figure2", &config, &out);
    let rows = csv_rows(&out.join("figure2_scut.csv"));
    assert_eq!(rows[0], vec!["1.000", "7.645"]);
    assert_eq!(rows[1], vec!["3.000", "10.935"]);
}

const POLICY_BASE: &str = r#"
[policy.population]
n = 20
seed = 11
rationality = "bounded"
gamma_dist = { kind = "uniform", lo = 3.0, hi = 6.0 }
p_dist = { kind = "uniform", lo = 0.5, hi = 1.5 }

[policy.sim]
rounds_max = 6
threshold = { mode = "mean_plus_k_sigma", k = 0.5 }
"#;

#[test]
fn policy_batch_emits_comparison() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &format!(
            "{POLICY_BASE}\n[[policy.scenarios]]\nkind = \"cee_baseline\"\n\n\
             [[policy.scenarios]]\nkind = \"diversion\"\nkeep_fraction = 0.5\nsubsidy = 0.0\n"
        ),
    );
    let out = tmp.path().join("out");
    run_ok("policy", &config, &out);
    let reports = csv_rows(&out.join("policy_reports.csv"));
    assert_eq!(reports.len(), 2);
    let compare = csv_rows(&out.join("policy_compare.csv"));
    assert_eq!(compare.len(), 2);
    // Diverting half the pool halves participation relative to baseline.
    let diversion = compare.iter().find(|r| r[0] == "01_diversion").unwrap();
    assert_eq!(diversion[2], "0.5000");
}

#[test]
fn single_scenario_skips_comparison() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &format!("{POLICY_BASE}\n[[policy.scenarios]]\nkind = \"cee_baseline\"\n"),
    );
    let out = tmp.path().join("out");
    run_ok("policy", &config, &out);
    assert!(out.join("policy_reports.csv").exists());
    assert!(!out.join("policy_compare.csv").exists());
}

#[test]
fn beta_reduction_halves_participation() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        r#"
[policy.population]
n = 2
seed = 1
rationality = "bounded"
gamma_dist = { kind = "explicit", values = [1.0, 1.875] }
p_dist = { kind = "explicit", values = [0.5] }

[policy.sim]
rounds_max = 4
threshold = { mode = "mean_plus_k_sigma", k = 0.5 }

[[policy.scenarios]]
kind = "beta_reduction"
beta_before = 1.5
beta_after = 1.0
s_cut = 6.0
wage_p = 250.0
w_high = 2000.0
w_low = 1000.0
"#,
    );
    let out = tmp.path().join("out");
    run_ok("policy", &config, &out);
    let rows = csv_rows(&out.join("policy_reports.csv"));
    let share = |suffix: &str| -> String {
        rows.iter()
            .find(|r| r[0].ends_with(suffix))
            .unwrap_or_else(|| panic!("no row ending in {suffix}"))[5]
            .clone()
    };
    assert_eq!(share("_before"), "1.0000");
    assert_eq!(share("_after"), "0.5000");
}

#[test]
fn diverged_simulation_exits_with_code_2() {
    let tmp = TempDir::new().unwrap();
    // A high-k cutoff with no effective cap lets the feedback loop blow past
    // the divergence guard.
    let config = write_config(
        tmp.path(),
        r#"
[simulate.population]
n = 10
seed = 3
rationality = "bounded"
gamma_dist = { kind = "uniform", lo = 3.0, hi = 6.0 }
p_dist = { kind = "uniform", lo = 0.5, hi = 1.5 }

[simulate.sim]
rounds_max = 10000
threshold = { mode = "mean_plus_k_sigma", k = 0.5 }
divergence_cap = 1e4
t_hard_cap = 1e12
"#,
    );
    let o = edurace(&[
        "simulate",
        "--config",
        &config,
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
