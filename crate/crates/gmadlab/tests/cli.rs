//! End-to-end checks of the gmadlab binary: exit codes, CSV shapes, and the
//! worked examples each subcommand is contracted to reproduce.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn gmadlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmadlab"))
        .args(args)
        .env_remove("GMADLAB_SEED")
        .output()
        .unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Parse a CSV produced by the tool: returns (config hash, header, rows).
fn read_csv(path: &Path) -> (String, Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let hash_line = lines.next().unwrap();
    let hash = hash_line
        .strip_prefix("# config_hash=")
        .unwrap_or_else(|| panic!("missing hash header in {hash_line:?}"))
        .to_owned();
    assert_eq!(hash.len(), 64, "hash is not a sha256 hex digest");
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (hash, header, rows)
}

fn f(cell: &str) -> f64 {
    cell.parse().unwrap()
}

struct TempOut {
    dir: tempfile::TempDir,
}

impl TempOut {
    fn new() -> Self {
        TempOut {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn verify_passes_for_identity_blocks() {
    let out = gmadlab(&["verify", "--config", &data("identity_channel.json")]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert!(report["trace_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn verify_passes_for_the_coupling_channel() {
    let out = gmadlab(&["verify", "--config", &data("coupling_channel.json")]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    for key in [
        "passed",
        "trace_preserving",
        "completely_positive",
        "gibbs_preserving",
        "strictly_incoherent",
        "detailed_balance",
    ] {
        assert_eq!(report[key], serde_json::Value::Bool(true), "{key}");
    }
}

#[test]
fn verify_fails_on_a_non_unitary_block() {
    let out = gmadlab(&["verify", "--config", &data("bad_block_channel.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(false));
    assert!(report["error"].as_str().unwrap().contains("not unitary"));
}

#[test]
fn malformed_config_exits_two() {
    let out = gmadlab(&["verify", "--config", &data("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("malformed config"));
}

#[test]
fn missing_config_exits_two() {
    let out = gmadlab(&["mawer", "--config", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_on_the_identity_channel_returns_the_diagonal() {
    let tmp = TempOut::new();
    let csv = tmp.path("sweep.csv");
    let out = gmadlab(&[
        "sweep",
        "--config",
        &data("identity_channel.json"),
        "--kind",
        "ergotropy",
        "--constraint",
        "shell",
        "--grid",
        "11",
        "--betas",
        "0.5,inf",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let (_, header, rows) = read_csv(&csv);
    assert_eq!(header, ["beta", "epsilon", "functional_kind", "constraint", "value"]);
    assert_eq!(rows.len(), 22);
    // ordered by (β, ε), with the identity value ε − ε₀ everywhere
    assert_eq!(rows[0][0], "0.5");
    assert_eq!(rows[11][0], "inf");
    for row in &rows {
        assert_eq!(row[2], "ergotropy");
        assert_eq!(row[3], "shell");
        assert!((f(&row[4]) - f(&row[1])).abs() < 1e-9, "row {row:?}");
    }
    for pair in rows[..11].windows(2) {
        assert!(f(&pair[1][1]) > f(&pair[0][1]), "ε not increasing");
    }
}

#[test]
fn sweep_curves_show_ground_shell_activation() {
    let tmp = TempOut::new();
    let csv = tmp.path("activation.csv");
    let out = gmadlab(&[
        "sweep",
        "--config",
        &data("activation_channel.json"),
        "--kind",
        "ergotropy",
        "--constraint",
        "shell",
        "--grid",
        "5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let (_, _, rows) = read_csv(&csv);
    assert_eq!(rows.len(), 5);
    assert_eq!(f(&rows[0][1]), 0.0);
    assert!(
        f(&rows[0][4]) > 1e-3,
        "no activation at the ground shell: {}",
        rows[0][4]
    );
}

#[test]
fn seed_override_changes_the_config_hash() {
    let tmp = TempOut::new();
    let csv = tmp.path("sweep.csv");
    let args = [
        "sweep",
        "--config",
        &data("identity_channel.json"),
        "--kind",
        "incoherent",
        "--constraint",
        "ball",
        "--grid",
        "5",
        "--out",
        csv.to_str().unwrap(),
    ];
    assert!(gmadlab(&args).status.success());
    let (hash_default, _, _) = read_csv(&csv);
    let out = Command::new(env!("CARGO_BIN_EXE_gmadlab"))
        .args(args)
        .env("GMADLAB_SEED", "7")
        .output()
        .unwrap();
    assert!(out.status.success());
    let (hash_seeded, _, _) = read_csv(&csv);
    assert_ne!(hash_default, hash_seeded);

    let bad = Command::new(env!("CARGO_BIN_EXE_gmadlab"))
        .args(args)
        .env("GMADLAB_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn capacitance_of_the_identity_channel_is_the_diagonal() {
    let tmp = TempOut::new();
    let cfg = tmp.path("id.json");
    std::fs::write(
        &cfg,
        r#"{
  "spectrum": [0.0, 0.5, 1.0],
  "beta": 1.0,
  "parametrization": {
    "type": "general",
    "unitaries": [
      [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]],
      [[[1.0,0.0],[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0],[1.0,0.0]]]
    ]
  },
  "grid": 21, "n_starts": 8, "max_iters": 400
}"#,
    )
    .unwrap();
    let csv = tmp.path("cap.csv");
    let out = gmadlab(&[
        "capacitance",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let (hash, header, rows) = read_csv(&csv);
    assert_eq!(
        header,
        ["epsilon", "ball_mef", "chi", "incoherent_ball", "incoherent_envelope"]
    );
    assert_eq!(rows.len(), 21);
    for row in &rows {
        let eps = f(&row[0]);
        assert!((f(&row[2]) - eps).abs() < 1e-9, "χ(ε) ≠ ε at {eps}");
        // incoherent extraction is weaker: a shell state can sit with its
        // populations already passively arranged
        assert!(f(&row[3]) <= f(&row[2]) + 1e-9, "incoherent ball above χ at {eps}");
        assert!(f(&row[4]) >= f(&row[3]) - 1e-9, "envelope below its curve at {eps}");
    }

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path("cap.csv.mawer.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["config_hash"].as_str().unwrap(), hash);
    assert!((sidecar["mawer"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn capacitance_chi_column_is_the_envelope_of_the_ball_column() {
    let tmp = TempOut::new();
    let cfg = tmp.path("ref.json");
    std::fs::write(
        &cfg,
        r#"{
  "spectrum": [0.0, 0.8, 1.0],
  "beta": 1.0,
  "parametrization": { "type": "qutrit", "s1": 0.5, "sbar": 0.745, "alpha0": 0.745 },
  "grid": 21, "n_starts": 8, "max_iters": 400
}"#,
    )
    .unwrap();
    let csv = tmp.path("cap.csv");
    let out = gmadlab(&[
        "capacitance",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let (_, _, rows) = read_csv(&csv);
    let xs: Vec<f64> = rows.iter().map(|r| f(&r[0])).collect();
    let ball: Vec<f64> = rows.iter().map(|r| f(&r[1])).collect();
    let chi: Vec<f64> = rows.iter().map(|r| f(&r[2])).collect();

    // independent O(n³) least-concave-majorant oracle: the envelope at x_k is
    // the best chord value over all sample pairs straddling x_k
    let n = xs.len();
    for k in 0..n {
        let mut best = ball[k];
        for i in 0..=k {
            for j in k..n {
                if i == j {
                    continue;
                }
                let t = (xs[k] - xs[i]) / (xs[j] - xs[i]);
                best = best.max(ball[i] + t * (ball[j] - ball[i]));
            }
        }
        assert!(
            (chi[k] - best).abs() < 1e-9,
            "χ({}) = {} but the chord oracle gives {}",
            xs[k],
            chi[k],
            best
        );
    }
}

#[test]
fn mawer_reports_unity_for_the_identity_channel() {
    let out = gmadlab(&["mawer", "--config", &data("identity_channel.json")]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let payload: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!((payload["mawer"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(payload["epsilons"][0].as_f64().unwrap(), 1e-2);
    assert_eq!(payload["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn mpemba_of_identical_states_has_unit_ratios_and_no_crossings() {
    let tmp = TempOut::new();
    let csv = tmp.path("mp.csv");
    let out = gmadlab(&[
        "mpemba",
        "--config",
        &data("coupling_channel.json"),
        "--states",
        &data("equal_states.json"),
        "--iters",
        "4",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let (_, header, rows) = read_csv(&csv);
    assert_eq!(
        header,
        [
            "n",
            "coherent_rho",
            "coherent_sigma",
            "coherent_ratio",
            "total_coherent_rho",
            "total_coherent_sigma",
            "total_coherent_ratio",
            "beta_star_rho",
            "beta_star_sigma"
        ]
    );
    assert_eq!(rows.len(), 5);
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row[0], n.to_string());
        assert_eq!(f(&row[3]), 1.0, "coherent ratio at n = {n}");
        assert_eq!(f(&row[6]), 1.0, "total ratio at n = {n}");
        assert_eq!(row[1], row[2]);
        assert_eq!(row[7], row[8]);
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path("mp.csv.report.json")).unwrap())
            .unwrap();
    assert_eq!(report["coherent_crossings"].as_array().unwrap().len(), 0);
    assert_eq!(report["total_coherent_crossings"].as_array().unwrap().len(), 0);
}

#[test]
fn mpemba_flags_dephase_mismatch_with_the_offending_entries() {
    let tmp = TempOut::new();
    let out = gmadlab(&[
        "mpemba",
        "--config",
        &data("coupling_channel.json"),
        "--states",
        &data("mismatched_states.json"),
        "--iters",
        "3",
        "--out",
        tmp.path("mp.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    for entry in ["(0,0)", "(1,1)", "(2,2)"] {
        assert!(err.contains(entry), "stderr does not name {entry}: {err}");
    }
    assert!(!tmp.path("mp.csv").exists(), "output written despite the error");
}

#[test]
fn mpemba_worked_pair_crosses_within_the_first_application() {
    let tmp = TempOut::new();
    let csv = tmp.path("mp.csv");
    let out = gmadlab(&[
        "mpemba",
        "--config",
        &data("coupling_channel.json"),
        "--states",
        &data("mpemba_pair.json"),
        "--iters",
        "5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let (_, _, rows) = read_csv(&csv);
    // the first state starts with more extractable coherence, then loses the
    // lead after one application of the map
    assert!(f(&rows[0][3]) > 1.0);
    assert!(f(&rows[1][3]) < 1.0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path("mp.csv.report.json")).unwrap())
            .unwrap();
    let crossings = report["coherent_crossings"].as_array().unwrap();
    assert!(
        crossings.iter().any(|v| v.as_u64() == Some(1)),
        "no crossing recorded at n = 1: {crossings:?}"
    );
}

#[test]
fn mpemba_rejects_states_of_the_wrong_dimension() {
    let tmp = TempOut::new();
    let states = tmp.path("qubit.json");
    std::fs::write(
        &states,
        r#"{
  "rho":   [[[0.7,0.0],[0.1,0.0]],[[0.1,0.0],[0.3,0.0]]],
  "sigma": [[[0.7,0.0],[0.0,0.1]],[[0.0,-0.1],[0.3,0.0]]]
}"#,
    )
    .unwrap();
    let out = gmadlab(&[
        "mpemba",
        "--config",
        &data("coupling_channel.json"),
        "--states",
        states.to_str().unwrap(),
        "--iters",
        "2",
        "--out",
        tmp.path("mp.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("dimensional"));
}
