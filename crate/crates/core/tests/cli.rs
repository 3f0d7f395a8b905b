//! End-to-end runs of the `dirac8` binary.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn dirac8(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac8"))
        .args(args)
        .env_remove("DIRAC8_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// JSON body of a command's stdout, after the `#` header line.
fn json(o: &Output) -> Value {
    let text = stdout(o);
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    serde_json::from_str(&body).expect("valid JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with(|c: char| c.is_ascii_alphabetic()))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn every_subcommand_echoes_units_header() {
    for args in [
        vec!["dispersion", "--n", "3"],
        vec!["solutions"],
        vec!["chain", "--n", "16", "--mode", "1", "--periods", "4"],
        vec!["evolve", "--branch", "acoustic+", "--grid", "256"],
    ] {
        let o = dirac8(&args);
        assert_eq!(code(&o), 0, "{args:?}");
        let first = stdout(&o).lines().next().unwrap().to_string();
        assert!(first.starts_with("# units="), "{args:?}: {first}");
        assert!(first.contains("epsilon="), "{args:?}: {first}");
    }
}

#[test]
fn dispersion_table_rows_and_values() {
    let o = dirac8(&["dispersion", "--epsilon", "0.5", "--pmax", "3", "--n", "121"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("p_z,E_acoustic_plus,E_acoustic_minus,E_optical_plus,E_optical_minus"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 121);
    assert!(rows.windows(2).all(|w| w[1][3] > w[0][3]));
    assert!((rows[0][3] - 1.118034).abs() < 1e-6);
    assert!(rows.iter().all(|r| r[1] == r[0] && r[2] == -r[0]));

    let o = dirac8(&["dispersion", "--epsilon", "0"]);
    assert_eq!(csv_rows(&stdout(&o))[0][3], 1.0);
}

#[test]
fn dispersion_two_datasets() {
    let o = dirac8(&["dispersion", "--epsilon", "0.5", "--epsilon", "0", "--n", "11"]);
    let text = stdout(&o);
    assert!(text.contains("# epsilon=0.5\n"));
    assert!(text.contains("# epsilon=0\n"));
    assert_eq!(csv_rows(&text).len(), 22);
}

#[test]
fn output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap().to_string();
        let o = dirac8(&["dispersion", "--epsilon", "0.5", "--epsilon", "0", "--n", "57", "-o", &p]);
        assert_eq!(code(&o), 0);
        fs::read(path).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# units=natural"));
    assert!(!text.contains('\r'));

    let traj = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap().to_string();
        let o = dirac8(&["chain", "--n", "8", "--mode", "1", "--periods", "4", "--trajectory", &p]);
        assert_eq!(code(&o), 0);
        fs::read(path).unwrap()
    };
    assert_eq!(traj("t1.csv"), traj("t2.csv"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["dispersion", "--pmin", "3", "--pmax", "1"],
        vec!["dispersion", "--n", "1"],
        vec!["dispersion", "--epsilon", "-0.5"],
        vec!["no-such-command"],
        vec!["evolve", "--branch", "sideways"],
        vec!["chain", "--m", "-1"],
        vec!["solutions", "--hbar", "2"],
        vec!["verify", "--corrupt", "nothing"],
        vec!["chain", "--periods", "1"],
    ] {
        assert_eq!(code(&dirac8(&args)), 2, "{args:?}");
    }
    assert_eq!(code(&dirac8(&[])), 2);
}

#[test]
fn verify_passes_and_reports_reading() {
    let o = dirac8(&["verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    assert!(text.contains("single c^2 k^2 term"));
}

#[test]
fn verify_at_unit_coupling_checks_hermiticity() {
    let o = dirac8(&["verify", "--epsilon", "1"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o)
        .lines()
        .find(|l| l.contains("Hermitian"))
        .unwrap()
        .to_string();
    assert!(line.starts_with("PASS"));
}

#[test]
fn verify_json_report() {
    let o = dirac8(&["verify", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 40);
    assert!(checks.iter().all(|c| c["tolerance"].is_number() && c["status"] == "pass"));
}

#[test]
fn corrupted_verification_exits_1() {
    for fault in ["optical-plus-ratio", "doubled-wave-term"] {
        let o = dirac8(&["verify", "--corrupt", fault]);
        assert_eq!(code(&o), 1, "{fault}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("verification failed"));
    }
}

#[test]
fn chain_summary_matches_dispersion() {
    let o = dirac8(&[
        "chain", "--m", "1", "--M", "4", "--K", "1", "--I", "1", "--J", "1", "--a", "1", "--mode", "2",
        "--n", "128",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["relative_error"].as_f64().unwrap() < 1e-4);
    assert!(v["omega_continuum"].as_f64().unwrap() > 0.0);
}

#[test]
fn chain_zero_mode_and_sweep() {
    let o = dirac8(&["chain", "--mode", "0", "--ka-sweep", "0.2,0.1,0.05,0.025"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["omega_discrete"].as_f64(), Some(0.0));
    assert_eq!(v["omega_measured"].as_f64(), Some(0.0));
    let exponent = v["convergence"]["exponent"].as_f64().unwrap();
    assert!((exponent - 2.0).abs() < 0.2);
}

#[test]
fn chain_unstable_step_exits_1() {
    let o = dirac8(&["chain", "--n", "16", "--dt", "1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stability"));
}

#[test]
fn chain_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let o = dirac8(&[
        "chain", "--n", "16", "--mode", "1", "--periods", "4", "--trajectory", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# units=lattice"));
    assert_eq!(lines.next(), Some("t,site,u,U,du_dt,dU_dt"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len() % 16, 0);
    assert!(rows.iter().all(|r| r.len() == 6));
}

#[test]
fn solutions_catalog() {
    let o = dirac8(&["solutions", "--pz", "1", "--epsilon", "0.5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 8);
    for s in sols {
        assert!(s["residual"].as_f64().unwrap() < 1e-10);
        let amps = s["amplitudes"].as_array().unwrap();
        if s["spin"] == "down" {
            // Ψ₁, Ψ₃, Φ₁, Φ₃ vanish for spin down
            for i in [0, 2, 4, 6] {
                assert_eq!(amps[i][0].as_f64(), Some(0.0));
                assert_eq!(amps[i][1].as_f64(), Some(0.0));
            }
        }
    }
    assert!(v["determinant_abs"].as_f64().unwrap() > 1e-8);
}

#[test]
fn evolve_group_velocities() {
    let measure = |args: &[&str]| {
        let o = dirac8(args);
        assert_eq!(code(&o), 0, "{args:?}");
        json(&o)["velocity_measured"].as_f64().unwrap()
    };
    let v = measure(&["evolve", "--branch", "optical+", "--k0", "1", "--epsilon", "0.5"]);
    assert!((v / (2.0 / 3.0) - 1.0).abs() < 1e-2, "{v}");
    let v = measure(&["evolve", "--branch", "acoustic+"]);
    assert!((v - 1.0).abs() < 1e-3, "{v}");
    let v = measure(&["evolve", "--k0", "0", "--branch", "optical+"]);
    assert!(v.abs() < 0.01, "{v}");
    let v = measure(&["evolve", "--branch", "optical-", "--method", "rk4", "--grid", "512"]);
    assert!((v / (-2.0 / 3.0) - 1.0).abs() < 1e-2, "{v}");
}

#[test]
fn evolve_files_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.csv");
    let series = dir.path().join("series.csv");
    let o = dirac8(&[
        "evolve",
        "--grid",
        "256",
        "--snapshots",
        snap.to_str().unwrap(),
        "--series",
        series.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let s = fs::read_to_string(snap).unwrap();
    assert!(s.contains("# t=0\n") && s.contains("# t=40\n"));
    assert_eq!(csv_rows(&s).len(), 512);
    let s = fs::read_to_string(series).unwrap();
    assert!(s.contains("t,centroid,width"));
    assert_eq!(csv_rows(&s).len(), 41);

    let o = dirac8(&["evolve", "--sigma", "0.1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("under-resolved"));
}

#[test]
fn thread_cap_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_dirac8"))
            .args(["solutions"])
            .env("DIRAC8_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("zero")), 2);
}

#[test]
fn custom_units_scale_energies() {
    let o = dirac8(&[
        "dispersion", "--units", "custom", "--me", "2", "--c", "3", "--hbar", "1", "--epsilon", "0.5", "--n", "2",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("# units=custom m_e=2 c=3 hbar=1 epsilon=0.5"));
    // m_e c² √(1+ε²) = 18·√1.25
    let e = csv_rows(&text)[0][3];
    assert!((e - 18.0 * 1.25f64.sqrt()).abs() < 1e-12);
}
