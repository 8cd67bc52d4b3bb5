use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_kp-lab");

const SOLITON_CFG: &str = "\
# KP-I line soliton
equation = kp1
grid.nx = 256
grid.ny = 8
grid.lx = 20pi
grid.ly = 2pi
time.dt = 0.001
time.t_final = 0.2
time.output_interval = 0.05
time.snapshot_interval = 0.1
ic.kind = soliton
ic.c = 2.5
norms.anisotropic = 1 0, 0 0
";

fn kp_lab(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("KP_LAB_THREADS", "2")
        .output()
        .expect("spawn kp-lab")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_values(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}

fn simulate(tmp: &TempDir, cfg: &str, out: &str) -> Output {
    let out = tmp.path().join(out);
    kp_lab(&["simulate", "--config", cfg, "--out", out.to_str().unwrap()])
}

#[test]
fn simulate_writes_diagnostics_snapshots_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "sol.cfg", SOLITON_CFG);
    let run = simulate(&tmp, &cfg, "a");
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let dir = tmp.path().join("a");
    let text = fs::read_to_string(dir.join("diagnostics.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(
        header.starts_with("step,t,dt,mass,energy,l2,linf"),
        "{header}"
    );
    let rows = csv_values(&dir.join("diagnostics.csv"));
    assert_eq!(rows.len(), 5);
    let (m0, m1) = (rows[0][3], rows[4][3]);
    assert!(((m1 - m0) / m0).abs() < 1e-9);
    for name in [
        "snap_00000.kpf",
        "snap_00001.kpf",
        "snap_00002.kpf",
        "final.kpf",
        "manifest.txt",
    ] {
        assert!(dir.join(name).exists(), "{name}");
    }
    let snap = kplab::snapshot::load(dir.join("snap_00002.kpf")).unwrap();
    assert!((snap.t - 0.2).abs() < 1e-12);

    let again = simulate(&tmp, &cfg, "b");
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        fs::read(dir.join("diagnostics.csv")).unwrap(),
        fs::read(tmp.path().join("b/diagnostics.csv")).unwrap()
    );

    let manifest = dir.join("manifest.txt");
    let rerun = simulate(&tmp, manifest.to_str().unwrap(), "c");
    assert_eq!(
        rerun.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&rerun.stderr)
    );
    let replay = csv_values(&tmp.path().join("c/diagnostics.csv"));
    assert_eq!(replay.len(), rows.len());
    for (a, b) in rows.iter().zip(&replay) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn decompose_reads_a_snapshot() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "sol.cfg", SOLITON_CFG);
    assert_eq!(simulate(&tmp, &cfg, "a").status.code(), Some(0));
    let snap = tmp.path().join("a/final.kpf");
    let out = tmp.path().join("dec");
    let run = kp_lab(&[
        "decompose",
        "--snapshot",
        snap.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let rows = csv_values(&out.join("decompose.csv"));
    assert!(rows.len() >= 5);
    assert!(rows.iter().all(|r| r.len() == 4 && r[1] >= 0.0));
    for w in rows.windows(2) {
        assert!(w[1][3] >= w[0][3] && w[1][3] <= 2.0 * w[0][3] * (1.0 + 1e-12));
    }
}

#[test]
fn perturbation_run_writes_its_table() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "pert.cfg",
        "equation = kp1\ngrid.nx = 256\ngrid.ny = 16\ngrid.lx = 20pi\ngrid.ly = 2pi\n\
         time.dt = 0.002\ntime.t_final = 0.1\ntime.output_interval = 0.05\n\
         ic.kind = random\nic.amplitude = 0.01\n\
         perturbation.background = soliton\nperturbation.c = 1\n",
    );
    let out = tmp.path().join("p");
    let run = kp_lab(&["perturb", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = fs::read_to_string(out.join("perturbation.csv")).unwrap();
    assert!(text.starts_with("step,t,dt,v_mass,v_hs,v_es1,u_mass,g_norm"));
    assert_eq!(csv_values(&out.join("perturbation.csv")).len(), 3);
}

#[test]
fn verify_echoes_the_zaitsev_parameters() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let run = kp_lab(&[
        "verify",
        "--solution",
        "zaitsev",
        "--nx",
        "256",
        "--ny",
        "32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    let value = |key: &str| -> f64 {
        stdout
            .lines()
            .find_map(|l| l.trim().strip_prefix(&format!("{key}: ")))
            .unwrap_or_else(|| panic!("{key} missing in {stdout}"))
            .parse()
            .unwrap()
    };
    assert!((value("kappa") - 4.0 / 3.0).abs() < 1e-12);
    assert!((value("c") - 13.0).abs() < 1e-12);
    assert!(fs::read_to_string(out.join("manifest.txt"))
        .unwrap()
        .contains("manifest.kappa"));
}

#[test]
fn probes_write_their_tables() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("r");
    let run = kp_lab(&[
        "probe",
        "--mode",
        "resonance",
        "--samples",
        "200",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(csv_values(&out.join("probe.csv")).len(), 200);

    let out = tmp.path().join("s");
    let run = kp_lab(&[
        "probe",
        "--mode",
        "strichartz",
        "--q",
        "4",
        "--r",
        "4",
        "--nt",
        "8",
        "--nx",
        "64",
        "--ny",
        "16",
        "--lx",
        "10pi",
        "--ly",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(out.join("probe.csv").exists() && out.join("manifest.txt").exists());

    let bad = kp_lab(&[
        "probe",
        "--mode",
        "strichartz",
        "--q",
        "2",
        "--r",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(kp_lab(&[]).status.code(), Some(64));
    assert_eq!(kp_lab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(kp_lab(&["--help"]).status.code(), Some(0));

    let tmp = TempDir::new().unwrap();
    let bad = write_config(
        tmp.path(),
        "bad.cfg",
        &format!("{SOLITON_CFG}grid.nz = 4\n"),
    );
    let run = simulate(&tmp, &bad, "bad");
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("grid.nz"));

    let blow = write_config(
        tmp.path(),
        "blow.cfg",
        "equation = kp1\ngrid.nx = 256\ngrid.ny = 8\ngrid.lx = 20pi\ngrid.ly = 2pi\n\
         time.dt = 0.05\ntime.t_final = 0.5\ntime.dt_rule = false\n\
         ic.kind = gaussian\nic.amplitude = 400\n",
    );
    let run = simulate(&tmp, &blow, "blow");
    assert_eq!(
        run.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(tmp.path().join("blow/final.kpf").exists());
}
