use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viscoshell")).args(args).current_dir(dir).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_cfg(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn verify_identities_with_defaults_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-identities", "--out", "a"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(run(&["verify-identities", "--out", "b"], dir.path()).status.code(), Some(0));
    let a = fs::read(dir.path().join("a/report_identities.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b/report_identities.csv")).unwrap());
    let r = rows(&dir.path().join("a/report_identities.csv"));
    assert_eq!(r[0], ["name", "residual", "pass"]);
    assert!(r[1..].iter().all(|row| row[2] == "true"));
}

#[test]
fn usage_errors_exit_2_and_name_the_culprit() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve2d", "--config", "missing.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.cfg"));

    let cfg = write_cfg(dir.path(), "epsilons = 0.1\n");
    let o = run(&["converge", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("need ≥3 epsilons"));

    let cfg = write_cfg(dir.path(), "mesh.nx = 8\nmesh.nq = 3\n");
    let o = run(&["solve2d", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mesh.nq"));

    let cfg = write_cfg(dir.path(), "material.mu = -1\n");
    let o = run(&["verify-identities", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("material.mu"));

    assert_eq!(run(&["no-such-command"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&[], dir.path()).status.code(), Some(2));
}

#[test]
fn check_subcommands_pass_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [("geometry-check", "report_geometry.csv"), ("ode-check", "report_ode.csv")] {
        let o = run(&[cmd, "--out", "o"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
        assert!(rows(&dir.path().join("o").join(file))[1..].iter().all(|r| r[2] == "true"));
    }
}

#[test]
fn solvers_write_snapshots_and_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "mesh.nx = 4\nmesh.ny = 4\nmesh.nz = 2\nT = 0.2\ndt = 0.05\nsnapshot_every = 2\n");
    let o = run(&["solve2d", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("o");
    let s = rows(&out.join("summary2d.csv"));
    assert_eq!(s[0], ["t", "bending_energy", "memory_norm", "residual"]);
    assert_eq!(s.len(), 6);
    for n in [0, 2, 4] {
        let snap = rows(&out.join(format!("snapshot2d_{n:05}.csv")));
        assert_eq!(snap[0], ["node", "dof", "value"]);
        assert_eq!(snap.len(), 1 + 25 * 4);
    }

    let o = run(&["solve3d", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d = rows(&out.join("diagnostics3d.csv"));
    assert_eq!(d[0], ["t", "energy", "korn_ratio"]);
    assert_eq!(d[1][2], "", "zero initial field has no Korn ratio");
    assert!(d[2][2].parse::<f64>().unwrap() > 0.0);
    assert_eq!(rows(&out.join("snapshot3d_00004.csv")).len(), 1 + 3 * 25 * 3);
}

#[test]
fn converge_gates_are_recomputable_from_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "mesh.nx = 4\nmesh.ny = 4\nmesh.nz = 2\nT = 0.2\ndt = 0.1\nepsilons = 0.05, 0.2, 0.1\nshear = ans\nsvg = true\n",
    );
    let o = run(&["converge", "--config", &cfg, "--out", "o"], dir.path());
    let code = o.status.code().unwrap();
    assert!(code == 0 || code == 1, "{}", stderr(&o));
    let out = dir.path().join("o");
    let r = rows(&out.join("report_convergence.csv"));
    assert_eq!(r[0], ["epsilon", "err_h1st", "err_shear", "upsilon_norm", "volterra_dev"]);
    let col = |k: usize| r[1..].iter().map(|row| row[k].parse::<f64>().unwrap()).collect::<Vec<_>>();
    assert_eq!(col(0), [0.2, 0.1, 0.05]);
    let dec = |v: Vec<f64>| v.windows(2).all(|w| w[1] < w[0]);
    let h = col(1);
    let recomputed = [dec(col(1)), h[2] / h[0] < 0.6, dec(col(2)), dec(col(3))];
    let gates: Vec<bool> = rows(&out.join("report_convergence_gates.csv"))[1..].iter().map(|g| g[2] == "true").collect();
    assert_eq!(gates, recomputed);
    assert_eq!(code == 0, recomputed.iter().all(|&g| g));
    assert!(fs::read_to_string(out.join("report_convergence.svg")).unwrap().contains("<polyline"));
    assert_eq!(rows(&out.join("report_convergence_secondary.csv")).len(), 4);
}
