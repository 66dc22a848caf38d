//! Command-line front end. Exit codes: 0 all checks passed, 1 a check failed
//! or a solve broke down, 2 usage or configuration error.

use super::checks::{
    geometry_check, identity_sweep, ode_sweep, theta_sweep, verify_identities, volterra_ode_check, IdentityRow,
};
use super::config::Config;
use super::convergence::{run_convergence, ConvergenceSetup};
use super::report;
use crate::error::Error;
use crate::flexural::{solve2d, Flexural2DSetup};
use crate::shell3d::solve3d;
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "viscoshell", about = "Viscoelastic shell asymptotics: solvers and verification harness")]
struct Cli {
    /// Flat `key = value` configuration file; defaults apply when omitted.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Overrides `output_dir`.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Shell-chart asymptotics on the cylinder and hemisphere.
    GeometryCheck,
    /// Reduction identities of the limit tensors over random materials.
    VerifyIdentities,
    /// ODE against closed-form memory for the transverse strain.
    OdeCheck,
    /// Time-dependent flexural problem.
    Solve2d,
    /// Time-dependent three-dimensional problem at `epsilon`.
    Solve3d,
    /// 3D solves over `epsilons` compared against one 2D solve.
    Converge,
}

/// Failure classes, mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(s) | Failure::Check(s) => f.write_str(s),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InvalidMaterial { .. } | Error::MeshMismatch(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn io_failure(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

/// Runs one subcommand; returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Check(m)) => {
            eprintln!("failed: {m}");
            1
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => Config::from_file(p),
        None => Ok(Config::default()),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    if cli.command == Command::Converge && cfg.epsilons.len() < 3 {
        return Err(Failure::Usage(format!("key `epsilons`: need ≥3 epsilons, got {}", cfg.epsilons.len())));
    }
    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out).map_err(io_failure(&out))?;
    match cli.command {
        Command::GeometryCheck => gated(&out.join("report_geometry.csv"), geometry_check(&cfg.geometry_epsilons)?.rows()),
        Command::VerifyIdentities => {
            let mut rows = verify_identities(&cfg.material)?;
            rows.extend(identity_sweep(cfg.seed, cfg.draws)?);
            rows.extend(theta_sweep(&cfg.material)?);
            gated(&out.join("report_identities.csv"), rows)
        }
        Command::OdeCheck => {
            let lin = volterra_ode_check(&cfg.material, &[0.0, 1.0])?;
            let sweep = ode_sweep(cfg.seed, cfg.ode_draws)?;
            let rows = vec![
                IdentityRow::new("ode_linear_max_dev", lin.max_dev, 1e-8),
                IdentityRow::new("ode_sweep_max_dev", sweep.max_dev, 1e-7),
                IdentityRow::new("ode_sweep_deriv_dev", sweep.deriv_dev, 1e-6),
            ];
            gated(&out.join("report_ode.csv"), rows)
        }
        Command::Solve2d => solve2d_cmd(&cfg, &out),
        Command::Solve3d => solve3d_cmd(&cfg, &out),
        Command::Converge => {
            let setup = ConvergenceSetup::from_config(&cfg)?;
            let rep = run_convergence(&setup)?;
            let p = out.join("report_convergence.csv");
            report::write_convergence(&p, &rep).map_err(io_failure(&p))?;
            let p = out.join("report_convergence_secondary.csv");
            report::write_convergence_secondary(&p, &rep).map_err(io_failure(&p))?;
            if cfg.svg {
                let p = out.join("report_convergence.svg");
                report::write_convergence_svg(&p, &rep).map_err(io_failure(&p))?;
            }
            for r in &rep.rows {
                println!(
                    "eps={} err_h1st={:.4e} err_shear={:.4e} upsilon={:.4e} volterra={:.4e}",
                    r.epsilon, r.err_h1st, r.err_shear, r.upsilon_norm, r.volterra_dev
                );
            }
            let slopes = rep.slopes();
            println!("slopes (report only): err_h1st {:.2}, err_shear {:.2}, upsilon {:.2}, volterra {:.2}", slopes[0], slopes[1], slopes[2], slopes[3]);
            gated(&out.join("report_convergence_gates.csv"), rep.gates())
        }
    }
}

fn gated(path: &Path, rows: Vec<IdentityRow>) -> Result<bool, Failure> {
    report::write_identities(path, &rows).map_err(io_failure(path))?;
    let failed: Vec<&IdentityRow> = rows.iter().filter(|r| !r.pass()).collect();
    for r in &failed {
        println!("FAIL {} residual={:e}", r.name, r.residual);
    }
    println!("{}/{} checks passed -> {}", rows.len() - failed.len(), rows.len(), path.display());
    Ok(failed.is_empty())
}

fn snapshot_indices(n: usize, every: usize) -> Vec<usize> {
    if every == 0 {
        return vec![n - 1];
    }
    let mut v: Vec<usize> = (0..n).step_by(every).collect();
    if v.last() != Some(&(n - 1)) {
        v.push(n - 1);
    }
    v
}

fn solve2d_cmd(cfg: &Config, out: &Path) -> Result<bool, Failure> {
    let setup = Flexural2DSetup { scaling: cfg.scaling(), ..ConvergenceSetup::from_config(cfg)?.flexural() };
    let sol = solve2d(&setup)?;
    let h = &sol.history;
    for w in &h.warnings {
        eprintln!("warning: {w}");
    }
    for n in snapshot_indices(h.snapshots.len(), cfg.snapshot_every) {
        let p = out.join(format!("snapshot2d_{n:05}.csv"));
        report::write_snapshot(&p, sol.system.layout.per_node, &h.snapshots[n]).map_err(io_failure(&p))?;
    }
    let p = out.join("summary2d.csv");
    report::write_summary2d(&p, &h.times, &h.bending_energies, &h.memory_norms, &h.residuals).map_err(io_failure(&p))?;
    let r = h.max_residual();
    println!("{} steps, max relative residual {r:e} -> {}", h.times.len() - 1, p.display());
    Ok(r < 1e-8)
}

fn solve3d_cmd(cfg: &Config, out: &Path) -> Result<bool, Failure> {
    let setup = ConvergenceSetup::from_config(cfg)?.shell(cfg.epsilon)?;
    let sol = solve3d(&setup)?;
    for n in snapshot_indices(sol.snapshots.len(), cfg.snapshot_every) {
        let p = out.join(format!("snapshot3d_{n:05}.csv"));
        report::write_snapshot(&p, 3, &sol.snapshots[n]).map_err(io_failure(&p))?;
    }
    let energy = sol.energies();
    let korn = sol.korn_ratios(setup.chart.as_ref())?;
    let p = out.join("diagnostics3d.csv");
    report::write_diagnostics3d(&p, &sol.times, &energy, &korn).map_err(io_failure(&p))?;
    println!("{} steps at eps={}, final energy {:e} -> {}", sol.times.len() - 1, sol.epsilon, energy.last().unwrap(), p.display());
    Ok(energy.iter().all(|e| e.is_finite()))
}
