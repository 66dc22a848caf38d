//! CSV and SVG writers. Floats use Rust's shortest round-trip formatting, so
//! every gate can be recomputed from the files alone.

use super::checks::IdentityRow;
use super::convergence::ConvergenceReport;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<()> {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    fs::write(path, s)
}

pub fn write_identities(path: &Path, rows: &[IdentityRow]) -> io::Result<()> {
    write_csv(
        path,
        &["name", "residual", "pass"],
        rows.iter().map(|r| vec![r.name.clone(), format!("{:e}", r.residual), r.pass().to_string()]),
    )
}

pub fn write_convergence(path: &Path, report: &ConvergenceReport) -> io::Result<()> {
    write_csv(
        path,
        &["epsilon", "err_h1st", "err_shear", "upsilon_norm", "volterra_dev"],
        report.rows.iter().map(|r| {
            [r.epsilon, r.err_h1st, r.err_shear, r.upsilon_norm, r.volterra_dev].iter().map(|v| format!("{v:e}")).collect()
        }),
    )
}

/// Report-only columns without a pass/fail gate.
pub fn write_convergence_secondary(path: &Path, report: &ConvergenceReport) -> io::Result<()> {
    write_csv(
        path,
        &["epsilon", "x3_dependence", "e1_rho_correlation", "err_full3d", "upsilon_level_spread"],
        report.rows.iter().map(|r| {
            [r.epsilon, r.x3_dependence, r.e1_rho_correlation, r.err_full3d, r.upsilon_level_spread]
                .iter()
                .map(|v| format!("{v:e}"))
                .collect()
        }),
    )
}

/// `node,dof,value` with `dof` the index within the node's block.
pub fn write_snapshot(path: &Path, per_node: usize, values: &[f64]) -> io::Result<()> {
    write_csv(
        path,
        &["node", "dof", "value"],
        values.iter().enumerate().map(|(i, v)| vec![(i / per_node).to_string(), (i % per_node).to_string(), format!("{v:e}")]),
    )
}

pub fn write_summary2d(path: &Path, times: &[f64], energy: &[f64], memory: &[f64], residual: &[f64]) -> io::Result<()> {
    write_csv(
        path,
        &["t", "bending_energy", "memory_norm", "residual"],
        (0..times.len()).map(|n| [times[n], energy[n], memory[n], residual[n]].iter().map(|v| format!("{v:e}")).collect()),
    )
}

/// `korn_ratio` is empty where the field vanishes.
pub fn write_diagnostics3d(path: &Path, times: &[f64], energy: &[f64], korn: &[Option<f64>]) -> io::Result<()> {
    write_csv(
        path,
        &["t", "energy", "korn_ratio"],
        (0..times.len()).map(|n| vec![format!("{:e}", times[n]), format!("{:e}", energy[n]), korn[n].map_or(String::new(), |k| format!("{k:e}"))]),
    )
}

/// Log-log line plot of several series against a shared abscissa.
pub fn loglog_svg(title: &str, xlabel: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 60.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let pos = |v: &f64| *v > 0.0 && v.is_finite();
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ys: Vec<f64> = series.iter().flat_map(|(_, v)| v.iter().filter(|v| pos(v)).map(|v| v.log10())).collect();
    let (x0, x1) = (lx.iter().cloned().fold(f64::MAX, f64::min), lx.iter().cloned().fold(f64::MIN, f64::max));
    let (y0, y1) = (ys.iter().cloned().fold(f64::MAX, f64::min).floor(), ys.iter().cloned().fold(f64::MIN, f64::max).ceil());
    let sx = |v: f64| M + (v - x0) / (x1 - x0).max(1e-12) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v - y0) / (y1 - y0).max(1e-12) * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(s, r#"<path d="M{M},{M} V{} H{}" fill="none" stroke="black"/>"#, H - M, W - M);
    for (i, v) in x.iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{v}</text>"#, sx(lx[i]), H - M + 16.0);
    }
    let mut d = y0 as i32;
    while d as f64 <= y1 {
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{d}</text>"#, M - 6.0, sy(d as f64) + 4.0);
        d += 1;
    }
    for (k, (name, v)) in series.iter().enumerate() {
        let c = COLORS[k % COLORS.len()];
        let pts: Vec<String> =
            lx.iter().zip(v).filter(|(_, y)| pos(y)).map(|(x, y)| format!("{:.1},{:.1}", sx(*x), sy(y.log10()))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, pts.join(" "));
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{c}">{name}</text>"#, W - M - 110.0, M + 16.0 * k as f64);
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_convergence_svg(path: &Path, report: &ConvergenceReport) -> io::Result<()> {
    let x = report.column(|r| r.epsilon);
    let series = [
        ("err_h1st", report.column(|r| r.err_h1st)),
        ("err_shear", report.column(|r| r.err_shear)),
        ("upsilon_norm", report.column(|r| r.upsilon_norm)),
        ("volterra_dev", report.column(|r| r.volterra_dev)),
    ];
    fs::write(path, loglog_svg("error vs epsilon", "epsilon", &x, &series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::convergence::ConvergenceRow;

    #[test]
    fn csv_layout_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("id.csv");
        write_identities(&p, &[IdentityRow::new("r_a", 0.1 + 0.2, 1.0)]).unwrap();
        let s = fs::read_to_string(&p).unwrap();
        let line = s.lines().nth(1).unwrap();
        assert_eq!(s.lines().next().unwrap(), "name,residual,pass");
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 0.1 + 0.2);
        assert!(line.ends_with(",true"));

        let p = dir.path().join("snap.csv");
        write_snapshot(&p, 3, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = fs::read_to_string(&p).unwrap();
        assert_eq!(s.lines().last().unwrap(), "1,0,4e0");
    }

    #[test]
    fn svg_is_well_formed() {
        let row = |e: f64| ConvergenceRow {
            epsilon: e,
            err_h1st: e * e,
            err_shear: e,
            upsilon_norm: e,
            volterra_dev: 0.0,
            x3_dependence: 0.0,
            e1_rho_correlation: 1.0,
            err_full3d: 0.0,
            upsilon_level_spread: 0.0,
        };
        let r = ConvergenceReport { rows: vec![row(0.2), row(0.1), row(0.05)] };
        let s = loglog_svg("t", "epsilon", &r.column(|r| r.epsilon), &[("a", r.column(|r| r.err_h1st)), ("z", r.column(|r| r.volterra_dev))]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 2);
    }
}
