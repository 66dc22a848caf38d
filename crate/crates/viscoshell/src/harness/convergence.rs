//! ε-sweeps of the 3D problem against the single 2D reference solution.

use super::checks::IdentityRow;
use super::config::Config;
use crate::error::{Error, Result};
use crate::flexural::{solve2d, Flexural2DSetup, Flexural2DSolution, Model2D, Scaling};
use crate::geometry::{surface_eval, SurfaceChart};
use crate::kinematics::rho_eval;
use crate::loads::LoadSpec;
use crate::material::MaterialParams;
use crate::mesh::{Mesh2D, Mesh3D};
use crate::shell3d::{
    basis_strains, bilinear_norms_sq, extrude, field_norms_sq, gauss_points, solve3d, transverse_average, Shell3DSetup,
    Shell3DSolution, ShearStrain,
};
use std::sync::Arc;

#[derive(Clone)]
pub struct ConvergenceSetup {
    pub chart: Arc<dyn SurfaceChart>,
    pub mesh: Mesh2D,
    pub nz: usize,
    pub model: Model2D,
    pub material: MaterialParams,
    pub loads: LoadSpec,
    pub kappa: f64,
    pub dt: f64,
    pub t_end: f64,
    pub epsilons: Vec<f64>,
    pub shear: ShearStrain,
}

impl ConvergenceSetup {
    pub fn from_config(c: &Config) -> Result<Self> {
        Ok(ConvergenceSetup {
            chart: c.chart(),
            mesh: c.mesh2d()?,
            nz: c.nz,
            model: c.model,
            material: c.material,
            loads: c.loads(),
            kappa: c.kappa,
            dt: c.dt,
            t_end: c.t_end,
            epsilons: c.epsilons.clone(),
            shear: c.shear,
        })
    }

    pub fn flexural(&self) -> Flexural2DSetup {
        Flexural2DSetup {
            chart: self.chart.clone(),
            mesh: self.mesh.clone(),
            model: self.model,
            material: self.material,
            loads: self.loads.clone(),
            scaling: Scaling::Scaled,
            kappa: self.kappa,
            dt: self.dt,
            t_end: self.t_end,
            xi0: None,
        }
    }

    pub fn shell(&self, eps: f64) -> Result<Shell3DSetup> {
        Ok(Shell3DSetup {
            chart: self.chart.clone(),
            mesh: Mesh3D::new(self.mesh.clone(), self.nz)?,
            material: self.material,
            loads: self.loads.clone(),
            epsilon: eps,
            shear: self.shear,
            dt: self.dt,
            t_end: self.t_end,
        })
    }
}

/// One `ε` of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    /// ℓ²-in-time `H¹(ω)` distance of `ū(ε)` to `ξ`, plus the same for the
    /// backward-difference rates.
    pub err_h1st: f64,
    /// ℓ²-in-time `L²(Ω)` norm of `(1/ε)e_{α||3}(ε)`.
    pub err_shear: f64,
    /// ℓ²-in-time norm of `Υ_{αβ} = (1/ε)e_{α||β}(ε) + x₃ρ_{αβ}(ξ)` sampled at
    /// element centres on two `x₃` levels.
    pub upsilon_norm: f64,
    /// Distance of `(1/ε)e_{3||3}(ε)` from the memory closed form applied to
    /// `a^{αβ}(1/ε)e_{α||β}(ε)` (same samples).
    pub volterra_dev: f64,
    /// `|u − extruded ū|₀ / |u|₀` at the final time.
    pub x3_dependence: f64,
    /// Correlation of `(1/ε)e_{α||β}(ε)` with `−x₃ρ_{αβ}(ξ)` at the final time.
    pub e1_rho_correlation: f64,
    /// `‖u − extruded ξ‖₁ / ‖u‖₁` at the final time.
    pub err_full3d: f64,
    /// Largest `|Υ(x₃⁺) − Υ(x₃⁻)|` relative to `max |(1/ε)e_{α||β}|` at the final time.
    pub upsilon_level_spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Ordered by decreasing `ε`.
    pub rows: Vec<ConvergenceRow>,
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Least-squares slope of `log v` against `log ε`.
pub fn loglog_slope(eps: &[f64], v: &[f64]) -> f64 {
    match crate::geometry::fit_order(eps, v) {
        crate::geometry::Order::Slope(s) => s,
        crate::geometry::Order::Exact => f64::INFINITY,
    }
}

impl ConvergenceReport {
    pub fn column(&self, f: impl Fn(&ConvergenceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    /// Monotonicity and ratio gates.
    pub fn gates(&self) -> Vec<IdentityRow> {
        let flag = |name: &str, ok: bool| IdentityRow { name: name.into(), residual: if ok { 0.0 } else { 1.0 }, passed: ok };
        let h = self.column(|r| r.err_h1st);
        let ratio = h.last().unwrap() / h[0];
        vec![
            flag("err_h1st_strictly_decreasing", strictly_decreasing(&h)),
            IdentityRow::new("err_h1st_ratio_last_first", ratio, 0.6),
            flag("err_shear_strictly_decreasing", strictly_decreasing(&self.column(|r| r.err_shear))),
            flag("upsilon_norm_strictly_decreasing", strictly_decreasing(&self.column(|r| r.upsilon_norm))),
        ]
    }

    pub fn pass(&self) -> bool {
        self.gates().iter().all(IdentityRow::pass)
    }

    /// Log-log slopes of the four report columns (report-only).
    pub fn slopes(&self) -> [f64; 4] {
        let e = self.column(|r| r.epsilon);
        [
            loglog_slope(&e, &self.column(|r| r.err_h1st)),
            loglog_slope(&e, &self.column(|r| r.err_shear)),
            loglog_slope(&e, &self.column(|r| r.upsilon_norm)),
            loglog_slope(&e, &self.column(|r| r.volterra_dev)),
        ]
    }
}

/// Solves 2D once, then 3D for each `ε`.
pub fn run_convergence(setup: &ConvergenceSetup) -> Result<ConvergenceReport> {
    if setup.epsilons.len() < 3 {
        return Err(Error::InvalidArgument(format!("need >= 3 epsilons, got {}", setup.epsilons.len())));
    }
    let mut eps = setup.epsilons.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    let reference = solve2d(&setup.flexural())?;
    let rows = eps
        .iter()
        .map(|&e| {
            let sol3 = solve3d(&setup.shell(e)?)?;
            compare(setup.chart.as_ref(), &setup.material, &reference, &sol3)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { rows })
}

fn nodal_xi(sol2: &Flexural2DSolution, xi: &[f64]) -> Vec<f64> {
    let l = &sol2.system.layout;
    let c: Vec<Vec<f64>> = (0..3).map(|i| l.nodal_values(xi, i)).collect();
    (0..l.mesh.num_nodes()).flat_map(|n| [c[0][n], c[1][n], c[2][n]]).collect()
}

fn a_norm_sq(a_up: &[[f64; 2]; 2], t: &[[f64; 2]; 2]) -> f64 {
    let mut v = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for s in 0..2 {
                for u in 0..2 {
                    v += a_up[a][s] * a_up[b][u] * t[a][b] * t[s][u];
                }
            }
        }
    }
    v
}

fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Compares one 3D solution with the 2D reference; includes the limit-strain probe.
pub fn compare(chart: &dyn SurfaceChart, mat: &MaterialParams, sol2: &Flexural2DSolution, sol3: &Shell3DSolution) -> Result<ConvergenceRow> {
    let l2 = &sol2.system.layout;
    let l3 = &sol3.layout;
    let foot = &l3.mesh.footprint;
    if !foot.same_footprint(&l2.mesh) {
        return Err(Error::MeshMismatch(format!(
            "3D footprint {}x{} vs 2D mesh {}x{}",
            foot.nx, foot.ny, l2.mesh.nx, l2.mesh.ny
        )));
    }
    let h2 = &sol2.history;
    if h2.times.len() != sol3.times.len() || (h2.dt - sol3.dt).abs() > 1e-14 {
        return Err(Error::MeshMismatch("2D and 3D time grids differ".into()));
    }
    let eps = sol3.epsilon;
    let dt = sol3.dt;
    let steps = sol3.times.len() - 1;

    // Space-time H¹ distance of the averages.
    let mut err_h1st = 0.0;
    let mut prev = vec![0.0; 3 * foot.num_nodes()];
    for n in 1..=steps {
        let avg = transverse_average(&l3.mesh, &sol3.snapshots[n]);
        let d: Vec<f64> = avg.iter().zip(nodal_xi(sol2, &h2.snapshots[n])).map(|(a, b)| a - b).collect();
        let (a, b) = bilinear_norms_sq(foot, &d, 3);
        let rate: Vec<f64> = d.iter().zip(&prev).map(|(x, y)| (x - y) / dt).collect();
        let (c, e) = bilinear_norms_sq(foot, &rate, 3);
        err_h1st += dt * (a + b + c + e);
        prev = d;
    }

    // Transverse shear over Ω.
    let mut err_shear = 0.0;
    let gp = gauss_points(l3);
    for el in 0..l3.mesh.num_elements() {
        let dofs = l3.element_dofs(el);
        for (local, w) in &gp {
            let (basis, _) = basis_strains(l3, chart, eps, sol3.shear, el, *local)?;
            for u in &sol3.snapshots[1..] {
                for al in 0..2 {
                    let s: f64 = dofs.iter().zip(&basis).map(|(d, b)| u[*d] * b[al][2]).sum();
                    err_shear += dt * w * (s / eps).powi(2);
                }
            }
        }
    }

    // Limit-strain probe at element centres, x₃ = ±1/√3.
    let (th, r) = (mat.theta_v, mat.rho_v);
    let sv = th + r;
    let k = mat.k_decay();
    let tl = th * mat.lambda_c();
    let levels = [-1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt()];
    let area = foot.h()[0] * foot.h()[1];
    let mut ups = 0.0;
    let mut vdev = 0.0;
    let (mut cx, mut cy) = (Vec::new(), Vec::new());
    let mut spread: f64 = 0.0;
    let mut e1_max: f64 = 0.0;
    for fe in 0..foot.num_elements() {
        let o = foot.element_origin(fe);
        let y = [o[0] + 0.5 * foot.h()[0], o[1] + 0.5 * foot.h()[1]];
        let surf = surface_eval(chart, y)?;
        let rho: Vec<[[f64; 2]; 2]> = h2.snapshots.iter().map(|xi| rho_eval(&l2.eval(xi, y), &surf)).collect();
        let mut final_ups = [[[0.0; 2]; 2]; 2];
        for (li, &x3) in levels.iter().enumerate() {
            let (el, local) = l3.locate([y[0], y[1], x3]);
            let dofs = l3.element_dofs(el);
            let (basis, _) = basis_strains(l3, chart, eps, sol3.shear, el, local)?;
            let mut w_mem = 0.0;
            for n in 1..=steps {
                let u = &sol3.snapshots[n];
                let mut e = [[0.0; 3]; 3];
                for (d, b) in dofs.iter().zip(&basis) {
                    let c = u[*d];
                    for i in 0..3 {
                        for j in 0..3 {
                            e[i][j] += c * b[i][j] / eps;
                        }
                    }
                }
                let mut y_ab = [[0.0; 2]; 2];
                for a in 0..2 {
                    for b in 0..2 {
                        y_ab[a][b] = e[a][b] + x3 * rho[n][a][b];
                    }
                }
                ups += dt * area * 0.5 * a_norm_sq(&surf.a_up, &y_ab);
                // Backward-Euler form of the closed-form memory, matching the 3D time stepping.
                let m: f64 = (0..2).map(|a| (0..2).map(|b| surf.a_up[a][b] * e[a][b]).sum::<f64>()).sum();
                w_mem = (w_mem - dt * tl / sv * m) / (1.0 + k * dt);
                let pred = -th / sv * m + w_mem;
                vdev += dt * area * 0.5 * (e[2][2] - pred).powi(2);
                if n == steps {
                    final_ups[li] = y_ab;
                    for (a, b) in [(0, 0), (0, 1), (1, 1)] {
                        e1_max = e1_max.max(e[a][b].abs());
                        cx.push(e[a][b]);
                        cy.push(-x3 * rho[n][a][b]);
                    }
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                spread = spread.max((final_ups[1][a][b] - final_ups[0][a][b]).abs());
            }
        }
    }

    let u_fin = &sol3.snapshots[steps];
    let avg = transverse_average(&l3.mesh, u_fin);
    let dx: Vec<f64> = u_fin.iter().zip(extrude(&l3.mesh, &avg)).map(|(a, b)| a - b).collect();
    let (u0, u1) = field_norms_sq(l3, u_fin);
    let x3_dependence = if u0 > 0.0 { (field_norms_sq(l3, &dx).0 / u0).sqrt() } else { 0.0 };
    let df: Vec<f64> = u_fin.iter().zip(extrude(&l3.mesh, &nodal_xi(sol2, &h2.snapshots[steps]))).map(|(a, b)| a - b).collect();
    let (f0, f1) = field_norms_sq(l3, &df);
    let err_full3d = if u0 + u1 > 0.0 { ((f0 + f1) / (u0 + u1)).sqrt() } else { 0.0 };

    Ok(ConvergenceRow {
        epsilon: eps,
        err_h1st: err_h1st.sqrt(),
        err_shear: err_shear.sqrt(),
        upsilon_norm: ups.sqrt(),
        volterra_dev: vdev.sqrt(),
        x3_dependence,
        e1_rho_correlation: correlation(&cx, &cy),
        err_full3d,
        upsilon_level_spread: if e1_max > 0.0 { spread / e1_max } else { 0.0 },
    })
}
