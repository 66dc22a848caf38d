use super::chart::{SurfaceChart, V3};
use super::surface::{inv2, surface_eval, SurfacePointData};
use crate::error::{Error, Result};

/// Geometry of the scaled shell body at `x = (y₁, y₂, x₃) ∈ Ω`, for the chart
/// `Θ = θ(y) + εx₃ a₃(y)`.
///
/// `gamma3[p][i][j] = Γ^p_{ij}(ε)` with derivatives taken in the unscaled
/// coordinates `x^ε = (y, εx₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumePointData {
    pub x: [f64; 3],
    pub epsilon: f64,
    pub g_cov: [V3; 3],
    pub g_con: [V3; 3],
    pub g_ab: [[f64; 3]; 3],
    pub g_up: [[f64; 3]; 3],
    pub gamma3: [[[f64; 3]; 3]; 3],
    pub det_g: f64,
}

impl VolumePointData {
    pub fn sqrt_g(&self) -> f64 {
        self.det_g.sqrt()
    }
}

/// Evaluates the 3D chart data from precomputed surface data.
///
/// `g_{α3} = 0` and `g₃₃ = 1` hold analytically (`a₃` is a unit normal and
/// `∂_α a₃` is tangent), so they are stored as exact zeros/ones; the same
/// holds for `Γ³_{α3}` and `Γ^p_{33}`.
pub fn volume_eval_at(surf: &SurfacePointData, eps: f64, x3: f64) -> Result<VolumePointData> {
    let xe = eps * x3;
    let g = [surf.a_cov[0] + xe * surf.da3[0], surf.a_cov[1] + xe * surf.da3[1], surf.a3];
    let det = g[0].cross(&g[1]).dot(&g[2]);
    if !(det > 0.0) {
        return Err(Error::EpsilonTooLarge { eps, det, x: [surf.y[0], surf.y[1], x3] });
    }

    let mut g2 = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g2[i][j] = g[i].dot(&g[j]);
        }
    }
    let (g2_up, _) = inv2(g2);
    let mut g_ab = [[0.0; 3]; 3];
    let mut g_up = [[0.0; 3]; 3];
    for i in 0..2 {
        for j in 0..2 {
            g_ab[i][j] = g2[i][j];
            g_up[i][j] = g2_up[i][j];
        }
    }
    g_ab[2][2] = 1.0;
    g_up[2][2] = 1.0;
    let g_con = [
        g2_up[0][0] * g[0] + g2_up[0][1] * g[1],
        g2_up[1][0] * g[0] + g2_up[1][1] * g[1],
        surf.a3,
    ];

    // ∂_i g_j = ∂_i∂_j Θ
    let z = V3::zeros();
    let mut dg = [[z; 3]; 3];
    for a in 0..2 {
        for b in 0..2 {
            dg[a][b] = surf.d2_theta[a][b] + xe * surf.dda3[a][b];
        }
        dg[a][2] = surf.da3[a];
        dg[2][a] = surf.da3[a];
    }

    let mut gamma3 = [[[0.0; 3]; 3]; 3];
    for p in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let structural_zero = (p == 2 && (i == 2 || j == 2)) || (i == 2 && j == 2);
                if !structural_zero {
                    gamma3[p][i][j] = g_con[p].dot(&dg[i][j]);
                }
            }
        }
    }

    Ok(VolumePointData {
        x: [surf.y[0], surf.y[1], x3],
        epsilon: eps,
        g_cov: g,
        g_con,
        g_ab,
        g_up,
        gamma3,
        det_g: det * det,
    })
}

/// Evaluates the 3D chart data at `x = (y₁, y₂, x₃)`.
pub fn volume_eval(chart: &dyn SurfaceChart, eps: f64, x: [f64; 3]) -> Result<VolumePointData> {
    let surf = surface_eval(chart, [x[0], x[1]])?;
    volume_eval_at(&surf, eps, x[2])
}

/// A fitted asymptotic order, or `Exact` when every residual is at round-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Exact,
    Slope(f64),
}

impl Order {
    pub fn in_range(&self, lo: f64, hi: f64) -> bool {
        matches!(*self, Order::Slope(s) if s >= lo && s <= hi)
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Exact => write!(f, "exact"),
            Order::Slope(s) => write!(f, "{s:.4}"),
        }
    }
}

/// Result of [`asymptotic_check`]: residual magnitudes per `ε` and fitted orders.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub eps: Vec<f64>,
    /// `max |Γ^σ_{αβ}(ε) − Γ^σ_{αβ} + εx₃ b^σ_β|_α|`
    pub gamma_tangential: Vec<f64>,
    /// `max |Γ^σ_{α3}(ε) + b^σ_α + εx₃ b^τ_α b^σ_τ|`
    pub gamma_normal: Vec<f64>,
    /// `max |Γ³_{αβ}(ε) − b_{αβ} + εx₃ b^σ_α b_{σβ}|`
    pub gamma3_closed_form: Vec<f64>,
    /// `max |g(ε) − a|`
    pub det_g: Vec<f64>,
    pub order_gamma_tangential: Order,
    pub order_gamma_normal: Order,
    pub order_det_g: Order,
}

/// Below this, a residual is treated as round-off.
const ROUNDOFF: f64 = 1e-13;

/// Least-squares slope of `log r` against `log ε`.
pub fn fit_order(eps: &[f64], r: &[f64]) -> Order {
    if r.iter().all(|&v| v <= ROUNDOFF) {
        return Order::Exact;
    }
    let pts: Vec<(f64, f64)> =
        eps.iter().zip(r).filter(|(_, &v)| v > 0.0).map(|(&e, &v)| (e.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Order::Slope(sxy / sxx)
}

/// Samples the expansions of the 3D Christoffel symbols and `g(ε)` at `y`
/// over `x₃ ∈ {±1, ±½}` and fits their orders in `ε`.
pub fn asymptotic_check(chart: &dyn SurfaceChart, y: [f64; 2], eps_list: &[f64]) -> Result<AsymptoticReport> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidArgument("asymptotic_check needs at least 3 epsilon values".into()));
    }
    let s = surface_eval(chart, y)?;
    let c = s.c_ab();
    let mut rep = AsymptoticReport {
        eps: eps_list.to_vec(),
        gamma_tangential: vec![],
        gamma_normal: vec![],
        gamma3_closed_form: vec![],
        det_g: vec![],
        order_gamma_tangential: Order::Exact,
        order_gamma_normal: Order::Exact,
        order_det_g: Order::Exact,
    };
    for &eps in eps_list {
        let (mut rt, mut rn, mut r3, mut rg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for x3 in [-1.0, -0.5, 0.5, 1.0] {
            let v = volume_eval_at(&s, eps, x3)?;
            let ex = eps * x3;
            rg = rg.max((v.det_g - s.area_a).abs());
            for al in 0..2 {
                for be in 0..2 {
                    r3 = r3.max((v.gamma3[2][al][be] - (s.b_ab[al][be] - ex * c[al][be])).abs());
                    for sg in 0..2 {
                        let t = v.gamma3[sg][al][be] - s.gamma[sg][al][be] + ex * s.b_covder[sg][be][al];
                        rt = rt.max(t.abs());
                    }
                }
                for sg in 0..2 {
                    let bb: f64 = (0..2).map(|t| s.b_mixed[t][al] * s.b_mixed[sg][t]).sum();
                    rn = rn.max((v.gamma3[sg][al][2] + s.b_mixed[sg][al] + ex * bb).abs());
                }
            }
        }
        rep.gamma_tangential.push(rt);
        rep.gamma_normal.push(rn);
        rep.gamma3_closed_form.push(r3);
        rep.det_g.push(rg);
    }
    rep.order_gamma_tangential = fit_order(eps_list, &rep.gamma_tangential);
    rep.order_gamma_normal = fit_order(eps_list, &rep.gamma_normal);
    rep.order_det_g = fit_order(eps_list, &rep.det_g);
    Ok(rep)
}
