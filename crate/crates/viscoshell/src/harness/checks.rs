//! Residual and oracle checks that do not need a 3D solve.

use crate::error::{Error, Result};
use crate::flexural::{
    assemble_bending, broken_h2_error_sq, integrate, load_vector, solve2d, Flexural2DSetup, FlexuralSystem, Model2D,
    ScalarSurrogate, Scaling,
};
use crate::geometry::{asymptotic_check, fit_order, AsymptoticReport, Order, Cylinder, Domain, Graph, Height, HemispherePatch, Plate, SurfaceChart};
use crate::loads::{LoadSpec, ManufacturedPlate};
use crate::material::{isotropic2, reduction_identity_residuals, FlexuralCoefficients, MaterialParams};
use crate::mesh::{Edge, Mesh2D, Mesh3D};
use crate::quadrature::adaptive_simpson;
use crate::shell3d::{assemble3d, korn_ratio, Layout3D, ShearStrain};
use crate::sparse::{dot, norm, SpdFactor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// One named check. The name carries the pass rule (`r_a<1e-10`,
/// `slope[0.8:1.2]`) so a report row can be re-judged from its text alone.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

impl IdentityRow {
    /// Passes when `residual < tol`.
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        IdentityRow { name: format!("{}<{tol:e}", name.into()), residual, passed: residual < tol }
    }

    /// Passes when `lo ≤ value ≤ hi`.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        IdentityRow { name: format!("{}[{lo}:{hi}]", name.into()), residual: value, passed: value >= lo && value <= hi }
    }

    pub fn pass(&self) -> bool {
        self.passed
    }
}

/// A random admissible parameter set: `λ ∈ [0,10]`, `μ, θ ∈ (0,10]`, `ρ ∈ [0,10]`.
pub fn random_material(rng: &mut impl Rng) -> MaterialParams {
    let open = |rng: &mut dyn rand::RngCore| 10.0 - rng.random_range(0.0..10.0);
    MaterialParams {
        lambda: rng.random_range(0.0..=10.0),
        mu: open(rng),
        theta_v: open(rng),
        rho_v: rng.random_range(0.0..=10.0),
    }
}

/// Reduction-identity residuals for one material.
pub fn verify_identities(mat: &MaterialParams) -> Result<Vec<IdentityRow>> {
    let r = reduction_identity_residuals(mat)?;
    Ok(vec![
        IdentityRow::new("r_a", r.r_a, 1e-10),
        IdentityRow::new("r_b", r.r_b, 1e-10),
        IdentityRow::new("r_c", r.r_c, 1e-10),
        IdentityRow::new("theta_lambda", r.theta_lambda, 1e-15),
    ])
}

/// Largest residuals over `draws` random materials.
pub fn identity_sweep(seed: u64, draws: usize) -> Result<Vec<IdentityRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 4];
    for _ in 0..draws {
        let r = reduction_identity_residuals(&random_material(&mut rng))?;
        for (w, v) in worst.iter_mut().zip([r.r_a, r.r_b, r.r_c, r.theta_lambda]) {
            *w = w.max(v);
        }
    }
    Ok(vec![
        IdentityRow::new("sweep_r_a", worst[0], 1e-10),
        IdentityRow::new("sweep_r_b", worst[1], 1e-10),
        IdentityRow::new("sweep_r_c", worst[2], 1e-10),
        IdentityRow::new("sweep_theta_lambda", worst[3], 1e-15),
    ])
}

/// Conditioning as `θ_v → 0⁺` (other parameters from `mat`).
pub fn theta_sweep(mat: &MaterialParams) -> Result<Vec<IdentityRow>> {
    (1..=6)
        .map(|p| {
            let m = MaterialParams { theta_v: 10f64.powi(-p), ..*mat };
            let r = reduction_identity_residuals(&m)?;
            Ok(IdentityRow::new(format!("theta_1e-{p}"), r.r_a.max(r.r_b).max(r.r_c), 1e-8))
        })
        .collect()
}

/// Outcome of [`volterra_ode_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCheck {
    /// Max `|e₃₃^{RK4} − e₃₃^{closed}|` over the output grid on `[0, 1]`.
    pub max_dev: f64,
    /// Max relative mismatch between a finite-difference derivative of the
    /// closed form and its differentiated expression.
    pub deriv_dev: f64,
    /// RK4 substeps per output step (more than one for stiff `k`).
    pub substeps: usize,
}

fn poly(c: &[f64], t: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &ci in c.iter().rev() {
        d = d * t + v;
        v = v * t + ci;
    }
    (v, d)
}

/// Integrates `λm + (λ+2μ)e + θṁ + (θ+ρ)ė = 0`, `e(0) = 0`, with RK4 on the
/// grid `Δt = 10⁻³` and compares with the closed form
/// `e(t) = −θ/(θ+ρ)(m(t) + Λ∫₀ᵗ e^{−k(t−s)} m(s) ds)`.
/// `m` is the polynomial with coefficients `coeffs` (ascending), `m(0) = 0`.
pub fn volterra_ode_check(mat: &MaterialParams, coeffs: &[f64]) -> Result<OdeCheck> {
    mat.validate()?;
    if coeffs.first().is_some_and(|&c| c != 0.0) {
        return Err(Error::InvalidArgument("the in-plane trace must start from m(0) = 0".into()));
    }
    let (l, mu, th, r) = (mat.lambda, mat.mu, mat.theta_v, mat.rho_v);
    let s = th + r;
    let k = mat.k_decay();
    let lam = mat.lambda_c();
    let m = |t: f64| poly(coeffs, t);
    let memory = |t: f64| adaptive_simpson(&|x| (-k * (t - x)).exp() * m(x).0, 0.0, t, 1e-13);
    let closed = |t: f64| -th / s * (m(t).0 + lam * memory(t));

    let dt = 1e-3;
    let substeps = ((k * dt / 0.05).ceil() as usize).max(1);
    let h = dt / substeps as f64;
    let f = |t: f64, e: f64| {
        let (mv, md) = m(t);
        -(l * mv + th * md + (l + 2.0 * mu) * e) / s
    };
    let mut e = 0.0;
    let mut max_dev: f64 = 0.0;
    for n in 0..1000 {
        for j in 0..substeps {
            let t = n as f64 * dt + j as f64 * h;
            let k1 = f(t, e);
            let k2 = f(t + 0.5 * h, e + 0.5 * h * k1);
            let k3 = f(t + 0.5 * h, e + 0.5 * h * k2);
            let k4 = f(t + h, e + h * k3);
            e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        max_dev = max_dev.max((e - closed((n + 1) as f64 * dt)).abs());
    }

    // ė = −θ/(θ+ρ)(ṁ + Λ(m − kM)) against a fourth-order central difference.
    let hd = (1e-3f64).min(0.05 / k);
    let mut deriv_dev: f64 = 0.0;
    for i in 1..10 {
        let t = i as f64 / 10.0;
        let fd = (8.0 * (closed(t + hd) - closed(t - hd)) - (closed(t + 2.0 * hd) - closed(t - 2.0 * hd))) / (12.0 * hd);
        let (mv, md) = m(t);
        let exact = -th / s * (md + lam * (mv - k * memory(t)));
        deriv_dev = deriv_dev.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    Ok(OdeCheck { max_dev, deriv_dev, substeps })
}

/// Worst case over random materials and random cubic trajectories.
pub fn ode_sweep(seed: u64, draws: usize) -> Result<OdeCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = OdeCheck { max_dev: 0.0, deriv_dev: 0.0, substeps: 1 };
    for _ in 0..draws {
        let mat = random_material(&mut rng);
        let c = [0.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let r = volterra_ode_check(&mat, &c)?;
        worst.max_dev = worst.max_dev.max(r.max_dev);
        worst.deriv_dev = worst.deriv_dev.max(r.deriv_dev);
        worst.substeps = worst.substeps.max(r.substeps);
    }
    Ok(worst)
}

/// Asymptotics of the shell chart on the unit cylinder and the hemisphere
/// patch (where `b^σ_{β|α} = 0`, so the tangential expansion is exact) and on
/// a wave graph (where it is not, and the remainder is `O(ε²)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryCheck {
    pub cylinder: AsymptoticReport,
    pub hemisphere: AsymptoticReport,
    pub wave: AsymptoticReport,
}

impl GeometryCheck {
    pub fn rows(&self) -> Vec<IdentityRow> {
        let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
        let slope = |name: &str, o: Order, lo: f64, hi: f64| match o {
            Order::Slope(s) => IdentityRow::within(format!("{name}_slope"), s, lo, hi),
            Order::Exact => IdentityRow { name: format!("{name}_exact"), residual: 0.0, passed: false },
        };
        let tangential = |name: &str, r: &AsymptoticReport| match r.order_gamma_tangential {
            Order::Exact => IdentityRow::new(format!("{name}_gamma_tangential_residual"), max(&r.gamma_tangential), 1e-13),
            o => slope(&format!("{name}_gamma_tangential"), o, 1.8, 2.2),
        };
        let mut rows = Vec::new();
        for (name, r) in [("cylinder", &self.cylinder), ("hemisphere", &self.hemisphere)] {
            rows.push(slope(&format!("{name}_g_minus_a"), r.order_det_g, 0.8, 1.2));
            rows.push(IdentityRow::new(format!("{name}_gamma3_closed_form"), max(&r.gamma3_closed_form), 1e-10));
            rows.push(tangential(name, r));
        }
        rows.push(slope("wave_g_minus_a", self.wave.order_det_g, 0.8, 1.2));
        rows.push(IdentityRow::new("wave_gamma3_closed_form", max(&self.wave.gamma3_closed_form), 1e-10));
        // The wave graph must exercise the non-exact branch.
        rows.push(slope("wave_gamma_tangential", self.wave.order_gamma_tangential, 1.8, 2.2));
        rows
    }

    pub fn pass(&self) -> bool {
        self.rows().iter().all(IdentityRow::pass)
    }
}

pub fn geometry_check(eps: &[f64]) -> Result<GeometryCheck> {
    let cyl = Cylinder { radius: 1.0, domain: Domain::rect(1.0, 1.0) };
    let hemi = HemispherePatch::default();
    let yh = [hemi.domain.origin[0] + 0.3 * hemi.domain.lengths[0], hemi.domain.origin[1] + 0.6 * hemi.domain.lengths[1]];
    let wave = Graph { height: Height::Wave { amp: 0.3, k1: 2.0, k2: 3.0 }, domain: Domain::rect(1.0, 1.0) };
    Ok(GeometryCheck {
        cylinder: asymptotic_check(&cyl, [0.3, 0.4], eps)?,
        hemisphere: asymptotic_check(&hemi, yh, eps)?,
        wave: asymptotic_check(&wave, [0.3, 0.4], eps)?,
    })
}

/// Korn ratios of random admissible fields over an `ε` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct KornSweep {
    pub eps: Vec<f64>,
    /// `ratios[field][eps]`
    pub ratios: Vec<Vec<f64>>,
}

impl KornSweep {
    /// Worst `max_ε / min_ε` over the fields.
    pub fn spread(&self) -> f64 {
        self.ratios
            .iter()
            .map(|r| r.iter().cloned().fold(f64::MIN, f64::max) / r.iter().cloned().fold(f64::MAX, f64::min))
            .fold(1.0, f64::max)
    }

    /// Log-log slope of the geometric-mean ratio against `ε`. A fixed field
    /// with `∂₃v ≠ 0` has `|e(ε;v)|₀ ~ 1/ε`, so this sits near 2 for rough
    /// random fields; only the upper bound is `ε`-uniform.
    pub fn decay_slope(&self) -> f64 {
        let gm: Vec<f64> = (0..self.eps.len())
            .map(|j| (self.ratios.iter().map(|r| r[j].ln()).sum::<f64>() / self.ratios.len() as f64).exp())
            .collect();
        match fit_order(&self.eps, &gm) {
            Order::Slope(s) => s,
            Order::Exact => 0.0,
        }
    }
}

/// Smallest Rayleigh quotient `ε² vᵀK_A(ε)v / vᵀv` over random admissible
/// vectors, per `ε`.
pub fn ellipticity_sweep(
    chart: &dyn SurfaceChart,
    mesh: &Mesh3D,
    mat: &MaterialParams,
    eps: &[f64],
    fields: usize,
    shear: ShearStrain,
    seed: u64,
) -> Result<Vec<f64>> {
    let layout = Layout3D::new(mesh.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vs: Vec<Vec<f64>> = (0..fields)
        .map(|_| layout.map.scatter(&(0..layout.map.num_free()).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>()))
        .collect();
    eps.iter()
        .map(|&e| {
            let (ka, _) = assemble3d(&layout, chart, mat, e, shear)?;
            Ok(vs.iter().map(|v| e * e * ka.bilinear(v, v) / dot(v, v)).fold(f64::INFINITY, f64::min))
        })
        .collect()
}

pub fn korn_sweep(chart: &dyn SurfaceChart, mesh: &Mesh3D, eps: &[f64], fields: usize, shear: ShearStrain, seed: u64) -> Result<KornSweep> {
    let layout = Layout3D::new(mesh.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(fields);
    for _ in 0..fields {
        let red: Vec<f64> = (0..layout.map.num_free()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = layout.map.scatter(&red);
        ratios.push(eps.iter().map(|&e| korn_ratio(&layout, chart, e, shear, &v)).collect::<Result<Vec<_>>>()?);
    }
    Ok(KornSweep { eps: eps.to_vec(), ratios })
}

/// One grid of the manufactured plate study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsRow {
    pub n: usize,
    pub h: f64,
    /// `|ξ^N − c_N Π_h S|_{H²}`: distance to the Hermite interpolant of the
    /// exact shape, scaled by the discrete time factor `c_N`.
    pub err_discrete: f64,
    /// `|ξ^N − c_N S|_{H²}`: spatial error with the time error removed.
    pub err_spatial: f64,
    /// `|ξ^N − φ(T) S|_{H²}`: total error.
    pub err_total: f64,
}

pub fn rates(rows: &[MmsRow], f: impl Fn(&MmsRow) -> f64) -> Vec<f64> {
    rows.windows(2).map(|w| (f(&w[0]) / f(&w[1])).ln() / (w[0].h / w[1].h).ln()).collect()
}

/// Simply supported unit-square plate with `ξ₃ = (1 − e^{−t}) sin πy₁ sin πy₂`.
///
/// Every form is a multiple of `∫∇²w : ∇²v` on this plate, so `ξⁿ = c_n u_h`
/// where `c_n` solves the scalar scheme; comparing `ξ^N` with `c_N` times
/// the exact shape isolates the spatial error.
pub fn plate_mms(mat: &MaterialParams, grids: &[usize], dt: f64, t_end: f64) -> Result<Vec<MmsRow>> {
    let d = Domain::rect(1.0, 1.0);
    let c = FlexuralCoefficients::new(mat)?;
    let sur = ScalarSurrogate {
        a: c.a_trace + 2.0 * c.a_shear,
        b: c.b_trace + 2.0 * c.b_shear,
        c: c.c_trace,
        k: mat.k_decay(),
        xi0: 0.0,
    };
    let mp = ManufacturedPlate { material: *mat };
    let steps = crate::flexural::step_count(t_end, dt);
    let cn = *sur.implicit(&|t| mp.time_factor(t) / 3.0, dt, steps).last().unwrap();
    let phi = ManufacturedPlate::phi(steps as f64 * dt);
    grids
        .iter()
        .map(|&n| {
            let setup = Flexural2DSetup {
                chart: Arc::new(Plate { domain: d }),
                mesh: Mesh2D::new(d, n, n, vec![], vec![Edge::Y1Min, Edge::Y1Max, Edge::Y2Min, Edge::Y2Max])?,
                model: Model2D::Plate,
                material: *mat,
                loads: LoadSpec::manufactured(*mat),
                scaling: Scaling::Scaled,
                kappa: 1.0,
                dt,
                t_end,
                xi0: None,
            };
            let sol = solve2d(&setup)?;
            let l = &sol.system.layout;
            let xi = sol.history.last();
            let pi = l.interpolate(|y| {
                let (v, g, h) = ManufacturedPlate::shape_jet(&d, y);
                [[0.0; 4], [0.0; 4], [v, g[0], g[1], h[0][1]]]
            });
            let disc: Vec<f64> = xi.iter().zip(&pi).map(|(a, b)| a - cn * b).collect();
            let scaled_hess = |s: f64| {
                move |y: [f64; 2]| {
                    let h = ManufacturedPlate::shape_jet(&d, y).2;
                    [[s * h[0][0], s * h[0][1]], [s * h[1][0], s * h[1][1]]]
                }
            };
            Ok(MmsRow {
                n,
                h: 1.0 / n as f64,
                err_discrete: broken_h2_error_sq(l, &disc, 2, &|_| [[0.0; 2]; 2]).sqrt(),
                err_spatial: broken_h2_error_sq(l, xi, 2, &scaled_hess(cn)).sqrt(),
                err_total: broken_h2_error_sq(l, xi, 2, &scaled_hess(phi)).sqrt(),
            })
        })
        .collect()
}

/// Long-time limit of a constant load: `ξ(20/k)` against the stationary
/// solution `⅓(K_A − K_C/k)ξ∞ = F`, the latter assembled independently from
/// the effective trace coefficient `4λμ/(λ+2μ)` and shear `2μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub t_final: f64,
    pub rel_diff: f64,
    /// Same comparison against `K_A − K_C/k` formed from the assembled matrices.
    pub rel_diff_matrices: f64,
}

pub fn steady_state_check(mat: &MaterialParams, n: usize, steps: usize) -> Result<SteadyState> {
    let d = Domain::rect(1.0, 1.0);
    let chart = Plate { domain: d };
    let mesh = Mesh2D::new(d, n, n, vec![Edge::Y1Min], vec![])?;
    let sys = FlexuralSystem::assemble(&chart, mesh, Model2D::Plate, mat, 1.0)?;
    let k = mat.k_decay();
    let t_final = 20.0 / k;
    let dt = t_final / steps as f64;
    let loads = LoadSpec::normal_volume(1.0);
    let hist = integrate(&sys, &chart, &loads, Scaling::Scaled, dt, t_final, None)?;
    let xi = hist.last();
    let l = &sys.layout;
    let f = load_vector(l, &chart, &loads, t_final, Scaling::Scaled)?;

    let solve = |m: crate::sparse::CsrMatrix| -> Result<Vec<f64>> {
        let r = m.restrict(&l.map);
        Ok(l.map.scatter(&SpdFactor::new(&r)?.solve(&l.map.gather(&f))))
    };
    let eff_trace = 4.0 * mat.lambda * mat.mu / (mat.lambda + 2.0 * mat.mu);
    let t = isotropic2(&[[1.0, 0.0], [0.0, 1.0]], eff_trace / 3.0, 2.0 * mat.mu / 3.0);
    let oracle = solve(assemble_bending(l, &chart, &|_| t)?)?;
    let from_mats = solve(crate::sparse::CsrMatrix::combine(&[(1.0 / 3.0, &sys.ka), (-1.0 / (3.0 * k), &sys.kc)]))?;
    let rel = |a: &[f64]| norm(&xi.iter().zip(a).map(|(x, y)| x - y).collect::<Vec<_>>()) / norm(a);
    Ok(SteadyState { t_final, rel_diff: rel(&oracle), rel_diff_matrices: rel(&from_mats) })
}

/// `max|ξ_scaled − ξ_descaled| / max|ξ_scaled|` at the final time.
pub fn descaled_equivalence(setup: &Flexural2DSetup, eps: f64) -> Result<f64> {
    let a = solve2d(&Flexural2DSetup { scaling: Scaling::Scaled, ..setup.clone() })?;
    let b = solve2d(&Flexural2DSetup { scaling: Scaling::Descaled { eps }, ..setup.clone() })?;
    let (x, y) = (a.history.last(), b.history.last());
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(x.iter().zip(y).fold(0.0f64, |acc, (p, q)| acc.max((p - q).abs())) / m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_identities_pass() {
        let rows = verify_identities(&MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(rows.iter().all(IdentityRow::pass), "{rows:?}");
        assert!(rows[0].residual < 1e-14);
        let rows = verify_identities(&MaterialParams::new(0.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(rows.iter().all(IdentityRow::pass), "{rows:?}");
    }

    #[test]
    fn theta_to_zero_stays_conditioned() {
        let rows = theta_sweep(&MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(rows.iter().all(IdentityRow::pass), "{rows:?}");
    }

    #[test]
    fn ode_zero_trajectory() {
        let r = volterra_ode_check(&MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap(), &[0.0]).unwrap();
        assert_eq!(r.max_dev, 0.0);
    }

    #[test]
    fn ode_linear_trajectory() {
        let r = volterra_ode_check(&MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap(), &[0.0, 1.0]).unwrap();
        assert!(r.max_dev < 1e-8, "{r:?}");
        assert!(r.deriv_dev < 1e-6, "{r:?}");
    }

    #[test]
    fn ode_rejects_nonzero_start_and_elastic_case() {
        let m = MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(volterra_ode_check(&m, &[1.0, 1.0]).is_err());
        let e = MaterialParams { theta_v: 0.0, ..m };
        assert_eq!(volterra_ode_check(&e, &[0.0, 1.0]), Err(Error::ElasticCaseUnsupported));
    }

    #[test]
    fn polynomial_helper() {
        assert_eq!(poly(&[0.0, 2.0, 3.0], 2.0), (16.0, 14.0));
    }
}
