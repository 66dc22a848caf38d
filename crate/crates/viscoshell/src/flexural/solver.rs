use super::assemble::{assemble_flexural, assemble_membrane_penalty, load_vector, Scaling};
use super::layout::{DofLayout2D, Model2D};
use super::memory::MemoryState;
use crate::error::{Error, Result};
use crate::geometry::SurfaceChart;
use crate::loads::LoadSpec;
use crate::material::MaterialParams;
use crate::mesh::Mesh2D;
use crate::sparse::{norm, CsrMatrix, SpdFactor};
use std::sync::Arc;

/// Everything needed for one 2D run.
#[derive(Clone)]
pub struct Flexural2DSetup {
    pub chart: Arc<dyn SurfaceChart>,
    pub mesh: Mesh2D,
    pub model: Model2D,
    pub material: MaterialParams,
    pub loads: LoadSpec,
    pub scaling: Scaling,
    pub kappa: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Initial coefficients; `None` means `ξ₀ = 0`.
    pub xi0: Option<Vec<f64>>,
}

/// Assembled matrices of the 2D model (full, constrained dofs included).
#[derive(Debug, Clone)]
pub struct FlexuralSystem {
    pub layout: DofLayout2D,
    pub ka: CsrMatrix,
    pub kb: CsrMatrix,
    pub kc: CsrMatrix,
    /// `κ`-weighted membrane penalty; `None` in plate mode.
    pub kp: Option<CsrMatrix>,
    pub k_decay: f64,
}

impl FlexuralSystem {
    pub fn assemble(chart: &dyn SurfaceChart, mesh: Mesh2D, model: Model2D, mat: &MaterialParams, kappa: f64) -> Result<Self> {
        if model == Model2D::Plate && !chart.is_flat() {
            return Err(Error::InvalidArgument(format!("plate model needs a flat chart, got {}", chart.name())));
        }
        let layout = DofLayout2D::new(mesh, model);
        let [ka, kb, kc] = assemble_flexural(&layout, chart, mat)?;
        let kp = match model {
            Model2D::Plate => None,
            Model2D::Shell => {
                if !(kappa > 0.0) {
                    return Err(Error::InvalidArgument(format!("penalty_kappa must be positive, got {kappa}")));
                }
                Some(assemble_membrane_penalty(&layout, chart, mat, kappa)?)
            }
        };
        Ok(FlexuralSystem { layout, ka, kb, kc, kp, k_decay: mat.k_decay() })
    }

    /// `(1/3)K_Aξ + K_Pξ`, unscaled.
    fn elastic(&self, xi: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = self.ka.matvec(xi).into_iter().map(|x| x / 3.0).collect();
        if let Some(kp) = &self.kp {
            v.iter_mut().zip(kp.matvec(xi)).for_each(|(a, b)| *a += b);
        }
        v
    }

    pub fn bending_energy(&self, xi: &[f64], s: f64) -> f64 {
        s * self.ka.bilinear(xi, xi) / 3.0
    }

    pub fn stepper(&self, dt: f64, scaling: Scaling) -> Result<Stepper> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        // The factor `s` multiplies every operator; it is kept out of the
        // matrix and divided out of the load instead, so both scalings factor
        // the same matrix.
        let s = scaling.lhs_factor();
        let mut terms = vec![(1.0 / 3.0, &self.ka), (1.0 / (3.0 * dt), &self.kb), (-dt / 6.0, &self.kc)];
        if let Some(kp) = &self.kp {
            terms.push((1.0, kp));
        }
        let lhs = CsrMatrix::combine(&terms).restrict(&self.layout.map);
        let factor = SpdFactor::new(&lhs).map_err(|_| Error::IndefiniteSystem { dt })?;
        Ok(Stepper { s, dt, decay: (-self.k_decay * dt).exp(), factor })
    }
}

/// Factored step matrix (without the factor `s`), reused for every step.
pub struct Stepper {
    pub s: f64,
    pub dt: f64,
    pub decay: f64,
    factor: SpdFactor,
}

/// Time history of a 2D run.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementHistory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    /// `(ξⁿ − ξⁿ⁻¹)/Δt`, `n ≥ 1`.
    pub rates: Vec<Vec<f64>>,
    /// Relative residual of the discrete equation at each step (`0` at `t = 0`).
    pub residuals: Vec<f64>,
    pub memory_norms: Vec<f64>,
    pub bending_energies: Vec<f64>,
    pub warnings: Vec<String>,
}

impl DisplacementHistory {
    pub fn last(&self) -> &[f64] {
        self.snapshots.last().expect("history holds ξ⁰")
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Number of steps covering `[0, T]`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt) - 1e-9).ceil().max(0.0) as usize
}

/// Runs the time loop on an assembled system.
pub fn integrate(
    sys: &FlexuralSystem,
    chart: &dyn SurfaceChart,
    loads: &LoadSpec,
    scaling: Scaling,
    dt: f64,
    t_end: f64,
    xi0: Option<&[f64]>,
) -> Result<DisplacementHistory> {
    let layout = &sys.layout;
    let n = layout.num_dofs();
    let mut warnings = Vec::new();
    let xi0 = match xi0 {
        None => vec![0.0; n],
        Some(v) => {
            if v.len() != n {
                return Err(Error::InvalidArgument(format!("initial condition has {} entries, expected {n}", v.len())));
            }
            let off = (0..n).filter(|&i| layout.map.free_index[i].is_none()).map(|i| v[i].abs()).fold(0.0, f64::max);
            if off > 0.0 {
                return Err(Error::BoundaryViolation(off));
            }
            if sys.ka.bilinear(v, v) > 1e-14 * norm(v).powi(2) {
                warnings.push("initial condition has nonzero curvature change; the zero-initial-strain assumption does not hold".into());
            }
            v.to_vec()
        }
    };
    let st = sys.stepper(dt, scaling)?;
    let s = st.s;
    let steps = step_count(t_end, dt);
    let mut mem = MemoryState::new(n, sys.k_decay);
    let mut hist = DisplacementHistory {
        dt,
        times: vec![0.0],
        bending_energies: vec![sys.bending_energy(&xi0, s)],
        snapshots: vec![xi0],
        rates: Vec::new(),
        residuals: vec![0.0],
        memory_norms: vec![0.0],
        warnings,
    };
    let mut kc_prev = sys.kc.matvec_accurate(&hist.snapshots[0]);
    let free = |v: &mut Vec<f64>| {
        for (i, x) in v.iter_mut().enumerate() {
            if layout.map.free_index[i].is_none() {
                *x = 0.0;
            }
        }
    };
    for step in 1..=steps {
        let t = step as f64 * dt;
        let prev = hist.snapshots.last().unwrap();
        let f = load_vector(layout, chart, loads, t, scaling)?;
        let kb_prev = sys.kb.matvec_accurate(prev);
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| f[i] / s + kb_prev[i] / (3.0 * dt) + st.decay / 3.0 * (mem.h[i] + 0.5 * dt * kc_prev[i]))
            .collect();
        free(&mut rhs);
        let xi = layout.map.scatter(&st.factor.solve(&layout.map.gather(&rhs)));

        let kc_new = sys.kc.matvec_accurate(&xi);
        mem.advance(&kc_prev, &kc_new, dt);

        // Residual from the separately applied operators.
        let el = sys.elastic(&xi);
        let kb_new = sys.kb.matvec(&xi);
        let mut r: Vec<f64> =
            (0..n).map(|i| s * (el[i] + (kb_new[i] - kb_prev[i]) / (3.0 * dt) - mem.h[i] / 3.0) - f[i]).collect();
        free(&mut r);
        let mut ka_xi = sys.ka.matvec(&xi);
        free(&mut ka_xi);
        let scale = norm(&f).max(s * norm(&ka_xi) / 3.0);
        let res = if scale > 0.0 { norm(&r) / scale } else { norm(&r) };

        hist.rates.push(xi.iter().zip(prev).map(|(a, b)| (a - b) / dt).collect());
        hist.times.push(t);
        hist.residuals.push(res);
        hist.memory_norms.push(mem.norm());
        hist.bending_energies.push(sys.bending_energy(&xi, s));
        hist.snapshots.push(xi);
        kc_prev = kc_new;
    }
    Ok(hist)
}

/// A solved 2D run.
#[derive(Debug, Clone)]
pub struct Flexural2DSolution {
    pub system: FlexuralSystem,
    pub history: DisplacementHistory,
}

/// Assembles and integrates the 2D model.
pub fn solve2d(setup: &Flexural2DSetup) -> Result<Flexural2DSolution> {
    setup.material.validate()?;
    if !(setup.t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {}", setup.t_end)));
    }
    let system = FlexuralSystem::assemble(setup.chart.as_ref(), setup.mesh.clone(), setup.model, &setup.material, setup.kappa)?;
    let history = integrate(&system, setup.chart.as_ref(), &setup.loads, setup.scaling, setup.dt, setup.t_end, setup.xi0.as_deref())?;
    Ok(Flexural2DSolution { system, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, Plate};
    use crate::mesh::Edge;

    fn setup(loads: LoadSpec) -> Flexural2DSetup {
        let d = Domain::rect(1.0, 1.0);
        Flexural2DSetup {
            chart: Arc::new(Plate { domain: d }),
            mesh: Mesh2D::new(d, 4, 4, vec![Edge::Y1Min], vec![]).unwrap(),
            model: Model2D::Plate,
            material: MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap(),
            loads,
            scaling: Scaling::Scaled,
            kappa: 1e4,
            dt: 0.05,
            t_end: 0.5,
            xi0: None,
        }
    }

    #[test]
    fn zero_loads_stay_at_rest() {
        let sol = solve2d(&setup(LoadSpec::default())).unwrap();
        assert_eq!(sol.history.snapshots.len(), 11);
        assert!(sol.history.snapshots.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn residual_is_small() {
        let sol = solve2d(&setup(LoadSpec::normal_volume(1.0))).unwrap();
        assert!(sol.history.max_residual() < 1e-10, "{}", sol.history.max_residual());
        assert!(sol.history.last().iter().any(|&v| v != 0.0));
    }

    #[test]
    fn descaled_matches_scaled() {
        let a = solve2d(&setup(LoadSpec::normal_volume(1.0))).unwrap();
        let mut s = setup(LoadSpec::normal_volume(1.0));
        s.scaling = Scaling::Descaled { eps: 0.1 };
        let b = solve2d(&s).unwrap();
        let diff = a.history.last().iter().zip(b.history.last()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-12 * norm(a.history.last()), "{diff}");
    }

    #[test]
    fn free_decay_dissipates_energy() {
        let mut s = setup(LoadSpec::default());
        let layout = DofLayout2D::new(s.mesh.clone(), Model2D::Plate);
        s.xi0 = Some(layout.interpolate(|y| [[0.0; 4], [0.0; 4], [y[0] * y[0], 2.0 * y[0], 0.0, 0.0]]));
        let sol = solve2d(&s).unwrap();
        assert_eq!(sol.history.warnings.len(), 1);
        let e = &sol.history.bending_energies;
        assert!(e.windows(2).all(|w| w[1] <= w[0]), "{e:?}");
    }

    #[test]
    fn oversized_step_is_rejected() {
        // Large Δt makes the −(Δt/6)K_C term dominate when ρ_v ≪ θ.
        let mut s = setup(LoadSpec::normal_volume(1.0));
        s.material = MaterialParams::new(100.0, 1.0, 1.0, 0.0).unwrap();
        s.dt = 50.0;
        s.t_end = 50.0;
        assert!(matches!(solve2d(&s), Err(Error::IndefiniteSystem { .. })));
    }
}
