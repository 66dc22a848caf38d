use super::diagnostics::korn_ratio;
use super::element::{assemble3d, load3d, Layout3D, ShearStrain};
use crate::error::{Error, Result};
use crate::geometry::SurfaceChart;
use crate::loads::LoadSpec;
use crate::material::MaterialParams;
use crate::mesh::Mesh3D;
use crate::sparse::{CsrMatrix, SpdFactor};
use std::sync::Arc;

#[derive(Clone)]
pub struct Shell3DSetup {
    pub chart: Arc<dyn SurfaceChart>,
    pub mesh: Mesh3D,
    pub material: MaterialParams,
    pub loads: LoadSpec,
    pub epsilon: f64,
    pub shear: ShearStrain,
    pub dt: f64,
    pub t_end: f64,
}

/// Solution history `uⁿ` of the scaled 3D problem (zero initial state).
#[derive(Debug, Clone)]
pub struct Shell3DSolution {
    pub layout: Layout3D,
    pub epsilon: f64,
    pub shear: ShearStrain,
    pub ka: CsrMatrix,
    pub kb: CsrMatrix,
    pub dt: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
}

impl Shell3DSolution {
    /// `½ uᵀK_A u` at each time.
    pub fn energies(&self) -> Vec<f64> {
        self.snapshots.iter().map(|u| 0.5 * self.ka.bilinear(u, u)).collect()
    }

    /// Korn ratio of each snapshot (`None` for the zero field).
    pub fn korn_ratios(&self, chart: &dyn SurfaceChart) -> Result<Vec<Option<f64>>> {
        self.snapshots
            .iter()
            .map(|u| match korn_ratio(&self.layout, chart, self.epsilon, self.shear, u) {
                Ok(r) => Ok(Some(r)),
                Err(Error::ZeroField) => Ok(None),
                Err(e) => Err(e),
            })
            .collect()
    }
}

/// Implicit Euler: `(K_A + K_B/Δt) uⁿ = Fⁿ + (K_B/Δt) uⁿ⁻¹`, `u⁰ = 0`.
pub fn solve3d(setup: &Shell3DSetup) -> Result<Shell3DSolution> {
    let (eps, dt) = (setup.epsilon, setup.dt);
    if !(eps > 0.0) || !(dt > 0.0) || !(setup.t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon, dt and T must be positive (got {eps}, {dt}, {})", setup.t_end)));
    }
    let chart = setup.chart.as_ref();
    let layout = Layout3D::new(setup.mesh.clone())?;
    let (ka, kb) = assemble3d(&layout, chart, &setup.material, eps, setup.shear)?;
    let lhs = CsrMatrix::combine(&[(1.0, &ka), (1.0 / dt, &kb)]).restrict(&layout.map);
    let factor = SpdFactor::new(&lhs)?;
    let steps = crate::flexural::step_count(setup.t_end, dt);
    let mut times = vec![0.0];
    let mut snapshots = vec![vec![0.0; layout.num_dofs()]];
    for n in 1..=steps {
        let t = n as f64 * dt;
        let f = load3d(&layout, chart, &setup.loads, eps, t)?;
        let kbu = kb.matvec(snapshots.last().unwrap());
        let rhs: Vec<f64> = f.iter().zip(&kbu).map(|(a, b)| a + b / dt).collect();
        let u = layout.map.scatter(&factor.solve(&layout.map.gather(&rhs)));
        times.push(t);
        snapshots.push(u);
    }
    Ok(Shell3DSolution { layout, epsilon: eps, shear: setup.shear, ka, kb, dt, times, snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, Plate};
    use crate::mesh::{Edge, Mesh2D};
    use crate::sparse::norm;

    fn setup(loads: LoadSpec, dt: f64, t_end: f64) -> Shell3DSetup {
        let d = Domain::rect(1.0, 1.0);
        Shell3DSetup {
            chart: Arc::new(Plate { domain: d }),
            mesh: Mesh3D::new(Mesh2D::new(d, 3, 3, vec![Edge::Y1Min], vec![]).unwrap(), 2).unwrap(),
            material: MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap(),
            loads,
            epsilon: 0.2,
            shear: ShearStrain::Full,
            dt,
            t_end,
        }
    }

    #[test]
    fn zero_loads_stay_at_rest() {
        let s = solve3d(&setup(LoadSpec::default(), 0.1, 0.5)).unwrap();
        assert!(s.snapshots.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn relaxes_to_elastic_state() {
        // Viscous time scale ~ θ/λ = 1; t = 50.
        let s = solve3d(&setup(LoadSpec::normal_volume(1.0), 1.0, 50.0)).unwrap();
        let l = &s.layout;
        let f = load3d(l, &Plate { domain: l.mesh.footprint.domain }, &LoadSpec::normal_volume(1.0), 0.2, 50.0).unwrap();
        let ka = s.ka.restrict(&l.map);
        let u_inf = l.map.scatter(&SpdFactor::new(&ka).unwrap().solve(&l.map.gather(&f)));
        let u = s.snapshots.last().unwrap();
        let rel = norm(&u.iter().zip(&u_inf).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm(&u_inf);
        assert!(rel < 5e-3, "{rel}");
    }

    #[test]
    fn first_order_in_time() {
        let run = |dt: f64| solve3d(&setup(LoadSpec::normal_volume(1.0), dt, 0.4)).unwrap().snapshots.last().unwrap().clone();
        let (a, b, c) = (run(0.1), run(0.05), run(0.025));
        let d = |x: &[f64], y: &[f64]| norm(&x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>());
        let ratio = d(&a, &b) / d(&b, &c);
        assert!((1.7..2.3).contains(&ratio), "{ratio}");
    }
}
