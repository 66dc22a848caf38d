use super::layout::DofLayout2D;
use crate::error::Result;
use crate::geometry::{surface_eval, SurfaceChart, SurfacePointData};
use crate::hermite::bfs_eval;
use crate::kinematics::{gamma_eval, rho_eval, Jet2D, Sym2};
use crate::loads::LoadSpec;
use crate::material::{tensors_2d, MaterialParams, Tensor2};
use crate::quadrature::gauss_2d;
use crate::sparse::{CsrMatrix, SparseBuilder};

/// Which strain a bilinear form pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrainKind {
    /// `ρ_{αβ}` (bending).
    Curvature,
    /// `γ_{αβ}` (membrane).
    Metric,
}

/// One quadrature point of an element: parameter coordinates, local
/// coordinates in `[0,1]²`, and the weight including `√a` and the Jacobian.
pub struct QuadPoint {
    pub y: [f64; 2],
    pub local: [f64; 2],
    pub weight: f64,
    pub surf: SurfacePointData,
}

pub fn element_quadrature(layout: &DofLayout2D, chart: &dyn SurfaceChart, e: usize, order: usize) -> Result<Vec<QuadPoint>> {
    let h = layout.mesh.h();
    let o = layout.mesh.element_origin(e);
    let jac = 0.25 * h[0] * h[1];
    gauss_2d(order)
        .into_iter()
        .map(|(xi, eta, w)| {
            let local = [0.5 * (xi + 1.0), 0.5 * (eta + 1.0)];
            let y = [o[0] + local[0] * h[0], o[1] + local[1] * h[1]];
            let surf = surface_eval(chart, y)?;
            Ok(QuadPoint { y, local, weight: w * jac * surf.sqrt_a(), surf })
        })
        .collect()
}

pub fn strain_of(kind: StrainKind, j: &Jet2D, s: &SurfacePointData) -> Sym2 {
    match kind {
        StrainKind::Curvature => rho_eval(j, s),
        StrainKind::Metric => gamma_eval(j, s),
    }
}

fn contract(t: &Tensor2, e: &Sym2) -> Sym2 {
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = 0.0;
            for s in 0..2 {
                for u in 0..2 {
                    v += t[a][b][s][u] * e[s][u];
                }
            }
            out[a][b] = v;
        }
    }
    out
}

/// Assembles `∫_ω T^{αβστ} ε_{στ}(ξ) ε_{αβ}(η) √a dy` for each tensor field
/// in `tensors`, sharing the strain evaluations.
pub fn assemble_tensor_forms(
    layout: &DofLayout2D,
    chart: &dyn SurfaceChart,
    order: usize,
    kind: StrainKind,
    tensors: &[&dyn Fn(&SurfacePointData) -> Tensor2],
) -> Result<Vec<CsrMatrix>> {
    let n = layout.num_dofs();
    let mut builders: Vec<SparseBuilder> = tensors.iter().map(|_| SparseBuilder::new(n)).collect();
    let h = layout.mesh.h();
    let nloc = 4 * layout.per_node;
    let mut ke = vec![vec![0.0; nloc * nloc]; tensors.len()];
    for e in 0..layout.mesh.num_elements() {
        ke.iter_mut().for_each(|k| k.iter_mut().for_each(|v| *v = 0.0));
        for q in element_quadrature(layout, chart, e, order)? {
            let ev = bfs_eval(q.local[0], q.local[1], h);
            let strains: Vec<Sym2> = layout.local_jets(&ev).iter().map(|j| strain_of(kind, j, &q.surf)).collect();
            for (t, kt) in tensors.iter().zip(ke.iter_mut()) {
                let tq = t(&q.surf);
                for (m, sm) in strains.iter().enumerate() {
                    let ts = contract(&tq, sm);
                    for (l, sl) in strains.iter().enumerate() {
                        let v = ts[0][0] * sl[0][0] + ts[0][1] * sl[0][1] + ts[1][0] * sl[1][0] + ts[1][1] * sl[1][1];
                        kt[l * nloc + m] += q.weight * v;
                    }
                }
            }
        }
        let dofs = layout.element_dofs(e);
        for (b, k) in builders.iter_mut().zip(&ke) {
            b.add_block(&dofs, k);
        }
    }
    Ok(builders.into_iter().map(SparseBuilder::build).collect())
}

/// `∫_ω T^{αβστ} ρ_{στ}(ξ) ρ_{αβ}(η) √a dy` with 3×3 Gauss.
pub fn assemble_bending(
    layout: &DofLayout2D,
    chart: &dyn SurfaceChart,
    tensor: &dyn Fn(&SurfacePointData) -> Tensor2,
) -> Result<CsrMatrix> {
    Ok(assemble_tensor_forms(layout, chart, 3, StrainKind::Curvature, &[tensor])?.remove(0))
}

/// The three flexural matrices `(K_A, K_B, K_C)` in one pass.
pub fn assemble_flexural(layout: &DofLayout2D, chart: &dyn SurfaceChart, mat: &MaterialParams) -> Result<[CsrMatrix; 3]> {
    tensors_2d(mat, &surface_eval(chart, layout.mesh.domain.origin)?)?;
    let a = |s: &SurfacePointData| tensors_2d(mat, s).expect("validated").a2;
    let b = |s: &SurfacePointData| tensors_2d(mat, s).expect("validated").b2;
    let c = |s: &SurfacePointData| tensors_2d(mat, s).expect("validated").c2;
    let mut v = assemble_tensor_forms(layout, chart, 3, StrainKind::Curvature, &[&a, &b, &c])?;
    let kc = v.pop().unwrap();
    let kb = v.pop().unwrap();
    let ka = v.pop().unwrap();
    Ok([ka, kb, kc])
}

/// `κ ∫_ω m^{αβστ} γ_{στ}(ξ) γ_{αβ}(η) √a dy` with `m` the structure of the
/// tensor `a`; 4×4 Gauss on curved charts.
pub fn assemble_membrane_penalty(layout: &DofLayout2D, chart: &dyn SurfaceChart, mat: &MaterialParams, kappa: f64) -> Result<CsrMatrix> {
    let order = if chart.is_flat() { 3 } else { 4 };
    tensors_2d(mat, &surface_eval(chart, layout.mesh.domain.origin)?)?;
    let m = |s: &SurfacePointData| {
        let mut t = tensors_2d(mat, s).expect("validated").a2;
        t.iter_mut().flatten().flatten().flatten().for_each(|v| *v *= kappa);
        t
    };
    Ok(assemble_tensor_forms(layout, chart, order, StrainKind::Metric, &[&m])?.remove(0))
}

/// How the right-hand side resultant is formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    /// `p^i` from the scaled loads.
    Scaled,
    /// `p^{i,ε}` from the physical loads of a shell of half-thickness `ε`.
    Descaled { eps: f64 },
}

impl Scaling {
    /// Factor multiplying the left-hand side (`1` or `ε³`).
    pub fn lhs_factor(&self) -> f64 {
        match *self {
            Scaling::Scaled => 1.0,
            Scaling::Descaled { eps } => eps * eps * eps,
        }
    }
}

/// `∫_ω p^i(t) η_i √a dy` for every basis function, 4×4 Gauss.
pub fn load_vector(layout: &DofLayout2D, chart: &dyn SurfaceChart, loads: &LoadSpec, t: f64, scaling: Scaling) -> Result<Vec<f64>> {
    let mut f = vec![0.0; layout.num_dofs()];
    if loads.is_zero() {
        return Ok(f);
    }
    let h = layout.mesh.h();
    let domain = layout.mesh.domain;
    for e in 0..layout.mesh.num_elements() {
        let dofs = layout.element_dofs(e);
        for q in element_quadrature(layout, chart, e, 4)? {
            let p = match scaling {
                Scaling::Scaled => loads.p(&domain, t, q.y),
                Scaling::Descaled { eps } => loads.p_descaled(&domain, t, q.y, eps),
            };
            let ev = bfs_eval(q.local[0], q.local[1], h);
            for (d, j) in dofs.iter().zip(layout.local_jets(&ev)) {
                f[*d] += q.weight * (0..3).map(|i| p[i] * j.v[i]).sum::<f64>();
            }
        }
    }
    for (i, v) in f.iter_mut().enumerate() {
        if layout.map.free_index[i].is_none() {
            *v = 0.0;
        }
    }
    Ok(f)
}

/// `|ξ_h − w|²` summed over elements in the broken `H²` seminorm of
/// component `comp`, given the exact Hessian.
pub fn broken_h2_error_sq(layout: &DofLayout2D, xi: &[f64], comp: usize, hess: &dyn Fn([f64; 2]) -> [[f64; 2]; 2]) -> f64 {
    let h = layout.mesh.h();
    let jac = 0.25 * h[0] * h[1];
    let mut total = 0.0;
    for e in 0..layout.mesh.num_elements() {
        let o = layout.mesh.element_origin(e);
        for (x, y, w) in gauss_2d(5) {
            let local = [0.5 * (x + 1.0), 0.5 * (y + 1.0)];
            let p = [o[0] + local[0] * h[0], o[1] + local[1] * h[1]];
            let j = layout.eval_in(xi, e, &bfs_eval(local[0], local[1], h));
            let ex = hess(p);
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    s += (j.dd[comp][a][b] - ex[a][b]).powi(2);
                }
            }
            total += w * jac * s;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexural::Model2D;
    use crate::geometry::{Domain, Plate};
    use crate::material::isotropic2;
    use crate::mesh::{Edge, Mesh2D};

    fn plate_layout(nx: usize, model: Model2D) -> DofLayout2D {
        let m = Mesh2D::new(Domain::rect(1.0, 1.0), nx, nx, vec![Edge::Y1Min], vec![]).unwrap();
        DofLayout2D::new(m, model)
    }

    #[test]
    fn zero_tensor_gives_zero_matrix() {
        let l = plate_layout(2, Model2D::Plate);
        let k = assemble_bending(&l, &Plate { domain: l.mesh.domain }, &|_| [[[[0.0; 2]; 2]; 2]; 2]).unwrap();
        assert!(k.val.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_curvature_rayleigh_quotient() {
        // w = ½(y₁² + y₂²) has ρ = I; energy ∫ T:I:I = (T:I:I)·area.
        let l = DofLayout2D::new(Mesh2D::new(Domain::rect(2.0, 1.0), 2, 1, vec![], vec![Edge::Y1Min]).unwrap(), Model2D::Plate);
        let mut l = l;
        l.map = crate::sparse::DofMap::new(&vec![false; l.num_dofs()]);
        let xi = l.interpolate(|y| [[0.0; 4], [0.0; 4], [0.5 * (y[0] * y[0] + y[1] * y[1]), y[0], y[1], 0.0]]);
        let t = isotropic2(&[[1.0, 0.0], [0.0, 1.0]], 1.3, 0.7);
        let k = assemble_bending(&l, &Plate { domain: l.mesh.domain }, &|_| t).unwrap();
        let tii = crate::material::quad2(&t, &[[1.0, 0.0], [0.0, 1.0]]);
        approx::assert_relative_eq!(k.bilinear(&xi, &xi), tii * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn penalty_on_plate() {
        let mut l = plate_layout(2, Model2D::Shell);
        l.map = crate::sparse::DofMap::new(&vec![false; l.num_dofs()]);
        let ch = Plate { domain: l.mesh.domain };
        let mat = MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let kp = assemble_membrane_penalty(&l, &ch, &mat, 10.0).unwrap();
        let w = l.interpolate(|y| [[0.0; 4], [0.0; 4], [y[0] * y[1], y[1], y[0], 1.0]]);
        approx::assert_abs_diff_eq!(kp.bilinear(&w, &w), 0.0, epsilon = 1e-12);
        // η = (y₁, 0, 0): γ₁₁ = 1 ⇒ energy κ m¹¹¹¹ · area
        let u = l.interpolate(|y| [[y[0], 1.0, 0.0, 0.0], [0.0; 4], [0.0; 4]]);
        let m1111 = tensors_2d(&mat, &surface_eval(&ch, [0.5, 0.5]).unwrap()).unwrap().a2[0][0][0][0];
        approx::assert_relative_eq!(kp.bilinear(&u, &u), 10.0 * m1111, max_relative = 1e-12);
    }

    #[test]
    fn assembled_matrices_are_symmetric() {
        let l = plate_layout(3, Model2D::Plate);
        let mat = MaterialParams::new(1.0, 2.0, 0.5, 0.3).unwrap();
        for k in assemble_flexural(&l, &Plate { domain: l.mesh.domain }, &mat).unwrap() {
            assert!(k.symmetry_defect() < 1e-12);
        }
    }

    #[test]
    fn unit_load_resultant() {
        let mut l = plate_layout(2, Model2D::Plate);
        l.map = crate::sparse::DofMap::new(&vec![false; l.num_dofs()]);
        let f = load_vector(&l, &Plate { domain: l.mesh.domain }, &LoadSpec::normal_volume(1.0), 0.0, Scaling::Scaled).unwrap();
        let ones = l.interpolate(|_| [[0.0; 4], [0.0; 4], [1.0, 0.0, 0.0, 0.0]]);
        approx::assert_relative_eq!(crate::sparse::dot(&f, &ones), 2.0, max_relative = 1e-13);
    }
}
