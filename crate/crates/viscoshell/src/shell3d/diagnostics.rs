use super::element::{field_strain, gauss_points, Layout3D, ShearStrain};
use crate::error::{Error, Result};
use crate::geometry::SurfaceChart;
use crate::mesh::{Mesh2D, Mesh3D};
use crate::quadrature::gauss_2d;

/// `v̄ = ½∫_{−1}^{1} v dx₃` per footprint node (3 components each), by the
/// trapezoid rule on the nodal column. For trilinear fields this is the exact
/// average of the piecewise-linear column.
pub fn transverse_average(mesh: &Mesh3D, u: &[f64]) -> Vec<f64> {
    let nf = mesh.footprint.num_nodes();
    let hz = mesh.hz();
    let mut out = vec![0.0; 3 * nf];
    for f in 0..nf {
        for k in 0..=mesh.nz {
            let w = if k == 0 || k == mesh.nz { 0.5 * hz } else { hz };
            let n = mesh.node_index(f, k);
            for i in 0..3 {
                out[3 * f + i] += 0.5 * w * u[3 * n + i];
            }
        }
    }
    out
}

/// Evaluates the bilinear interpolant of footprint nodal data (`ncomp` per
/// node) in element `e` at local `(s, t)`: values and parameter gradients.
pub fn bilinear_eval(mesh: &Mesh2D, data: &[f64], ncomp: usize, e: usize, local: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let h = mesh.h();
    let nodes = mesh.element_nodes(e);
    let (s, t) = (local[0], local[1]);
    let n = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
    let dn = [
        [-(1.0 - t) / h[0], -(1.0 - s) / h[1]],
        [(1.0 - t) / h[0], -s / h[1]],
        [t / h[0], s / h[1]],
        [-t / h[0], (1.0 - s) / h[1]],
    ];
    let mut v = vec![0.0; ncomp];
    let mut g = vec![[0.0; 2]; ncomp];
    for a in 0..4 {
        for c in 0..ncomp {
            let x = data[ncomp * nodes[a] + c];
            v[c] += n[a] * x;
            g[c][0] += dn[a][0] * x;
            g[c][1] += dn[a][1] * x;
        }
    }
    (v, g)
}

/// `(|w|²_{L²(ω)}, |∇w|²_{L²(ω)})` of bilinear nodal data, summed over components.
pub fn bilinear_norms_sq(mesh: &Mesh2D, data: &[f64], ncomp: usize) -> (f64, f64) {
    let h = mesh.h();
    let jac = 0.25 * h[0] * h[1];
    let (mut l2, mut h1) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        for (x, y, w) in gauss_2d(2) {
            let (v, g) = bilinear_eval(mesh, data, ncomp, e, [0.5 * (x + 1.0), 0.5 * (y + 1.0)]);
            for c in 0..ncomp {
                l2 += w * jac * v[c] * v[c];
                h1 += w * jac * (g[c][0] * g[c][0] + g[c][1] * g[c][1]);
            }
        }
    }
    (l2, h1)
}

/// `(|v|²_{L²(Ω)}, |∇v|²_{L²(Ω)})` of a trilinear field (parameter-space
/// derivatives, 2×2×2 Gauss).
pub fn field_norms_sq(layout: &Layout3D, u: &[f64]) -> (f64, f64) {
    let (mut l2, mut h1) = (0.0, 0.0);
    let gp = gauss_points(layout);
    for e in 0..layout.mesh.num_elements() {
        for (local, w) in &gp {
            let j = layout.eval_in(u, e, *local);
            for i in 0..3 {
                l2 += w * j.v[i] * j.v[i];
                h1 += w * j.d[i].iter().map(|d| d * d).sum::<f64>();
            }
        }
    }
    (l2, h1)
}

/// `ε‖v‖_{1,Ω} / (Σ_{ij}|e_{i||j}(ε;v)|²_{0,Ω})^{1/2}`.
pub fn korn_ratio(layout: &Layout3D, chart: &dyn SurfaceChart, eps: f64, shear: ShearStrain, v: &[f64]) -> Result<f64> {
    let off = (0..v.len()).filter(|&i| layout.map.free_index[i].is_none()).map(|i| v[i].abs()).fold(0.0, f64::max);
    if off > 0.0 {
        return Err(Error::BoundaryViolation(off));
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroField);
    }
    let (l2, h1) = field_norms_sq(layout, v);
    let mut es = 0.0;
    for e in 0..layout.mesh.num_elements() {
        for (local, w) in gauss_points(layout) {
            let (s, _) = field_strain(layout, chart, eps, shear, v, e, local)?;
            es += w * s.iter().flatten().map(|x| x * x).sum::<f64>();
        }
    }
    if es == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(eps * (l2 + h1).sqrt() / es.sqrt())
}

/// Repeats footprint nodal data through the thickness.
pub fn extrude(mesh: &Mesh3D, data: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 3 * mesh.num_nodes()];
    for n in 0..mesh.num_nodes() {
        let f = mesh.node_split(n).0;
        out[3 * n..3 * n + 3].copy_from_slice(&data[3 * f..3 * f + 3]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, Plate};
    use crate::mesh::Edge;

    fn layout(nz: usize) -> Layout3D {
        let d = Domain::rect(1.0, 1.0);
        Layout3D::new(Mesh3D::new(Mesh2D::new(d, 2, 2, vec![Edge::Y1Min], vec![]).unwrap(), nz).unwrap()).unwrap()
    }

    fn column(l: &Layout3D, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut u = vec![0.0; l.num_dofs()];
        for n in 0..l.mesh.num_nodes() {
            let k = l.mesh.node_split(n).1;
            u[3 * n + 2] = f(l.mesh.x3(k));
        }
        u
    }

    #[test]
    fn averages() {
        let l = layout(8);
        let c = transverse_average(&l.mesh, &column(&l, |_| 1.5));
        assert!(c.iter().skip(2).step_by(3).all(|&v| (v - 1.5).abs() < 1e-15));
        let odd = transverse_average(&l.mesh, &column(&l, |x| x));
        assert!(odd.iter().all(|&v| v.abs() < 1e-15));
        let sq = transverse_average(&l.mesh, &column(&l, |x| x * x));
        approx::assert_abs_diff_eq!(sq[2], 0.34375, epsilon = 1e-15);
    }

    #[test]
    fn average_is_l2_contraction() {
        let l = layout(4);
        let u: Vec<f64> = (0..l.num_dofs()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let avg = transverse_average(&l.mesh, &u);
        let (a, _) = bilinear_norms_sq(&l.mesh.footprint, &avg, 3);
        let (b, _) = field_norms_sq(&l, &u);
        assert!(a.sqrt() <= b.sqrt() / 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn korn_errors() {
        let l = layout(2);
        let ch = Plate { domain: l.mesh.footprint.domain };
        let z = vec![0.0; l.num_dofs()];
        assert_eq!(korn_ratio(&l, &ch, 0.1, ShearStrain::Full, &z), Err(Error::ZeroField));
        let mut v = z.clone();
        v[0] = 1.0; // node on y₁ = 0
        assert!(matches!(korn_ratio(&l, &ch, 0.1, ShearStrain::Full, &v), Err(Error::BoundaryViolation(_))));
        let mut v = z;
        let n = l.mesh.node_index(l.mesh.footprint.node_index(2, 1), 1);
        v[3 * n] = 1.0;
        assert!(korn_ratio(&l, &ch, 0.1, ShearStrain::Full, &v).unwrap().is_finite());
    }
}
