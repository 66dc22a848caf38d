use crate::error::{Error, Result};
use crate::geometry::{surface_eval, volume_eval_at, SurfaceChart, VolumePointData};
use crate::kinematics::{strain3d_eval, Jet3D, Sym3};
use crate::loads::LoadSpec;
use crate::material::{tensors_3d, MaterialParams, Tensor3};
use crate::mesh::Mesh3D;
use crate::quadrature::gauss_legendre;
use crate::sparse::{CsrMatrix, DofMap, SparseBuilder};

/// How the transverse shear strains `e_{α||3}` enter the element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShearStrain {
    /// Evaluated at every Gauss point.
    Full,
    /// Assumed natural strain: `e_{1||3}` tied along the element mid-line
    /// `ξ₁ = 0`, `e_{2||3}` along `ξ₂ = 0`.
    Ans,
}

/// Three covariant displacement components per node; `Γ₀ = γ₀ × [−1, 1]`
/// fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout3D {
    pub mesh: Mesh3D,
    pub map: DofMap,
}

impl Layout3D {
    pub fn new(mesh: Mesh3D) -> Result<Self> {
        let foot = &mesh.footprint;
        if !foot.simply_supported.is_empty() {
            return Err(Error::InvalidArgument("the 3D model supports clamped edges only".into()));
        }
        if foot.clamped.is_empty() {
            return Err(Error::InvalidArgument("the 3D model needs at least one clamped edge".into()));
        }
        let mut fixed = vec![false; 3 * mesh.num_nodes()];
        for n in 0..mesh.num_nodes() {
            if foot.on_clamped(mesh.node_split(n).0) {
                fixed[3 * n..3 * n + 3].iter_mut().for_each(|f| *f = true);
            }
        }
        Ok(Layout3D { map: DofMap::new(&fixed), mesh })
    }

    pub fn num_dofs(&self) -> usize {
        3 * self.mesh.num_nodes()
    }

    pub fn element_dofs(&self, e: usize) -> [usize; 24] {
        let nodes = self.mesh.element_nodes(e);
        let mut d = [0; 24];
        for a in 0..8 {
            for i in 0..3 {
                d[3 * a + i] = 3 * nodes[a] + i;
            }
        }
        d
    }

    /// Parameter point of element-local coordinates `(s, t, z) ∈ [0, 1]³`.
    pub fn point(&self, e: usize, local: [f64; 3]) -> [f64; 3] {
        let (fe, k) = self.mesh.element_split(e);
        let o = self.mesh.footprint.element_origin(fe);
        let h = self.mesh.footprint.h();
        [o[0] + local[0] * h[0], o[1] + local[1] * h[1], self.mesh.x3(k) + local[2] * self.mesh.hz()]
    }

    /// Locates `x` in the mesh.
    pub fn locate(&self, x: [f64; 3]) -> (usize, [f64; 3]) {
        let foot = &self.mesh.footprint;
        let h = foot.h();
        let mut idx = [0usize; 3];
        let mut loc = [0.0; 3];
        let n = [foot.nx, foot.ny, self.mesh.nz];
        let steps = [h[0], h[1], self.mesh.hz()];
        let origin = [foot.domain.origin[0], foot.domain.origin[1], -1.0];
        for d in 0..3 {
            let mut u = (x[d] - origin[d]) / steps[d];
            if d == 0 && foot.domain.periodic_y1 {
                u = u.rem_euclid(foot.nx as f64);
            }
            let i = (u.floor().max(0.0) as usize).min(n[d] - 1);
            idx[d] = i;
            loc[d] = u - i as f64;
        }
        ((idx[1] * foot.nx + idx[0]) * self.mesh.nz + idx[2], loc)
    }

    /// Trilinear shape values and parameter-space gradients.
    pub fn shape(&self, local: [f64; 3]) -> ([f64; 8], [[f64; 3]; 8]) {
        let h = self.mesh.footprint.h();
        let steps = [h[0], h[1], self.mesh.hz()];
        let corners = [(0, 0), (1, 0), (1, 1), (0, 1)];
        let lin = |c: usize, s: f64| if c == 0 { (1.0 - s, -1.0) } else { (s, 1.0) };
        let mut n = [0.0; 8];
        let mut dn = [[0.0; 3]; 8];
        for layer in 0..2 {
            for (a, &(cx, cy)) in corners.iter().enumerate() {
                let (fx, dx) = lin(cx, local[0]);
                let (fy, dy) = lin(cy, local[1]);
                let (fz, dz) = lin(layer, local[2]);
                let i = 4 * layer + a;
                n[i] = fx * fy * fz;
                dn[i] = [dx * fy * fz / steps[0], fx * dy * fz / steps[1], fx * fy * dz / steps[2]];
            }
        }
        (n, dn)
    }

    /// Jet of the discrete field `u` inside element `e`.
    pub fn eval_in(&self, u: &[f64], e: usize, local: [f64; 3]) -> Jet3D {
        let dofs = self.element_dofs(e);
        let (n, dn) = self.shape(local);
        let mut j = Jet3D::default();
        for a in 0..8 {
            for i in 0..3 {
                let c = u[dofs[3 * a + i]];
                j.v[i] += c * n[a];
                for k in 0..3 {
                    j.d[i][k] += c * dn[a][k];
                }
            }
        }
        j
    }

    pub fn eval(&self, u: &[f64], x: [f64; 3]) -> Jet3D {
        let (e, loc) = self.locate(x);
        self.eval_in(u, e, loc)
    }
}

fn volume_at(chart: &dyn SurfaceChart, x: [f64; 3], eps: f64) -> Result<VolumePointData> {
    volume_eval_at(&surface_eval(chart, [x[0], x[1]])?, eps, x[2])
}

/// Strains of the 24 element basis functions at one point, with the ANS
/// substitution applied. Returns the strains and the geometry at the point.
pub fn basis_strains(
    layout: &Layout3D,
    chart: &dyn SurfaceChart,
    eps: f64,
    shear: ShearStrain,
    e: usize,
    local: [f64; 3],
) -> Result<(Vec<Sym3>, VolumePointData)> {
    let at = |loc: [f64; 3]| -> Result<(Vec<Sym3>, VolumePointData)> {
        let vol = volume_at(chart, layout.point(e, loc), eps)?;
        let (n, dn) = layout.shape(loc);
        let mut out = Vec::with_capacity(24);
        for a in 0..8 {
            for i in 0..3 {
                let mut j = Jet3D::default();
                j.v[i] = n[a];
                j.d[i] = dn[a];
                out.push(strain3d_eval(&j, &vol, eps));
            }
        }
        Ok((out, vol))
    };
    let (mut strains, vol) = at(local)?;
    if shear == ShearStrain::Ans {
        for (alpha, tie) in [(0usize, [0.5, local[1], local[2]]), (1, [local[0], 0.5, local[2]])] {
            let (tied, _) = at(tie)?;
            for (s, t) in strains.iter_mut().zip(&tied) {
                s[alpha][2] = t[alpha][2];
                s[2][alpha] = t[alpha][2];
            }
        }
    }
    Ok((strains, vol))
}

/// Strain of the discrete field `u` at one point.
pub fn field_strain(
    layout: &Layout3D,
    chart: &dyn SurfaceChart,
    eps: f64,
    shear: ShearStrain,
    u: &[f64],
    e: usize,
    local: [f64; 3],
) -> Result<(Sym3, VolumePointData)> {
    let (basis, vol) = basis_strains(layout, chart, eps, shear, e, local)?;
    let dofs = layout.element_dofs(e);
    let mut s = [[0.0; 3]; 3];
    for (d, b) in dofs.iter().zip(&basis) {
        let c = u[*d];
        if c != 0.0 {
            for i in 0..3 {
                for j in 0..3 {
                    s[i][j] += c * b[i][j];
                }
            }
        }
    }
    Ok((s, vol))
}

/// 2×2×2 Gauss points in local coordinates with weights including the
/// element volume in parameter space.
pub fn gauss_points(layout: &Layout3D) -> Vec<([f64; 3], f64)> {
    let (p, w) = gauss_legendre(2);
    let h = layout.mesh.footprint.h();
    let jac = h[0] * h[1] * layout.mesh.hz() / 8.0;
    let mut out = Vec::with_capacity(8);
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..2 {
                out.push(([0.5 * (p[i] + 1.0), 0.5 * (p[j] + 1.0), 0.5 * (p[k] + 1.0)], w[i] * w[j] * w[k] * jac));
            }
        }
    }
    out
}

fn contract(t: &Tensor3, e: &Sym3) -> Sym3 {
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut v = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    v += t[i][j][k][l] * e[k][l];
                }
            }
            s[i][j] = v;
        }
    }
    s
}

fn ddot(a: &Sym3, b: &Sym3) -> f64 {
    (0..3).map(|i| (0..3).map(|j| a[i][j] * b[i][j]).sum::<f64>()).sum()
}

/// `(K_A(ε), K_B(ε))`: `∫_Ω A^{ijkl}(ε) e_{k||l}(ε;·) e_{i||j}(ε;·) √g(ε) dx`
/// and the same with `B(ε)`.
pub fn assemble3d(layout: &Layout3D, chart: &dyn SurfaceChart, mat: &MaterialParams, eps: f64, shear: ShearStrain) -> Result<(CsrMatrix, CsrMatrix)> {
    mat.validate()?;
    let n = layout.num_dofs();
    let mut ba = SparseBuilder::new(n);
    let mut bb = SparseBuilder::new(n);
    let gp = gauss_points(layout);
    let mut ka = vec![0.0; 576];
    let mut kb = vec![0.0; 576];
    for e in 0..layout.mesh.num_elements() {
        ka.iter_mut().for_each(|v| *v = 0.0);
        kb.iter_mut().for_each(|v| *v = 0.0);
        for (local, w) in &gp {
            let (strains, vol) = basis_strains(layout, chart, eps, shear, e, *local)?;
            let t = tensors_3d(mat, &vol);
            let wq = w * vol.sqrt_g();
            let sa: Vec<Sym3> = strains.iter().map(|s| contract(&t.a3, s)).collect();
            let sb: Vec<Sym3> = strains.iter().map(|s| contract(&t.b3, s)).collect();
            for l in 0..24 {
                for m in 0..24 {
                    ka[l * 24 + m] += wq * ddot(&sa[m], &strains[l]);
                    kb[l * 24 + m] += wq * ddot(&sb[m], &strains[l]);
                }
            }
        }
        let dofs = layout.element_dofs(e);
        ba.add_block(&dofs, &ka);
        bb.add_block(&dofs, &kb);
    }
    Ok((ba.build(), bb.build()))
}

/// `ε²∫_Ω f^{i,2} v_i √g(ε) dx + ε²∫_{Γ₊∪Γ₋} h^{i,3} v_i √g(ε) dΓ`.
pub fn load3d(layout: &Layout3D, chart: &dyn SurfaceChart, loads: &LoadSpec, eps: f64, t: f64) -> Result<Vec<f64>> {
    let mut f = vec![0.0; layout.num_dofs()];
    if loads.is_zero() {
        return Ok(f);
    }
    let domain = layout.mesh.footprint.domain;
    let e2 = eps * eps;
    for e in 0..layout.mesh.num_elements() {
        let dofs = layout.element_dofs(e);
        for (local, w) in gauss_points(layout) {
            let x = layout.point(e, local);
            let vol = volume_at(chart, x, eps)?;
            let fv = loads.f2(&domain, t, [x[0], x[1]], x[2]);
            let (n, _) = layout.shape(local);
            for a in 0..8 {
                for i in 0..3 {
                    f[dofs[3 * a + i]] += e2 * w * vol.sqrt_g() * fv[i] * n[a];
                }
            }
        }
    }
    // Faces x₃ = ±1.
    let (p, wg) = gauss_legendre(2);
    let h = layout.mesh.footprint.h();
    let nz = layout.mesh.nz;
    for fe in 0..layout.mesh.footprint.num_elements() {
        for (top, k, z) in [(false, 0, 0.0), (true, nz - 1, 1.0)] {
            let e = fe * nz + k;
            let dofs = layout.element_dofs(e);
            for i in 0..2 {
                for j in 0..2 {
                    let local = [0.5 * (p[i] + 1.0), 0.5 * (p[j] + 1.0), z];
                    let x = layout.point(e, local);
                    let hv = loads.h3(&domain, t, [x[0], x[1]], top);
                    if hv == [0.0; 3] {
                        continue;
                    }
                    let vol = volume_at(chart, x, eps)?;
                    let w = wg[i] * wg[j] * h[0] * h[1] / 4.0 * vol.sqrt_g();
                    let (n, _) = layout.shape(local);
                    for a in 0..8 {
                        for c in 0..3 {
                            f[dofs[3 * a + c]] += e2 * w * hv[c] * n[a];
                        }
                    }
                }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, Plate};
    use crate::mesh::{Edge, Mesh2D};

    fn layout(nx: usize, nz: usize) -> Layout3D {
        let d = Domain::rect(1.0, 1.0);
        Layout3D::new(Mesh3D::new(Mesh2D::new(d, nx, nx, vec![Edge::Y1Min], vec![]).unwrap(), nz).unwrap()).unwrap()
    }

    fn interp(l: &Layout3D, f: impl Fn([f64; 3]) -> [f64; 3]) -> Vec<f64> {
        let m = &l.mesh;
        let mut u = vec![0.0; l.num_dofs()];
        for n in 0..m.num_nodes() {
            let (foot, k) = m.node_split(n);
            let y = m.footprint.node_coords(foot);
            let v = f([y[0], y[1], m.x3(k)]);
            u[3 * n..3 * n + 3].copy_from_slice(&v);
        }
        u
    }

    #[test]
    fn plate_single_element_oracle() {
        // One hex [0,1]²×[−1,1], plate: e(ε) is the Cartesian strain with ∂₃ → (1/ε)∂₃.
        let l = layout(1, 1);
        let mat = MaterialParams::new(1.3, 0.7, 0.4, 0.9).unwrap();
        let eps = 0.1;
        let ch = Plate { domain: l.mesh.footprint.domain };
        let (ka, _) = assemble3d(&l, &ch, &mat, eps, ShearStrain::Full).unwrap();
        // u = (x₃, 0, 0): e₁₃ = 1/(2ε), energy = ∫ 4μ e₁₃² = 4μ/(4ε²)·vol(2).
        let u = interp(&l, |x| [x[2], 0.0, 0.0]);
        approx::assert_relative_eq!(ka.bilinear(&u, &u), 0.7 / (eps * eps) * 2.0, max_relative = 1e-12);
        // u = (0, 0, x₃): e₃₃ = 1/ε, energy = (λ+2μ)/ε²·2.
        let u = interp(&l, |x| [0.0, 0.0, x[2]]);
        approx::assert_relative_eq!(ka.bilinear(&u, &u), (1.3 + 1.4) / (eps * eps) * 2.0, max_relative = 1e-12);
        // u = (y₁, 0, 0): e₁₁ = 1, energy = (λ+2μ)·2.
        let u = interp(&l, |x| [x[0], 0.0, 0.0]);
        approx::assert_relative_eq!(ka.bilinear(&u, &u), (1.3 + 1.4) * 2.0, max_relative = 1e-12);
        assert!(ka.symmetry_defect() < 1e-12);
    }

    #[test]
    fn transverse_energy_scales_with_inverse_eps_squared() {
        let l = layout(2, 2);
        let mat = MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let ch = Plate { domain: l.mesh.footprint.domain };
        let u = interp(&l, |x| [0.0, 0.0, x[2]]);
        let en: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&e| {
                let (ka, _) = assemble3d(&l, &ch, &mat, e, ShearStrain::Full).unwrap();
                ka.bilinear(&u, &u) * e * e
            })
            .collect();
        approx::assert_relative_eq!(en[0], en[2], max_relative = 1e-12);
    }

    #[test]
    fn load_resultants() {
        let l = layout(2, 4);
        let ch = Plate { domain: l.mesh.footprint.domain };
        let mut l_free = l.clone();
        l_free.map = DofMap::new(&vec![false; l.num_dofs()]);
        let f = load3d(&l_free, &ch, &LoadSpec::normal_volume(1.0), 0.1, 0.0).unwrap();
        let total: f64 = f.iter().skip(2).step_by(3).sum();
        approx::assert_relative_eq!(total, 0.02, max_relative = 1e-12);
        let top = LoadSpec { top: [0.0, 0.0, 3.0], ..Default::default() };
        let f = load3d(&l_free, &ch, &top, 0.1, 0.0).unwrap();
        approx::assert_relative_eq!(f.iter().sum::<f64>(), 0.03, max_relative = 1e-12);
        for n in 0..l.mesh.num_nodes() {
            if l.mesh.node_split(n).1 != 4 {
                assert_eq!(f[3 * n + 2], 0.0);
            }
        }
    }

    #[test]
    fn ans_changes_only_shear() {
        let l = layout(2, 2);
        let mat = MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let ch = Plate { domain: l.mesh.footprint.domain };
        let (full, _) = assemble3d(&l, &ch, &mat, 0.1, ShearStrain::Full).unwrap();
        let (ans, _) = assemble3d(&l, &ch, &mat, 0.1, ShearStrain::Ans).unwrap();
        // ∂₃u₁ varies along ξ₁, which the tying removes.
        let u = interp(&l, |x| [x[2] * x[0], 0.0, 0.0]);
        // no transverse shear at all: identical.
        let v = interp(&l, |x| [x[0] * x[1], x[1] * x[1], 0.0]);
        approx::assert_relative_eq!(full.bilinear(&v, &v), ans.bilinear(&v, &v), max_relative = 1e-12);
        assert!((full.bilinear(&u, &u) - ans.bilinear(&u, &u)).abs() > 1e-6);
        assert!(ans.symmetry_defect() < 1e-12);
    }
}
