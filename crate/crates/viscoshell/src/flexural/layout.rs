use crate::hermite::{bfs_eval, BfsEval};
use crate::kinematics::Jet2D;
use crate::mesh::Mesh2D;
use crate::sparse::DofMap;

/// Which displacement components are discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model2D {
    /// Only `η₃` (Kirchhoff plate bending; `η_α ≡ 0`).
    Plate,
    /// All three components, with the inextensibility penalty.
    Shell,
}

/// Hermite dof numbering: node `n`, component slot `c`, slot `k ∈ {w, ∂₁, ∂₂, ∂₁₂}`
/// maps to `n · per_node + 4c + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout2D {
    pub mesh: Mesh2D,
    pub model: Model2D,
    pub components: Vec<usize>,
    pub per_node: usize,
    pub map: DofMap,
}

impl DofLayout2D {
    pub fn new(mesh: Mesh2D, model: Model2D) -> Self {
        let components = match model {
            Model2D::Plate => vec![2],
            Model2D::Shell => vec![0, 1, 2],
        };
        let per_node = 4 * components.len();
        let mut fixed = vec![false; mesh.num_nodes() * per_node];
        for n in 0..mesh.num_nodes() {
            for &edge in &mesh.clamped {
                if !mesh.on_edge(n, edge) {
                    continue;
                }
                let normal = 1 + edge.normal_dir();
                let tangent = 2 - edge.normal_dir();
                for (slot, &comp) in components.iter().enumerate() {
                    let base = n * per_node + 4 * slot;
                    fixed[base] = true;
                    fixed[base + tangent] = true;
                    if comp == 2 {
                        // ∂_ν η₃ = 0 along the edge, hence also its tangential derivative.
                        fixed[base + normal] = true;
                        fixed[base + 3] = true;
                    }
                }
            }
            for &edge in &mesh.simply_supported {
                if !mesh.on_edge(n, edge) {
                    continue;
                }
                let tangent = 2 - edge.normal_dir();
                for slot in 0..components.len() {
                    let base = n * per_node + 4 * slot;
                    fixed[base] = true;
                    fixed[base + tangent] = true;
                }
            }
        }
        DofLayout2D { map: DofMap::new(&fixed), mesh, model, components, per_node }
    }

    pub fn num_dofs(&self) -> usize {
        self.mesh.num_nodes() * self.per_node
    }

    pub fn dof(&self, node: usize, slot: usize, k: usize) -> usize {
        node * self.per_node + 4 * slot + k
    }

    /// Global dofs of element `e` in local order `4·ncomp·a + 4·slot + k`.
    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(4 * self.per_node);
        for n in self.mesh.element_nodes(e) {
            for i in 0..self.per_node {
                out.push(n * self.per_node + i);
            }
        }
        out
    }

    /// Jets of every local basis function (one nonzero component each).
    pub fn local_jets(&self, ev: &BfsEval) -> Vec<Jet2D> {
        let nc = self.components.len();
        let mut out = vec![Jet2D::default(); 4 * self.per_node];
        for a in 0..4 {
            for (slot, &comp) in self.components.iter().enumerate() {
                for k in 0..4 {
                    let j = &mut out[a * 4 * nc + 4 * slot + k];
                    let i = 4 * a + k;
                    j.v[comp] = ev.val[i];
                    j.d[comp] = ev.d[i];
                    j.dd[comp] = ev.dd[i];
                }
            }
        }
        out
    }

    /// Locates `y`: element index and local coordinates in `[0, 1]²`.
    pub fn locate(&self, y: [f64; 2]) -> (usize, [f64; 2]) {
        let m = &self.mesh;
        let h = m.h();
        let mut idx = [0usize; 2];
        let mut loc = [0.0; 2];
        let n = [m.nx, m.ny];
        for d in 0..2 {
            let mut u = (y[d] - m.domain.origin[d]) / h[d];
            if d == 0 && m.domain.periodic_y1 {
                u = u.rem_euclid(m.nx as f64);
            }
            let i = (u.floor().max(0.0) as usize).min(n[d] - 1);
            idx[d] = i;
            loc[d] = u - i as f64;
        }
        (idx[1] * m.nx + idx[0], loc)
    }

    /// Evaluates the discrete field with coefficients `xi` at `y`.
    pub fn eval(&self, xi: &[f64], y: [f64; 2]) -> Jet2D {
        let (e, loc) = self.locate(y);
        let ev = bfs_eval(loc[0], loc[1], self.mesh.h());
        self.eval_in(xi, e, &ev)
    }

    pub fn eval_in(&self, xi: &[f64], e: usize, ev: &BfsEval) -> Jet2D {
        let dofs = self.element_dofs(e);
        let jets = self.local_jets(ev);
        let mut out = Jet2D::default();
        for (d, j) in dofs.iter().zip(&jets) {
            if xi[*d] != 0.0 {
                out.axpy(xi[*d], j);
            }
        }
        out
    }

    /// Hermite interpolant of a field given by `(w, ∂₁w, ∂₂w, ∂₁₂w)` per
    /// component; constrained dofs are set to zero.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> [[f64; 4]; 3]) -> Vec<f64> {
        let mut xi = vec![0.0; self.num_dofs()];
        for n in 0..self.mesh.num_nodes() {
            let vals = f(self.mesh.node_coords(n));
            for (slot, &comp) in self.components.iter().enumerate() {
                for k in 0..4 {
                    let d = self.dof(n, slot, k);
                    if self.map.free_index[d].is_some() {
                        xi[d] = vals[comp][k];
                    }
                }
            }
        }
        xi
    }

    /// Value-slot coefficients of component `comp` at every node (zero for
    /// components not discretized).
    pub fn nodal_values(&self, xi: &[f64], comp: usize) -> Vec<f64> {
        match self.components.iter().position(|&c| c == comp) {
            Some(slot) => (0..self.mesh.num_nodes()).map(|n| xi[self.dof(n, slot, 0)]).collect(),
            None => vec![0.0; self.mesh.num_nodes()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::mesh::Edge;

    #[test]
    fn clamped_edge_fixes_expected_slots() {
        let m = Mesh2D::new(Domain::rect(1.0, 1.0), 2, 2, vec![Edge::Y1Min], vec![]).unwrap();
        let l = DofLayout2D::new(m, Model2D::Shell);
        // 3 nodes on y₁ = 0: η_α fix (w, ∂₂), η₃ fixes all four.
        assert_eq!(l.num_dofs() - l.map.num_free(), 3 * (2 + 2 + 4));
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let m = Mesh2D::new(Domain::rect(2.0, 1.0), 3, 2, vec![], vec![Edge::Y2Min]).unwrap();
        let l = DofLayout2D::new(m, Model2D::Plate);
        let w = |y: [f64; 2]| [[0.0; 4], [0.0; 4], [y[0].powi(3) * y[1], 3.0 * y[0] * y[0] * y[1], y[0].powi(3), 3.0 * y[0] * y[0]]];
        let xi = l.interpolate(w);
        let y = [1.234, 0.77];
        let j = l.eval(&xi, y);
        approx::assert_abs_diff_eq!(j.v[2], y[0].powi(3) * y[1], epsilon = 1e-12);
        approx::assert_abs_diff_eq!(j.dd[2][0][0], 6.0 * y[0] * y[1], epsilon = 1e-10);
    }
}
