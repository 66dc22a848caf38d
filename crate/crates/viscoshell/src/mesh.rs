//! Structured rectangular meshes on the parameter domain and their
//! extrusion through the thickness.

use crate::error::{Error, Result};
use crate::geometry::Domain;

/// A whole side of the parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Y1Min,
    Y1Max,
    Y2Min,
    Y2Max,
}

impl Edge {
    pub fn parse(s: &str) -> Option<Edge> {
        match s.trim() {
            "y1min" | "y1=0" => Some(Edge::Y1Min),
            "y1max" | "y1=L1" => Some(Edge::Y1Max),
            "y2min" | "y2=0" => Some(Edge::Y2Min),
            "y2max" | "y2=L2" => Some(Edge::Y2Max),
            _ => None,
        }
    }

    /// Direction normal to the edge (0 for `y₁ = const`, 1 for `y₂ = const`).
    pub fn normal_dir(self) -> usize {
        match self {
            Edge::Y1Min | Edge::Y1Max => 0,
            Edge::Y2Min | Edge::Y2Max => 1,
        }
    }
}

/// Structured `nx × ny` grid with boundary tags.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
    /// `γ₀`: clamped edges.
    pub clamped: Vec<Edge>,
    /// Edges where the displacement vanishes but rotations are free.
    pub simply_supported: Vec<Edge>,
}

impl Mesh2D {
    pub fn new(domain: Domain, nx: usize, ny: usize, clamped: Vec<Edge>, simply_supported: Vec<Edge>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("mesh needs at least one element per direction".into()));
        }
        if clamped.is_empty() && simply_supported.is_empty() {
            return Err(Error::InvalidArgument("the clamped boundary must have positive length".into()));
        }
        if domain.periodic_y1 {
            if nx < 3 {
                return Err(Error::InvalidArgument("periodic meshes need nx >= 3".into()));
            }
            if clamped.iter().chain(&simply_supported).any(|e| e.normal_dir() == 0) {
                return Err(Error::InvalidArgument("periodic direction y1 has no boundary edges".into()));
            }
        }
        Ok(Mesh2D { domain, nx, ny, clamped, simply_supported })
    }

    pub fn h(&self) -> [f64; 2] {
        [self.domain.lengths[0] / self.nx as f64, self.domain.lengths[1] / self.ny as f64]
    }

    /// Number of distinct node columns in `y₁` (periodic meshes identify the ends).
    pub fn nodes_x(&self) -> usize {
        if self.domain.periodic_y1 {
            self.nx
        } else {
            self.nx + 1
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes_x() * (self.ny + 1)
    }

    pub fn num_elements(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        (i % self.nodes_x()) * (self.ny + 1) + j
    }

    pub fn node_ij(&self, n: usize) -> (usize, usize) {
        (n / (self.ny + 1), n % (self.ny + 1))
    }

    pub fn node_coords(&self, n: usize) -> [f64; 2] {
        let (i, j) = self.node_ij(n);
        let h = self.h();
        [self.domain.origin[0] + i as f64 * h[0], self.domain.origin[1] + j as f64 * h[1]]
    }

    /// Element `(ex, ey)` nodes, counter-clockwise from the lower-left corner.
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let (ex, ey) = (e % self.nx, e / self.nx);
        [
            self.node_index(ex, ey),
            self.node_index(ex + 1, ey),
            self.node_index(ex + 1, ey + 1),
            self.node_index(ex, ey + 1),
        ]
    }

    /// Lower-left corner of element `e` in parameter coordinates.
    pub fn element_origin(&self, e: usize) -> [f64; 2] {
        let (ex, ey) = (e % self.nx, e / self.nx);
        let h = self.h();
        [self.domain.origin[0] + ex as f64 * h[0], self.domain.origin[1] + ey as f64 * h[1]]
    }

    pub fn on_edge(&self, n: usize, edge: Edge) -> bool {
        let (i, j) = self.node_ij(n);
        match edge {
            Edge::Y1Min => !self.domain.periodic_y1 && i == 0,
            Edge::Y1Max => !self.domain.periodic_y1 && i == self.nx,
            Edge::Y2Min => j == 0,
            Edge::Y2Max => j == self.ny,
        }
    }

    pub fn on_clamped(&self, n: usize) -> bool {
        self.clamped.iter().any(|&e| self.on_edge(n, e))
    }

    pub fn same_footprint(&self, other: &Mesh2D) -> bool {
        self.domain == other.domain && self.nx == other.nx && self.ny == other.ny
    }
}

/// The footprint grid extruded into `nz` uniform layers over `x₃ ∈ [−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh3D {
    pub footprint: Mesh2D,
    pub nz: usize,
}

impl Mesh3D {
    pub fn new(footprint: Mesh2D, nz: usize) -> Result<Self> {
        if nz == 0 {
            return Err(Error::InvalidArgument("mesh.nz must be positive".into()));
        }
        Ok(Mesh3D { footprint, nz })
    }

    pub fn hz(&self) -> f64 {
        2.0 / self.nz as f64
    }

    pub fn num_nodes(&self) -> usize {
        self.footprint.num_nodes() * (self.nz + 1)
    }

    pub fn num_elements(&self) -> usize {
        self.footprint.num_elements() * self.nz
    }

    /// Through-thickness nodes are numbered fastest, keeping the bandwidth small.
    pub fn node_index(&self, foot: usize, k: usize) -> usize {
        foot * (self.nz + 1) + k
    }

    pub fn node_split(&self, n: usize) -> (usize, usize) {
        (n / (self.nz + 1), n % (self.nz + 1))
    }

    pub fn x3(&self, k: usize) -> f64 {
        -1.0 + k as f64 * self.hz()
    }

    /// Hex nodes: bottom face (counter-clockwise) then top face.
    pub fn element_nodes(&self, e: usize) -> [usize; 8] {
        let (fe, k) = (e / self.nz, e % self.nz);
        let f = self.footprint.element_nodes(fe);
        let mut out = [0; 8];
        for a in 0..4 {
            out[a] = self.node_index(f[a], k);
            out[a + 4] = self.node_index(f[a], k + 1);
        }
        out
    }

    pub fn element_split(&self, e: usize) -> (usize, usize) {
        (e / self.nz, e % self.nz)
    }
}
