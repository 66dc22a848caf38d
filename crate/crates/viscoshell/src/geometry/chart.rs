use nalgebra::Vector3;
use std::f64::consts::{FRAC_PI_2, PI};

pub type V3 = Vector3<f64>;

/// Axis-aligned parameter rectangle, optionally periodic in `y₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub origin: [f64; 2],
    pub lengths: [f64; 2],
    pub periodic_y1: bool,
}

impl Domain {
    pub fn rect(l1: f64, l2: f64) -> Self {
        Domain { origin: [0.0, 0.0], lengths: [l1, l2], periodic_y1: false }
    }

    pub fn area(&self) -> f64 {
        self.lengths[0] * self.lengths[1]
    }

    pub fn contains(&self, y: [f64; 2]) -> bool {
        let tol = 1e-12 * self.lengths[0].max(self.lengths[1]);
        (0..2).all(|i| y[i] >= self.origin[i] - tol && y[i] <= self.origin[i] + self.lengths[i] + tol)
    }
}

/// Value and partial derivatives of the midsurface map up to third order.
///
/// Indices are symmetric: `d2[a][b] = ∂_a∂_b θ`, `d3[a][b][c] = ∂_a∂_b∂_c θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJet {
    pub x: V3,
    pub d1: [V3; 2],
    pub d2: [[V3; 2]; 2],
    pub d3: [[[V3; 2]; 2]; 2],
}

/// An analytic midsurface parametrization `θ : ω̄ → R³`.
pub trait SurfaceChart: Send + Sync {
    fn jet(&self, y: [f64; 2]) -> ChartJet;
    fn domain(&self) -> Domain;
    fn name(&self) -> String;
    /// True when the chart is the flat plate `θ(y) = (y₁, y₂, 0)`.
    fn is_flat(&self) -> bool {
        false
    }
}

/// `θ(y) = (y₁, y₂, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct Plate {
    pub domain: Domain,
}

impl SurfaceChart for Plate {
    fn jet(&self, y: [f64; 2]) -> ChartJet {
        let z = V3::zeros();
        ChartJet {
            x: V3::new(y[0], y[1], 0.0),
            d1: [V3::x(), V3::y()],
            d2: [[z; 2]; 2],
            d3: [[[z; 2]; 2]; 2],
        }
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn name(&self) -> String {
        "plate".into()
    }
    fn is_flat(&self) -> bool {
        true
    }
}

/// Circular cylinder of radius `R` parametrized by arc length:
/// `θ(y) = (R cos(y₁/R), R sin(y₁/R), y₂)`.
#[derive(Debug, Clone, Copy)]
pub struct Cylinder {
    pub radius: f64,
    pub domain: Domain,
}

impl SurfaceChart for Cylinder {
    fn jet(&self, y: [f64; 2]) -> ChartJet {
        let r = self.radius;
        let phi = y[0] / r;
        let (s, c) = phi.sin_cos();
        let z = V3::zeros();
        let mut d2 = [[z; 2]; 2];
        d2[0][0] = V3::new(-c / r, -s / r, 0.0);
        let mut d3 = [[[z; 2]; 2]; 2];
        d3[0][0][0] = V3::new(s / (r * r), -c / (r * r), 0.0);
        ChartJet {
            x: V3::new(r * c, r * s, y[1]),
            d1: [V3::new(-s, c, 0.0), V3::z()],
            d2,
            d3,
        }
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn name(&self) -> String {
        format!("cylinder({})", self.radius)
    }
}

/// `n`-th derivative of `sin` and `cos` at `t`.
fn dsin(n: usize, t: f64) -> f64 {
    (t + n as f64 * FRAC_PI_2).sin()
}
fn dcos(n: usize, t: f64) -> f64 {
    (t + n as f64 * FRAC_PI_2).cos()
}

/// Builds a jet from a closure returning `∂₁^m ∂₂^n θ`.
fn jet_from(f: impl Fn(usize, usize) -> V3) -> ChartJet {
    let z = V3::zeros();
    let mut d2 = [[z; 2]; 2];
    let mut d3 = [[[z; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let n2 = (a == 1) as usize + (b == 1) as usize;
            d2[a][b] = f(2 - n2, n2);
            for c in 0..2 {
                let n3 = n2 + (c == 1) as usize;
                d3[a][b][c] = f(3 - n3, n3);
            }
        }
    }
    ChartJet { x: f(0, 0), d1: [f(1, 0), f(0, 1)], d2, d3 }
}

/// Unit-sphere patch in polar/azimuth coordinates:
/// `θ(y) = (sin y₁ cos y₂, sin y₁ sin y₂, cos y₁)`. Singular at `y₁ = 0, π`.
#[derive(Debug, Clone, Copy)]
pub struct HemispherePatch {
    pub domain: Domain,
}

impl Default for HemispherePatch {
    fn default() -> Self {
        HemispherePatch {
            domain: Domain { origin: [PI / 8.0, -PI / 4.0], lengths: [PI / 4.0, PI / 2.0], periodic_y1: false },
        }
    }
}

impl SurfaceChart for HemispherePatch {
    fn jet(&self, y: [f64; 2]) -> ChartJet {
        jet_from(|m, n| {
            V3::new(
                dsin(m, y[0]) * dcos(n, y[1]),
                dsin(m, y[0]) * dsin(n, y[1]),
                if n == 0 { dcos(m, y[0]) } else { 0.0 },
            )
        })
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn name(&self) -> String {
        "hemisphere_patch".into()
    }
}

/// Height functions for graph charts `θ(y) = (y₁, y₂, h(y))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Height {
    /// `h = ½(c₁₁y₁² + 2c₁₂y₁y₂ + c₂₂y₂²)`
    Quadratic { c11: f64, c12: f64, c22: f64 },
    /// `h = amp · sin(k₁y₁) · sin(k₂y₂)`
    Wave { amp: f64, k1: f64, k2: f64 },
}

impl Height {
    /// `∂₁^m ∂₂^n h`.
    pub fn deriv(&self, m: usize, n: usize, y: [f64; 2]) -> f64 {
        match *self {
            Height::Quadratic { c11, c12, c22 } => match (m, n) {
                (0, 0) => 0.5 * (c11 * y[0] * y[0] + 2.0 * c12 * y[0] * y[1] + c22 * y[1] * y[1]),
                (1, 0) => c11 * y[0] + c12 * y[1],
                (0, 1) => c12 * y[0] + c22 * y[1],
                (2, 0) => c11,
                (1, 1) => c12,
                (0, 2) => c22,
                _ => 0.0,
            },
            Height::Wave { amp, k1, k2 } => {
                amp * k1.powi(m as i32) * k2.powi(n as i32) * dsin(m, k1 * y[0]) * dsin(n, k2 * y[1])
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Graph {
    pub height: Height,
    pub domain: Domain,
}

impl SurfaceChart for Graph {
    fn jet(&self, y: [f64; 2]) -> ChartJet {
        let h = self.height;
        jet_from(|m, n| {
            let lin = match (m, n) {
                (0, 0) => [y[0], y[1]],
                (1, 0) => [1.0, 0.0],
                (0, 1) => [0.0, 1.0],
                _ => [0.0, 0.0],
            };
            V3::new(lin[0], lin[1], h.deriv(m, n, y))
        })
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn name(&self) -> String {
        match self.height {
            Height::Quadratic { c11, c12, c22 } => format!("graph(quadratic,{c11},{c12},{c22})"),
            Height::Wave { amp, k1, k2 } => format!("graph(wave,{amp},{k1},{k2})"),
        }
    }
}

/// Wraps a chart and replaces its derivatives by nested 5-point central
/// differences of the map alone. Test-only oracle.
///
/// The step grows with the derivative order (`h`, `10h`, `100h`) so that
/// round-off in the nested stencils stays below the truncation error.
pub struct FiniteDifferenceChart<C> {
    pub inner: C,
    pub h: f64,
}

impl<C: SurfaceChart> FiniteDifferenceChart<C> {
    /// Default step `1e-4 · domain size`.
    pub fn new(inner: C) -> Self {
        let d = inner.domain();
        let h = 1e-4 * d.lengths[0].max(d.lengths[1]);
        FiniteDifferenceChart { inner, h }
    }

    fn nested(&self, y: [f64; 2], dirs: &[usize], h: f64) -> V3 {
        match dirs.split_last() {
            None => self.inner.jet(y).x,
            Some((&dir, rest)) => {
                let at = |s: f64| {
                    let mut p = y;
                    p[dir] += s * h;
                    self.nested(p, rest, h)
                };
                (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
            }
        }
    }
}

impl<C: SurfaceChart> SurfaceChart for FiniteDifferenceChart<C> {
    fn jet(&self, y: [f64; 2]) -> ChartJet {
        let h = self.h;
        let mut d2 = [[V3::zeros(); 2]; 2];
        let mut d3 = [[[V3::zeros(); 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                d2[a][b] = self.nested(y, &[a, b], 10.0 * h);
                for c in 0..2 {
                    d3[a][b][c] = self.nested(y, &[a, b, c], 100.0 * h);
                }
            }
        }
        ChartJet {
            x: self.inner.jet(y).x,
            d1: [self.nested(y, &[0], h), self.nested(y, &[1], h)],
            d2,
            d3,
        }
    }
    fn domain(&self) -> Domain {
        self.inner.domain()
    }
    fn name(&self) -> String {
        format!("fd({})", self.inner.name())
    }
}
