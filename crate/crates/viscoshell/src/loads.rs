//! Built-in applied loads: volume force `f^{i,2}` and surface tractions
//! `h^{i,3}` on the faces `x₃ = ±1`, in scaled (order-one) form.

use crate::geometry::Domain;
use crate::material::{FlexuralCoefficients, MaterialParams};
use crate::quadrature::gauss_legendre;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    Constant,
    /// Linear ramp from 0 reaching 1 at `t_ramp`, then constant.
    Ramp { t_ramp: f64 },
    /// `1 − e^{−rate·t}`
    Rise { rate: f64 },
}

impl TimeProfile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Ramp { t_ramp } => (t / t_ramp).clamp(0.0, 1.0),
            TimeProfile::Rise { rate } => 1.0 - (-rate * t).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialProfile {
    Uniform,
    /// `sin(π ŷ₁) sin(π ŷ₂)` in normalized coordinates `ŷ = (y − origin)/L`.
    SinSin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThicknessProfile {
    Constant,
    /// `f ∝ x₃` (integrates to zero through the thickness).
    Linear,
}

/// Manufactured plate solution `ξ₃ = (1 − e^{−t}) sin(πŷ₁) sin(πŷ₂)` on a
/// simply supported rectangle; the load is the strong-form residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedPlate {
    pub material: MaterialParams,
}

impl ManufacturedPlate {
    pub fn phi(t: f64) -> f64 {
        1.0 - (-t).exp()
    }

    /// `∫₀ᵗ e^{−k(t−s)} φ(s) ds`
    pub fn memory(k: f64, t: f64) -> f64 {
        let first = (1.0 - (-k * t).exp()) / k;
        let second = if (k - 1.0).abs() < 1e-12 { t * (-t).exp() } else { ((-t).exp() - (-k * t).exp()) / (k - 1.0) };
        first - second
    }

    /// `π⁴(1/L₁² + 1/L₂²)²`: the biharmonic eigenvalue of the sine mode.
    pub fn biharmonic(domain: &Domain) -> f64 {
        let [l1, l2] = domain.lengths;
        PI.powi(4) * (1.0 / (l1 * l1) + 1.0 / (l2 * l2)).powi(2)
    }

    /// Time factor of the load: `D_aφ + D_bφ' − D_c ∫e^{−k(t−s)}φ ds`,
    /// with `D_x` the sum of the trace and twice the shear coefficient.
    pub fn time_factor(&self, t: f64) -> f64 {
        let c = FlexuralCoefficients::new(&self.material).expect("validated material");
        let k = self.material.k_decay();
        (c.a_trace + 2.0 * c.a_shear) * Self::phi(t) + (c.b_trace + 2.0 * c.b_shear) * (-t).exp()
            - c.c_trace * Self::memory(k, t)
    }

    pub fn shape(domain: &Domain, y: [f64; 2]) -> f64 {
        let u = [(y[0] - domain.origin[0]) / domain.lengths[0], (y[1] - domain.origin[1]) / domain.lengths[1]];
        (PI * u[0]).sin() * (PI * u[1]).sin()
    }

    /// Value, gradient and Hessian of the shape function.
    pub fn shape_jet(domain: &Domain, y: [f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let k = [PI / domain.lengths[0], PI / domain.lengths[1]];
        let a = [k[0] * (y[0] - domain.origin[0]), k[1] * (y[1] - domain.origin[1])];
        let (s0, c0) = a[0].sin_cos();
        let (s1, c1) = a[1].sin_cos();
        (
            s0 * s1,
            [k[0] * c0 * s1, k[1] * s0 * c1],
            [[-k[0] * k[0] * s0 * s1, k[0] * k[1] * c0 * c1], [k[0] * k[1] * c0 * c1, -k[1] * k[1] * s0 * s1]],
        )
    }
}

/// Applied loads in scaled form.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSpec {
    pub volume: [f64; 3],
    pub thickness: ThicknessProfile,
    pub top: [f64; 3],
    pub bottom: [f64; 3],
    pub spatial: SpatialProfile,
    pub time: TimeProfile,
    pub manufactured: Option<ManufacturedPlate>,
}

impl Default for LoadSpec {
    fn default() -> Self {
        LoadSpec {
            volume: [0.0; 3],
            thickness: ThicknessProfile::Constant,
            top: [0.0; 3],
            bottom: [0.0; 3],
            spatial: SpatialProfile::Uniform,
            time: TimeProfile::Constant,
            manufactured: None,
        }
    }
}

impl LoadSpec {
    /// Uniform normal volume force `f^{3,2} = magnitude`.
    pub fn normal_volume(magnitude: f64) -> Self {
        LoadSpec { volume: [0.0, 0.0, magnitude], ..Default::default() }
    }

    pub fn manufactured(material: MaterialParams) -> Self {
        LoadSpec { manufactured: Some(ManufacturedPlate { material }), ..Default::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.manufactured.is_none() && self.volume == [0.0; 3] && self.top == [0.0; 3] && self.bottom == [0.0; 3]
    }

    fn envelope(&self, domain: &Domain, t: f64, y: [f64; 2]) -> f64 {
        let s = match self.spatial {
            SpatialProfile::Uniform => 1.0,
            SpatialProfile::SinSin => ManufacturedPlate::shape(domain, y),
        };
        s * self.time.at(t)
    }

    /// `f^{i,2}(t, y, x₃)`.
    pub fn f2(&self, domain: &Domain, t: f64, y: [f64; 2], x3: f64) -> [f64; 3] {
        if let Some(m) = &self.manufactured {
            // Constant through the thickness; integrates to p³.
            let p = m.time_factor(t) * ManufacturedPlate::biharmonic(domain) * ManufacturedPlate::shape(domain, y) / 3.0;
            return [0.0, 0.0, 0.5 * p];
        }
        let e = self.envelope(domain, t, y) * match self.thickness {
            ThicknessProfile::Constant => 1.0,
            ThicknessProfile::Linear => x3,
        };
        self.volume.map(|v| v * e)
    }

    /// `h^{i,3}(t, y, ±1)`; `top` selects `x₃ = +1`.
    pub fn h3(&self, domain: &Domain, t: f64, y: [f64; 2], top: bool) -> [f64; 3] {
        if self.manufactured.is_some() {
            return [0.0; 3];
        }
        let e = self.envelope(domain, t, y);
        (if top { self.top } else { self.bottom }).map(|v| v * e)
    }

    /// `p^i = ∫_{−1}^{1} f^{i,2} dx₃ + h₊^{i,3} + h₋^{i,3}`.
    pub fn p(&self, domain: &Domain, t: f64, y: [f64; 2]) -> [f64; 3] {
        let (pts, w) = gauss_legendre(3);
        let mut p = [0.0; 3];
        for (x3, wq) in pts.iter().zip(w) {
            let f = self.f2(domain, t, y, *x3);
            for i in 0..3 {
                p[i] += wq * f[i];
            }
        }
        let (hp, hm) = (self.h3(domain, t, y, true), self.h3(domain, t, y, false));
        for i in 0..3 {
            p[i] += hp[i] + hm[i];
        }
        p
    }

    /// De-scaled resultant `p^{i,ε} = ∫_{−ε}^{ε} f^{i,ε} dx₃^ε + h₊^{i,ε} + h₋^{i,ε}`
    /// for the physical loads `f^ε(x^ε) = ε² f²(x^ε/ε)` and `h^ε = ε³ h³`.
    pub fn p_descaled(&self, domain: &Domain, t: f64, y: [f64; 2], eps: f64) -> [f64; 3] {
        let (pts, w) = gauss_legendre(3);
        let mut p = [0.0; 3];
        for (xi, wq) in pts.iter().zip(w) {
            // x₃^ε = ε ξ, dx₃^ε = ε dξ
            let f = self.f2(domain, t, y, *xi);
            for i in 0..3 {
                p[i] += wq * eps * (eps * eps * f[i]);
            }
        }
        let (hp, hm) = (self.h3(domain, t, y, true), self.h3(domain, t, y, false));
        let e3 = eps * eps * eps;
        for i in 0..3 {
            p[i] += e3 * (hp[i] + hm[i]);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultants() {
        let d = Domain::rect(1.0, 1.0);
        assert_eq!(LoadSpec::default().p(&d, 0.3, [0.2, 0.2]), [0.0; 3]);
        approx::assert_abs_diff_eq!(LoadSpec::normal_volume(1.0).p(&d, 0.0, [0.5, 0.5])[2], 2.0, epsilon = 1e-15);
        let odd = LoadSpec { thickness: ThicknessProfile::Linear, ..LoadSpec::normal_volume(1.0) };
        approx::assert_abs_diff_eq!(odd.p(&d, 0.0, [0.5, 0.5])[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn memory_integral_matches_quadrature() {
        for k in [0.5, 1.0, 3.0] {
            let t = 1.7;
            let q = crate::quadrature::adaptive_simpson(&|s| (-k * (t - s)).exp() * ManufacturedPlate::phi(s), 0.0, t, 1e-14);
            approx::assert_abs_diff_eq!(ManufacturedPlate::memory(k, t), q, epsilon = 1e-11);
        }
    }
}
