//! Kelvin–Voigt constitutive tensors: the ε-dependent 3D tensors, their
//! `ε = 0` limits, and the 2D flexural tensors with their memory constants.

use crate::error::{Error, Result};
use crate::geometry::{SurfacePointData, VolumePointData};

pub type Tensor2 = [[[[f64; 2]; 2]; 2]; 2];
pub type Tensor3 = [[[[f64; 3]; 3]; 3]; 3];

/// Lamé coefficients `(λ, μ)` and viscosities `(θ_v, ρ_v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub lambda: f64,
    pub mu: f64,
    pub theta_v: f64,
    pub rho_v: f64,
}

impl MaterialParams {
    /// Validates `λ ≥ 0`, `μ > 0`, `θ_v > 0`, `ρ_v ≥ 0`.
    pub fn new(lambda: f64, mu: f64, theta_v: f64, rho_v: f64) -> Result<Self> {
        let m = MaterialParams { lambda, mu, theta_v, rho_v };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64, ok: bool| if ok && value.is_finite() { Ok(()) } else { Err(Error::InvalidMaterial { name, value }) };
        bad("lambda", self.lambda, self.lambda >= 0.0)?;
        bad("mu", self.mu, self.mu > 0.0)?;
        bad("rho", self.rho_v, self.rho_v >= 0.0)?;
        if self.theta_v == 0.0 {
            return Err(Error::ElasticCaseUnsupported);
        }
        bad("theta", self.theta_v, self.theta_v > 0.0)
    }

    /// Memory decay rate `k = (λ+2μ)/(θ+ρ)`.
    pub fn k_decay(&self) -> f64 {
        (self.lambda + 2.0 * self.mu) / (self.theta_v + self.rho_v)
    }

    /// `Λ = λ/θ − (λ+2μ)/(θ+ρ)`.
    pub fn lambda_c(&self) -> f64 {
        self.lambda / self.theta_v - self.k_decay()
    }
}

/// Scalar coefficients of the 2D tensors on the two isotropic structures
/// `a^{αβ}a^{στ}` ("trace") and `a^{ασ}a^{βτ} + a^{ατ}a^{βσ}` ("shear").
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexuralCoefficients {
    pub a_trace: f64,
    pub a_shear: f64,
    pub b_trace: f64,
    pub b_shear: f64,
    pub c_trace: f64,
}

impl FlexuralCoefficients {
    pub fn new(m: &MaterialParams) -> Result<Self> {
        m.validate()?;
        let (l, mu, th, r) = (m.lambda, m.mu, m.theta_v, m.rho_v);
        let s = th + r;
        let tl = th * m.lambda_c();
        Ok(FlexuralCoefficients {
            a_trace: (2.0 * l * r * r + 4.0 * mu * th * th) / (s * s),
            a_shear: 2.0 * mu,
            b_trace: 2.0 * th * r / s,
            b_shear: r,
            c_trace: 2.0 * tl * tl / s,
        })
    }
}

/// 2D flexural tensors at one point of the midsurface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDTensors {
    pub a2: Tensor2,
    pub b2: Tensor2,
    pub c2: Tensor2,
    pub k_decay: f64,
    pub lambda_c: f64,
    /// `ρ_v = 0`: the viscous tensor `b` vanishes identically.
    pub viscous_rank_deficient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeDTensors {
    pub a3: Tensor3,
    pub b3: Tensor3,
}

/// `trace · g^{ij}g^{kl} + shear · (g^{ik}g^{jl} + g^{il}g^{jk})`.
pub fn isotropic2(up: &[[f64; 2]; 2], trace: f64, shear: f64) -> Tensor2 {
    let mut t = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    t[i][j][k][l] = trace * up[i][j] * up[k][l] + shear * (up[i][k] * up[j][l] + up[i][l] * up[j][k]);
                }
            }
        }
    }
    t
}

fn isotropic3(up: &[[f64; 3]; 3], trace: f64, shear: f64) -> Tensor3 {
    let mut t = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    t[i][j][k][l] = trace * up[i][j] * up[k][l] + shear * (up[i][k] * up[j][l] + up[i][l] * up[j][k]);
                }
            }
        }
    }
    t
}

/// `A^{ijkl}(ε) = λg^{ij}g^{kl} + μ(g^{ik}g^{jl} + g^{il}g^{jk})` and the
/// analogous `B^{ijkl}(ε)` with `(θ_v, ρ_v/2)`.
pub fn tensors_3d(mat: &MaterialParams, vol: &VolumePointData) -> ThreeDTensors {
    ThreeDTensors {
        a3: isotropic3(&vol.g_up, mat.lambda, mat.mu),
        b3: isotropic3(&vol.g_up, mat.theta_v, 0.5 * mat.rho_v),
    }
}

/// The `ε = 0` limits, written component by component from their table.
pub fn tensors_3d_limit(mat: &MaterialParams, surf: &SurfacePointData) -> ThreeDTensors {
    let fill = |l: f64, m: f64| {
        let a = &surf.a_up;
        let mut t = [[[[0.0; 3]; 3]; 3]; 3];
        for al in 0..2 {
            for be in 0..2 {
                for s in 0..2 {
                    for tau in 0..2 {
                        t[al][be][s][tau] = l * a[al][be] * a[s][tau] + m * (a[al][s] * a[be][tau] + a[al][tau] * a[be][s]);
                    }
                    // A^{α3σ3}(0) = μa^{ασ}, with all index placements related by symmetry.
                    t[al][2][be][2] = m * a[al][be];
                    t[2][al][be][2] = m * a[al][be];
                    t[al][2][2][be] = m * a[al][be];
                    t[2][al][2][be] = m * a[al][be];
                }
                t[al][be][2][2] = l * a[al][be];
                t[2][2][al][be] = l * a[al][be];
            }
        }
        t[2][2][2][2] = l + 2.0 * m;
        t
    };
    ThreeDTensors { a3: fill(mat.lambda, mat.mu), b3: fill(mat.theta_v, 0.5 * mat.rho_v) }
}

/// The 2D flexural tensors `a`, `b`, `c` and constants `k`, `Λ`.
pub fn tensors_2d(mat: &MaterialParams, surf: &SurfacePointData) -> Result<TwoDTensors> {
    let c = FlexuralCoefficients::new(mat)?;
    Ok(TwoDTensors {
        a2: isotropic2(&surf.a_up, c.a_trace, c.a_shear),
        b2: isotropic2(&surf.a_up, c.b_trace, c.b_shear),
        c2: isotropic2(&surf.a_up, c.c_trace, 0.0),
        k_decay: mat.k_decay(),
        lambda_c: mat.lambda_c(),
        viscous_rank_deficient: mat.rho_v == 0.0,
    })
}

/// Absolute residuals of the reduction identities relating the limit 3D
/// constitutive law (after eliminating `e₃₃` through its Volterra closed
/// form) to the 2D tensors `a`, `b`, `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionResiduals {
    pub r_a: f64,
    pub r_b: f64,
    pub r_c: f64,
    /// `|θΛ − (λ − θk)|` relative to the largest of `λ`, `θk`, `|θΛ|`.
    pub theta_lambda: f64,
}

/// A linear form `m·x + ṁ·y + M·z` in the in-plane trace `m`, its rate,
/// and the memory integral `M = ∫₀ᵗ e^{−k(t−s)} m(s) ds`.
#[derive(Debug, Clone, Copy, Default)]
struct Lin {
    m: f64,
    mdot: f64,
    mem: f64,
}

impl Lin {
    fn scale(self, s: f64) -> Lin {
        Lin { m: s * self.m, mdot: s * self.mdot, mem: s * self.mem }
    }
    fn add(self, o: Lin) -> Lin {
        Lin { m: self.m + o.m, mdot: self.mdot + o.mdot, mem: self.mem + o.mem }
    }
}

/// Expands the trace part of `A(0)e + B(0)ė` with
/// `e₃₃ = −θ/(θ+ρ)(m + ΛM)` and `ė₃₃ = −λ/(θ+ρ)m − k e₃₃ − θ/(θ+ρ)ṁ`
/// and compares twice its coefficients with the closed-form 2D tensors.
pub fn reduction_identity_residuals(mat: &MaterialParams) -> Result<ReductionResiduals> {
    let c = FlexuralCoefficients::new(mat)?;
    let (l, mu, th, r) = (mat.lambda, mat.mu, mat.theta_v, mat.rho_v);
    let s = th + r;
    let k = mat.k_decay();
    let lam = mat.lambda_c();

    let m = Lin { m: 1.0, ..Lin::default() };
    let mdot = Lin { mdot: 1.0, ..Lin::default() };
    let mem = Lin { mem: 1.0, ..Lin::default() };
    let e33 = m.add(mem.scale(lam)).scale(-th / s);
    let e33_dot = m.scale(-l / s).add(e33.scale(-k)).add(mdot.scale(-th / s));
    // λ a^{αβ}a^{στ}e_{στ} + λ a^{αβ}e₃₃ + θ a^{αβ}a^{στ}ė_{στ} + θ a^{αβ}ė₃₃
    let bracket = m.scale(l).add(e33.scale(l)).add(mdot.scale(th)).add(e33_dot.scale(th));

    // The same bracket as displayed in closed form.
    let display_m = l - th / s * (th * lam + l);
    let display_mdot = th * r / s;
    let display_mem = -(th * lam).powi(2) / s;

    let r_a = (2.0 * bracket.m - c.a_trace).abs().max((2.0 * display_m - c.a_trace).abs()).max((2.0 * mu - c.a_shear).abs());
    let r_b = (2.0 * bracket.mdot - c.b_trace)
        .abs()
        .max((2.0 * display_mdot - c.b_trace).abs())
        .max((2.0 * (0.5 * r) - c.b_shear).abs());
    let r_c = (-2.0 * bracket.mem - c.c_trace).abs().max((-2.0 * display_mem - c.c_trace).abs());
    let tl_scale = l.max(th * k).max((th * lam).abs());
    Ok(ReductionResiduals { r_a, r_b, r_c, theta_lambda: (th * lam - (l - th * k)).abs() / tl_scale })
}

/// `T : t : t` for a symmetric 2×2 `t`.
pub fn quad2(t4: &Tensor2, t: &[[f64; 2]; 2]) -> f64 {
    let mut v = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    v += t4[i][j][k][l] * t[k][l] * t[i][j];
                }
            }
        }
    }
    v
}

/// Smallest eigenvalue of `T` acting on symmetric 2×2 tensors, in the
/// orthonormal basis `{e₁₁, e₂₂, (e₁₂+e₂₁)/√2}`.
pub fn min_eig_sym2(t4: &Tensor2) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let basis = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]], [[0.0, r], [r, 0.0]]];
    let mut m = nalgebra::Matrix3::zeros();
    for p in 0..3 {
        for q in 0..3 {
            let mut v = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            v += basis[p][i][j] * t4[i][j][k][l] * basis[q][k][l];
                        }
                    }
                }
            }
            m[(p, q)] = v;
        }
    }
    m.symmetric_eigenvalues().min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{surface_eval, volume_eval, Domain, Plate};
    use rand::{Rng, SeedableRng};

    fn plate_surf() -> SurfacePointData {
        surface_eval(&Plate { domain: Domain::rect(1.0, 1.0) }, [0.5, 0.5]).unwrap()
    }

    #[test]
    fn cartesian_3d_entries() {
        let m = MaterialParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let v = volume_eval(&Plate { domain: Domain::rect(1.0, 1.0) }, 0.3, [0.5, 0.5, 0.7]).unwrap();
        let t = tensors_3d(&m, &v);
        assert_eq!(t.a3[0][0][0][0], 3.0);
        assert_eq!(t.a3[0][0][1][1], 1.0);
        assert_eq!(t.a3[0][1][0][1], 1.0);
        assert_eq!(t.b3[2][2][2][2], 3.0);
        assert_eq!(t.b3[0][2][0][2], 0.5);
    }

    #[test]
    fn limit_table_on_plate() {
        let m = MaterialParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let t = tensors_3d_limit(&m, &plate_surf());
        assert_eq!(t.a3[0][0][2][2], 1.0);
        assert_eq!(t.a3[0][2][0][2], 1.0);
        assert_eq!(t.a3[2][2][2][2], 3.0);
        assert_eq!(t.b3[0][2][0][2], 0.5);
        assert_eq!(t.b3[2][2][2][2], 3.0);
    }

    #[test]
    fn unit_parameters() {
        let m = MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(m.k_decay(), 1.5);
        assert_eq!(m.lambda_c(), -0.5);
        let c = FlexuralCoefficients::new(&m).unwrap();
        assert_eq!(c.c_trace, 0.25);
        assert_eq!(c.a_trace, 1.5);
        let r = reduction_identity_residuals(&m).unwrap();
        assert!(r.r_a < 1e-14 && r.r_b < 1e-14 && r.r_c < 1e-14);
    }

    #[test]
    fn zero_lambda() {
        let m = MaterialParams::new(0.0, 1.7, 0.6, 2.3).unwrap();
        let s = m.theta_v + m.rho_v;
        approx::assert_relative_eq!(m.lambda_c(), -2.0 * m.mu / s, max_relative = 1e-15);
        let c = FlexuralCoefficients::new(&m).unwrap();
        approx::assert_relative_eq!(c.a_trace, 4.0 * m.mu * m.theta_v.powi(2) / (s * s), max_relative = 1e-15);
        assert!(reduction_identity_residuals(&m).unwrap().r_a < 1e-14);
    }

    #[test]
    fn elastic_case_rejected() {
        assert_eq!(MaterialParams::new(1.0, 1.0, 0.0, 1.0), Err(Error::ElasticCaseUnsupported));
        let m = MaterialParams { lambda: 1.0, mu: 1.0, theta_v: 0.0, rho_v: 1.0 };
        assert_eq!(tensors_2d(&m, &plate_surf()), Err(Error::ElasticCaseUnsupported));
        assert!(matches!(MaterialParams::new(1.0, 0.0, 1.0, 1.0), Err(Error::InvalidMaterial { name: "mu", .. })));
    }

    #[test]
    fn a2_is_elliptic_for_random_parameters() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s = plate_surf();
        for _ in 0..100 {
            let m = MaterialParams::new(
                rng.random_range(0.0..10.0),
                rng.random_range(0.01..10.0),
                rng.random_range(0.01..10.0),
                rng.random_range(0.0..10.0),
            )
            .unwrap();
            let t = tensors_2d(&m, &s).unwrap();
            assert!(min_eig_sym2(&t.a2) > 0.0);
        }
    }

    #[test]
    fn long_time_elastic_limit() {
        // a − c/k equals the classical plane-stress plate tensor 4λμ/(λ+2μ).
        let m = MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let c = FlexuralCoefficients::new(&m).unwrap();
        approx::assert_relative_eq!(c.a_trace - c.c_trace / m.k_decay(), 4.0 / 3.0, max_relative = 1e-14);
    }
}
