//! Linearized shell strains: change of metric `γ`, change of curvature `ρ`,
//! the scaled 3D strains `e_{i||j}(ε)`, and the corrected first-order strain.

use crate::geometry::{SurfacePointData, VolumePointData};

pub type Sym2 = [[f64; 2]; 2];
pub type Sym3 = [[f64; 3]; 3];

/// Pointwise jet of a midsurface displacement `η = (η₁, η₂, η₃)`:
/// `d[i][a] = ∂_a η_i`, `dd[i][a][b] = ∂_a∂_b η_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet2D {
    pub v: [f64; 3],
    pub d: [[f64; 2]; 3],
    pub dd: [[[f64; 2]; 2]; 3],
}

impl Jet2D {
    pub fn axpy(&mut self, s: f64, o: &Jet2D) {
        for i in 0..3 {
            self.v[i] += s * o.v[i];
            for a in 0..2 {
                self.d[i][a] += s * o.d[i][a];
                for b in 0..2 {
                    self.dd[i][a][b] += s * o.dd[i][a][b];
                }
            }
        }
    }
}

/// Pointwise jet of a field on `Ω`: `d[i][j] = ∂_j v_i` in scaled coordinates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet3D {
    pub v: [f64; 3],
    pub d: [[f64; 3]; 3],
}

/// A midsurface displacement field that can be sampled pointwise.
pub trait Field2D {
    fn jet(&self, y: [f64; 2]) -> Jet2D;
}

/// A displacement field on `Ω = ω × (−1, 1)`.
pub trait Field3D {
    fn jet(&self, x: [f64; 3]) -> Jet3D;
}

impl<F: Fn([f64; 2]) -> Jet2D> Field2D for F {
    fn jet(&self, y: [f64; 2]) -> Jet2D {
        self(y)
    }
}

/// All strain measures at one sample point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StrainSample {
    pub gamma_ab: Sym2,
    pub rho_ab: Sym2,
    pub e_scaled: Sym3,
    pub e1_ab: Sym2,
}

/// `γ_{αβ}(η) = ½(∂_βη_α + ∂_αη_β) − Γ^σ_{αβ}η_σ − b_{αβ}η₃`.
pub fn gamma_eval(j: &Jet2D, s: &SurfacePointData) -> Sym2 {
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = 0.5 * (j.d[a][b] + j.d[b][a]) - s.b_ab[a][b] * j.v[2];
            for sg in 0..2 {
                v -= s.gamma[sg][a][b] * j.v[sg];
            }
            g[a][b] = v;
        }
    }
    g
}

/// `ρ_{αβ}(η)`, term by term:
/// `∂_{αβ}η₃ − Γ^σ_{αβ}∂_ση₃ − b^σ_α b_{σβ}η₃ + b^σ_α(∂_βη_σ − Γ^τ_{βσ}η_τ)
///  + b^τ_β(∂_αη_τ − Γ^σ_{ατ}η_σ) + b^τ_β|_α η_τ`.
pub fn rho_eval(j: &Jet2D, s: &SurfacePointData) -> Sym2 {
    let mut r = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = j.dd[2][a][b];
            for sg in 0..2 {
                v -= s.gamma[sg][a][b] * j.d[2][sg];
                v -= s.b_mixed[sg][a] * s.b_ab[sg][b] * j.v[2];
                let mut cov_b = j.d[sg][b];
                for t in 0..2 {
                    cov_b -= s.gamma[t][b][sg] * j.v[t];
                }
                v += s.b_mixed[sg][a] * cov_b;
            }
            for t in 0..2 {
                let mut cov_a = j.d[t][a];
                for sg in 0..2 {
                    cov_a -= s.gamma[sg][a][t] * j.v[sg];
                }
                v += s.b_mixed[t][b] * cov_a;
                v += s.b_covder[t][b][a] * j.v[t];
            }
            r[a][b] = v;
        }
    }
    r
}

/// Scaled strains `e_{i||j}(ε;v) = ½(D_j v_i + D_i v_j) − Γ^p_{ij}(ε) v_p`
/// with `D_α = ∂_α` and `D₃ = (1/ε)∂₃`.
pub fn strain3d_eval(j: &Jet3D, vol: &VolumePointData, eps: f64) -> Sym3 {
    let dd = |i: usize, k: usize| if k == 2 { j.d[i][k] / eps } else { j.d[i][k] };
    let mut e = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in i..3 {
            let mut v = 0.5 * (dd(i, k) + dd(k, i));
            for p in 0..3 {
                v -= vol.gamma3[p][i][k] * j.v[p];
            }
            e[i][k] = v;
            e[k][i] = v;
        }
    }
    e
}

/// `e¹_{α||β}(ε;v) = (1/ε)γ_{αβ}(v) + x₃(b^σ_β|_α v_σ + b^σ_α b_{σβ} v₃)`,
/// where `γ(v)` uses the in-plane derivatives of `v` at height `x₃`.
pub fn strain1_corrected(j: &Jet3D, s: &SurfacePointData, eps: f64, x3: f64) -> Sym2 {
    let planar = Jet2D { v: j.v, d: [[j.d[0][0], j.d[0][1]], [j.d[1][0], j.d[1][1]], [j.d[2][0], j.d[2][1]]], ..Default::default() };
    let g = gamma_eval(&planar, s);
    let c = s.c_ab();
    let mut e = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut corr = c[a][b] * j.v[2];
            for sg in 0..2 {
                corr += s.b_covder[sg][b][a] * j.v[sg];
            }
            e[a][b] = g[a][b] / eps + x3 * corr;
        }
    }
    e
}

/// `θ_α = ∂_αη₃ + 2b^σ_αη_σ` and its in-plane gradient `∂_βθ_α`.
pub fn lift_rotation(j: &Jet2D, s: &SurfacePointData) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut th = [0.0; 2];
    let mut dth = [[0.0; 2]; 2];
    for a in 0..2 {
        th[a] = j.d[2][a];
        for b in 0..2 {
            dth[a][b] = j.dd[2][a][b];
        }
        for sg in 0..2 {
            th[a] += 2.0 * s.b_mixed[sg][a] * j.v[sg];
            for b in 0..2 {
                dth[a][b] += 2.0 * (s.db_mixed[sg][a][b] * j.v[sg] + s.b_mixed[sg][a] * j.d[sg][b]);
            }
        }
    }
    (th, dth)
}

/// The transverse lift `v_α(ε) = η_α − εx₃θ_α`, `v₃(ε) = η₃` of a midsurface
/// field, evaluated at height `x₃`.
pub fn lift_eval(j: &Jet2D, s: &SurfacePointData, eps: f64, x3: f64) -> Jet3D {
    let (th, dth) = lift_rotation(j, s);
    let mut out = Jet3D::default();
    for a in 0..2 {
        out.v[a] = j.v[a] - eps * x3 * th[a];
        for b in 0..2 {
            out.d[a][b] = j.d[a][b] - eps * x3 * dth[a][b];
        }
        out.d[a][2] = -eps * th[a];
        out.d[2][a] = j.d[2][a];
    }
    out.v[2] = j.v[2];
    out
}

/// Expected value of `e¹(ε; v(ε))` for the lift of an inextensional `η`:
/// `−x₃ρ_{αβ}(η) − εx₃² b^σ_β|_α θ_σ`.
pub fn lift_e1_expected(j: &Jet2D, s: &SurfacePointData, eps: f64, x3: f64) -> Sym2 {
    let r = rho_eval(j, s);
    let (th, _) = lift_rotation(j, s);
    let mut e = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let bt: f64 = (0..2).map(|sg| s.b_covder[sg][b][a] * th[sg]).sum();
            e[a][b] = -x3 * r[a][b] - eps * x3 * x3 * bt;
        }
    }
    e
}

/// Samples every strain measure of a midsurface field and its lift.
pub fn sample(j: &Jet2D, s: &SurfacePointData, vol: &VolumePointData, eps: f64) -> StrainSample {
    let x3 = vol.x[2];
    let lifted = lift_eval(j, s, eps, x3);
    StrainSample {
        gamma_ab: gamma_eval(j, s),
        rho_ab: rho_eval(j, s),
        e_scaled: strain3d_eval(&lifted, vol, eps),
        e1_ab: strain1_corrected(&lifted, s, eps, x3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::*;

    fn plate() -> Plate {
        Plate { domain: Domain::rect(1.0, 1.0) }
    }

    #[test]
    fn plate_reductions() {
        let s = surface_eval(&plate(), [0.3, 0.4]).unwrap();
        let mut j = Jet2D::default();
        j.v[2] = 0.09;
        j.d[2] = [0.6, 0.0];
        j.dd[2][0][0] = 2.0;
        assert_eq!(gamma_eval(&j, &s), [[0.0; 2]; 2]);
        assert_eq!(rho_eval(&j, &s), [[2.0, 0.0], [0.0, 0.0]]);

        // in-plane rotation η = (y₂, −y₁, 0)
        let mut d = [[0.0; 2]; 3];
        d[0] = [0.0, 1.0];
        d[1] = [-1.0, 0.0];
        let r = Jet2D { v: [0.4, -0.3, 0.0], d, ..Default::default() };
        assert_eq!(gamma_eval(&r, &s), [[0.0; 2]; 2]);
        assert_eq!(rho_eval(&r, &s), [[0.0; 2]; 2]);
    }

    #[test]
    fn cylinder_normal_translation() {
        let s = surface_eval(&Cylinder { radius: 1.0, domain: Domain::rect(1.0, 1.0) }, [0.2, 0.1]).unwrap();
        let j = Jet2D { v: [0.0, 0.0, 1.0], ..Default::default() };
        let g = gamma_eval(&j, &s);
        approx::assert_abs_diff_eq!(g[0][0], -s.b_ab[0][0], epsilon = 1e-15);
        approx::assert_abs_diff_eq!(g[0][0].abs(), 1.0, epsilon = 1e-15);
        let r = rho_eval(&j, &s);
        approx::assert_abs_diff_eq!(r[0][0], -1.0, epsilon = 1e-14);
        approx::assert_abs_diff_eq!(r[0][1], 0.0, epsilon = 1e-14);
        approx::assert_abs_diff_eq!(r[1][1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn scaled_strain_on_plate() {
        let v = volume_eval(&plate(), 0.5, [0.5, 0.5, 0.3]).unwrap();
        let mut j = Jet3D::default();
        j.v[2] = 0.3;
        j.d[2][2] = 1.0;
        let e = strain3d_eval(&j, &v, 0.5);
        assert_eq!(e[2][2], 2.0);
        assert_eq!(e[0][0] + e[0][1] + e[1][1] + e[0][2] + e[1][2], 0.0);

        let mut j = Jet3D::default();
        j.v[0] = 0.3;
        j.d[0][2] = 1.0;
        let e = strain3d_eval(&j, &v, 0.25);
        assert_eq!(e[0][2], 2.0);
        assert_eq!(e[2][0], 2.0);
    }

    #[test]
    fn plate_lift_gives_minus_x3_hessian() {
        let s = surface_eval(&plate(), [0.3, 0.4]).unwrap();
        let mut j = Jet2D::default();
        j.v[2] = 0.7;
        j.d[2] = [0.2, -0.5];
        j.dd[2] = [[1.5, -0.25], [-0.25, 3.0]];
        let x3 = 0.6;
        let l = lift_eval(&j, &s, 0.1, x3);
        let e1 = strain1_corrected(&l, &s, 0.1, x3);
        for a in 0..2 {
            for b in 0..2 {
                approx::assert_abs_diff_eq!(e1[a][b], -x3 * j.dd[2][a][b], epsilon = 1e-14);
            }
        }
        let v = volume_eval(&plate(), 0.1, [0.3, 0.4, x3]).unwrap();
        assert_eq!(strain3d_eval(&l, &v, 0.1)[2][2], 0.0);
    }
}
