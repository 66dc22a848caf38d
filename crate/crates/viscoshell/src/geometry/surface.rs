use super::chart::{SurfaceChart, V3};
use crate::error::{Error, Result};

/// First and second fundamental form data of the midsurface at one point.
///
/// Index conventions (all zero-based):
/// - `gamma[s][a][b] = Γ^s_{ab}`
/// - `b_mixed[s][a] = b^s_a`
/// - `b_covder[s][b][a] = b^s_b|_a`
/// - `db_mixed[s][a][c] = ∂_c b^s_a`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePointData {
    pub y: [f64; 2],
    pub position: V3,
    pub a_cov: [V3; 2],
    pub a_con: [V3; 2],
    pub a3: V3,
    pub a_ab: [[f64; 2]; 2],
    pub a_up: [[f64; 2]; 2],
    pub area_a: f64,
    pub b_ab: [[f64; 2]; 2],
    pub b_mixed: [[f64; 2]; 2],
    pub gamma: [[[f64; 2]; 2]; 2],
    pub b_covder: [[[f64; 2]; 2]; 2],
    pub db_mixed: [[[f64; 2]; 2]; 2],
    /// `∂_aθ_b = ∂_a∂_bθ`, kept for the 3D chart.
    pub d2_theta: [[V3; 2]; 2],
    /// `∂_a a₃ = −b^s_a a_s`.
    pub da3: [V3; 2],
    /// `∂_a∂_b a₃`.
    pub dda3: [[V3; 2]; 2],
}

pub(crate) fn inv2(m: [[f64; 2]; 2]) -> ([[f64; 2]; 2], f64) {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    ([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]], det)
}

/// Evaluates the midsurface geometry at `y`.
pub fn surface_eval(chart: &dyn SurfaceChart, y: [f64; 2]) -> Result<SurfacePointData> {
    let jet = chart.jet(y);
    let a = jet.d1;
    let cross = a[0].cross(&a[1]);
    if !(cross.norm() > 1e-12 * a[0].norm() * a[1].norm()) {
        return Err(Error::DegenerateChart { y1: y[0], y2: y[1] });
    }
    let a3 = cross / cross.norm();

    let mut a_ab = [[0.0; 2]; 2];
    let mut b_ab = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            a_ab[i][j] = a[i].dot(&a[j]);
            b_ab[i][j] = a3.dot(&jet.d2[i][j]);
        }
    }
    let (a_up, area_a) = inv2(a_ab);
    let a_con = [a_up[0][0] * a[0] + a_up[0][1] * a[1], a_up[1][0] * a[0] + a_up[1][1] * a[1]];

    let mut b_mixed = [[0.0; 2]; 2];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for s in 0..2 {
        for al in 0..2 {
            b_mixed[s][al] = (0..2).map(|t| a_up[s][t] * b_ab[t][al]).sum();
            for be in 0..2 {
                gamma[s][al][be] = a_con[s].dot(&jet.d2[al][be]);
            }
        }
    }

    let da3 = [0, 1].map(|al| -(b_mixed[0][al] * a[0] + b_mixed[1][al] * a[1]));

    // ∂_c a_{mn} and ∂_c a^{st}
    let mut d_a_ab = [[[0.0; 2]; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            for c in 0..2 {
                d_a_ab[m][n][c] = jet.d2[m][c].dot(&a[n]) + a[m].dot(&jet.d2[n][c]);
            }
        }
    }
    let mut d_a_up = [[[0.0; 2]; 2]; 2];
    for s in 0..2 {
        for t in 0..2 {
            for c in 0..2 {
                let mut v = 0.0;
                for m in 0..2 {
                    for n in 0..2 {
                        v -= a_up[s][m] * d_a_ab[m][n][c] * a_up[n][t];
                    }
                }
                d_a_up[s][t][c] = v;
            }
        }
    }
    // ∂_c b_{ta} = ∂_c a₃ · ∂_t∂_a θ + a₃ · ∂_t∂_a∂_c θ
    let mut d_b_ab = [[[0.0; 2]; 2]; 2];
    for t in 0..2 {
        for al in 0..2 {
            for c in 0..2 {
                d_b_ab[t][al][c] = da3[c].dot(&jet.d2[t][al]) + a3.dot(&jet.d3[t][al][c]);
            }
        }
    }
    let mut db_mixed = [[[0.0; 2]; 2]; 2];
    for s in 0..2 {
        for al in 0..2 {
            for c in 0..2 {
                db_mixed[s][al][c] =
                    (0..2).map(|t| d_a_up[s][t][c] * b_ab[t][al] + a_up[s][t] * d_b_ab[t][al][c]).sum();
            }
        }
    }

    // b^s_b|_a = ∂_a b^s_b + Γ^s_{at} b^t_b − Γ^t_{ab} b^s_t
    let mut b_covder = [[[0.0; 2]; 2]; 2];
    for s in 0..2 {
        for be in 0..2 {
            for al in 0..2 {
                let mut v = db_mixed[s][be][al];
                for t in 0..2 {
                    v += gamma[s][al][t] * b_mixed[t][be] - gamma[t][al][be] * b_mixed[s][t];
                }
                b_covder[s][be][al] = v;
            }
        }
    }

    // ∂_b∂_a a₃ = −∂_b b^s_a a_s − b^s_a ∂_s∂_b θ
    let mut dda3 = [[V3::zeros(); 2]; 2];
    for al in 0..2 {
        for be in 0..2 {
            let mut v = V3::zeros();
            for s in 0..2 {
                v -= db_mixed[s][al][be] * a[s] + b_mixed[s][al] * jet.d2[s][be];
            }
            dda3[al][be] = v;
        }
    }

    Ok(SurfacePointData {
        y,
        position: jet.x,
        a_cov: a,
        a_con,
        a3,
        a_ab,
        a_up,
        area_a,
        b_ab,
        b_mixed,
        gamma,
        b_covder,
        db_mixed,
        d2_theta: jet.d2,
        da3,
        dda3,
    })
}

impl SurfacePointData {
    pub fn sqrt_a(&self) -> f64 {
        self.area_a.sqrt()
    }

    /// `b^σ_α b_{σβ}` (third fundamental form).
    pub fn c_ab(&self) -> [[f64; 2]; 2] {
        let mut c = [[0.0; 2]; 2];
        for al in 0..2 {
            for be in 0..2 {
                c[al][be] = (0..2).map(|s| self.b_mixed[s][al] * self.b_ab[s][be]).sum();
            }
        }
        c
    }

    /// Largest violation of the Codazzi symmetry `b^σ_β|_α = b^σ_α|_β`.
    pub fn codazzi_defect(&self) -> f64 {
        let mut m: f64 = 0.0;
        for s in 0..2 {
            m = m.max((self.b_covder[s][0][1] - self.b_covder[s][1][0]).abs());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::*;
    use std::f64::consts::PI;

    #[test]
    fn plate_is_flat() {
        let s = surface_eval(&Plate { domain: Domain::rect(1.0, 1.0) }, [0.3, 0.8]).unwrap();
        assert_eq!(s.a_ab, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(s.b_ab, [[0.0; 2]; 2]);
        assert_eq!(s.gamma, [[[0.0; 2]; 2]; 2]);
        assert_eq!(s.area_a, 1.0);
        assert_eq!(s.a3, V3::z());
    }

    #[test]
    fn cylinder_at_origin() {
        let s = surface_eval(&Cylinder { radius: 1.0, domain: Domain::rect(1.0, 1.0) }, [0.0, 0.0]).unwrap();
        approx::assert_abs_diff_eq!(s.area_a, 1.0, epsilon = 1e-15);
        // a₁ = (0,1,0), a₂ = (0,0,1) ⇒ a₃ = (1,0,0) points outward; ∂₁₁θ = (−1,0,0).
        approx::assert_abs_diff_eq!(s.b_ab[0][0], -1.0, epsilon = 1e-15);
        approx::assert_abs_diff_eq!(s.b_ab[0][1], 0.0, epsilon = 1e-15);
        approx::assert_abs_diff_eq!(s.b_ab[1][1], 0.0, epsilon = 1e-15);
        for g in s.gamma.iter().flatten().flatten() {
            approx::assert_abs_diff_eq!(*g, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn hemisphere_values() {
        let s = surface_eval(&HemispherePatch::default(), [PI / 4.0, 0.0]).unwrap();
        approx::assert_abs_diff_eq!(s.a_ab[0][0], 1.0, epsilon = 1e-14);
        approx::assert_abs_diff_eq!(s.a_ab[1][1], 0.5, epsilon = 1e-14);
        approx::assert_abs_diff_eq!(s.gamma[1][0][1], 1.0, epsilon = 1e-14);
        approx::assert_abs_diff_eq!(s.gamma[1][1][0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_chart_is_rejected() {
        let r = surface_eval(&HemispherePatch::default(), [0.0, 0.3]);
        assert!(matches!(r, Err(Error::DegenerateChart { .. })));
    }
}
