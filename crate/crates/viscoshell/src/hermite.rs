//! Bogner–Fox–Schmit bicubic Hermite rectangle (C¹ across element edges).
//!
//! Each node carries `(w, ∂₁w, ∂₂w, ∂₁₂w)`; local dof `4a + k` belongs to
//! corner `a` (counter-clockwise from the lower-left) and slot `k`.

/// Cubic Hermite shape functions on `[0, 1]` scaled to an element of length `h`:
/// returns `(value, d/dy, d²/dy²)` of `[H₀, H₁, H₂, H₃]`
/// (value at 0, slope at 0, value at 1, slope at 1).
pub fn hermite_1d(s: f64, h: f64) -> [[f64; 3]; 4] {
    let (s2, s3) = (s * s, s * s * s);
    [
        [1.0 - 3.0 * s2 + 2.0 * s3, (-6.0 * s + 6.0 * s2) / h, (-6.0 + 12.0 * s) / (h * h)],
        [h * (s - 2.0 * s2 + s3), 1.0 - 4.0 * s + 3.0 * s2, (-4.0 + 6.0 * s) / h],
        [3.0 * s2 - 2.0 * s3, (6.0 * s - 6.0 * s2) / h, (6.0 - 12.0 * s) / (h * h)],
        [h * (-s2 + s3), -2.0 * s + 3.0 * s2, (-2.0 + 6.0 * s) / h],
    ]
}

/// Corner offsets `(cx, cy)` of the four element nodes.
pub const CORNERS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Values and derivatives of the 16 element shape functions at one point.
#[derive(Debug, Clone, Copy)]
pub struct BfsEval {
    pub val: [f64; 16],
    pub d: [[f64; 2]; 16],
    pub dd: [[[f64; 2]; 2]; 16],
}

/// Evaluates the element basis at local coordinates `(s, t) ∈ [0, 1]²` on an
/// element of size `h = (h₁, h₂)`.
pub fn bfs_eval(s: f64, t: f64, h: [f64; 2]) -> BfsEval {
    let hs = hermite_1d(s, h[0]);
    let ht = hermite_1d(t, h[1]);
    let mut out = BfsEval { val: [0.0; 16], d: [[0.0; 2]; 16], dd: [[[0.0; 2]; 2]; 16] };
    for (a, &(cx, cy)) in CORNERS.iter().enumerate() {
        for k in 0..4 {
            let fx = &hs[2 * cx + (k & 1)];
            let fy = &ht[2 * cy + (k >> 1)];
            let i = 4 * a + k;
            out.val[i] = fx[0] * fy[0];
            out.d[i] = [fx[1] * fy[0], fx[0] * fy[1]];
            out.dd[i] = [[fx[2] * fy[0], fx[1] * fy[1]], [fx[1] * fy[1], fx[0] * fy[2]]];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodal_interpolation_property() {
        let h = [0.3, 0.7];
        for (a, &(cx, cy)) in CORNERS.iter().enumerate() {
            let e = bfs_eval(cx as f64, cy as f64, h);
            for i in 0..16 {
                let k = i % 4;
                let own = i / 4 == a;
                approx::assert_abs_diff_eq!(e.val[i], if own && k == 0 { 1.0 } else { 0.0 }, epsilon = 1e-14);
                approx::assert_abs_diff_eq!(e.d[i][0], if own && k == 1 { 1.0 } else { 0.0 }, epsilon = 1e-14);
                approx::assert_abs_diff_eq!(e.d[i][1], if own && k == 2 { 1.0 } else { 0.0 }, epsilon = 1e-14);
                approx::assert_abs_diff_eq!(e.dd[i][0][1], if own && k == 3 { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn reproduces_bicubic_polynomials() {
        let h = [0.5, 0.25];
        // w = x³y² + 2xy − y³ on [0, h₁] × [0, h₂]
        let w = |x: f64, y: f64| [x.powi(3) * y * y + 2.0 * x * y - y.powi(3), 3.0 * x * x * y * y + 2.0 * y, 2.0 * x.powi(3) * y + 2.0 * x - 3.0 * y * y, 6.0 * x * x * y + 2.0];
        let mut dofs = [0.0; 16];
        for (a, &(cx, cy)) in CORNERS.iter().enumerate() {
            let n = w(cx as f64 * h[0], cy as f64 * h[1]);
            dofs[4 * a..4 * a + 4].copy_from_slice(&n);
        }
        let (s, t) = (0.3, 0.8);
        let e = bfs_eval(s, t, h);
        let (x, y) = (s * h[0], t * h[1]);
        let v: f64 = (0..16).map(|i| dofs[i] * e.val[i]).sum();
        let dxx: f64 = (0..16).map(|i| dofs[i] * e.dd[i][0][0]).sum();
        let dyy: f64 = (0..16).map(|i| dofs[i] * e.dd[i][1][1]).sum();
        approx::assert_abs_diff_eq!(v, w(x, y)[0], epsilon = 1e-14);
        approx::assert_abs_diff_eq!(dxx, 6.0 * x * y * y, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(dyy, 2.0 * x.powi(3) - 6.0 * y, epsilon = 1e-12);
    }
}
