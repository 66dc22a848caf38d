//! Fading-memory convolution `∫₀ᵗ e^{−k(t−s)} K_C ξ(s) ds`.

/// Memory vector maintained by the trapezoidal exponential recurrence
/// `Hⁿ = e^{−kΔt}Hⁿ⁻¹ + (Δt/2)(e^{−kΔt}K_Cξⁿ⁻¹ + K_Cξⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState {
    pub h: Vec<f64>,
    pub t: f64,
    pub k: f64,
}

impl MemoryState {
    /// `H(0) = 0`: the body starts from its natural state.
    pub fn new(n: usize, k: f64) -> Self {
        MemoryState { h: vec![0.0; n], t: 0.0, k }
    }

    /// Advances by `dt`, given `K_Cξⁿ⁻¹` and `K_Cξⁿ`.
    pub fn advance(&mut self, kc_prev: &[f64], kc_new: &[f64], dt: f64) {
        let d = (-self.k * dt).exp();
        for ((h, p), q) in self.h.iter_mut().zip(kc_prev).zip(kc_new) {
            *h = d * *h + 0.5 * dt * (d * p + q);
        }
        self.t += dt;
    }

    pub fn norm(&self) -> f64 {
        crate::sparse::norm(&self.h)
    }
}

/// Trapezoidal rule applied to the whole history at once: the reference the
/// recurrence must reproduce. `kc[j] = K_Cξ(t_j)`.
pub fn direct_memory_sum(kc: &[Vec<f64>], times: &[f64], k: f64) -> Vec<f64> {
    let n = times.len() - 1;
    let tn = times[n];
    let mut h = vec![0.0; kc[0].len()];
    for j in 1..=n {
        let dt = times[j] - times[j - 1];
        let w0 = 0.5 * dt * (-k * (tn - times[j - 1])).exp();
        let w1 = 0.5 * dt * (-k * (tn - times[j])).exp();
        for (i, v) in h.iter_mut().enumerate() {
            *v += w0 * kc[j - 1][i] + w1 * kc[j][i];
        }
    }
    h
}

/// One-dof version of the 2D model:
/// `⅓(aξ + bξ' − c∫₀ᵗe^{−k(t−s)}ξ ds) = f(t)`, `ξ(0) = ξ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSurrogate {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: f64,
    pub xi0: f64,
}

impl ScalarSurrogate {
    /// The scheme used by the 2D solver, applied to scalars. Returns `ξ` at
    /// `t = nΔt`, `n = 0..=steps`.
    pub fn implicit(&self, f: &dyn Fn(f64) -> f64, dt: f64, steps: usize) -> Vec<f64> {
        let d = (-self.k * dt).exp();
        let lhs = self.a / 3.0 + self.b / (3.0 * dt) - dt / 6.0 * self.c;
        let mut xi = vec![self.xi0];
        let mut h = 0.0;
        for n in 1..=steps {
            let p = xi[n - 1];
            let rhs = f(n as f64 * dt) + self.b / (3.0 * dt) * p + d / 3.0 * (h + 0.5 * dt * self.c * p);
            let x = rhs / lhs;
            h = d * h + 0.5 * dt * self.c * (d * p + x);
            xi.push(x);
        }
        xi
    }

    /// RK4 on the equivalent ODE system `ξ' = (3f − aξ + c m)/b`,
    /// `m' = ξ − k m`, `m(0) = 0`. Requires `b > 0`.
    pub fn rk4(&self, f: &dyn Fn(f64) -> f64, dt: f64, steps: usize) -> Vec<f64> {
        let rhs = |t: f64, y: [f64; 2]| [(3.0 * f(t) - self.a * y[0] + self.c * y[1]) / self.b, y[0] - self.k * y[1]];
        let mut y = [self.xi0, 0.0];
        let mut out = vec![y[0]];
        for n in 0..steps {
            let t = n as f64 * dt;
            let k1 = rhs(t, y);
            let k2 = rhs(t + 0.5 * dt, [y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]]);
            let k3 = rhs(t + 0.5 * dt, [y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]]);
            let k4 = rhs(t + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
            for i in 0..2 {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out.push(y[0]);
        }
        out
    }
}
