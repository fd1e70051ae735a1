//! Log-likelihood, score and the profile likelihood in `λ`.

use crate::data::Dataset;
use crate::ecr::{Params, Transform};

/// Sufficient sums of the ECR likelihood at a given `λ`, with
/// `s = √(λ² + x²)` and `u = 1 − λ/s`:
///
/// * `t1 = Σ log x`
/// * `t2 = −½ Σ log(λ² + x²)`
/// * `t3 = Σ log u`
/// * `t4 = Σ 1/s`
/// * `t5 = λ Σ 1/s²`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodStats {
    pub n: usize,
    pub lambda: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
}

impl LikelihoodStats {
    pub fn compute(xs: &[f64], lambda: f64) -> Self {
        let mut st = Self {
            n: xs.len(),
            lambda,
            t1: 0.0,
            t2: 0.0,
            t3: 0.0,
            t4: 0.0,
            t5: 0.0,
        };
        for &x in xs {
            let tr = Transform::at(x, lambda);
            st.t1 += x.ln();
            st.t2 -= tr.s.ln();
            st.t3 += tr.ln_u;
            st.t4 += 1.0 / tr.s;
            st.t5 += tr.w / tr.s;
        }
        st
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn log_likelihood(&self, beta: f64) -> f64 {
        self.nf() * (beta * self.lambda).ln() + self.t1 + 3.0 * self.t2 + (beta - 1.0) * self.t3
    }

    /// `(U_β, U_λ)`.
    pub fn score(&self, beta: f64) -> [f64; 2] {
        let n = self.nf();
        [
            n / beta + self.t3,
            n / self.lambda + (1.0 - beta) * self.t4 - (beta + 2.0) * self.t5,
        ]
    }

    /// `β̂(λ) = −n / T₃(λ)`, the root of `U_β` for this `λ`.
    pub fn beta_hat(&self) -> f64 {
        -self.nf() / self.t3
    }

    /// `ℓ(β̂(λ), λ) = n[log(−nλ/T₃) − 1] + T₁ + 3T₂ − T₃`.
    pub fn profile_log_likelihood(&self) -> f64 {
        let n = self.nf();
        n * ((-n * self.lambda / self.t3).ln() - 1.0) + self.t1 + 3.0 * self.t2 - self.t3
    }

    /// Derivative of the profile log-likelihood in `λ`.
    pub fn profile_score(&self) -> f64 {
        let n = self.nf();
        let r = n / self.t3;
        n / self.lambda + (1.0 + r) * self.t4 - (2.0 - r) * self.t5
    }
}

/// `Σ log f(xᵢ)`.
pub fn log_likelihood(data: &Dataset, p: &Params) -> f64 {
    LikelihoodStats::compute(data.values(), p.lambda()).log_likelihood(p.beta())
}

/// Gradient `(∂ℓ/∂β, ∂ℓ/∂λ)`.
pub fn score(data: &Dataset, p: &Params) -> [f64; 2] {
    LikelihoodStats::compute(data.values(), p.lambda()).score(p.beta())
}

/// Profile log-likelihood `ℓ(β̂(λ), λ)`.
pub fn profile_log_likelihood(data: &Dataset, lambda: f64) -> f64 {
    LikelihoodStats::compute(data.values(), lambda).profile_log_likelihood()
}

/// Analytic Hessian of `ℓ` in the order (β, λ).
pub fn hessian(data: &Dataset, p: &Params) -> [[f64; 2]; 2] {
    let (b, l) = (p.beta(), p.lambda());
    let n = data.len() as f64;
    let (mut t4, mut t5, mut d4, mut d5) = (0.0, 0.0, 0.0, 0.0);
    for &x in data.values() {
        let s = l.hypot(x);
        let w = l / s;
        t4 += 1.0 / s;
        t5 += w / s;
        // ∂(1/s)/∂λ and ∂(λ/s²)/∂λ
        d4 -= w / (s * s);
        d5 += (1.0 - 2.0 * w * w) / (s * s);
    }
    let bl = -t4 - t5;
    [
        [-n / (b * b), bl],
        [bl, -n / (l * l) + (1.0 - b) * d4 - (b + 2.0) * d5],
    ]
}
