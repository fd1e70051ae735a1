//! Percentile-based estimation.
//!
//! The ordered sample is matched to ECR quantiles at the mean ranks
//! `pᵢ = i/(n+1)` by least squares: `V(β, λ) = Σ (λ aᵢ − x₍ᵢ₎)²` with
//! `aᵢ = √((2 − qᵢ) qᵢ)/(1 − qᵢ)` and `qᵢ = pᵢ^{1/β}`.

use serde::Serialize;

use super::likelihood::LikelihoodStats;
use super::ml::require_spread;
use super::{FitResult, Method};
use crate::data::Dataset;
use crate::ecr::Params;
use crate::error::{Error, Result};
use crate::optimize::{self, SearchOptions};

const BETA_MIN: f64 = 1e-3;
const BETA_MAX: f64 = 1e3;
const GRID_POINTS: usize = 241;

/// Sums entering the derivatives of `V`, with `w = 1 − q`:
///
/// * `t6 = Σ q log p / w³`
/// * `t7 = Σ x log p √(q/(2 − q)) / w²`
/// * `t8 = −Σ x a`
/// * `t9 = n − Σ 1/w² = −Σ a²`
///
/// None of them depends on `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PbStats {
    pub beta: f64,
    pub t6: f64,
    pub t7: f64,
    pub t8: f64,
    pub t9: f64,
    /// `Σ x²`
    pub sxx: f64,
}

impl PbStats {
    /// `sorted` must be in increasing order.
    pub fn compute(sorted: &[f64], beta: f64) -> Self {
        let n1 = (sorted.len() + 1) as f64;
        let mut st = Self {
            beta,
            t6: 0.0,
            t7: 0.0,
            t8: 0.0,
            t9: 0.0,
            sxx: 0.0,
        };
        for (i, &x) in sorted.iter().enumerate() {
            let ln_p = ((i + 1) as f64 / n1).ln();
            let q = (ln_p / beta).exp();
            let w = -(ln_p / beta).exp_m1();
            let a = (q * (1.0 + w)).sqrt() / w;
            st.t6 += q * ln_p / (w * w * w);
            st.t7 += x * ln_p * (q / (1.0 + w)).sqrt() / (w * w);
            st.t8 -= x * a;
            st.t9 -= a * a;
            st.sxx += x * x;
        }
        st
    }

    /// `λ̆₁ = T₇/T₆`, the root of `∂V/∂β` in `λ`.
    pub fn lambda_1(&self) -> f64 {
        self.t7 / self.t6
    }

    /// `λ̆₂ = T₈/T₉`, the root of `∂V/∂λ` in `λ`.
    pub fn lambda_2(&self) -> f64 {
        self.t8 / self.t9
    }

    /// `V(β, λ) = Σx² + 2λT₈ − λ²T₉`.
    pub fn objective(&self, lambda: f64) -> f64 {
        (self.sxx + 2.0 * lambda * self.t8 - lambda * lambda * self.t9).max(0.0)
    }

    /// `(∂V/∂β, ∂V/∂λ)`.
    pub fn gradient(&self, lambda: f64) -> [f64; 2] {
        [
            -2.0 * lambda / (self.beta * self.beta) * (lambda * self.t6 - self.t7),
            2.0 * (self.t8 - lambda * self.t9),
        ]
    }

    /// `T₆T₈ − T₇T₉`, zero where both partial derivatives vanish together.
    pub fn estimating_function(&self) -> f64 {
        self.t6 * self.t8 - self.t7 * self.t9
    }

    fn usable(&self) -> bool {
        self.t9 < 0.0 && [self.t6, self.t7, self.t8, self.t9].iter().all(|v| v.is_finite())
    }
}

/// `V(β, λ)` for the data.
pub fn pb_objective(data: &Dataset, p: &Params) -> f64 {
    let n1 = (data.len() + 1) as f64;
    data.sorted()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let ln_p = ((i + 1) as f64 / n1).ln();
            let w = -(ln_p / p.beta()).exp_m1();
            let a = ((ln_p / p.beta()).exp() * (1.0 + w)).sqrt() / w;
            (p.lambda() * a - x).powi(2)
        })
        .sum()
}

/// Analytic gradient of `V`.
pub fn pb_gradient(data: &Dataset, p: &Params) -> [f64; 2] {
    PbStats::compute(data.sorted(), p.beta()).gradient(p.lambda())
}

/// Percentile-based fit.
///
/// Roots of `T₆T₈ = T₇T₉` are bracketed on a log grid of `β ∈ [10⁻³, 10³]` and
/// refined by bisection; the root with the smallest `V` wins and
/// `λ̆ = λ̆₂(β̆)`. Without a sign change the profile `V(β, λ̆₂(β))` is
/// minimized directly.
pub fn fit_pb(data: &Dataset) -> Result<FitResult> {
    require_spread(data)?;
    let sorted = data.sorted();
    let stats = |eta: f64| PbStats::compute(sorted, eta.exp());
    let (lo, hi) = (BETA_MIN.ln(), BETA_MAX.ln());
    let grid: Vec<(f64, PbStats)> = (0..GRID_POINTS)
        .map(|k| {
            let eta = lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64;
            (eta, stats(eta))
        })
        .collect();

    let mut iterations = 0;
    let mut best: Option<(f64, f64, f64)> = None; // (V, β, λ)
    let mut consider = |beta: f64, st: &PbStats| {
        let lambda = st.lambda_2();
        let v = st.objective(lambda);
        if lambda > 0.0 && lambda.is_finite() && best.is_none_or(|b| v < b.0) {
            best = Some((v, beta, lambda));
        }
    };
    for pair in grid.windows(2) {
        let ((ea, sa), (eb, sb)) = (pair[0], pair[1]);
        if !(sa.usable() && sb.usable()) {
            continue;
        }
        let (ga, gb) = (sa.estimating_function(), sb.estimating_function());
        if ga == 0.0 {
            consider(ea.exp(), &sa);
        } else if ga.signum() != gb.signum() && gb != 0.0 {
            let found = optimize::bisect(|e| stats(e).estimating_function(), ea, eb, 1e-15, 200)?;
            iterations += found.iterations;
            let st = stats(found.x);
            consider(found.x.exp(), &st);
        }
    }

    let (beta, lambda) = match best {
        Some((_, b, l)) => (b, l),
        None => {
            let profile = |eta: f64| {
                let st = stats(eta);
                if st.usable() {
                    -st.objective(st.lambda_2())
                } else {
                    f64::NEG_INFINITY
                }
            };
            let dprofile = |eta: f64| {
                let st = stats(eta);
                -st.beta * st.gradient(st.lambda_2())[0]
            };
            let start = grid
                .iter()
                .filter(|(_, s)| s.usable())
                .max_by(|a, b| profile(a.0).total_cmp(&profile(b.0)))
                .map(|(e, _)| *e)
                .ok_or_else(|| Error::NotConverged {
                    what: "percentile fit",
                    iterations: 0,
                    reason: "objective is undefined across the shape grid".into(),
                    best: None,
                })?;
            let opts = SearchOptions {
                step: (hi - lo) / (GRID_POINTS - 1) as f64,
                lower: lo,
                upper: hi,
                xtol: 1e-13,
                max_iter: 400,
            };
            let found = optimize::maximize(profile, dprofile, start, opts).map_err(|e| {
                Error::NotConverged {
                    what: "percentile fit",
                    iterations: 400,
                    reason: format!("no root of the estimating equation and {e}"),
                    best: None,
                }
            })?;
            iterations += found.iterations;
            let st = stats(found.x);
            (found.x.exp(), st.lambda_2())
        }
    };
    let params = Params::new(beta, lambda)?;
    let ll = LikelihoodStats::compute(data.values(), lambda).log_likelihood(beta);
    Ok(FitResult {
        params,
        std_errors: None,
        loglik: ll,
        method: Method::Pb,
        iterations,
        converged: true,
        bias_applied: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecr;

    #[test]
    fn objective_matches_closed_form() {
        let d = Dataset::crowley_hu();
        let p = Params::new(0.6, 40.0).unwrap();
        let st = PbStats::compute(d.sorted(), 0.6);
        let v = pb_objective(&d, &p);
        assert!((st.objective(40.0) - v).abs() < 1e-9 * v);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let d = Dataset::crowley_hu();
        for &(b, l) in &[(0.3, 20.0), (0.6, 90.0), (2.0, 5.0)] {
            let g = pb_gradient(&d, &Params::new(b, l).unwrap());
            let h = 1e-6;
            let v = |b: f64, l: f64| pb_objective(&d, &Params::new(b, l).unwrap());
            let fb = (v(b * (1.0 + h), l) - v(b * (1.0 - h), l)) / (2.0 * b * h);
            let fl = (v(b, l * (1.0 + h)) - v(b, l * (1.0 - h))) / (2.0 * l * h);
            assert!((g[0] - fb).abs() < 1e-6 * fb.abs().max(1e-3 * v(b, l) / b), "{g:?} {fb}");
            assert!((g[1] - fl).abs() < 1e-6 * fl.abs().max(1e-3 * v(b, l) / l), "{g:?} {fl}");
        }
    }

    #[test]
    fn recovers_exact_quantiles() {
        let p0 = Params::new(0.7, 2.0).unwrap();
        let n = 40;
        let xs: Vec<f64> = (1..=n)
            .map(|i| ecr::quantile(i as f64 / (n + 1) as f64, &p0).unwrap())
            .collect();
        let d = Dataset::new(xs).unwrap();
        let fit = fit_pb(&d).unwrap();
        assert!((fit.params.beta() - 0.7).abs() < 1e-6);
        assert!((fit.params.lambda() - 2.0).abs() < 1e-6);
        assert!(pb_objective(&d, &fit.params) < 1e-12);
    }
}
