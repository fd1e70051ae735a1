//! Goodness-of-fit statistics, information criteria, the total time on test
//! transform and the comparison models.

mod models;

pub use models::{fit_comparison_models, Comparison, Estimate, Model, ModelFit};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::Dataset;

fn cdf_values<F: Fn(f64) -> f64>(data: &Dataset, cdf: F) -> Vec<f64> {
    data.sorted().iter().map(|&x| cdf(x)).collect()
}

/// Kolmogorov-Smirnov distance between the empirical and a fitted cdf.
pub fn ks_statistic<F: Fn(f64) -> f64>(data: &Dataset, cdf: F) -> f64 {
    let n = data.len() as f64;
    cdf_values(data, cdf)
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let i = i as f64;
            ((i + 1.0) / n - v).max(v - i / n)
        })
        .fold(0.0, f64::max)
}

/// `W² = 1/(12n) + Σ (vᵢ − (2i−1)/(2n))²` for sorted `vᵢ ∈ [0, 1]`.
fn w2(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let s: f64 = v
        .iter()
        .enumerate()
        .map(|(i, &u)| (u - (2.0 * i as f64 + 1.0) / (2.0 * n)).powi(2))
        .sum();
    s + 1.0 / (12.0 * n)
}

/// `A² = −n − (1/n) Σ (2i−1)[ln vᵢ + ln(1 − v₍ₙ₊₁₋ᵢ₎)]`; infinite when some
/// `vᵢ` is 0 or 1.
fn a2(v: &[f64]) -> f64 {
    let n = v.len();
    let nf = n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let lo = v[i];
        let hi = v[n - 1 - i];
        if !(lo > 0.0 && hi < 1.0) {
            return f64::INFINITY;
        }
        s += (2.0 * i as f64 + 1.0) * (lo.ln() + (-hi).ln_1p());
    }
    -nf - s / nf
}

/// Cramér-von Mises `W²` applied directly to the fitted cdf values.
pub fn cvm_w2<F: Fn(f64) -> f64>(data: &Dataset, cdf: F) -> f64 {
    w2(&cdf_values(data, cdf))
}

/// Anderson-Darling `A²` applied directly to the fitted cdf values.
pub fn ad_a2<F: Fn(f64) -> f64>(data: &Dataset, cdf: F) -> f64 {
    a2(&cdf_values(data, cdf))
}

/// Normal-score transform: `vᵢ = F(xᵢ)`, `yᵢ = Φ⁻¹(vᵢ)`,
/// `uᵢ = Φ((yᵢ − ȳ)/s_y)` with `s_y` the sample standard deviation.
/// Returns `None` when some `vᵢ` is 0 or 1.
fn normal_scores(v: &[f64]) -> Option<Vec<f64>> {
    if v.iter().any(|&u| !(u > 0.0 && u < 1.0)) || v.len() < 2 {
        return None;
    }
    let normal = Normal::standard();
    let y: Vec<f64> = v.iter().map(|&u| normal.inverse_cdf(u)).collect();
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sd = (y.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if !(sd > 0.0) {
        return None;
    }
    let mut u: Vec<f64> = y.iter().map(|t| normal.cdf((t - mean) / sd)).collect();
    u.sort_by(f64::total_cmp);
    Some(u)
}

/// Small-sample corrected Cramér-von Mises statistic
/// `W* = W²(1 + 0.5/n)`, computed on normal scores of the fitted cdf values.
pub fn cvm_wstar<F: Fn(f64) -> f64>(data: &Dataset, cdf: F) -> f64 {
    let n = data.len() as f64;
    match normal_scores(&cdf_values(data, cdf)) {
        Some(u) => w2(&u) * (1.0 + 0.5 / n),
        None => f64::INFINITY,
    }
}

/// Small-sample corrected Anderson-Darling statistic
/// `A* = A²(1 + 0.75/n + 2.25/n²)`, computed on normal scores of the fitted
/// cdf values.
pub fn ad_astar<F: Fn(f64) -> f64>(data: &Dataset, cdf: F) -> f64 {
    let n = data.len() as f64;
    match normal_scores(&cdf_values(data, cdf)) {
        Some(u) => a2(&u) * (1.0 + 0.75 / n + 2.25 / (n * n)),
        None => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoCriteria {
    pub aic: f64,
    /// Corrected AIC; `None` when `n ≤ k + 1`.
    pub caic: Option<f64>,
    pub bic: f64,
    pub hqic: f64,
}

pub fn info_criteria(loglik: f64, k: usize, n: usize) -> InfoCriteria {
    let (kf, nf) = (k as f64, n as f64);
    let m2l = -2.0 * loglik;
    let aic = m2l + 2.0 * kf;
    InfoCriteria {
        aic,
        caic: (n > k + 1).then(|| aic + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0)),
        bic: m2l + kf * nf.ln(),
        hqic: m2l + 2.0 * kf * nf.ln().ln(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub wstar: f64,
    pub astar: f64,
    pub ks: f64,
    pub aic: f64,
    pub caic: Option<f64>,
    pub bic: f64,
    pub hqic: f64,
    pub loglik: f64,
    pub k: usize,
    pub n: usize,
}

impl GofReport {
    pub fn new<F: Fn(f64) -> f64>(data: &Dataset, cdf: F, loglik: f64, k: usize) -> Self {
        let ic = info_criteria(loglik, k, data.len());
        Self {
            wstar: cvm_wstar(data, &cdf),
            astar: ad_astar(data, &cdf),
            ks: ks_statistic(data, &cdf),
            aic: ic.aic,
            caic: ic.caic,
            bic: ic.bic,
            hqic: ic.hqic,
            loglik,
            k,
            n: data.len(),
        }
    }
}

/// Scaled total time on test curve: points `(r/n, G(r/n))` with
/// `G(r/n) = [Σ_{i≤r} x₍ᵢ₎ + (n − r) x₍ᵣ₎] / Σ x₍ᵢ₎`.
pub fn ttt_transform(data: &Dataset) -> Vec<(f64, f64)> {
    let s = data.sorted();
    let n = s.len();
    let total: f64 = s.iter().sum();
    let mut partial = 0.0;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let r = i + 1;
            partial += x;
            (r as f64 / n as f64, (partial + (n - r) as f64 * x) / total)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecr::{self, Params};

    #[test]
    fn ks_on_exact_quantiles() {
        let p = Params::new(0.8, 1.5).unwrap();
        let n = 30;
        let xs = (1..=n)
            .map(|i| ecr::quantile(i as f64 / (n + 1) as f64, &p).unwrap())
            .collect();
        let d = Dataset::new(xs).unwrap();
        let ks = ks_statistic(&d, |x| ecr::cdf(x, &p).unwrap());
        assert!((ks - 1.0 / (n + 1) as f64).abs() < 1e-12);
    }

    #[test]
    fn criteria_arithmetic() {
        let ic = info_criteria(-380.306, 2, 66);
        assert!((ic.aic - 764.612).abs() < 1e-9);
        assert!((ic.caic.unwrap() - ic.aic - 12.0 / 63.0).abs() < 1e-12);
        let zero = info_criteria(-10.0, 0, 5);
        assert_eq!((zero.aic, zero.caic, zero.bic, zero.hqic), (20.0, Some(20.0), 20.0, 20.0));
        assert_eq!(info_criteria(-10.0, 2, 3).caic, None);
    }

    #[test]
    fn ttt_shapes() {
        let d = Dataset::new(vec![4.0; 5]).unwrap();
        assert!(ttt_transform(&d).iter().all(|&(_, g)| (g - 1.0).abs() < 1e-15));
        let t = ttt_transform(&Dataset::crowley_hu());
        assert_eq!(t.len(), 66);
        assert!((t[65].1 - 1.0).abs() < 1e-15);
        assert!(t.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn boundary_cdf_values_are_infinite() {
        let d = Dataset::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(ad_a2(&d, |x| if x < 2.5 { 0.5 } else { 1.0 }).is_infinite());
        assert!(cvm_wstar(&d, |_| 0.0).is_infinite());
    }
}
