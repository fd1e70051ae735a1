//! Maximum likelihood and its bias-corrected variant.

use std::cell::Cell;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use super::fisher::{cox_snell_bias, fisher_info_inverse, standard_errors};
use super::likelihood::LikelihoodStats;
use super::{FitResult, Method};
use crate::data::Dataset;
use crate::ecr::Params;
use crate::error::{Error, Result};
use crate::optimize::{self, SearchOptions};

/// The fit is accepted when `λ |∂ℓ_p/∂λ| / n` falls below this value.
pub const SCORE_TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;
/// Half-width, in `log λ`, of the region searched around the start.
const LOG_LAMBDA_RANGE: f64 = 30.0;

pub(crate) fn require_spread(data: &Dataset) -> Result<()> {
    let s = data.sorted();
    if s.len() < 2 || s[0] == s[s.len() - 1] {
        return Err(Error::DegenerateData(
            "at least two distinct observations are needed to fit".into(),
        ));
    }
    Ok(())
}

fn initial_lambda(data: &Dataset) -> f64 {
    data.describe().median / 3f64.sqrt()
}

fn scaled_score(st: &LikelihoodStats) -> f64 {
    (st.lambda * st.profile_score()).abs() / st.n as f64
}

/// Maximum likelihood fit.
///
/// The profile log-likelihood `ℓ(β̂(λ), λ)` is maximized over `log λ`; then
/// `β̂ = −n/T₃(λ̂)`. Only the `λ` of `init` is used as the starting point.
/// If the profile search fails, Fisher scoring on both parameters is tried
/// before giving up.
pub fn fit_ml(data: &Dataset, init: Option<Params>) -> Result<FitResult> {
    require_spread(data)?;
    let xs = data.values();
    let lambda0 = init.map_or_else(|| initial_lambda(data), |p| p.lambda());
    let eta0 = lambda0.ln();
    let best = Cell::new((f64::NEG_INFINITY, eta0));
    let profile = |eta: f64| {
        let st = LikelihoodStats::compute(xs, eta.exp());
        let v = st.profile_log_likelihood();
        if v > best.get().0 {
            best.set((v, eta));
        }
        v
    };
    let dprofile = |eta: f64| {
        let st = LikelihoodStats::compute(xs, eta.exp());
        st.lambda * st.profile_score()
    };
    let opts = SearchOptions {
        step: 0.5,
        lower: eta0 - LOG_LAMBDA_RANGE,
        upper: eta0 + LOG_LAMBDA_RANGE,
        xtol: 1e-13,
        max_iter: MAX_ITER,
    };
    let found = optimize::maximize(profile, dprofile, eta0, opts);
    let (lambda, iterations) = match found {
        Ok(f) => (f.x.exp(), f.iterations),
        Err(profile_err) => {
            let st = LikelihoodStats::compute(xs, lambda0);
            let start = Params::new(st.beta_hat(), lambda0).ok();
            match start.map(|s| fisher_scoring(data, s)) {
                Some(Ok(fit)) => return Ok(fit),
                _ => {
                    let lam = best.get().1.exp();
                    let st = LikelihoodStats::compute(xs, lam);
                    let reason = profile_err.to_string();
                    return Err(Error::NotConverged {
                        what: "maximum likelihood",
                        iterations: MAX_ITER,
                        reason,
                        best: Params::new(st.beta_hat(), lam).ok(),
                    });
                }
            }
        }
    };
    let st = LikelihoodStats::compute(xs, lambda);
    let params = Params::new(st.beta_hat(), lambda).map_err(|e| Error::NotConverged {
        what: "maximum likelihood",
        iterations,
        reason: format!("estimate left the parameter space: {e}"),
        best: None,
    })?;
    Ok(FitResult {
        params,
        std_errors: Some(standard_errors(&params, data.len())?),
        loglik: st.log_likelihood(params.beta()),
        method: Method::Ml,
        iterations,
        converged: scaled_score(&st) < SCORE_TOL,
        bias_applied: None,
    })
}

/// Fisher scoring on `(β, λ)` with step halving.
fn fisher_scoring(data: &Dataset, start: Params) -> Result<FitResult> {
    let xs = data.values();
    let n = data.len();
    let nf = n as f64;
    let mut theta = start;
    let mut st = LikelihoodStats::compute(xs, theta.lambda());
    let mut ll = st.log_likelihood(theta.beta());
    for it in 1..=MAX_ITER {
        let u = st.score(theta.beta());
        if (theta.beta() * u[0]).abs().max((theta.lambda() * u[1]).abs()) / nf < SCORE_TOL {
            return Ok(FitResult {
                params: theta,
                std_errors: Some(standard_errors(&theta, n)?),
                loglik: ll,
                method: Method::Ml,
                iterations: it,
                converged: true,
                bias_applied: None,
            });
        }
        let cov = fisher_info_inverse(&theta, n)?.covariance();
        let step = [
            cov[0][0] * u[0] + cov[0][1] * u[1],
            cov[1][0] * u[0] + cov[1][1] * u[1],
        ];
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            if let Ok(cand) = Params::new(
                theta.beta() + scale * step[0],
                theta.lambda() + scale * step[1],
            ) {
                let cst = LikelihoodStats::compute(xs, cand.lambda());
                let cll = cst.log_likelihood(cand.beta());
                if cll >= ll {
                    theta = cand;
                    st = cst;
                    ll = cll;
                    moved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Err(Error::NotConverged {
        what: "Fisher scoring",
        iterations: MAX_ITER,
        reason: "score did not vanish".into(),
        best: Some(theta),
    })
}

/// Outcome of the bias-corrected fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CsOutcome {
    Corrected(FitResult),
    /// Subtracting the bias would leave the parameter space; the ML fit is kept.
    NotCorrectable { ml: FitResult, bias: [f64; 2] },
}

impl CsOutcome {
    pub fn corrected(&self) -> Option<&FitResult> {
        match self {
            CsOutcome::Corrected(f) => Some(f),
            CsOutcome::NotCorrectable { .. } => None,
        }
    }
}

/// Maximum likelihood followed by subtraction of the second-order bias
/// evaluated at the ML estimate.
pub fn fit_cs_ml(data: &Dataset) -> Result<CsOutcome> {
    let ml = fit_ml(data, None)?;
    cs_correct(ml, data)
}

/// Bias-corrects an existing ML fit of `data`.
pub fn cs_correct(ml: FitResult, data: &Dataset) -> Result<CsOutcome> {
    let bias = cox_snell_bias(&ml.params, data.len())?;
    let beta = ml.params.beta() - bias[0];
    let lambda = ml.params.lambda() - bias[1];
    if !(beta > 0.0 && lambda > 0.0) {
        return Ok(CsOutcome::NotCorrectable { ml, bias });
    }
    let params = Params::new(beta, lambda)?;
    let st = LikelihoodStats::compute(data.values(), lambda);
    Ok(CsOutcome::Corrected(FitResult {
        params,
        std_errors: Some(standard_errors(&params, data.len())?),
        loglik: st.log_likelihood(beta),
        method: Method::CsMl,
        iterations: ml.iterations,
        converged: ml.converged,
        bias_applied: Some(bias),
    }))
}

/// Maximum likelihood fit of the Cauchy-Rayleigh submodel (`β = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrFit {
    pub lambda: f64,
    pub std_error: f64,
    pub loglik: f64,
    pub iterations: usize,
}

impl CrFit {
    pub fn params(&self) -> Params {
        Params::cauchy_rayleigh(self.lambda).expect("fitted scale is positive")
    }
}

/// The score `n/λ − 3λ Σ 1/(λ² + x²)` decreases in `λ`, so its root is
/// found by bisection in `log λ`.
pub fn fit_cr(data: &Dataset) -> Result<CrFit> {
    let xs = data.values();
    let s = data.sorted();
    let n = xs.len() as f64;
    let g = |eta: f64| {
        let l2 = (2.0 * eta).exp();
        n - 3.0 * xs.iter().map(|&x| l2 / (l2 + x * x)).sum::<f64>()
    };
    let found = optimize::bisect(g, s[0].ln() - 20.0, s[s.len() - 1].ln() + 20.0, 1e-14, 500)?;
    let lambda = found.x.exp();
    let st = LikelihoodStats::compute(xs, lambda);
    Ok(CrFit {
        lambda,
        std_error: lambda * (1.25 / n).sqrt(),
        loglik: st.log_likelihood(1.0),
        iterations: found.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

/// Normal-theory intervals `θ̂ ± z se`, with lower ends truncated at 0.
pub fn confidence_intervals(fit: &FitResult, level: f64) -> Result<[Interval; 2]> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    let se = fit.std_errors.ok_or_else(|| {
        Error::domain(format!("{} fits carry no standard errors", fit.method))
    })?;
    let z = Normal::standard().inverse_cdf(0.5 * (1.0 + level));
    let est = [fit.params.beta(), fit.params.lambda()];
    Ok([0, 1].map(|i| Interval {
        lower: (est[i] - z * se[i]).max(0.0),
        upper: est[i] + z * se[i],
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrTest {
    pub statistic: f64,
    pub p_value: f64,
    pub ecr_loglik: f64,
    pub cr_loglik: f64,
}

/// Likelihood ratio test of `β = 1` against the full model, referred to a
/// chi-square law with one degree of freedom.
pub fn lr_test_cr(data: &Dataset) -> Result<LrTest> {
    let full = fit_ml(data, None)?;
    let cr = fit_cr(data)?;
    let statistic = (2.0 * (full.loglik - cr.loglik)).max(0.0);
    Ok(LrTest {
        statistic,
        p_value: erfc((statistic / 2.0).sqrt()),
        ecr_loglik: full.loglik,
        cr_loglik: cr.loglik,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_data_rejected() {
        let d = Dataset::new(vec![3.0, 3.0, 3.0]).unwrap();
        assert!(matches!(fit_ml(&d, None), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn crowley_hu_fit() {
        let d = Dataset::crowley_hu();
        let fit = fit_ml(&d, None).unwrap();
        assert!(fit.converged);
        assert!((fit.params.beta() - 0.38669).abs() < 1e-3 * 0.38669);
        assert!((fit.params.lambda() - 80.68399).abs() < 1e-3 * 80.68399);
        let cr = fit_cr(&d).unwrap();
        assert!((cr.lambda - 24.491).abs() < 1e-3 * 24.491);
        let lr = lr_test_cr(&d).unwrap();
        assert!(lr.p_value < 1e-5);
    }

    #[test]
    fn fisher_scoring_agrees_with_profile() {
        let d = Dataset::crowley_hu();
        let a = fit_ml(&d, None).unwrap();
        let b = fisher_scoring(&d, Params::new(0.5, 50.0).unwrap()).unwrap();
        assert!((a.params.beta() - b.params.beta()).abs() < 1e-7);
        assert!((a.params.lambda() - b.params.lambda()).abs() < 1e-5);
    }

    #[test]
    fn intervals() {
        let fit = fit_ml(&Dataset::crowley_hu(), None).unwrap();
        let ci = confidence_intervals(&fit, 0.95).unwrap();
        assert!(ci[0].lower > 0.0 && ci[0].lower < fit.params.beta());
        let point = confidence_intervals(&fit, 1e-12).unwrap();
        assert!((point[1].upper - point[1].lower).abs() < 1e-9);
        assert!(confidence_intervals(&fit, 1.0).is_err());
    }
}
