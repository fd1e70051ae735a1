//! Maximum likelihood fits of the ECR law and five competitors.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma_lr;

use super::GofReport;
use crate::data::Dataset;
use crate::ecr::{self, Params};
use crate::error::{Error, Result};
use crate::inference::{self, LikelihoodStats};
use crate::optimize::{self, SearchOptions};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Extended Cauchy-Rayleigh `(β, λ)`.
    Ecr,
    /// Cauchy-Rayleigh `λ`.
    Cr,
    /// `F = 1 − exp(−(x/b)^a)`, parameters `(a, b)`.
    Weibull,
    /// Shape `p`, scale `b`.
    Gamma,
    /// `log X ~ N(μ, σ²)`.
    #[serde(rename = "lognormal")]
    LogNormal,
    /// Exponentiated exponential `F = (1 − e^{−λx})^α`, parameters `(α, λ)`.
    Ee,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub name: &'static str,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFit {
    pub model: Model,
    pub estimates: Vec<Estimate>,
    pub loglik: f64,
    pub iterations: usize,
}

impl ModelFit {
    pub fn values(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.value).collect()
    }
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Ecr,
        Model::Cr,
        Model::Weibull,
        Model::Gamma,
        Model::LogNormal,
        Model::Ee,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Model::Ecr => "ecr",
            Model::Cr => "cr",
            Model::Weibull => "weibull",
            Model::Gamma => "gamma",
            Model::LogNormal => "lognormal",
            Model::Ee => "ee",
        }
    }

    pub fn from_name(name: &str) -> Option<Model> {
        Model::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Model::Ecr => &["beta", "lambda"],
            Model::Cr => &["lambda"],
            Model::Weibull => &["shape", "scale"],
            Model::Gamma => &["shape", "scale"],
            Model::LogNormal => &["mu", "sigma"],
            Model::Ee => &["alpha", "lambda"],
        }
    }

    pub fn k(&self) -> usize {
        self.param_names().len()
    }

    fn valid(&self, theta: &[f64]) -> bool {
        theta.len() == self.k()
            && theta.iter().all(|v| v.is_finite())
            && match self {
                Model::LogNormal => theta[1] > 0.0,
                _ => theta.iter().all(|&v| v > 0.0),
            }
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if self.valid(theta) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "invalid {} parameters {theta:?}",
                self.name()
            )))
        }
    }

    pub fn cdf(&self, theta: &[f64], x: f64) -> Result<f64> {
        self.check(theta)?;
        if !(x >= 0.0) {
            return Err(Error::domain(format!("x must be non-negative, got {x}")));
        }
        Ok(match self {
            Model::Ecr => ecr::cdf(x, &Params::new(theta[0], theta[1])?)?,
            Model::Cr => ecr::cdf(x, &Params::cauchy_rayleigh(theta[0])?)?,
            Model::Weibull => -(-(x / theta[1]).powf(theta[0])).exp_m1(),
            Model::Gamma => gamma_lr(theta[0], x / theta[1]),
            Model::LogNormal => {
                if x == 0.0 {
                    0.0
                } else {
                    Normal::new(theta[0], theta[1])
                        .map_err(|e| Error::domain(e.to_string()))?
                        .cdf(x.ln())
                }
            }
            Model::Ee => (theta[0] * (-(-theta[1] * x).exp_m1()).ln()).exp(),
        })
    }

    pub fn log_pdf(&self, theta: &[f64], x: f64) -> Result<f64> {
        self.check(theta)?;
        if !(x > 0.0) {
            return Err(Error::domain(format!("x must be positive, got {x}")));
        }
        Ok(match self {
            Model::Ecr => ecr::log_pdf(x, &Params::new(theta[0], theta[1])?)?,
            Model::Cr => ecr::log_pdf(x, &Params::cauchy_rayleigh(theta[0])?)?,
            Model::Weibull => {
                let (a, b) = (theta[0], theta[1]);
                a.ln() - b.ln() + (a - 1.0) * (x / b).ln() - (x / b).powf(a)
            }
            Model::Gamma => {
                let (p, b) = (theta[0], theta[1]);
                -specfun::log_gamma(p)? - p * b.ln() + (p - 1.0) * x.ln() - x / b
            }
            Model::LogNormal => {
                let (mu, s) = (theta[0], theta[1]);
                let z = (x.ln() - mu) / s;
                -x.ln() - s.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * z * z
            }
            Model::Ee => {
                let (a, l) = (theta[0], theta[1]);
                a.ln() + l.ln() - l * x + (a - 1.0) * (-(-l * x).exp_m1()).ln()
            }
        })
    }

    pub fn pdf(&self, theta: &[f64], x: f64) -> Result<f64> {
        self.log_pdf(theta, x).map(f64::exp)
    }

    pub fn log_likelihood(&self, theta: &[f64], data: &Dataset) -> Result<f64> {
        match self {
            Model::Ecr | Model::Cr => {
                self.check(theta)?;
                let (b, l) = match self {
                    Model::Ecr => (theta[0], theta[1]),
                    _ => (1.0, theta[0]),
                };
                Ok(LikelihoodStats::compute(data.values(), l).log_likelihood(b))
            }
            _ => data.values().iter().map(|&x| self.log_pdf(theta, x)).sum(),
        }
    }

    /// Maximum likelihood fit. ECR and CR standard errors come from the
    /// expected information; the others from the observed information.
    pub fn fit(&self, data: &Dataset) -> Result<ModelFit> {
        let (theta, iterations, se) = match self {
            Model::Ecr => {
                let f = inference::fit_ml(data, None)?;
                let se = f.std_errors.map(|s| s.to_vec());
                (vec![f.params.beta(), f.params.lambda()], f.iterations, se)
            }
            Model::Cr => {
                let f = inference::fit_cr(data)?;
                (vec![f.lambda], f.iterations, Some(vec![f.std_error]))
            }
            Model::Weibull => {
                let (t, it) = fit_weibull(data)?;
                (t, it, None)
            }
            Model::Gamma => {
                let (t, it) = fit_gamma(data)?;
                (t, it, None)
            }
            Model::LogNormal => (fit_lognormal(data), 0, None),
            Model::Ee => {
                let (t, it) = fit_ee(data)?;
                (t, it, None)
            }
        };
        self.check(&theta).map_err(|e| Error::NotConverged {
            what: "comparison model fit",
            iterations,
            reason: e.to_string(),
            best: None,
        })?;
        let se = match se {
            Some(se) => Some(se),
            None => observed_std_errors(|t| self.log_likelihood(t, data), &theta),
        };
        let loglik = self.log_likelihood(&theta, data)?;
        let estimates = self
            .param_names()
            .iter()
            .enumerate()
            .map(|(i, &name)| Estimate {
                name,
                value: theta[i],
                std_error: se.as_ref().map(|s| s[i]),
            })
            .collect();
        Ok(ModelFit {
            model: *self,
            estimates,
            loglik,
            iterations,
        })
    }

    pub fn report(&self, fit: &ModelFit, data: &Dataset) -> GofReport {
        let theta = fit.values();
        GofReport::new(
            data,
            |x| self.cdf(&theta, x).unwrap_or(f64::NAN),
            fit.loglik,
            self.k(),
        )
    }
}

/// Square roots of the diagonal of the inverse negative Hessian of `ll`,
/// by central differences. `None` if the Hessian is not negative definite.
fn observed_std_errors<F>(ll: F, theta: &[f64]) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if theta.len() != 2 {
        return None;
    }
    let h = [theta[0].abs().max(1e-3) * 1e-4, theta[1].abs().max(1e-3) * 1e-4];
    let f = |d0: f64, d1: f64| ll(&[theta[0] + d0, theta[1] + d1]).ok();
    let f00 = f(0.0, 0.0)?;
    let hxx = (f(h[0], 0.0)? - 2.0 * f00 + f(-h[0], 0.0)?) / (h[0] * h[0]);
    let hyy = (f(0.0, h[1])? - 2.0 * f00 + f(0.0, -h[1])?) / (h[1] * h[1]);
    let hxy = (f(h[0], h[1])? - f(h[0], -h[1])? - f(-h[0], h[1])? + f(-h[0], -h[1])?)
        / (4.0 * h[0] * h[1]);
    let det = hxx * hyy - hxy * hxy;
    if !(det > 0.0 && hxx < 0.0) {
        return None;
    }
    Some(vec![(-hyy / det).sqrt(), (-hxx / det).sqrt()])
}

fn log_search(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<(f64, usize)> {
    let found = optimize::bisect(f, lo, hi, 1e-14, 500)?;
    Ok((found.x.exp(), found.iterations))
}

/// Shape solves `Σ x^a log x / Σ x^a − 1/a − mean(log x) = 0`, increasing in
/// `a`; then `b = (mean x^a)^{1/a}`.
fn fit_weibull(data: &Dataset) -> Result<(Vec<f64>, usize)> {
    let xs = data.values();
    let n = xs.len() as f64;
    let xmax = data.sorted()[xs.len() - 1];
    let mean_log = xs.iter().map(|x| x.ln()).sum::<f64>() / n;
    let g = |eta: f64| {
        let a = eta.exp();
        // x^a / xmax^a avoids overflow
        let (mut s0, mut s1) = (0.0, 0.0);
        for &x in xs {
            let t = (a * (x / xmax).ln()).exp();
            s0 += t;
            s1 += t * x.ln();
        }
        s1 / s0 - 1.0 / a - mean_log
    };
    let (a, it) = log_search(g, -15.0, 8.0)?;
    let m = xs.iter().map(|&x| (a * (x / xmax).ln()).exp()).sum::<f64>() / n;
    Ok((vec![a, xmax * m.powf(1.0 / a)], it))
}

/// Shape solves `log p − ψ(p) = log(mean x) − mean(log x)`; `b = mean x / p`.
fn fit_gamma(data: &Dataset) -> Result<(Vec<f64>, usize)> {
    let xs = data.values();
    let n = xs.len() as f64;
    let mean = data.mean();
    let s = mean.ln() - xs.iter().map(|x| x.ln()).sum::<f64>() / n;
    let g = |eta: f64| {
        let p = eta.exp();
        p.ln() - specfun::digamma(p).unwrap_or(f64::NAN) - s
    };
    let (p, it) = log_search(g, -25.0, 25.0)?;
    Ok((vec![p, mean / p], it))
}

fn fit_lognormal(data: &Dataset) -> Vec<f64> {
    let logs: Vec<f64> = data.values().iter().map(|x| x.ln()).collect();
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n;
    vec![mu, var.sqrt()]
}

/// Profile in `λ` with `α̂(λ) = −n / Σ log(1 − e^{−λx})`.
fn fit_ee(data: &Dataset) -> Result<(Vec<f64>, usize)> {
    let xs = data.values();
    let n = xs.len() as f64;
    let sum_x: f64 = xs.iter().sum();
    let log_terms = |l: f64| xs.iter().map(|&x| (-(-l * x).exp_m1()).ln()).sum::<f64>();
    let alpha_hat = |l: f64| -n / log_terms(l);
    let profile = |eta: f64| {
        let l = eta.exp();
        let a = alpha_hat(l);
        n * a.ln() + n * l.ln() - l * sum_x + (a - 1.0) * log_terms(l)
    };
    let dprofile = |eta: f64| {
        let l = eta.exp();
        let a = alpha_hat(l);
        let tail: f64 = xs.iter().map(|&x| x / (l * x).exp_m1()).sum();
        l * (n / l - sum_x + (a - 1.0) * tail)
    };
    let eta0 = (1.0 / data.mean()).ln();
    let opts = SearchOptions {
        step: 0.5,
        lower: eta0 - 30.0,
        upper: eta0 + 30.0,
        xtol: 1e-13,
        max_iter: 300,
    };
    let found = optimize::maximize(profile, dprofile, eta0, opts)?;
    let l = found.x.exp();
    Ok((vec![alpha_hat(l), l], found.iterations))
}

/// One model's outcome in a comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub model: Model,
    pub fit: Option<ModelFit>,
    pub report: Option<GofReport>,
    /// Why the fit failed, if it did.
    pub error: Option<String>,
}

/// Fits all six models and sorts successful fits by increasing `W*`;
/// failures are kept, last.
pub fn fit_comparison_models(data: &Dataset) -> Vec<Comparison> {
    let mut out: Vec<Comparison> = Model::ALL
        .iter()
        .map(|m| match m.fit(data) {
            Ok(fit) => Comparison {
                model: *m,
                report: Some(m.report(&fit, data)),
                fit: Some(fit),
                error: None,
            },
            Err(e) => Comparison {
                model: *m,
                fit: None,
                report: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    out.sort_by(|a, b| {
        let key = |c: &Comparison| c.report.as_ref().map_or(f64::INFINITY, |r| r.wstar);
        key(a).total_cmp(&key(b))
    });
    out
}
