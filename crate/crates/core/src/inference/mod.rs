//! Estimation for the ECR law: maximum likelihood, Cox-Snell bias-corrected
//! maximum likelihood and percentile-based estimators, with the expected
//! information machinery behind standard errors and bias corrections.

mod fisher;
mod likelihood;
mod ml;
mod pb;

pub use fisher::{
    bias_known_beta, bias_known_lambda, cox_snell_bias, cox_snell_bias_generic, cr_bias,
    cs_correctable, fisher_derivatives, fisher_info, fisher_info_inverse, inverse_denominator,
    standard_errors, third_cumulants, FisherDerivatives, InfoMatrix, ThirdCumulants,
};
pub use likelihood::{hessian, log_likelihood, profile_log_likelihood, score, LikelihoodStats};
pub use ml::{
    confidence_intervals, cs_correct, fit_cr, fit_cs_ml, fit_ml, lr_test_cr, CrFit, CsOutcome, Interval,
    LrTest,
};
pub use pb::{fit_pb, pb_gradient, pb_objective, PbStats};

use serde::{Deserialize, Serialize};

use crate::ecr::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ML", alias = "ml")]
    Ml,
    #[serde(rename = "CS-ML", alias = "csml", alias = "cs-ml")]
    CsMl,
    #[serde(rename = "PB", alias = "pb")]
    Pb,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ml, Method::CsMl, Method::Pb];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Ml => "ML",
            Method::CsMl => "CS-ML",
            Method::Pb => "PB",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An ECR fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: Params,
    /// `(se(β), se(λ))` from the expected information; absent for PB.
    pub std_errors: Option<[f64; 2]>,
    pub loglik: f64,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
    /// For CS-ML, the bias subtracted from the ML estimates.
    pub bias_applied: Option<[f64; 2]>,
}
