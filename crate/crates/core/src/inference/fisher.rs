//! Expected information, its derivatives, third cumulants and second-order
//! (Cox-Snell) biases of the maximum likelihood estimators.

use serde::Serialize;

use crate::ecr::Params;
use crate::error::{Error, Result};

/// Symmetric 2×2 matrix in the order (β, λ), on a per-observation scale,
/// together with the sample size it refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoMatrix {
    pub entries: [[f64; 2]; 2],
    pub n: usize,
}

impl InfoMatrix {
    pub fn product(&self, other: &InfoMatrix) -> [[f64; 2]; 2] {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    /// Raw cumulants `κ_rs = −n K_rs` (the expected Hessian of `ℓ`).
    pub fn cumulants(&self) -> [[f64; 2]; 2] {
        let n = self.n as f64;
        self.entries.map(|row| row.map(|v| -n * v))
    }

    /// For an inverse information matrix: asymptotic covariance `K⁻¹ / n`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let n = self.n as f64;
        self.entries.map(|row| row.map(|v| v / n))
    }
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    Ok(n as f64)
}

/// Raw second-order cumulants `(κ_ββ, κ_βλ, κ_λλ)`.
fn kappa(p: &Params, n: f64) -> [f64; 3] {
    let (b, l) = (p.beta(), p.lambda());
    [
        -n / (b * b),
        n / l * (2.0 / (b + 2.0) - 3.0 / (b + 1.0)),
        n / (l * l) * (18.0 / (b + 2.0) - 36.0 / (b + 3.0) + 16.0 / (b + 4.0) - 1.0),
    ]
}

/// Expected information `K(θ) = −(1/n)[κ_rs]`.
pub fn fisher_info(p: &Params, n: usize) -> Result<InfoMatrix> {
    let nf = check_n(n)?;
    let [bb, bl, ll] = kappa(p, nf);
    Ok(InfoMatrix {
        entries: [[-bb / nf, -bl / nf], [-bl / nf, -ll / nf]],
        n,
    })
}

/// `β³ − 7β² + 10β + 72`, positive for every `β > 0`.
pub fn inverse_denominator(beta: f64) -> f64 {
    ((beta - 7.0) * beta + 10.0) * beta + 72.0
}

/// Closed-form `K(θ)⁻¹`.
pub fn fisher_info_inverse(p: &Params, n: usize) -> Result<InfoMatrix> {
    check_n(n)?;
    let (b, l) = (p.beta(), p.lambda());
    let d = inverse_denominator(b);
    let bb = b * b * (b + 1.0).powi(2) * (b + 2.0) * (b * b + 11.0 * b + 36.0) / d;
    let bl = -l * b * (b + 1.0) * (b + 2.0) * (b + 3.0) * (b + 4.0).powi(2) / d;
    let ll = l * l * (b + 1.0).powi(2) * (b + 2.0).powi(2) * (b + 3.0) * (b + 4.0) / (b * d);
    Ok(InfoMatrix {
        entries: [[bb, bl], [bl, ll]],
        n,
    })
}

/// Asymptotic standard errors `√(K⁻¹_ii / n)`.
pub fn standard_errors(p: &Params, n: usize) -> Result<[f64; 2]> {
    let cov = fisher_info_inverse(p, n)?.covariance();
    Ok([cov[0][0].sqrt(), cov[1][1].sqrt()])
}

/// First derivatives of the raw cumulants: `bb_l` is `∂κ_ββ/∂λ`, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherDerivatives {
    pub bb_b: f64,
    pub bb_l: f64,
    pub bl_b: f64,
    pub bl_l: f64,
    pub ll_b: f64,
    pub ll_l: f64,
}

impl FisherDerivatives {
    /// `κ_rs^{(t)}` with indices 0 = β, 1 = λ.
    pub fn get(&self, r: usize, s: usize, t: usize) -> f64 {
        match (r + s, t) {
            (0, 0) => self.bb_b,
            (0, _) => self.bb_l,
            (1, 0) => self.bl_b,
            (1, _) => self.bl_l,
            (_, 0) => self.ll_b,
            _ => self.ll_l,
        }
    }
}

pub fn fisher_derivatives(p: &Params, n: usize) -> Result<FisherDerivatives> {
    let n = check_n(n)?;
    let (b, l) = (p.beta(), p.lambda());
    let (b1, b2, b3, b4) = (b + 1.0, b + 2.0, b + 3.0, b + 4.0);
    Ok(FisherDerivatives {
        bb_b: 2.0 * n / b.powi(3),
        bb_l: 0.0,
        bl_b: n / l * (3.0 / (b1 * b1) - 2.0 / (b2 * b2)),
        bl_l: n / (l * l) * (3.0 / b1 - 2.0 / b2),
        ll_b: 2.0 * n / (l * l) * (18.0 / (b3 * b3) - 8.0 / (b4 * b4) - 9.0 / (b2 * b2)),
        ll_l: 2.0 * n / l.powi(3) * (1.0 - 18.0 / b2 + 36.0 / b3 - 16.0 / b4),
    })
}

/// Expected third derivatives of `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThirdCumulants {
    pub kbbb: f64,
    pub kbbl: f64,
    pub kbll: f64,
    pub klll: f64,
}

impl ThirdCumulants {
    /// `κ_rst` with indices 0 = β, 1 = λ.
    pub fn get(&self, r: usize, s: usize, t: usize) -> f64 {
        match r + s + t {
            0 => self.kbbb,
            1 => self.kbbl,
            2 => self.kbll,
            _ => self.klll,
        }
    }
}

pub fn third_cumulants(p: &Params, n: usize) -> Result<ThirdCumulants> {
    let n = check_n(n)?;
    let (b, l) = (p.beta(), p.lambda());
    Ok(ThirdCumulants {
        kbbb: 2.0 * n / b.powi(3),
        kbbl: 0.0,
        kbll: n / (l * l)
            * (9.0 / (b + 1.0) - 28.0 / (b + 2.0) + 27.0 / (b + 3.0) - 8.0 / (b + 4.0)),
        klll: 2.0 * n / l.powi(3)
            * (1.0 - 81.0 / (b + 2.0) + 378.0 / (b + 3.0) - 606.0 / (b + 4.0) + 405.0 / (b + 5.0)
                - 96.0 / (b + 6.0)),
    })
}

/// Second-order biases `(B(β̂), B(λ̂))` of the maximum likelihood estimators,
/// as rational functions of `β` (the λ bias carries a `λ/n` factor).
pub fn cox_snell_bias(p: &Params, n: usize) -> Result<[f64; 2]> {
    let nf = check_n(n)?;
    let (b, l) = (p.beta(), p.lambda());
    let d = inverse_denominator(b);
    let b2 = b * b;
    let bias_beta = b2 * b + 13.0 * b2 + 122.0 * b + 380.0 - 699_840.0 / (19_321.0 * (b + 5.0))
        + 96_000.0 / (361.0 * (b + 6.0))
        + 432.0 * (4_085_783.0 * b2 - 8_192_586.0 * b - 40_352_456.0) / (2_641.0 * d * d)
        - 12.0 * (70_740_551.0 * b2 + 3_809_213_278.0 * b - 35_831_044_156.0) / (6_974_881.0 * d);
    let bias_lambda = 8.0 * b + 86.0 + 49.0 / (270.0 * b)
        - 1_679_616.0 / (96_605.0 * (b + 5.0))
        + 80_000.0 / (1_083.0 * (b + 6.0))
        - 8.0 * (84_037_561.0 * b2 + 21_509_105.0 * b - 393_761_162.0) / (7_923.0 * d * d)
        + (356_431_397_749.0 * b2 - 158_970_444_943.0 * b - 4_636_191_041_858.0)
            / (376_643_574.0 * d);
    Ok([bias_beta / nf, l * bias_lambda / nf])
}

/// The same biases assembled from the general second-order formula
/// `B_a = Σ_{r,s,t} κ^{ar} κ^{st} (κ_rs^{(t)} − ½ κ_rst)`.
pub fn cox_snell_bias_generic(p: &Params, n: usize) -> Result<[f64; 2]> {
    let nf = check_n(n)?;
    let inv = fisher_info_inverse(p, n)?.entries.map(|row| row.map(|v| -v / nf));
    let der = fisher_derivatives(p, n)?;
    let third = third_cumulants(p, n)?;
    let mut out = [0.0; 2];
    for (a, slot) in out.iter_mut().enumerate() {
        for r in 0..2 {
            for s in 0..2 {
                for t in 0..2 {
                    *slot += inv[a][r] * inv[s][t] * (der.get(r, s, t) - 0.5 * third.get(r, s, t));
                }
            }
        }
    }
    Ok(out)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Bias of `β̂` when `λ` is known: `β̂ / n`.
pub fn bias_known_lambda(beta_hat: f64, n: usize) -> Result<f64> {
    check_positive("beta_hat", beta_hat)?;
    Ok(beta_hat / check_n(n)?)
}

/// Bias of `λ̂` when `β = β₀` is known.
pub fn bias_known_beta(lambda_hat: f64, beta0: f64, n: usize) -> Result<f64> {
    check_positive("lambda_hat", lambda_hat)?;
    check_positive("beta0", beta0)?;
    let nf = check_n(n)?;
    let b = beta0;
    let ratio = (b + 2.0) * (b + 3.0) * (b + 4.0) / (b * (b + 5.0) * (b + 6.0));
    let poly = (((b + 24.0) * b + 216.0) * b + 761.0) * b + 294.0;
    let q = b * b + 11.0 * b + 36.0;
    Ok(lambda_hat / nf * ratio * poly / (q * q))
}

/// Bias of `λ̂` in the Cauchy-Rayleigh model: `45 λ̂ / (56 n)`.
pub fn cr_bias(lambda_hat: f64, n: usize) -> Result<f64> {
    check_positive("lambda_hat", lambda_hat)?;
    Ok(45.0 * lambda_hat / (56.0 * check_n(n)?))
}

/// Whether both bias-corrected estimates stay positive at this `β̂`.
/// The answer does not depend on `λ̂`.
pub fn cs_correctable(n: usize, beta_hat: f64) -> Result<bool> {
    let p = Params::new(beta_hat, 1.0)?;
    let [bb, bl] = cox_snell_bias(&p, n)?;
    Ok(beta_hat - bb > 0.0 && 1.0 - bl > 0.0)
}
