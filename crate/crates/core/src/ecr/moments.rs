//! Moments of the ECR law in closed form.
//!
//! The probability weighted moment `E[X^r F(X)^s (1 − F(X))^t]` is the basic
//! building block. Raw moments and order-statistic moments are special cases.

use std::f64::consts::{LN_2, PI, SQRT_2};

use super::{Params, Transform};
use crate::error::{Error, Result};
use crate::specfun::{self, SeriesControl, EULER_GAMMA};

fn check_r(r: f64) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::domain(format!("moment order must be finite, got {r}")));
    }
    Ok(())
}

/// Error for `r` outside `(lower, 1)`.
fn window_error(r: f64, lower: f64, lower_text: &str) -> Error {
    let violation = if r >= 1.0 {
        "r ≥ 1".to_string()
    } else {
        format!("r ≤ {lower_text} (r = {r}, bound {lower})")
    };
    Error::MomentDoesNotExist {
        violation,
        window: format!("{lower_text} < r < 1"),
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

/// `Σ_{i=0}^{t} (−1)^i C(t, i) B(1 − r, c_i) ₂F₁(−r/2, c_i; 1 − r/2 + (s+i+1)β; ½)`
/// with `c_i = r/2 + (s+i+1)β`. Caller checks the window.
fn pwm_sum(s: u32, r: f64, t: u32, beta: f64) -> Result<f64> {
    let ctl = SeriesControl::default();
    let mut total = 0.0;
    for i in 0..=t {
        let k = f64::from(s + i + 1) * beta;
        let c = r / 2.0 + k;
        let b = specfun::beta_fn(1.0 - r, c)?;
        let f = specfun::gauss_2f1(-r / 2.0, c, 1.0 - r / 2.0 + k, 0.5, ctl)?.value;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binomial(t, i) * b * f;
    }
    Ok(total)
}

/// Probability weighted moment `E[X^r F(X)^s (1 − F(X))^t]`.
///
/// Exists for `−2(s+1)β < r < 1`.
pub fn pwm(s: u32, r: f64, t: u32, p: &Params) -> Result<f64> {
    check_r(r)?;
    let lower = -2.0 * f64::from(s + 1) * p.beta;
    if !(r > lower && r < 1.0) {
        return Err(window_error(r, lower, &format!("−2(s+1)β = {lower}")));
    }
    let sum = pwm_sum(s, r, t, p.beta)?;
    Ok(p.beta * (p.lambda * SQRT_2).powf(r) * sum)
}

/// Raw moment `E[X^r]`, finite for `−2β < r < 1`.
pub fn raw_moment(r: f64, p: &Params) -> Result<f64> {
    check_r(r)?;
    let lower = -2.0 * p.beta;
    if !(r > lower && r < 1.0) {
        return Err(window_error(r, lower, &format!("−2β = {lower}")));
    }
    Ok(p.beta * (p.lambda * SQRT_2).powf(r) * pwm_sum(0, r, 0, p.beta)?)
}

/// Raw moment of the Cauchy-Rayleigh law, `λ^r Γ((1−r)/2) Γ(1+r/2) / √π`,
/// finite for `−2 < r < 1`.
pub fn cr_moment(r: f64, lambda: f64) -> Result<f64> {
    check_r(r)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive and finite, got {lambda}")));
    }
    if !(r > -2.0 && r < 1.0) {
        return Err(window_error(r, -2.0, "−2"));
    }
    let ln = r * lambda.ln() + specfun::log_gamma((1.0 - r) / 2.0)?
        + specfun::log_gamma(1.0 + r / 2.0)?
        - 0.5 * PI.ln();
    Ok(ln.exp())
}

/// Logarithmic moment `E[log X] = log λ + ½ Φ(½, 1, β) + ψ(1 + β) + γ − 1/β`,
/// with Φ the Lerch transcendent.
pub fn log_moment(p: &Params) -> Result<f64> {
    let b = p.beta;
    let phi = specfun::lerch_phi_half(1.0, b, SeriesControl::default())?.value;
    Ok(p.lambda.ln() + 0.5 * phi + specfun::digamma(1.0 + b)? + EULER_GAMMA - 1.0 / b)
}

/// Incomplete moment `E[X^r 1{X ≤ x0}]`, finite for `r > −2β` and `x0 > 0`.
///
/// Equal to `β 2^{r/2+1} λ^r u0^{β+r/2} F₁(r/2+β; r, −r/2; r/2+β+1; u0, u0/2) / (2β + r)`
/// where `u0 = 1 − λ/√(λ² + x0²)`.
pub fn incomplete_moment(r: f64, x0: f64, p: &Params) -> Result<f64> {
    check_r(r)?;
    if !(x0 > 0.0) || x0.is_nan() {
        return Err(Error::domain(format!("upper limit x0 must be positive, got {x0}")));
    }
    let lower = -2.0 * p.beta;
    if r <= lower {
        return Err(Error::MomentDoesNotExist {
            violation: format!("r ≤ −2β (r = {r}, bound {lower})"),
            window: format!("r > −2β = {lower}"),
        });
    }
    if x0.is_infinite() {
        return raw_moment(r, p);
    }
    let tr = Transform::at(x0, p.lambda);
    let u0 = tr.u();
    if u0 >= 1.0 {
        return Err(Error::domain(format!(
            "x0 = {x0} is too large relative to lambda = {} to resolve 1 − F(x0)",
            p.lambda
        )));
    }
    let a = r / 2.0 + p.beta;
    let f1 = specfun::appell_f1(a, r, -r / 2.0, a + 1.0, u0, u0 / 2.0, SeriesControl::default())?
        .value;
    let ln_pref = p.beta.ln() + (r / 2.0 + 1.0) * LN_2 + r * p.lambda.ln() + a * tr.ln_u
        - (2.0 * p.beta + r).ln();
    Ok(ln_pref.exp() * f1)
}

/// Moment `E[X_{i:n}^r]` of the `i`-th order statistic of a sample of size `n`,
/// finite for `−2iβ < r < 1`.
pub fn order_stat_moment(i: u32, n: u32, r: f64, p: &Params) -> Result<f64> {
    check_r(r)?;
    if i == 0 || i > n {
        return Err(Error::domain(format!("order statistic index must satisfy 1 ≤ i ≤ n, got i = {i}, n = {n}")));
    }
    let lower = -2.0 * f64::from(i) * p.beta;
    if !(r > lower && r < 1.0) {
        return Err(window_error(r, lower, &format!("−2iβ = {lower}")));
    }
    let sum = pwm_sum(i - 1, r, n - i, p.beta)?;
    let ln_b = specfun::ln_beta(f64::from(i), f64::from(n - i + 1))?;
    Ok(p.beta * (p.lambda * SQRT_2).powf(r) * sum / ln_b.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(beta: f64, lambda: f64) -> Params {
        Params::new(beta, lambda).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn frozen_values() {
        assert!(close(pwm(1, 0.3, 2, &p(0.8, 2.0)).unwrap(), 0.105918733996963669955930309541, 1e-12));
        assert!(close(raw_moment(0.5, &p(0.38669, 80.68399)).unwrap(), 10.0940155092369465510841654017, 1e-12));
        assert!(close(cr_moment(0.5, 1.0).unwrap(), 1.85407467730137191843385, 1e-13));
        assert!(close(log_moment(&p(0.4, 80.0)).unwrap(), 3.90906239764979674095555756904, 1e-13));
        assert!(close(incomplete_moment(0.5, 2.0, &p(0.8, 1.0)).unwrap(), 0.561556687547498399057863855713, 1e-12));
        assert!(close(order_stat_moment(1, 3, 0.5, &p(1.0, 1.0)).unwrap(), 0.927037338650685959216925173597, 1e-12));
    }

    #[test]
    fn special_cases_agree() {
        let q = p(1.0, 2.5);
        for r in [-1.5, -0.5, 0.3, 0.9] {
            let cr = cr_moment(r, 2.5).unwrap();
            assert!(close(raw_moment(r, &q).unwrap(), cr, 1e-12), "r = {r}");
            let beta_form = 2.5f64.powf(r) / 2.0 * specfun::beta_fn((1.0 - r) / 2.0, 1.0 + r / 2.0).unwrap();
            assert!(close(cr, beta_form, 1e-12));
        }
        let q = p(0.7, 3.0);
        assert!(close(raw_moment(0.4, &q).unwrap(), pwm(0, 0.4, 0, &q).unwrap(), 1e-15));
        assert!(close(order_stat_moment(1, 1, 0.4, &q).unwrap(), raw_moment(0.4, &q).unwrap(), 1e-13));
        assert!(close(raw_moment(0.0, &q).unwrap(), 1.0, 1e-13));
        assert!(close(incomplete_moment(0.0, 4.0, &q).unwrap(), super::super::cdf(4.0, &q).unwrap(), 1e-13));
    }

    #[test]
    fn order_statistics_average_to_raw_moment() {
        let q = p(1.3, 0.7);
        let n = 4;
        let total: f64 = (1..=n).map(|i| order_stat_moment(i, n, 0.5, &q).unwrap()).sum();
        assert!(close(total / f64::from(n), raw_moment(0.5, &q).unwrap(), 1e-11));
    }

    #[test]
    fn incomplete_moment_tends_to_raw_moment() {
        let q = p(0.9, 1.0);
        let full = raw_moment(0.5, &q).unwrap();
        let part = incomplete_moment(0.5, 1e8, &q).unwrap();
        // remaining tail ≈ ∫ x^{r} βλ x^{-2} dx from 1e8
        assert!(part < full && close(part, full, 1e-3));
    }

    #[test]
    fn windows_are_enforced() {
        let q = p(0.5, 1.0);
        let msg = raw_moment(1.0, &q).unwrap_err().to_string();
        assert!(msg.contains("moment does not exist for r ≥ 1"), "{msg}");
        assert!(matches!(raw_moment(-1.0, &q), Err(Error::MomentDoesNotExist { .. })));
        assert!(raw_moment(-0.99, &q).is_ok());
        assert!(pwm(1, -1.5, 0, &q).is_ok());
        assert!(pwm(0, -1.5, 3, &q).is_err());
        assert!(order_stat_moment(2, 3, -1.5, &q).is_ok());
        assert!(order_stat_moment(1, 3, -1.5, &q).is_err());
        assert!(order_stat_moment(0, 3, 0.5, &q).is_err());
        assert!(cr_moment(-2.0, 1.0).is_err());
        assert!(incomplete_moment(3.0, 2.0, &q).is_ok());
        assert!(incomplete_moment(-1.0, 2.0, &q).is_err());
    }
}
