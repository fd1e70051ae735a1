//! The extended Cauchy-Rayleigh (ECR) distribution.
//!
//! `X ~ ECR(β, λ)` has distribution function `F(x) = (1 − λ/√(λ² + x²))^β`
//! on `x > 0`. The Cauchy-Rayleigh law is the case `β = 1`, and `λ` is a
//! pure scale parameter. Most quantities are written in terms of
//! `u = 1 − λ/√(λ² + x²) ∈ (0, 1)`, so that `F = u^β`.

mod moments;

pub use moments::{
    cr_moment, incomplete_moment, log_moment, order_stat_moment, pwm, raw_moment,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape `β` and scale `λ` of an ECR law. Both are positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    beta: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawParams {
    beta: f64,
    lambda: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.beta, raw.lambda)
    }
}

impl Params {
    pub fn new(beta: f64, lambda: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::domain(format!("beta must be positive and finite, got {beta}")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::domain(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self { beta, lambda })
    }

    /// The Cauchy-Rayleigh law with scale `lambda`.
    pub fn cauchy_rayleigh(lambda: f64) -> Result<Self> {
        Self::new(1.0, lambda)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Same shape, scale multiplied by `c`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        Self::new(self.beta, self.lambda * c)
    }
}

/// `u = 1 − λ/√(λ² + x²)` and `ln u`, both without cancellation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Transform {
    /// `√(λ² + x²)`
    pub s: f64,
    /// `1 − u = λ / s`
    pub w: f64,
    pub ln_u: f64,
}

impl Transform {
    pub(crate) fn at(x: f64, lambda: f64) -> Self {
        let s = lambda.hypot(x);
        let w = lambda / s;
        let ln_u = if w < 0.5 {
            (-w).ln_1p()
        } else {
            // u = x² / (s (s + λ))
            (x / s).ln() + (x / (s + lambda)).ln()
        };
        Self { s, w, ln_u }
    }

    pub(crate) fn u(&self) -> f64 {
        self.ln_u.exp()
    }
}

fn check_nonnegative(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("x must be non-negative, got {x}")));
    }
    Ok(())
}

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::domain(format!(
            "x must be positive (the density is undefined at 0), got {x}"
        )));
    }
    Ok(())
}

/// Distribution function `F(x) = u^β`.
pub fn cdf(x: f64, p: &Params) -> Result<f64> {
    check_nonnegative(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok((p.beta * Transform::at(x, p.lambda).ln_u).exp())
}

/// Survival function `1 − F(x)`, accurate in the far tail.
pub fn sf(x: f64, p: &Params) -> Result<f64> {
    check_nonnegative(x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(-(p.beta * Transform::at(x, p.lambda).ln_u).exp_m1())
}

pub fn log_pdf(x: f64, p: &Params) -> Result<f64> {
    check_positive(x)?;
    if x.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    let t = Transform::at(x, p.lambda);
    Ok(p.beta.ln() + p.lambda.ln() + x.ln() - 3.0 * t.s.ln() + (p.beta - 1.0) * t.ln_u)
}

/// Density `βλ x (λ² + x²)^{−3/2} u^{β−1}` for `x > 0`.
pub fn pdf(x: f64, p: &Params) -> Result<f64> {
    log_pdf(x, p).map(f64::exp)
}

/// Hazard rate `f(x) / (1 − F(x))`.
pub fn hrf(x: f64, p: &Params) -> Result<f64> {
    let lp = log_pdf(x, p)?;
    let surv = sf(x, p)?;
    Ok((lp - surv.ln()).exp())
}

/// Quantile function `λ √(v(2 − v)) / (1 − v)` with `v = q^{1/β}`.
pub fn quantile(q: f64, p: &Params) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("probability must lie in (0, 1), got {q}")));
    }
    let t = q.ln() / p.beta;
    let v = t.exp();
    // w = 1 - v, accurate when v is close to 1
    let w = -t.exp_m1();
    // quantiles below the smallest normal number are reported as that number
    Ok((p.lambda * (v * (1.0 + w)).sqrt() / w).max(f64::MIN_POSITIVE))
}

/// Closed-form median `λ √(2^{(β+1)/β} − 1) / (2^{1/β} − 1)`.
pub fn median(p: &Params) -> f64 {
    let inv = 1.0 / p.beta;
    let denom = (inv * std::f64::consts::LN_2).exp_m1();
    p.lambda * (2f64.powf(1.0 + inv) - 1.0).sqrt() / denom
}

/// Behaviour of the density as `x → 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum PdfZeroLimit {
    Infinite,
    Finite(f64),
    Zero,
}

impl PdfZeroLimit {
    pub fn value(&self) -> f64 {
        match self {
            PdfZeroLimit::Infinite => f64::INFINITY,
            PdfZeroLimit::Finite(v) => *v,
            PdfZeroLimit::Zero => 0.0,
        }
    }
}

pub fn pdf_zero_limit(p: &Params) -> PdfZeroLimit {
    if p.beta < 0.5 {
        PdfZeroLimit::Infinite
    } else if p.beta == 0.5 {
        PdfZeroLimit::Finite(std::f64::consts::SQRT_2 / (2.0 * p.lambda))
    } else {
        PdfZeroLimit::Zero
    }
}

/// Mode of the density, or `None` when `β ≤ 1/2` (the density then decreases
/// from its limit at zero and has no interior maximum).
pub fn mode(p: &Params) -> Option<f64> {
    let b = p.beta;
    if b <= 0.5 {
        return None;
    }
    let inner = (b + 1.0).powi(2) + (b - 1.0) * (b * b + 6.0 * b + 17.0).sqrt();
    Some(p.lambda / (2.0 * std::f64::consts::SQRT_2) * inner.max(0.0).sqrt())
}

/// Tail ratio `S(c x) / S(x)`, which tends to `1/c` as `x → ∞`.
pub fn tail_ratio(c: f64, x: f64, p: &Params) -> Result<f64> {
    if !(c > 0.0 && x > 0.0) {
        return Err(Error::domain(format!(
            "tail_ratio needs c > 0 and x > 0, got c = {c}, x = {x}"
        )));
    }
    if c == 1.0 {
        return Ok(1.0);
    }
    Ok(sf(c * x, p)? / sf(x, p)?)
}

/// Smallest and largest uniforms fed to the quantile function.
pub const UNIFORM_CLAMP: f64 = 1e-15;

/// Inverse-transform sampler with its own seeded generator.
#[derive(Debug, Clone)]
pub struct Sampler {
    params: Params,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(params: Params, seed: u64) -> Self {
        Self {
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn draw(&mut self) -> f64 {
        let u: f64 = self.rng.gen();
        let u = u.clamp(UNIFORM_CLAMP, 1.0 - UNIFORM_CLAMP);
        quantile(u, &self.params).expect("clamped uniform lies in (0, 1)")
    }

    pub fn draw_n(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw()).collect()
    }
}

/// `count` draws from `ECR(p)`, fully determined by `seed`.
pub fn sample(count: usize, p: &Params, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    Ok(Sampler::new(*p, seed).draw_n(count))
}
