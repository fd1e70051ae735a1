//! Special functions needed by the closed-form moment expressions.
//!
//! Everything here is real-valued, pure and deterministic. The hypergeometric
//! series are only evaluated inside their disc of convergence; the Appell
//! function falls back to its Euler-type integral when the first argument is
//! close to one.

use crate::error::{Error, Result};
use crate::quad;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_617_6;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Truncation policy shared by the series in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Stop once this many consecutive terms are below `rel_tol` times the partial sum.
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    /// Number of consecutive small terms required before stopping.
    pub const QUIET_TERMS: usize = 3;

    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::domain(format!(
                "series tolerance must lie in (0, 1), got {rel_tol}"
            )));
        }
        if max_terms < 100 {
            return Err(Error::domain(format!(
                "series term cap must be at least 100, got {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

/// Value of a summed series together with the number of terms it consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} requires a positive finite argument, got {x}")))
    }
}

/// Natural logarithm of the gamma function for `x > 0` (Lanczos, g = 7, 9 terms).
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`, evaluated in log space.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    ln_beta(a, b).map(f64::exp)
}

pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    check_positive("beta_fn", a)?;
    check_positive("beta_fn", b)?;
    Ok(ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b))
}

/// Digamma function ψ(x) for `x > 0`.
///
/// Shifts the argument upward with ψ(x) = ψ(x + 1) − 1/x until it reaches 10,
/// then applies the asymptotic expansion.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli terms B_2k / (2k x^2k), k = 1..7
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    Ok(shift + x.ln() - 0.5 / x - tail)
}

/// Shared accumulator implementing the "three quiet terms" stopping rule.
struct SeriesAccumulator {
    sum: f64,
    quiet: usize,
    terms: usize,
    ctl: SeriesControl,
}

impl SeriesAccumulator {
    fn new(first: f64, ctl: SeriesControl) -> Self {
        Self {
            sum: first,
            quiet: 0,
            terms: 1,
            ctl,
        }
    }

    /// Adds a term; returns true when the series may stop.
    fn push(&mut self, term: f64) -> bool {
        self.sum += term;
        self.terms += 1;
        if term.abs() <= self.ctl.rel_tol * self.sum.abs() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= SeriesControl::QUIET_TERMS
    }

    fn exhausted(&self) -> bool {
        self.terms >= self.ctl.max_terms
    }
}

fn is_non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) by direct summation, `z ∈ [0, 1)`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64, ctl: SeriesControl) -> Result<SeriesSum> {
    if ![a, b, c, z].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("gauss_2f1 arguments must be finite"));
    }
    if is_non_positive_integer(c) {
        return Err(Error::domain(format!(
            "gauss_2f1 is undefined for non-positive integer c = {c}"
        )));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain(format!("gauss_2f1 requires z in [0, 1), got {z}")));
    }
    let mut acc = SeriesAccumulator::new(1.0, ctl);
    if z == 0.0 {
        return Ok(SeriesSum { value: 1.0, terms: 1 });
    }
    let mut term = 1.0;
    let mut n = 0.0;
    loop {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        n += 1.0;
        if term == 0.0 {
            // a or b is a non-positive integer: the series is a polynomial.
            acc.terms += 1;
            break;
        }
        if acc.push(term) {
            break;
        }
        if acc.exhausted() {
            return Err(Error::SeriesNotConverged {
                what: "gauss_2f1",
                partial: acc.sum,
                terms: acc.terms,
            });
        }
    }
    Ok(SeriesSum {
        value: acc.sum,
        terms: acc.terms,
    })
}

/// First argument above which [`appell_f1`] integrates instead of summing.
pub const APPELL_QUADRATURE_THRESHOLD: f64 = 0.95;

/// Appell hypergeometric function F₁(a; b₁, b₂; c; x, y) for `x, y ∈ [0, 1)`.
///
/// The double series is summed as Σₘ (a)ₘ(b₁)ₘ/((c)ₘ m!) xᵐ ₂F₁(a+m, b₂; c+m; y).
/// For `x > 0.95` the Euler integral
/// `∫₀¹ t^{a−1}(1−t)^{c−a−1}(1−xt)^{−b₁}(1−yt)^{−b₂} dt / B(a, c−a)` is used,
/// which needs `a > 0` and `c − a > 0`.
pub fn appell_f1(
    a: f64,
    b1: f64,
    b2: f64,
    c: f64,
    x: f64,
    y: f64,
    ctl: SeriesControl,
) -> Result<SeriesSum> {
    if ![a, b1, b2, c, x, y].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("appell_f1 arguments must be finite"));
    }
    if is_non_positive_integer(c) {
        return Err(Error::domain(format!(
            "appell_f1 is undefined for non-positive integer c = {c}"
        )));
    }
    if !(0.0..1.0).contains(&x) || !(0.0..1.0).contains(&y) {
        return Err(Error::domain(format!(
            "appell_f1 requires x, y in [0, 1), got ({x}, {y})"
        )));
    }
    if x > APPELL_QUADRATURE_THRESHOLD {
        return appell_f1_integral(a, b1, b2, c, x, y, ctl);
    }

    let mut outer = 1.0;
    let first = gauss_2f1(a, b2, c, y, ctl)?;
    let mut acc = SeriesAccumulator::new(first.value, ctl);
    let mut inner_terms = first.terms;
    let mut m = 0.0;
    loop {
        outer *= (a + m) * (b1 + m) / ((c + m) * (m + 1.0)) * x;
        m += 1.0;
        if outer == 0.0 {
            break;
        }
        let inner = gauss_2f1(a + m, b2, c + m, y, ctl)?;
        inner_terms += inner.terms;
        if acc.push(outer * inner.value) {
            break;
        }
        if acc.exhausted() {
            return Err(Error::SeriesNotConverged {
                what: "appell_f1",
                partial: acc.sum,
                terms: acc.terms + inner_terms,
            });
        }
    }
    Ok(SeriesSum {
        value: acc.sum,
        terms: acc.terms + inner_terms,
    })
}

fn appell_f1_integral(
    a: f64,
    b1: f64,
    b2: f64,
    c: f64,
    x: f64,
    y: f64,
    ctl: SeriesControl,
) -> Result<SeriesSum> {
    if !(a > 0.0 && c - a > 0.0) {
        return Err(Error::domain(format!(
            "appell_f1 integral form needs a > 0 and c - a > 0, got a = {a}, c = {c}"
        )));
    }
    let tol = ctl.rel_tol.max(1e-13);
    let integral = quad::integrate_power_ends(
        |t, one_minus_t| {
            // 1 - x t written to keep precision when both x and t approach one
            let dx = one_minus_t + (1.0 - x) * t;
            let dy = 1.0 - y * t;
            dx.powf(-b1) * dy.powf(-b2)
        },
        a - 1.0,
        c - a - 1.0,
        quad::Tolerance::relative(tol),
    )
    .map_err(|_| Error::SeriesNotConverged {
        what: "appell_f1 (integral form)",
        partial: f64::NAN,
        terms: ctl.max_terms,
    })?;
    let scale = ln_beta(a, c - a)?.exp();
    Ok(SeriesSum {
        value: integral.value / scale,
        terms: integral.evaluations,
    })
}

/// Lerch transcendent at z = 1/2: Φ(½, s, a) = Σₙ 2⁻ⁿ / (n + a)ˢ for `a > 0`.
pub fn lerch_phi_half(s: f64, a: f64, ctl: SeriesControl) -> Result<SeriesSum> {
    if !s.is_finite() {
        return Err(Error::domain("lerch_phi_half requires finite s"));
    }
    check_positive("lerch_phi_half", a)?;
    let mut acc = SeriesAccumulator::new(a.powf(-s), ctl);
    let mut weight = 1.0;
    let mut n = 0.0;
    loop {
        n += 1.0;
        weight *= 0.5;
        if acc.push(weight * (n + a).powf(-s)) {
            break;
        }
        if acc.exhausted() {
            return Err(Error::SeriesNotConverged {
                what: "lerch_phi_half",
                partial: acc.sum,
                terms: acc.terms,
            });
        }
    }
    Ok(SeriesSum {
        value: acc.sum,
        terms: acc.terms,
    })
}
