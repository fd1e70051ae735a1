//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! [`integrate_power_ends`] handles integrands with algebraic endpoint
//! behaviour `t^α (1 − t)^γ` on `[0, 1]` by a power substitution on each half,
//! which turns the singular factors into constants.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_intervals: 4_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lo,
        hi,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lo, hi]` with global adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Quadrature> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::domain("quadrature limits must be finite"));
    }
    if lo == hi {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let mut segments = vec![kronrod(&f, lo, hi)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::NotConverged {
                what: "quadrature",
                iterations: segments.len(),
                reason: "integrand produced a non-finite value".into(),
                best: None,
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Quadrature {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::NotConverged {
                what: "quadrature",
                iterations: segments.len(),
                reason: format!("estimated error {error:e} on value {value:e}"),
                best: None,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval cannot be split further in floating point.
            return Ok(Quadrature {
                value,
                abs_error: error,
                evaluations,
            });
        }
        segments.push(kronrod(&f, seg.lo, mid));
        segments.push(kronrod(&f, mid, seg.hi));
        evaluations += 30;
    }
}

/// Computes `∫₀¹ t^α (1 − t)^γ g(t, 1 − t) dt` for `α, γ > −1`.
///
/// `g` receives both `t` and `1 − t`, each computed without cancellation, and
/// should be smooth on the closed interval.
pub fn integrate_power_ends<G: Fn(f64, f64) -> f64>(
    g: G,
    alpha: f64,
    gamma: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    if !(alpha > -1.0 && gamma > -1.0) {
        return Err(Error::domain(format!(
            "endpoint exponents must exceed -1, got ({alpha}, {gamma})"
        )));
    }
    let ea = alpha + 1.0;
    let eg = gamma + 1.0;
    // t = s^{1/ea} on [0, 1/2]: t^α dt = ds / ea.
    let left = integrate(
        |s| {
            let t = s.powf(1.0 / ea);
            let w = 1.0 - t;
            w.powf(gamma) * g(t, w) / ea
        },
        0.0,
        0.5f64.powf(ea),
        tol,
    )?;
    // 1 - t = z^{1/eg} on [1/2, 1]: (1 - t)^γ dt = dz / eg.
    let right = integrate(
        |z| {
            let w = z.powf(1.0 / eg);
            let t = 1.0 - w;
            t.powf(alpha) * g(t, w) / eg
        },
        0.0,
        0.5f64.powf(eg),
        tol,
    )?;
    Ok(Quadrature {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
        evaluations: left.evaluations + right.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| 3.0 * x * x, 0.0, 2.0, Tolerance::relative(1e-14)).unwrap();
        assert!((q.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let q = integrate(|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI, Tolerance { abs: 1e-13, ..Tolerance::relative(1e-12) })
            .unwrap();
        assert!(q.value.abs() < 1e-11);
    }

    #[test]
    fn singular_endpoints() {
        // ∫ t^{-1/2} (1 - t)^{-1/2} = π
        let q = integrate_power_ends(|_, _| 1.0, -0.5, -0.5, Tolerance::relative(1e-13)).unwrap();
        assert!((q.value - std::f64::consts::PI).abs() < 1e-12);
        assert!(integrate_power_ends(|_, _| 1.0, -1.0, 0.0, Tolerance::relative(1e-10)).is_err());
    }
}
