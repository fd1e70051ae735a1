//! One-dimensional search routines shared by the estimators.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Found {
    pub x: f64,
    pub iterations: usize,
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<Found> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(Found { x: lo, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Found { x: hi, iterations: 0 });
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NotConverged {
            what: "bisection",
            iterations: 0,
            reason: format!("no sign change on [{lo}, {hi}]"),
            best: None,
        });
    }
    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(Found { x: mid, iterations: it });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Found { x: mid, iterations: it });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= xtol {
            return Ok(Found {
                x: 0.5 * (lo + hi),
                iterations: it,
            });
        }
    }
    Err(Error::NotConverged {
        what: "bisection",
        iterations: max_iter,
        reason: format!("bracket [{lo}, {hi}] still wider than {xtol}"),
        best: None,
    })
}

/// Settings for [`maximize`].
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Initial step used when expanding the bracket.
    pub step: f64,
    /// The search never leaves `[lower, upper]`.
    pub lower: f64,
    pub upper: f64,
    pub xtol: f64,
    pub max_iter: usize,
}

/// Maximizes a unimodal `f` starting from `x0`.
///
/// A three-point bracket is grown geometrically, narrowed by golden-section
/// steps, and finished by bisection on the sign of the derivative `df` when it
/// changes sign across the bracket.
pub fn maximize<F, D>(f: F, df: D, x0: f64, opts: SearchOptions) -> Result<Found>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut iterations = 0;
    let (mut a, mut b) = bracket(&eval, x0, &opts, &mut iterations)?;

    // golden section down to a coarse width
    let coarse = (opts.xtol * 1e6).max(1e-6 * (1.0 + a.abs().max(b.abs())));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while (b - a) > coarse && iterations < opts.max_iter {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }

    // widen until the derivative brackets the optimum
    let centre = 0.5 * (a + b);
    let mut half = 0.5 * (b - a);
    for _ in 0..64 {
        let (lo, hi) = ((centre - half).max(opts.lower), (centre + half).min(opts.upper));
        let (ga, gb) = (df(lo), df(hi));
        if ga > 0.0 && gb < 0.0 {
            let remaining = opts.max_iter.saturating_sub(iterations).max(1);
            let found = bisect(&df, lo, hi, opts.xtol, remaining)?;
            return Ok(Found {
                x: found.x,
                iterations: iterations + found.iterations,
            });
        }
        if !(ga.is_finite() && gb.is_finite()) || (lo <= opts.lower && hi >= opts.upper) {
            break;
        }
        half *= 2.0;
    }
    // derivative too flat to resolve: finish with golden section
    while (b - a) > opts.xtol && iterations < opts.max_iter {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    if (b - a) > opts.xtol {
        return Err(Error::NotConverged {
            what: "golden-section search",
            iterations,
            reason: format!("bracket [{a}, {b}] still wider than {}", opts.xtol),
            best: None,
        });
    }
    Ok(Found {
        x: 0.5 * (a + b),
        iterations,
    })
}

fn bracket<F: Fn(f64) -> f64>(
    f: &F,
    x0: f64,
    opts: &SearchOptions,
    iterations: &mut usize,
) -> Result<(f64, f64)> {
    let x0 = x0.clamp(opts.lower, opts.upper);
    let mut step = opts.step;
    let f0 = f(x0);
    let (mut lo, mut hi) = ((x0 - step).max(opts.lower), (x0 + step).min(opts.upper));
    let (mut flo, mut fhi) = (f(lo), f(hi));
    let mut mid = x0;
    let mut fmid = f0;
    loop {
        *iterations += 1;
        if fmid >= flo && fmid >= fhi && lo < mid && mid < hi {
            return Ok((lo, hi));
        }
        if *iterations > 200 {
            break;
        }
        step *= 2.0;
        if flo > fmid && flo >= fhi {
            if lo <= opts.lower {
                break;
            }
            hi = mid;
            fhi = fmid;
            mid = lo;
            fmid = flo;
            lo = (mid - step).max(opts.lower);
            flo = f(lo);
        } else if fhi > fmid {
            if hi >= opts.upper {
                break;
            }
            lo = mid;
            flo = fmid;
            mid = hi;
            fmid = fhi;
            hi = (mid + step).min(opts.upper);
            fhi = f(hi);
        } else {
            // flat region: widen symmetrically
            lo = (lo - step).max(opts.lower);
            hi = (hi + step).min(opts.upper);
            flo = f(lo);
            fhi = f(hi);
            if lo <= opts.lower && hi >= opts.upper {
                break;
            }
        }
    }
    Err(Error::NotConverged {
        what: "bracket search",
        iterations: *iterations,
        reason: format!(
            "no interior maximum found in [{}, {}]; the supremum lies on the boundary",
            opts.lower, opts.upper
        ),
        best: None,
    })
}
