//! Samples of positive observations: parsing, the bundled survival data set
//! and descriptive statistics.

use serde::Serialize;

use crate::error::{Error, Result};

/// Survival times (in days) of 66 patients, ordered.
pub const CROWLEY_HU: [f64; 66] = [
    1.0, 1.0, 2.0, 2.0, 2.0, 4.0, 4.0, 5.0, 5.0, 7.0, 8.0, 11.0, 15.0, 15.0, 15.0, 16.0, 17.0,
    20.0, 20.0, 27.0, 29.0, 31.0, 34.0, 35.0, 36.0, 38.0, 39.0, 42.0, 44.0, 49.0, 50.0, 52.0,
    57.0, 60.0, 65.0, 67.0, 67.0, 68.0, 71.0, 71.0, 76.0, 77.0, 79.0, 80.0, 84.0, 89.0, 95.0,
    99.0, 101.0, 109.0, 148.0, 152.0, 187.0, 206.0, 218.0, 262.0, 284.0, 284.0, 307.0, 333.0,
    339.0, 674.0, 732.0, 851.0, 1031.0, 1386.0,
];

/// A non-empty sample of positive, finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl Dataset {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateData("the sample is empty".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::domain(format!(
                "observation {} is {v}; all observations must be positive and finite",
                i + 1
            )));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { values, sorted })
    }

    pub fn crowley_hu() -> Self {
        Self::new(CROWLEY_HU.to_vec()).expect("bundled data are valid")
    }

    /// Parses numbers separated by whitespace or commas. Text after `#` on a
    /// line is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("");
            for token in content
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
            {
                let v: f64 = token.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("cannot parse {token:?} as a number"),
                })?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("observation {token} is not positive and finite"),
                    });
                }
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(Error::DegenerateData("input contains no observations".into()));
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observations in input order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Observations in increasing order.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn describe(&self) -> Summary {
        summarize(&self.sorted)
    }
}

/// Sample skewness and kurtosis under the two usual conventions.
///
/// `Moment` uses the biased central moments: `g1 = m3 / m2^{3/2}` and
/// `b2 = m4 / m2²` (not excess). `Adjusted` is the bias-corrected `G1` and
/// `G2 + 3`, the kurtosis again reported on the non-excess scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Moment,
    Adjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shape {
    pub convention: Convention,
    pub skewness: f64,
    pub kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Unbiased variance (divisor `n − 1`).
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Moment convention first, then adjusted.
    pub shape: [Shape; 2],
}

fn summarize(sorted: &[f64]) -> Summary {
    let n = sorted.len();
    let nf = n as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in sorted {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = if n > 1 { m2 / (nf - 1.0) } else { f64::NAN };
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let g1 = m3 / m2.powf(1.5);
    let b2 = m4 / (m2 * m2);
    let big_g1 = if n > 2 {
        g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
    } else {
        f64::NAN
    };
    let big_g2 = if n > 3 {
        (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)) * ((nf + 1.0) * (b2 - 3.0) + 6.0)
    } else {
        f64::NAN
    };
    Summary {
        n,
        mean,
        median,
        variance,
        min: sorted[0],
        max: sorted[n - 1],
        shape: [
            Shape {
                convention: Convention::Moment,
                skewness: g1,
                kurtosis: b2,
            },
            Shape {
                convention: Convention::Adjusted,
                skewness: big_g1,
                kurtosis: big_g2 + 3.0,
            },
        ],
    }
}
