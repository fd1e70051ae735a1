//! Seeded Monte Carlo studies of the estimators.
//!
//! Every replication draws its own sample from a generator seeded with
//! [`child_seed`]`(master_seed, cell, replication)`, so results do not depend
//! on scheduling. Replications run in parallel on the current rayon pool and
//! are merged in index order.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::ecr::{Params, Sampler};
use crate::error::{Error, Result};
use crate::inference::{self, CsOutcome, Method};

/// Shape and scale values crossed to form the cells of a grid study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub betas: Vec<f64>,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// True parameters of a convergence study; ignored by grid studies.
    pub truth: Params,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub estimators: Vec<Method>,
    pub master_seed: u64,
    #[serde(default)]
    pub grid: Option<Grid>,
}

/// Smallest sample size a study accepts.
pub const MIN_SAMPLE_SIZE: usize = 5;

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::domain("replications must be at least 1"));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::domain("at least one sample size is required"));
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < MIN_SAMPLE_SIZE) {
            return Err(Error::domain(format!(
                "sample sizes must be at least {MIN_SAMPLE_SIZE}, got {n}"
            )));
        }
        if self.estimators.is_empty() {
            return Err(Error::domain("at least one estimator is required"));
        }
        if let Some(g) = &self.grid {
            if g.betas.is_empty() || g.lambdas.is_empty() {
                return Err(Error::domain("grid needs at least one beta and one lambda"));
            }
            for &b in &g.betas {
                Params::new(b, 1.0)?;
            }
            for &l in &g.lambdas {
                Params::new(1.0, l)?;
            }
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `m(m(m(master) ⊕ cell) ⊕ replication)` with `m` the SplitMix64 finalizer.
pub fn child_seed(master: u64, cell: usize, replication: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ cell as u64) ^ replication as u64)
}

/// One combination of true parameters and sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub index: usize,
    pub truth: Params,
    pub n: usize,
}

/// What one estimator produced on one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Estimate([f64; 2]),
    Failed,
    Uncorrectable,
}

/// Draws the sample of one replication.
pub fn replication_sample(master_seed: u64, cell: &Cell, replication: usize) -> Dataset {
    let seed = child_seed(master_seed, cell.index, replication);
    let xs = Sampler::new(cell.truth, seed).draw_n(cell.n);
    Dataset::new(xs).expect("sampler output is positive and finite")
}

/// Runs the requested estimators on one sample. ML is fitted once and shared
/// with the bias-corrected estimator.
pub fn estimate_all(data: &Dataset, estimators: &[Method]) -> Vec<Outcome> {
    let need_ml = estimators.iter().any(|m| matches!(m, Method::Ml | Method::CsMl));
    let ml = if need_ml {
        inference::fit_ml(data, None).ok().filter(|f| f.converged)
    } else {
        None
    };
    let est = |f: &inference::FitResult| Outcome::Estimate([f.params.beta(), f.params.lambda()]);
    estimators
        .iter()
        .map(|m| match m {
            Method::Ml => ml.as_ref().map_or(Outcome::Failed, est),
            Method::CsMl => match ml.clone().map(|f| inference::cs_correct(f, data)) {
                Some(Ok(CsOutcome::Corrected(f))) => est(&f),
                Some(Ok(CsOutcome::NotCorrectable { .. })) => Outcome::Uncorrectable,
                _ => Outcome::Failed,
            },
            Method::Pb => inference::fit_pb(data).map_or(Outcome::Failed, |f| est(&f)),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSummary {
    pub truth: f64,
    pub mean_bias: f64,
    pub relative_bias: f64,
    /// Standard deviation of the estimates (divisor `successes − 1`).
    pub ssd: f64,
    pub relative_ssd: f64,
    /// Monte Carlo standard error of `mean_bias`: `ssd / √successes`.
    pub mc_se: f64,
}

impl ParamSummary {
    fn from_estimates(values: &[f64], truth: f64) -> Self {
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let ssd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            f64::NAN
        };
        let bias = mean - truth;
        Self {
            truth,
            mean_bias: bias,
            relative_bias: bias / truth,
            ssd,
            relative_ssd: ssd / truth,
            mc_se: ssd / k.sqrt(),
        }
    }
}

/// Summary of one estimator in one cell. Failed and uncorrectable
/// replications are excluded from the moments but counted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell: usize,
    pub beta_true: f64,
    pub lambda_true: f64,
    pub n: usize,
    pub estimator: Method,
    pub replications: usize,
    pub successes: usize,
    pub failures: usize,
    pub uncorrectable: usize,
    pub beta: ParamSummary,
    pub lambda: ParamSummary,
}

fn summarize(cell: &Cell, estimator: Method, outcomes: &[Outcome]) -> CellSummary {
    let mut betas = Vec::new();
    let mut lambdas = Vec::new();
    let (mut failures, mut uncorrectable) = (0, 0);
    for o in outcomes {
        match o {
            Outcome::Estimate([b, l]) => {
                betas.push(*b);
                lambdas.push(*l);
            }
            Outcome::Failed => failures += 1,
            Outcome::Uncorrectable => uncorrectable += 1,
        }
    }
    CellSummary {
        cell: cell.index,
        beta_true: cell.truth.beta(),
        lambda_true: cell.truth.lambda(),
        n: cell.n,
        estimator,
        replications: outcomes.len(),
        successes: betas.len(),
        failures,
        uncorrectable,
        beta: ParamSummary::from_estimates(&betas, cell.truth.beta()),
        lambda: ParamSummary::from_estimates(&lambdas, cell.truth.lambda()),
    }
}

fn run_cells(cfg: &StudyConfig, cells: &[Cell]) -> Vec<CellSummary> {
    let reps = cfg.replications;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..reps).map(move |r| (c, r)))
        .collect();
    let results: Vec<Vec<Outcome>> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let sample = replication_sample(cfg.master_seed, &cells[c], r);
            estimate_all(&sample, &cfg.estimators)
        })
        .collect();
    let mut out = Vec::with_capacity(cells.len() * cfg.estimators.len());
    for (c, cell) in cells.iter().enumerate() {
        let block = &results[c * reps..(c + 1) * reps];
        for (e, &method) in cfg.estimators.iter().enumerate() {
            let outcomes: Vec<Outcome> = block.iter().map(|o| o[e]).collect();
            out.push(summarize(cell, method, &outcomes));
        }
    }
    out
}

/// One cell per sample size at the configured truth.
pub fn run_convergence_study(cfg: &StudyConfig) -> Result<Vec<CellSummary>> {
    cfg.validate()?;
    let cells: Vec<Cell> = cfg
        .sample_sizes
        .iter()
        .enumerate()
        .map(|(index, &n)| Cell {
            index,
            truth: cfg.truth,
            n,
        })
        .collect();
    Ok(run_cells(cfg, &cells))
}

/// One cell per (β, λ, n), with `n` varying fastest and `β` slowest.
pub fn run_grid_study(cfg: &StudyConfig) -> Result<Vec<CellSummary>> {
    cfg.validate()?;
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| Error::domain("grid study needs a grid in the configuration"))?;
    let mut cells = Vec::new();
    for &b in &grid.betas {
        for &l in &grid.lambdas {
            for &n in &cfg.sample_sizes {
                cells.push(Cell {
                    index: cells.len(),
                    truth: Params::new(b, l)?,
                    n,
                });
            }
        }
    }
    Ok(run_cells(cfg, &cells))
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub const CSV_HEADER: [&str; 14] = [
    "cell",
    "beta_true",
    "lambda_true",
    "n",
    "estimator",
    "parameter",
    "mean_bias",
    "relative_bias",
    "ssd",
    "relative_ssd",
    "failures",
    "uncorrectable",
    "successes",
    "mc_se",
];

/// Tidy CSV: one row per cell, estimator and parameter.
pub fn write_csv<W: Write>(summaries: &[CellSummary], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for s in summaries {
        for (name, p) in [("beta", &s.beta), ("lambda", &s.lambda)] {
            w.write_record([
                s.cell.to_string(),
                s.beta_true.to_string(),
                s.lambda_true.to_string(),
                s.n.to_string(),
                s.estimator.label().to_string(),
                name.to_string(),
                p.mean_bias.to_string(),
                p.relative_bias.to_string(),
                p.ssd.to_string(),
                p.relative_ssd.to_string(),
                s.failures.to_string(),
                s.uncorrectable.to_string(),
                s.successes.to_string(),
                p.mc_se.to_string(),
            ])?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> StudyConfig {
        StudyConfig {
            truth: Params::new(0.5, 0.6).unwrap(),
            sample_sizes: vec![10, 30],
            replications: 20,
            estimators: Method::ALL.to_vec(),
            master_seed: 7,
            grid: None,
        }
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(child_seed(1, 0, 0), child_seed(1, 0, 1));
        assert_ne!(child_seed(1, 0, 1), child_seed(1, 1, 0));
        assert_eq!(child_seed(5, 3, 9), child_seed(5, 3, 9));
    }

    #[test]
    fn accounting_and_determinism() {
        let a = run_convergence_study(&cfg()).unwrap();
        let b = with_threads(1, || run_convergence_study(&cfg()).unwrap()).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert_eq!(a.len(), 6);
        for s in &a {
            assert_eq!(s.successes + s.failures + s.uncorrectable, s.replications);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        c.sample_sizes = vec![4];
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.replications = 0;
        assert!(c.validate().is_err());
        assert!(run_grid_study(&cfg()).is_err());
        let json = r#"{"truth":{"beta":0.5,"lambda":0.6},"sample_sizes":[20],
            "replications":3,"estimators":["ML","cs-ml","pb"],"master_seed":1}"#;
        let c: StudyConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.estimators, Method::ALL.to_vec());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = run_convergence_study(&cfg()).unwrap();
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("cell,beta_true,lambda_true,n,estimator,parameter,mean_bias"));
        assert_eq!(text.lines().count(), 1 + 12);
    }
}
