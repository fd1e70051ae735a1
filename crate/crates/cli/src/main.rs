//! `ecr-lab`: fitting, sampling, moments and goodness of fit for the
//! extended Cauchy-Rayleigh distribution.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ecr_core::data::Dataset;
use ecr_core::ecr::{self, Params};
use ecr_core::gof::{self, Model};
use ecr_core::inference::{self, Method};
use ecr_core::sim::{self, StudyConfig};

const SCHEMA: &str = "ecr-lab/1";
const EMBEDDED: &str = "embedded:crowley-hu";
const THREADS_VAR: &str = "ECR_LAB_THREADS";

#[derive(Parser)]
#[command(name = "ecr-lab", version, about = "Extended Cauchy-Rayleigh toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of a sample.
    Describe(DataArgs),
    /// Fit a model by maximum likelihood (or an ECR-specific method).
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Ml)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = ModelArg::Ecr)]
        model: ModelArg,
    },
    /// Draw a seeded ECR sample.
    Sample {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Raw, log, incomplete, order-statistic and probability weighted moments.
    Moments {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        lambda: f64,
        /// Order of the power moments.
        #[arg(long, allow_negative_numbers = true)]
        r: Option<f64>,
        /// Upper limit of the incomplete moment.
        #[arg(long)]
        x0: Option<f64>,
        /// `I N`: the I-th smallest of N.
        #[arg(long, num_args = 2, value_names = ["I", "N"])]
        order_stat: Option<Vec<u32>>,
        /// `S T`: E[X^r F^S (1 − F)^T].
        #[arg(long, num_args = 2, value_names = ["S", "T"])]
        pwm: Option<Vec<u32>>,
    },
    /// Fit all comparison models and rank them by goodness of fit.
    Gof(DataArgs),
    /// Scaled total time on test curve.
    Ttt(DataArgs),
    /// Run a Monte Carlo study described by a JSON configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Data file (`-` for standard input); defaults to the bundled survival data.
    input: Option<PathBuf>,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args, Clone, Copy)]
struct FormatArgs {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ml,
    Csml,
    Pb,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ml => Method::Ml,
            MethodArg::Csml => Method::CsMl,
            MethodArg::Pb => Method::Pb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ecr,
    Cr,
    Weibull,
    Gamma,
    Lognormal,
    Ee,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ecr => Model::Ecr,
            ModelArg::Cr => Model::Cr,
            ModelArg::Weibull => Model::Weibull,
            ModelArg::Gamma => Model::Gamma,
            ModelArg::Lognormal => Model::LogNormal,
            ModelArg::Ee => Model::Ee,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

impl FormatArgs {
    fn resolve(self, default: Format) -> Format {
        match (self.json, self.csv) {
            (true, _) => Format::Json,
            (_, true) => Format::Csv,
            _ => default,
        }
    }
}

struct Input {
    data: Dataset,
    source: String,
}

fn load(path: Option<&Path>) -> anyhow::Result<Input> {
    let Some(path) = path else {
        return Ok(Input {
            data: Dataset::crowley_hu(),
            source: EMBEDDED.into(),
        });
    };
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("cannot read standard input")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?
    };
    let data = Dataset::parse(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(Input {
        data,
        source: path.display().to_string(),
    })
}

fn emit_json(body: Value) -> anyhow::Result<()> {
    let mut doc = json!({ "schema": SCHEMA });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
        doc.extend(body);
    }
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn emit_csv<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn describe(args: DataArgs) -> anyhow::Result<()> {
    let input = load(args.input.as_deref())?;
    let s = input.data.describe();
    if args.format.resolve(Format::Json) == Format::Csv {
        let mut rows = vec![
            ("n", s.n as f64),
            ("mean", s.mean),
            ("median", s.median),
            ("variance", s.variance),
            ("min", s.min),
            ("max", s.max),
        ];
        let [moment, adjusted] = &s.shape;
        rows.extend([
            ("skewness_moment", moment.skewness),
            ("kurtosis_moment", moment.kurtosis),
            ("skewness_adjusted", adjusted.skewness),
            ("kurtosis_adjusted", adjusted.kurtosis),
        ]);
        return emit_csv(&["statistic", "value"], rows);
    }
    emit_json(json!({
        "command": "describe",
        "source": input.source,
        "summary": s,
        "variance_defined": s.n > 1,
    }))
}

fn fit(args: DataArgs, method: MethodArg, model: ModelArg) -> anyhow::Result<()> {
    let input = load(args.input.as_deref())?;
    let data = &input.data;
    let model = Model::from(model);
    let method = Method::from(method);
    let result = match (model, method) {
        (Model::Ecr, Method::Ml) => {
            let fit = inference::fit_ml(data, None)?;
            let ci = inference::confidence_intervals(&fit, 0.95)?;
            json!({ "fit": fit, "intervals_95": { "beta": ci[0], "lambda": ci[1] } })
        }
        (Model::Ecr, Method::CsMl) => json!({ "fit": inference::fit_cs_ml(data)? }),
        (Model::Ecr, Method::Pb) => json!({ "fit": inference::fit_pb(data)? }),
        (m, Method::Ml) => json!({ "fit": m.fit(data)? }),
        (m, other) => bail!("method {other} applies only to the ecr model, not {}", m.name()),
    };
    let mut body = json!({
        "command": "fit",
        "source": input.source,
        "n": data.len(),
        "model": model,
        "method": method,
    });
    if let (Value::Object(b), Value::Object(r)) = (&mut body, result) {
        b.extend(r);
    }
    emit_json(body)
}

fn sample(beta: f64, lambda: f64, n: usize, seed: u64, format: FormatArgs) -> anyhow::Result<()> {
    let p = Params::new(beta, lambda)?;
    let xs = ecr::sample(n, &p, seed)?;
    if format.resolve(Format::Csv) == Format::Json {
        return emit_json(json!({
            "command": "sample",
            "params": p,
            "seed": seed,
            "values": xs,
        }));
    }
    emit_csv(&["x"], xs.into_iter().map(|x| (x,)))
}

fn moments(
    beta: f64,
    lambda: f64,
    r: Option<f64>,
    x0: Option<f64>,
    order_stat: Option<Vec<u32>>,
    pwm: Option<Vec<u32>>,
) -> anyhow::Result<()> {
    let p = Params::new(beta, lambda)?;
    if r.is_none() && (x0.is_some() || order_stat.is_some() || pwm.is_some()) {
        bail!("--x0, --order-stat and --pwm need --r");
    }
    let mut body = json!({
        "command": "moments",
        "params": p,
        "window": format!("{} < r < 1", -2.0 * beta),
        "log_moment": ecr::log_moment(&p)?,
        "median": ecr::median(&p),
        "mode": ecr::mode(&p),
        "pdf_at_zero": ecr::pdf_zero_limit(&p),
    });
    let obj = body.as_object_mut().expect("object literal");
    if let Some(r) = r {
        obj.insert("r".into(), json!(r));
        obj.insert("raw_moment".into(), json!(ecr::raw_moment(r, &p)?));
        if let Some(x0) = x0 {
            obj.insert(
                "incomplete_moment".into(),
                json!({ "x0": x0, "value": ecr::incomplete_moment(r, x0, &p)? }),
            );
        }
        if let Some(v) = order_stat {
            let (i, n) = (v[0], v[1]);
            obj.insert(
                "order_stat_moment".into(),
                json!({ "i": i, "n": n, "value": ecr::order_stat_moment(i, n, r, &p)? }),
            );
        }
        if let Some(v) = pwm {
            let (s, t) = (v[0], v[1]);
            obj.insert(
                "pwm".into(),
                json!({ "s": s, "t": t, "value": ecr::pwm(s, r, t, &p)? }),
            );
        }
    }
    emit_json(body)
}

fn gof_cmd(args: DataArgs) -> anyhow::Result<()> {
    let input = load(args.input.as_deref())?;
    let comparisons = gof::fit_comparison_models(&input.data);
    let lr = inference::lr_test_cr(&input.data).ok();
    if args.format.resolve(Format::Json) == Format::Csv {
        let rows: Vec<_> = comparisons
            .iter()
            .filter_map(|c| c.report.as_ref().map(|r| (c.model.name(), r)))
            .map(|(m, r)| (m, r.wstar, r.astar, r.ks, r.aic, r.caic, r.bic, r.hqic, r.loglik))
            .collect();
        return emit_csv(
            &["model", "wstar", "astar", "ks", "aic", "caic", "bic", "hqic", "loglik"],
            rows,
        );
    }
    emit_json(json!({
        "command": "gof",
        "source": input.source,
        "n": input.data.len(),
        "models": comparisons,
        "lr_test_cr": lr,
    }))
}

fn ttt(args: DataArgs) -> anyhow::Result<()> {
    let input = load(args.input.as_deref())?;
    let points = gof::ttt_transform(&input.data);
    if args.format.resolve(Format::Csv) == Format::Json {
        let pts: Vec<_> = points.iter().map(|&(u, g)| json!({ "r_over_n": u, "g": g })).collect();
        return emit_json(json!({ "command": "ttt", "source": input.source, "points": pts }));
    }
    emit_csv(&["r_over_n", "g"], points)
}

fn threads() -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .with_context(|| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn simulate(config: &Path, output: Option<&Path>) -> anyhow::Result<()> {
    let text =
        std::fs::read_to_string(config).with_context(|| format!("cannot read {}", config.display()))?;
    let cfg: StudyConfig = serde_json::from_str(&text)
        .with_context(|| format!("invalid study configuration {}", config.display()))?;
    cfg.validate()?;
    let run = || {
        if cfg.grid.is_some() {
            sim::run_grid_study(&cfg)
        } else {
            sim::run_convergence_study(&cfg)
        }
    };
    let rows = match threads()? {
        Some(n) => sim::with_threads(n, run)??,
        None => run()?,
    };
    match output {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            sim::write_csv(&rows, io::BufWriter::new(file))?;
        }
        None => sim::write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Describe(args) => describe(args),
        Command::Fit { data, method, model } => fit(data, method, model),
        Command::Sample {
            beta,
            lambda,
            n,
            seed,
            format,
        } => sample(beta, lambda, n, seed, format),
        Command::Moments {
            beta,
            lambda,
            r,
            x0,
            order_stat,
            pwm,
        } => moments(beta, lambda, r, x0, order_stat, pwm),
        Command::Gof(args) => gof_cmd(args),
        Command::Ttt(args) => ttt(args),
        Command::Simulate { config, output } => simulate(&config, output.as_deref()),
    }
}

/// 3 for numerical failures, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<ecr_core::Error>())
        .any(|e| e.is_numerical());
    if numerical {
        3
    } else {
        2
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
            || e.downcast_ref::<csv::Error>().is_some_and(|e| {
                matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
            })
            || e.downcast_ref::<serde_json::Error>()
                .is_some_and(|e| e.io_error_kind() == Some(io::ErrorKind::BrokenPipe))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
