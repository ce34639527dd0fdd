mod output;
mod settings;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use osdma_core::analysis::{capacity_envelope, overflow_bound, ExpectedK};
use osdma_core::codebook::{generate_codebook, load_codebook, min_distance};
use osdma_core::rng::{make_substream, SeedSpec, StreamPurpose};
use osdma_core::sim::{self, format_sig, write_sweep_csv, ExperimentConfig, SweepAxis};
use osdma_core::thresholds::{design_thresholds, feedback_load};
use serde_json::{json, Value};

use output::Format;
use settings::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<osdma_core::Error> for CliError {
    fn from(e: osdma_core::Error) -> Self {
        if e.is_precondition() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

/// Threshold-feedback opportunistic SDMA simulator.
#[derive(Parser, Debug)]
#[command(name = "osdma", author, version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key=value` config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Worker threads for Monte Carlo trials (default: all cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Master seed (default: $OSDMA_SEED, else 1).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct Experiment {
    /// Number of users U.
    #[arg(long)]
    u: Option<usize>,

    /// Transmit antennas N_t.
    #[arg(long)]
    n_t: Option<usize>,

    /// Number of sub-codebooks M.
    #[arg(long)]
    m: Option<usize>,

    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,

    /// Threshold tuning parameter λ.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,

    #[arg(long)]
    trials: Option<usize>,

    /// threshold-feedback, all-user-feedback or osdma-classic.
    #[arg(long)]
    mode: Option<String>,

    /// Feedback cap used for the overflow frequency.
    #[arg(long)]
    k_max: Option<usize>,

    /// Feedback penalty per iteration.
    #[arg(long)]
    alpha: Option<f64>,

    #[arg(long)]
    iterations: Option<usize>,

    /// Draw a new codebook for every trial (true) or share one seeded codebook.
    #[arg(long)]
    fresh_codebook: Option<bool>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded random codebook file.
    CodebookGen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_t: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Validate a codebook file and report its minimum distance.
    CodebookInspect {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Design the power and quantization-error thresholds.
    Thresholds {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
    },
    /// Monte Carlo feedback load next to its analytical bounds.
    FeedbackStats {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
    },
    /// Chernoff bound on the feedback-overflow probability.
    Overflow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        /// Mean feedback count (default: the design bound N·N_t).
        #[arg(long)]
        expected_k: Option<f64>,
    },
    /// Sum capacity versus U, with the asymptotic envelope in the header.
    Capacity {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        /// Comma-separated user counts (default: the configured u).
        #[arg(long)]
        values: Option<String>,
    },
    /// Sweep one parameter and emit one CSV row per value.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        /// u, lambda, m, k_max or snr_db.
        #[arg(long)]
        axis: String,
        /// Comma-separated, strictly increasing axis values.
        #[arg(long)]
        values: String,
    },
}

fn settings(common: &Common, exp: &Experiment) -> Result<Settings, CliError> {
    let mut s = Settings::load(common.config.as_deref())?;
    s.set_opt("seed", common.seed)?;
    s.set_opt("u", exp.u)?;
    s.set_opt("n_t", exp.n_t)?;
    s.set_opt("m", exp.m)?;
    s.set_opt("snr_db", exp.snr_db)?;
    s.set_opt("lambda", exp.lambda)?;
    s.set_opt("trials", exp.trials)?;
    s.set_opt("mode", exp.mode.as_deref())?;
    s.set_opt("k_max", exp.k_max)?;
    s.set_opt("alpha", exp.alpha)?;
    s.set_opt("iterations", exp.iterations)?;
    s.set_opt("fresh_codebook", exp.fresh_codebook)?;
    Ok(s)
}

fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("invalid value {v:?} in --values: {e}")))
        })
        .collect()
}

fn emit_record(common: &Common, provenance: &[(String, String)], result: Value, default: Format) -> Result<(), CliError> {
    let mut out = output::open(common.output.as_deref())?;
    match common.format.unwrap_or(default) {
        Format::Json => output::write_json(&mut out, provenance, result)?,
        Format::Csv => output::write_record_csv(&mut out, provenance, &result)?,
    }
    out.flush()?;
    Ok(())
}

fn to_value<S: serde::Serialize>(v: &S) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Runtime(format!("serialization failed: {e}")))
}

fn run_sweep(
    common: &Common,
    s: &Settings,
    cfg: &ExperimentConfig,
    command: &str,
    axis: SweepAxis,
    values: &[f64],
    extra: Vec<(String, String)>,
) -> Result<(), CliError> {
    let table = sim::with_workers(common.workers, || sim::sweep::<f64>(cfg, axis, values))??;
    let mut provenance = s.provenance(command);
    provenance.push(("values".into(), values.iter().map(|v| format_sig(*v)).collect::<Vec<_>>().join(";")));
    provenance.extend(extra);
    let mut out = output::open(common.output.as_deref())?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => write_sweep_csv(&mut out, &table, &provenance)?,
        Format::Json => output::write_json(&mut out, &provenance, to_value(&table)?)?,
    }
    out.flush()?;
    Ok(())
}

fn codebook_gen(common: &Common, n_t: Option<usize>, m: Option<usize>) -> Result<(), CliError> {
    let mut s = Settings::load(common.config.as_deref())?;
    s.set_opt("seed", common.seed)?;
    s.set_opt("n_t", n_t)?;
    s.set_opt("m", m)?;
    let mut rng = make_substream(SeedSpec::tagged(s.seed()?, StreamPurpose::FixedCodebook, 0));
    let cb = generate_codebook::<f64, _>(s.n_t()?, s.m()?, &mut rng)?;
    let mut out = output::open(common.output.as_deref())?;
    out.write_all(cb.to_text().as_bytes())?;
    out.flush()?;
    Ok(())
}

fn codebook_inspect(common: &Common, input: &Path) -> Result<(), CliError> {
    let cb = load_codebook::<f64>(input)?;
    let stats = min_distance(&cb);
    let provenance = vec![
        ("command".to_string(), "codebook-inspect".to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("input".to_string(), input.display().to_string()),
    ];
    let result = json!({
        "n_t": cb.n_t(),
        "m": cb.m(),
        "codewords": cb.n_total(),
        "valid": true,
        "min_distance": stats.min_distance,
        "argmin_pair": stats.argmin_pair,
    });
    emit_record(common, &provenance, result, Format::Json)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::CodebookGen { common, n_t, m } => codebook_gen(&common, n_t, m),
        Command::CodebookInspect { common, input } => codebook_inspect(&common, &input),
        Command::Thresholds { common, exp } => {
            let s = settings(&common, &exp)?;
            let (u, n_t, m) = (s.u()?, s.n_t()?, s.m()?);
            let th = design_thresholds(u, n_t, s.lambda()?)?;
            let bits = ((m * n_t) as f64).log2();
            let load = feedback_load(&th, m, bits)?;
            let result = json!({ "thresholds": to_value(&th)?, "feedback_load": to_value(&load)? });
            emit_record(&common, &s.provenance("thresholds"), result, Format::Json)
        }
        Command::FeedbackStats { common, exp } => {
            let s = settings(&common, &exp)?;
            let cfg = s.experiment()?;
            cfg.validate()?;
            let th = cfg.thresholds::<f64>()?;
            let m = cfg.effective_m();
            let load = feedback_load(&th, m, ((m * cfg.n_t) as f64).log2())?;
            let res = sim::with_workers(common.workers, || sim::run_experiment::<f64>(&cfg))??;
            let result = json!({
                "thresholds": to_value(&th)?,
                "feedback_load": to_value(&load)?,
                "aggregate": to_value(&res.aggregate)?,
            });
            emit_record(&common, &s.provenance("feedback-stats"), result, Format::Json)
        }
        Command::Overflow { common, exp, expected_k } => {
            let s = settings(&common, &exp)?;
            let (u, n_t, m) = (s.u()?, s.n_t()?, s.m()?);
            let k_max = s
                .k_max()?
                .ok_or_else(|| CliError::Usage("overflow needs --k-max".into()))?;
            let expected = match expected_k {
                Some(k) => ExpectedK::Measured(k),
                None => ExpectedK::DesignBound { n_t, m },
            };
            let bound = overflow_bound(u, expected, k_max)?;
            let mut provenance = s.provenance("overflow");
            provenance.push(("expected_k".into(), format_sig(expected.value())));
            emit_record(&common, &provenance, to_value(&bound)?, Format::Json)
        }
        Command::Capacity { common, exp, values } => {
            let s = settings(&common, &exp)?;
            let cfg = s.experiment()?;
            let values = match values {
                Some(v) => parse_values(&v)?,
                None => vec![cfg.u as f64],
            };
            let mut extra = Vec::new();
            if cfg.n_t >= 2 {
                let env = capacity_envelope::<f64>(cfg.n_t, cfg.effective_m())?;
                extra.push(("envelope_lower_ratio".into(), format_sig(env.lower_ratio)));
                extra.push(("envelope_upper_ratio".into(), format_sig(env.upper_ratio)));
            }
            run_sweep(&common, &s, &cfg, "capacity", SweepAxis::U, &values, extra)
        }
        Command::Sweep { common, exp, axis, values } => {
            let s = settings(&common, &exp)?;
            let cfg = s.experiment()?;
            let axis: SweepAxis = axis.parse()?;
            let values = parse_values(&values)?;
            run_sweep(&common, &s, &cfg, "sweep", axis, &values, Vec::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("osdma: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
