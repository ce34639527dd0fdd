//! Parameter sweeps and their CSV form.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use super::{aggregate, run_records, Aggregate, ExperimentConfig};
use crate::{Error, Result, Scalar};

pub const CSV_COLUMNS: [&str; 11] = [
    "axis_value",
    "mean_k",
    "k_ci",
    "mean_rate",
    "rate_ci",
    "penalized_rate",
    "overflow_freq",
    "shortage_freq",
    "growth_ratio",
    "trials",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    U,
    Lambda,
    M,
    KMax,
    SnrDb,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::U => "u",
            SweepAxis::Lambda => "lambda",
            SweepAxis::M => "m",
            SweepAxis::KMax => "k_max",
            SweepAxis::SnrDb => "snr_db",
        }
    }

    fn is_integral(self) -> bool {
        matches!(self, SweepAxis::U | SweepAxis::M | SweepAxis::KMax)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "u" => Ok(SweepAxis::U),
            "lambda" => Ok(SweepAxis::Lambda),
            "m" => Ok(SweepAxis::M),
            "k_max" => Ok(SweepAxis::KMax),
            "snr_db" => Ok(SweepAxis::SnrDb),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sweep axis {s:?} (expected u, lambda, m, k_max or snr_db)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    /// For a λ sweep, the value with the largest mean sum rate.
    pub best_lambda: Option<f64>,
}

fn apply(cfg: &mut ExperimentConfig, axis: SweepAxis, value: f64) {
    match axis {
        SweepAxis::U => cfg.u = value as usize,
        SweepAxis::Lambda => cfg.lambda = value,
        SweepAxis::M => cfg.m = value as usize,
        SweepAxis::KMax => cfg.k_max = Some(value as usize),
        SweepAxis::SnrDb => cfg.snr_db = value,
    }
}

/// One aggregate per axis value. A `k_max` sweep reuses a single set of
/// trials, since the feedback cap does not change what happens in a trial.
pub fn sweep<T: Scalar>(template: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("sweep values must be strictly increasing".into()));
    }
    if axis.is_integral() && values.iter().any(|v| !(*v >= 0.0) || v.fract() != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "axis {axis} takes non-negative integers"
        )));
    }

    let mut rows = Vec::with_capacity(values.len());
    if axis == SweepAxis::KMax {
        let records = run_records::<T>(template)?;
        for &v in values {
            let mut cfg = template.clone();
            apply(&mut cfg, axis, v);
            rows.push(SweepRow {
                axis_value: v,
                aggregate: aggregate(&cfg, &records),
            });
        }
    } else {
        for &v in values {
            let mut cfg = template.clone();
            apply(&mut cfg, axis, v);
            let records = run_records::<T>(&cfg)?;
            rows.push(SweepRow {
                axis_value: v,
                aggregate: aggregate(&cfg, &records),
            });
        }
    }

    let best_lambda = (axis == SweepAxis::Lambda)
        .then(|| {
            rows.iter()
                .fold(None::<&SweepRow>, |best, r| match best {
                    Some(b) if b.aggregate.mean_sum_rate.mean >= r.aggregate.mean_sum_rate.mean => Some(b),
                    _ => Some(r),
                })
                .map(|r| r.axis_value)
        })
        .flatten();

    Ok(SweepTable {
        axis,
        seed: template.master_seed,
        rows,
        best_lambda,
    })
}

/// Nine significant digits, trailing zeros dropped.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

/// Writes `# key=value` provenance lines, the column header and one row per
/// axis value.
pub fn write_sweep_csv<W: Write>(out: &mut W, table: &SweepTable, provenance: &[(String, String)]) -> io::Result<()> {
    for (k, v) in provenance {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "# axis={}", table.axis)?;
    if let Some(best) = table.best_lambda {
        writeln!(out, "# best_lambda={}", format_sig(best))?;
    }
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for row in &table.rows {
        let a = &row.aggregate;
        let fields = [
            format_sig(row.axis_value),
            format_sig(a.mean_k.mean),
            format_sig(a.mean_k.ci95),
            format_sig(a.mean_sum_rate.mean),
            format_sig(a.mean_sum_rate.ci95),
            format_sig(a.penalized_rate),
            format_sig(a.overflow_freq),
            format_sig(a.shortage_freq),
            format_sig(a.growth_ratio.unwrap_or(f64::NAN)),
            a.trials.to_string(),
            table.seed.to_string(),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
