//! Monte Carlo experiment engine.
//!
//! A trial draws `U` channels from substream `trial`, builds every user's
//! report, groups feedback users by codeword and schedules one sub-codebook.
//! Trials run on a rayon pool in any order; results are collected in trial
//! order and reduced with pairwise sums, so output is independent of the
//! worker count.

mod stats;
mod sweep;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::feedback_count;
use crate::channel::sample_decomposed;
use crate::codebook::{generate_codebook, Codebook};
use crate::quantize::{report_from_decomposition, UserReport};
use crate::rng::{make_substream, SeedSpec, StreamPurpose};
use crate::scheduler::{build_index_sets, schedule, shortage_indicator};
use crate::thresholds::{design_thresholds, Thresholds};
use crate::{Error, Result, Scalar};

pub use stats::{aggregate, growth_normalizer, pairwise_sum, Aggregate, Estimate};
pub use sweep::{format_sig, sweep, write_sweep_csv, SweepAxis, SweepRow, SweepTable, CSV_COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackMode {
    /// Users clearing both designed thresholds feed back.
    ThresholdFeedback,
    /// Every user feeds back (`γ = 0`, `ε = 1`).
    AllUserFeedback,
    /// One random orthonormal basis (`M = 1`) and all-user feedback.
    OsdmaClassic,
}

impl FeedbackMode {
    pub const ALL: [FeedbackMode; 3] = [
        FeedbackMode::ThresholdFeedback,
        FeedbackMode::AllUserFeedback,
        FeedbackMode::OsdmaClassic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackMode::ThresholdFeedback => "threshold-feedback",
            FeedbackMode::AllUserFeedback => "all-user-feedback",
            FeedbackMode::OsdmaClassic => "osdma-classic",
        }
    }
}

impl fmt::Display for FeedbackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeedbackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown mode {s:?} (expected threshold-feedback, all-user-feedback or osdma-classic)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub u: usize,
    pub n_t: usize,
    /// Number of sub-codebooks; forced to one in `osdma-classic` mode.
    pub m: usize,
    pub snr_db: f64,
    pub lambda: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub mode: FeedbackMode,
    pub k_max: Option<usize>,
    pub penalty_alpha: f64,
    pub penalty_iterations: usize,
    pub fresh_codebook_per_trial: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            u: 100,
            n_t: 2,
            m: 4,
            snr_db: 5.0,
            lambda: 1.0,
            trials: 10_000,
            master_seed: 1,
            mode: FeedbackMode::ThresholdFeedback,
            k_max: None,
            penalty_alpha: 0.05,
            penalty_iterations: 1,
            fresh_codebook_per_trial: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials >= 1 required".into());
        }
        if self.u == 0 {
            return bad("u >= 1 required".into());
        }
        if self.n_t == 0 || self.m == 0 {
            return bad(format!("n_t >= 1 and m >= 1 required (n_t={}, m={})", self.n_t, self.m));
        }
        if !self.snr_db.is_finite() {
            return bad(format!("snr_db must be finite, got {}", self.snr_db));
        }
        if !(self.penalty_alpha >= 0.0 && self.penalty_alpha < 1.0) {
            return bad(format!("penalty_alpha in [0, 1) required, got {}", self.penalty_alpha));
        }
        if self.penalty_iterations == 0 {
            return bad("penalty_iterations >= 1 required".into());
        }
        if !(self.penalty_factor() > 0.0) {
            return bad(format!(
                "1 - I·α > 0 required (I={}, α={})",
                self.penalty_iterations, self.penalty_alpha
            ));
        }
        if self.mode == FeedbackMode::ThresholdFeedback {
            if !(self.lambda > 0.0) || !self.lambda.is_finite() {
                return bad(format!("λ > 0 required, got {}", self.lambda));
            }
            if self.u < 3 {
                return Err(Error::PopulationTooSmall { u: self.u });
            }
            if self.n_t < 2 {
                return Err(Error::InvalidDimension(format!(
                    "threshold feedback needs n_t >= 2, got {}",
                    self.n_t
                )));
            }
        }
        Ok(())
    }

    pub fn effective_m(&self) -> usize {
        match self.mode {
            FeedbackMode::OsdmaClassic => 1,
            _ => self.m,
        }
    }

    /// Transmit power per beam for unit-variance noise.
    pub fn power(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn penalty_factor(&self) -> f64 {
        1.0 - self.penalty_iterations as f64 * self.penalty_alpha
    }

    pub fn thresholds<T: Scalar>(&self) -> Result<Thresholds<T>> {
        match self.mode {
            FeedbackMode::ThresholdFeedback => design_thresholds(self.u, self.n_t, T::lit(self.lambda)),
            _ => Ok(Thresholds::trivial(self.u, self.n_t)),
        }
    }

    /// Codebook shared by all trials when `fresh_codebook_per_trial` is off.
    pub fn fixed_codebook<T: Scalar>(&self) -> Result<Codebook<T>> {
        let mut rng = make_substream(SeedSpec::tagged(self.master_seed, StreamPurpose::FixedCodebook, 0));
        generate_codebook(self.n_t, self.effective_m(), &mut rng)
    }

    pub fn trial_codebook<T: Scalar>(&self, trial: usize) -> Result<Codebook<T>> {
        let mut rng = make_substream(SeedSpec::tagged(
            self.master_seed,
            StreamPurpose::Codebook,
            trial as u64,
        ));
        generate_codebook(self.n_t, self.effective_m(), &mut rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Number of feedback users `K`.
    pub k: usize,
    pub overflowed: bool,
    pub shortage: bool,
    pub scheduled_count: usize,
    pub sum_rate: f64,
    pub penalized_rate: f64,
}

/// Reports of all `U` users for one trial.
pub fn trial_reports<T: Scalar>(
    cfg: &ExperimentConfig,
    trial_idx: usize,
    cb: &Codebook<T>,
    th: &Thresholds<T>,
) -> Result<Vec<UserReport<T>>> {
    let mut rng = make_substream(SeedSpec::tagged(
        cfg.master_seed,
        StreamPurpose::Channel,
        trial_idx as u64,
    ));
    let p = T::lit(cfg.power());
    (0..cfg.u)
        .map(|uid| {
            let (_, d) = sample_decomposed::<T, _>(&mut rng, cfg.n_t, uid)?;
            report_from_decomposition(uid, &d, cb, th, p)
        })
        .collect()
}

pub fn run_trial<T: Scalar>(
    cfg: &ExperimentConfig,
    trial_idx: usize,
    cb: &Codebook<T>,
    th: &Thresholds<T>,
) -> Result<TrialRecord> {
    if cb.n_t() != cfg.n_t {
        return Err(Error::InvalidDimension(format!(
            "codebook n_t={} does not match config n_t={}",
            cb.n_t(),
            cfg.n_t
        )));
    }
    let reports = trial_reports(cfg, trial_idx, cb, th)?;
    let k = feedback_count(&reports);
    let sets = build_index_sets(&reports, cb.m(), cb.n_t())?;
    let outcome = schedule(&sets, &reports)?;
    let sum_rate = outcome.sum_rate.to_f64_lossy();
    Ok(TrialRecord {
        trial: trial_idx,
        k,
        overflowed: cfg.k_max.is_some_and(|k_max| k >= k_max),
        shortage: shortage_indicator(&sets),
        scheduled_count: outcome.scheduled_count,
        sum_rate,
        penalized_rate: cfg.penalty_factor() * sum_rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub aggregate: Aggregate,
    pub records: Vec<TrialRecord>,
}

fn run_records<T: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let th = cfg.thresholds::<T>()?;
    let fixed = if cfg.fresh_codebook_per_trial {
        None
    } else {
        Some(cfg.fixed_codebook::<T>()?)
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| match &fixed {
            Some(cb) => run_trial(cfg, t, cb, &th),
            None => run_trial(cfg, t, &cfg.trial_codebook::<T>(t)?, &th),
        })
        .collect()
}

/// Runs `cfg.trials` trials on the current rayon pool.
pub fn run_experiment<T: Scalar>(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let records = run_records::<T>(cfg)?;
    Ok(ExperimentResult {
        aggregate: aggregate(cfg, &records),
        records,
    })
}

/// Runs `f` on a dedicated pool of `workers` threads (`None`: the global pool).
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
