//! Order-stable reductions over trial records.

use serde::Serialize;

use super::{ExperimentConfig, TrialRecord};

/// Pairwise (cascade) summation; the result depends only on the order of
/// `xs`, never on how the work that produced them was scheduled.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean with a normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci95: f64,
    /// Standard error of the mean.
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                ci95: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = pairwise_sum(xs) / n as f64;
        if n == 1 {
            return Self {
                mean,
                ci95: 0.0,
                se: 0.0,
            };
        }
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&dev) / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        Self {
            mean,
            ci95: 1.96 * se,
            se,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub trials: usize,
    pub mean_k: Estimate,
    pub mean_sum_rate: Estimate,
    pub penalized_rate: f64,
    pub overflow_freq: f64,
    pub shortage_freq: f64,
    /// `mean_sum_rate / (N_t log2 log2 U)`, defined for `U ≥ 5`.
    pub growth_ratio: Option<f64>,
}

pub fn growth_normalizer(u: usize, n_t: usize) -> Option<f64> {
    (u >= 5).then(|| n_t as f64 * (u as f64).log2().log2())
}

pub fn aggregate(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Aggregate {
    let n = records.len();
    let ks: Vec<f64> = records.iter().map(|r| r.k as f64).collect();
    let rates: Vec<f64> = records.iter().map(|r| r.sum_rate).collect();
    let penalized: Vec<f64> = records.iter().map(|r| r.penalized_rate).collect();
    let overflow = match cfg.k_max {
        Some(k_max) => records.iter().filter(|r| r.k >= k_max).count(),
        None => 0,
    };
    let shortage = records.iter().filter(|r| r.shortage).count();
    let mean_sum_rate = Estimate::from_samples(&rates);
    Aggregate {
        trials: n,
        mean_k: Estimate::from_samples(&ks),
        growth_ratio: growth_normalizer(cfg.u, cfg.n_t).map(|d| mean_sum_rate.mean / d),
        mean_sum_rate,
        penalized_rate: pairwise_sum(&penalized) / n as f64,
        overflow_freq: overflow as f64 / n as f64,
        shortage_freq: shortage as f64 / n as f64,
    }
}
