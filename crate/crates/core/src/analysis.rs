//! Tail bounds and asymptotic capacity companions.

use serde::Serialize;

use crate::quantize::UserReport;
use crate::thresholds::Thresholds;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverflowBound<T> {
    pub u: usize,
    pub expected_k: T,
    pub k_max: usize,
    pub bound: T,
    /// `k_max > U`: the feedback count can never reach `k_max`.
    pub overflow_impossible: bool,
}

/// Where the mean feedback count used by the overflow bound comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectedK<T> {
    /// Design-time ceiling `E[K] ≤ N · N_t`.
    DesignBound { n_t: usize, m: usize },
    Measured(T),
}

impl<T: Scalar> ExpectedK<T> {
    pub fn value(&self) -> T {
        match *self {
            ExpectedK::DesignBound { n_t, m } => T::from_usize_lossy(m * n_t * n_t),
            ExpectedK::Measured(k) => k,
        }
    }
}

/// Chernoff bound on `Pr{K ≥ k_max}` for `K` a sum of `U` i.i.d. Bernoulli
/// feedback indicators with mean `E[K]`:
///
/// `exp[-k ln(k/E[K]) - (U-k) ln((U-k)/(U-E[K]))]`, evaluated in log space.
pub fn chernoff_overflow<T: Scalar>(u: usize, expected_k: T, k_max: usize) -> Result<OverflowBound<T>> {
    let uf = T::from_usize_lossy(u);
    if !(expected_k > T::zero() && expected_k < uf) {
        return Err(Error::Domain(format!(
            "overflow bound needs 0 < E[K] < U (E[K]={expected_k}, U={u})"
        )));
    }
    let k = T::from_usize_lossy(k_max);
    if k_max > u {
        return Ok(OverflowBound {
            u,
            expected_k,
            k_max,
            bound: T::zero(),
            overflow_impossible: true,
        });
    }
    if k < expected_k {
        return Err(Error::Domain(format!(
            "overflow bound is only valid for k_max >= E[K] (k_max={k_max}, E[K]={expected_k})"
        )));
    }
    let rest = uf - k;
    let upper = if rest > T::zero() {
        rest * (rest / (uf - expected_k)).ln()
    } else {
        T::zero()
    };
    let log_bound = -(k * (k / expected_k).ln()) - upper;
    let bound = log_bound.exp().max(T::zero()).min(T::one());
    Ok(OverflowBound {
        u,
        expected_k,
        k_max,
        bound,
        overflow_impossible: false,
    })
}

pub fn overflow_bound<T: Scalar>(u: usize, expected: ExpectedK<T>, k_max: usize) -> Result<OverflowBound<T>> {
    chernoff_overflow(u, expected.value(), k_max)
}

/// Upper bound `(N_t e^{-N_t})^M` on the probability that no sub-codebook
/// has all of its beams requested.
pub fn shortage_bound<T: Scalar>(n_t: usize, m: usize) -> Result<T> {
    if n_t == 0 || m == 0 {
        return Err(Error::InvalidDimension(format!("need n_t >= 1 and m >= 1 (n_t={n_t}, m={m})")));
    }
    let nt = T::from_usize_lossy(n_t);
    Ok((nt * (-nt).exp()).powi(m as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityEnvelope<T> {
    pub n_t: usize,
    pub m: usize,
    pub p_beta_bound: T,
    /// Asymptotic lower limit of `C / (N_t log2 log2 U)`.
    pub lower_ratio: T,
    pub upper_ratio: T,
}

pub fn capacity_envelope<T: Scalar>(n_t: usize, m: usize) -> Result<CapacityEnvelope<T>> {
    if n_t < 2 {
        return Err(Error::InvalidDimension(format!("capacity envelope needs n_t >= 2, got {n_t}")));
    }
    let p_beta_bound = shortage_bound(n_t, m)?;
    Ok(CapacityEnvelope {
        n_t,
        m,
        p_beta_bound,
        lower_ratio: T::one() - p_beta_bound,
        upper_ratio: T::one(),
    })
}

/// `T_u`: one if the user cleared both thresholds.
pub fn bernoulli_feedback_indicator<T>(report: &UserReport<T>) -> u8 {
    u8::from(report.fed_back)
}

/// `K = Σ_u T_u`.
pub fn feedback_count<T>(reports: &[UserReport<T>]) -> usize {
    reports.iter().map(|r| bernoulli_feedback_indicator(r) as usize).sum()
}

/// `(N_t - 1) ε + ((N_t - 1)/N_t) γ ε`, an upper bound on the mean
/// interference term `E[ρδ | ρ ≥ γ, δ ≤ ε]` of a feedback user.
pub fn mean_interference_bound<T: Scalar>(th: &Thresholds<T>) -> T {
    let nt = T::from_usize_lossy(th.n_t);
    let nt1 = nt - T::one();
    nt1 * th.epsilon + nt1 / nt * th.gamma * th.epsilon
}
