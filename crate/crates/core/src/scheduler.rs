//! Joint beam selection and user scheduling at the base station.
//!
//! Works only from feedback reports: per codeword the strongest reporting
//! user is picked, then the sub-codebook whose beams give the largest sum
//! of `log2(1 + SINR)` is used for transmission.

use std::collections::HashMap;

use serde::Serialize;

use crate::quantize::UserReport;
use crate::{Error, Result, Scalar};

/// Feedback users grouped by quantized codeword, `sets[flat_index]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSets {
    m: usize,
    n_t: usize,
    sets: Vec<Vec<usize>>,
}

impl IndexSets {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn get(&self, sub: usize, beam: usize) -> &[usize] {
        &self.sets[sub * self.n_t + beam]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(Vec::is_empty)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleOutcome<T> {
    pub chosen_sub: usize,
    /// Scheduled user per beam of the chosen sub-codebook.
    pub winners: Vec<Option<usize>>,
    /// `log2(1 + max SINR)` per beam, zero for an empty beam (bits/s/Hz).
    pub beam_rates: Vec<T>,
    pub sum_rate: T,
    pub scheduled_count: usize,
}

pub fn build_index_sets<T>(reports: &[UserReport<T>], m: usize, n_t: usize) -> Result<IndexSets> {
    let mut sets = vec![Vec::new(); m * n_t];
    for r in reports.iter().filter(|r| r.fed_back) {
        let (sub, beam) = (r.quant.sub_idx, r.quant.beam_idx);
        if sub >= m || beam >= n_t {
            return Err(Error::Integrity(format!(
                "user {} reports codeword ({sub}, {beam}) outside {m}x{n_t}",
                r.user_id
            )));
        }
        sets[sub * n_t + beam].push(r.user_id);
    }
    Ok(IndexSets { m, n_t, sets })
}

/// Step one: the maximum-SINR feedback user of every index set (flat order).
/// Equal SINRs go to the lowest user id.
pub fn beam_winners<'a, T: Scalar>(
    sets: &IndexSets,
    reports: &'a [UserReport<T>],
) -> Result<Vec<Option<&'a UserReport<T>>>> {
    let by_id: HashMap<usize, &UserReport<T>> =
        reports.iter().filter(|r| r.fed_back).map(|r| (r.user_id, r)).collect();
    sets.sets
        .iter()
        .map(|members| {
            let mut top: Option<&UserReport<T>> = None;
            for uid in members {
                let r = *by_id.get(uid).ok_or_else(|| {
                    Error::Integrity(format!("index set lists user {uid} without a feedback report"))
                })?;
                top = match top {
                    Some(t) if t.sinr > r.sinr || (t.sinr == r.sinr && t.user_id < r.user_id) => Some(t),
                    _ => Some(r),
                };
            }
            Ok(top)
        })
        .collect()
}

/// Step two: the sub-codebook with the largest `Σ_n log2(1 + SINR)`; ties go
/// to the lowest sub-codebook.
pub fn schedule<T: Scalar>(sets: &IndexSets, reports: &[UserReport<T>]) -> Result<ScheduleOutcome<T>> {
    let tops = beam_winners(sets, reports)?;
    let mut best: Option<ScheduleOutcome<T>> = None;
    for (sub, beams) in tops.chunks(sets.n_t).enumerate() {
        let mut sum_rate = T::zero();
        let mut beam_rates = Vec::with_capacity(sets.n_t);
        for top in beams {
            let max_sinr = top.map_or(T::zero(), |r| r.sinr);
            let rate = (T::one() + max_sinr).log2();
            sum_rate += rate;
            beam_rates.push(rate);
        }
        if best.as_ref().is_none_or(|b| sum_rate > b.sum_rate) {
            let winners: Vec<Option<usize>> = beams.iter().map(|t| t.map(|r| r.user_id)).collect();
            best = Some(ScheduleOutcome {
                chosen_sub: sub,
                scheduled_count: winners.iter().flatten().count(),
                winners,
                beam_rates,
                sum_rate,
            });
        }
    }
    best.ok_or_else(|| Error::Integrity("index sets have no sub-codebooks".into()))
}

/// No sub-codebook has a feedback user on every one of its beams.
pub fn shortage_indicator(sets: &IndexSets) -> bool {
    let best = (0..sets.m)
        .map(|sub| (0..sets.n_t).filter(|&b| !sets.get(sub, b).is_empty()).count())
        .max()
        .unwrap_or(0);
    best < sets.n_t
}
