//! Channel-shape quantization and the per-user feedback report.

use num_complex::Complex;
use serde::Serialize;

use crate::channel::{decompose, norm_sqr, ChannelDecomposition, ChannelVector};
use crate::codebook::Codebook;
use crate::thresholds::Thresholds;
use crate::{Error, Result, Scalar};

/// Nearest codeword to a channel shape. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantizationResult<T> {
    pub sub_idx: usize,
    pub beam_idx: usize,
    /// `|f' s|²` for the chosen codeword.
    pub alignment: T,
    /// `δ = 1 - alignment = sin²∠(f, s)`.
    pub error: T,
}

impl<T> QuantizationResult<T> {
    pub fn flat_index(&self, n_t: usize) -> usize {
        self.sub_idx * n_t + self.beam_idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UserReport<T> {
    pub user_id: usize,
    pub quant: QuantizationResult<T>,
    pub rho: T,
    pub sinr: T,
    pub fed_back: bool,
}

/// Codeword maximizing `|f' s|` over the whole codebook; ties go to the
/// lowest flat index.
pub fn quantize_shape<T: Scalar>(s: &[Complex<T>], cb: &Codebook<T>) -> Result<QuantizationResult<T>> {
    if s.len() != cb.n_t() {
        return Err(Error::InvalidDimension(format!(
            "shape has {} entries, codebook expects {}",
            s.len(),
            cb.n_t()
        )));
    }
    let norm2 = norm_sqr(s);
    let deviation = (norm2 - T::one()).abs().to_f64_lossy();
    if !(deviation <= T::SHAPE_TOL) {
        return Err(Error::NotUnitNorm { deviation });
    }

    let mut best_idx = 0;
    let mut best = -T::one();
    for (idx, f) in cb.vectors().iter().enumerate() {
        let ip = f
            .iter()
            .zip(s)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        let a = ip.norm_sqr();
        if a > best {
            best = a;
            best_idx = idx;
        }
    }
    let alignment = (best / norm2).min(T::one());
    let (sub_idx, beam_idx) = cb.split_index(best_idx);
    Ok(QuantizationResult {
        sub_idx,
        beam_idx,
        alignment,
        error: T::one() - alignment,
    })
}

/// `(1 + Pρ)/(1 + Pρδ) - 1`, evaluated as `Pρ(1 - δ)/(1 + Pρδ)`.
pub fn sinr<T: Scalar>(p: T, rho: T, delta: T) -> Result<T> {
    if !(p >= T::zero()) || !(rho >= T::zero()) {
        return Err(Error::Domain(format!("sinr needs P >= 0 and ρ >= 0 (P={p}, ρ={rho})")));
    }
    if !(delta >= T::zero() && delta <= T::one()) {
        return Err(Error::Domain(format!("quantization error δ={delta} outside [0, 1]")));
    }
    let snr = p * rho;
    Ok(snr * (T::one() - delta) / (T::one() + snr * delta))
}

pub fn evaluate_user<T: Scalar>(
    h: &ChannelVector<T>,
    cb: &Codebook<T>,
    th: &Thresholds<T>,
    p: T,
) -> Result<UserReport<T>> {
    report_from_decomposition(h.user_id, &decompose(h)?, cb, th, p)
}

pub fn report_from_decomposition<T: Scalar>(
    user_id: usize,
    d: &ChannelDecomposition<T>,
    cb: &Codebook<T>,
    th: &Thresholds<T>,
    p: T,
) -> Result<UserReport<T>> {
    let quant = quantize_shape(&d.shape, cb)?;
    let sinr = sinr(p, d.power, quant.error)?;
    Ok(UserReport {
        user_id,
        quant,
        rho: d.power,
        sinr,
        fed_back: th.admits(d.power, quant.error),
    })
}
