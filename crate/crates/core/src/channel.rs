//! I.i.d. Rayleigh downlink channels and their gain/shape split.

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::{Error, Result, Scalar};

/// A user's `N_t`-antenna downlink channel with `CN(0,1)` entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelVector<T> {
    pub user_id: usize,
    pub entries: Vec<Complex<T>>,
}

impl<T: Scalar> ChannelVector<T> {
    pub fn new(user_id: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension("channel needs n_t >= 1 entries".into()));
        }
        Ok(Self { user_id, entries })
    }

    pub fn n_t(&self) -> usize {
        self.entries.len()
    }

    pub fn power(&self) -> T {
        norm_sqr(&self.entries)
    }
}

/// `h = gain · shape`, with `power = gain²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelDecomposition<T> {
    pub gain: T,
    pub shape: Vec<Complex<T>>,
    pub power: T,
}

pub(crate) fn norm_sqr<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Circularly-symmetric complex Gaussian with unit variance.
pub fn complex_gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let scale = T::FRAC_1_SQRT_2();
    let re = T::standard_normal(rng);
    let im = T::standard_normal(rng);
    Complex::new(re * scale, im * scale)
}

pub fn sample_channel<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n_t: usize,
    user_id: usize,
) -> Result<ChannelVector<T>> {
    if n_t == 0 {
        return Err(Error::InvalidDimension("n_t must be >= 1".into()));
    }
    let entries = (0..n_t).map(|_| complex_gaussian(rng)).collect();
    Ok(ChannelVector { user_id, entries })
}

pub fn decompose<T: Scalar>(h: &ChannelVector<T>) -> Result<ChannelDecomposition<T>> {
    let power = h.power();
    if !(power > T::zero()) {
        return Err(Error::DegenerateChannel { user_id: h.user_id });
    }
    let gain = power.sqrt();
    let shape = h.entries.iter().map(|z| z.unscale(gain)).collect();
    Ok(ChannelDecomposition { gain, shape, power })
}

/// Draws and decomposes a channel; a zero-norm draw is retried once.
pub fn sample_decomposed<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n_t: usize,
    user_id: usize,
) -> Result<(ChannelVector<T>, ChannelDecomposition<T>)> {
    let h = sample_channel(rng, n_t, user_id)?;
    match decompose(&h) {
        Ok(d) => Ok((h, d)),
        Err(Error::DegenerateChannel { .. }) => {
            let h = sample_channel(rng, n_t, user_id)?;
            let d = decompose(&h)?;
            Ok((h, d))
        }
        Err(e) => Err(e),
    }
}
