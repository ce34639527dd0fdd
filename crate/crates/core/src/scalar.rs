use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real scalar the numerical core is written against: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Allowed deviation of a codeword norm from one.
    const NORM_TOL: f64;
    /// Allowed inner-product magnitude between codewords of one sub-codebook.
    const ORTHO_TOL: f64;
    /// Allowed deviation of `‖s‖²` from one for a channel shape handed to the quantizer.
    const SHAPE_TOL: f64;
    /// Significant digits needed to round-trip a value through text.
    const TEXT_DIGITS: usize;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossless for literal constants; panics only on NaN-producing conversions.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in a float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const NORM_TOL: f64 = 1e-12;
    const ORTHO_TOL: f64 = 1e-10;
    const SHAPE_TOL: f64 = 1e-9;
    const TEXT_DIGITS: usize = 17;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f32 {
    const NORM_TOL: f64 = 1e-5;
    const ORTHO_TOL: f64 = 1e-5;
    const SHAPE_TOL: f64 = 1e-5;
    const TEXT_DIGITS: usize = 9;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}
