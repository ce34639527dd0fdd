//! Opportunistic SDMA downlink with threshold-gated, quantized CSI feedback.
//!
//! The numerical core is generic over the real scalar type (see [`Scalar`]);
//! `f64` aliases are provided at the crate root for everyday use and the
//! Monte Carlo harness in [`sim`] runs on any [`Scalar`].

pub mod analysis;
pub mod channel;
pub mod codebook;
mod error;
mod haar;
pub mod quantize;
pub mod rng;
mod scalar;
pub mod scheduler;
pub mod sim;
pub mod thresholds;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use num_complex::Complex;

pub type ChannelVector = channel::ChannelVector<f64>;
pub type ChannelDecomposition = channel::ChannelDecomposition<f64>;
pub type Codebook = codebook::Codebook<f64>;
pub type CodebookStats = codebook::CodebookStats<f64>;
pub type QuantizationResult = quantize::QuantizationResult<f64>;
pub type UserReport = quantize::UserReport<f64>;
pub type Thresholds = thresholds::Thresholds<f64>;
pub type FeedbackLoad = thresholds::FeedbackLoad<f64>;
pub type OverflowBound = analysis::OverflowBound<f64>;
pub type CapacityEnvelope = analysis::CapacityEnvelope<f64>;
pub type ScheduleOutcome = scheduler::ScheduleOutcome<f64>;

pub type ChannelVector32 = channel::ChannelVector<f32>;
pub type Codebook32 = codebook::Codebook<f32>;
pub type UserReport32 = quantize::UserReport<f32>;
pub type Thresholds32 = thresholds::Thresholds<f32>;
pub type ScheduleOutcome32 = scheduler::ScheduleOutcome<f32>;
