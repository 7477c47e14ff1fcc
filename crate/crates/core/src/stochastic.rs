//! Seeded random streams and the parametric laws used for shock inter-arrival
//! times and magnitudes.
//!
//! Every replication owns an [`RngStream`] keyed by `(master_seed,
//! stream_index)`. Within a replication, independent purposes (healable
//! arrivals, healability marks, nonhealable arrivals) draw from separate
//! lanes of the same key so that adding or removing one source of randomness
//! never shifts the draws of another.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, InverseGaussian, Weibull};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Shape parameter used for the inverse-Gaussian law when none is given.
pub const DEFAULT_INVERSE_GAUSSIAN_SHAPE: f64 = 1.0;

const KEY_TAG: &[u8; 16] = b"healshock-stream";

/// Independent purposes within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    Healable = 0,
    Marks = 1,
    Nonhealable = 2,
    SeedDerivation = 3,
}

/// A reproducible random stream identified by `(master_seed, stream_index)`.
///
/// Backed by ChaCha8: the master seed and lane form the key and the stream
/// index selects the ChaCha stream, so sequences are identical on every
/// platform and distinct identifiers never overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    master_seed: u64,
    stream_index: u64,
    lane: Lane,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self::with_lane(master_seed, stream_index, Lane::Healable)
    }

    pub fn with_lane(master_seed: u64, stream_index: u64, lane: Lane) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&(lane as u64).to_le_bytes());
        key[16..].copy_from_slice(KEY_TAG);
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_index);
        Self {
            rng,
            master_seed,
            stream_index,
            lane,
        }
    }

    /// Fresh stream with the same identifier on another lane.
    pub fn on_lane(&self, lane: Lane) -> Self {
        Self::with_lane(self.master_seed, self.stream_index, lane)
    }

    pub fn lane(&self) -> Lane {
        self.lane
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Child master seed for sweep cell `cell_index`.
pub fn derive_seed(master_seed: u64, cell_index: u64) -> u64 {
    RngStream::with_lane(master_seed, cell_index, Lane::SeedDerivation).next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Weibull,
    Gamma,
    Exponential,
    InverseGaussian,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
            Family::Exponential => "exponential",
            Family::InverseGaussian => "inverse_gaussian",
        }
    }
}

/// Anything that can produce positive variates from a stream.
pub trait Variate {
    fn sample(&self, rng: &mut RngStream) -> f64;
}

/// Converts a target mean into the law's native scale parameter.
///
/// Returns the Weibull/gamma scale, the exponential rate, or the
/// inverse-Gaussian mean parameter. `shape` is ignored for the exponential.
pub fn scale_for_mean(family: Family, shape: f64, mean: f64) -> Result<f64> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::domain("mean", format!("must be positive, got {mean}")));
    }
    if family != Family::Exponential && !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::domain("shape", format!("must be positive, got {shape}")));
    }
    Ok(match family {
        Family::Weibull => mean / gamma(1.0 + 1.0 / shape),
        Family::Gamma => mean / shape,
        Family::Exponential => 1.0 / mean,
        Family::InverseGaussian => mean,
    })
}

fn mean_for_scale(family: Family, shape: f64, param: f64) -> f64 {
    match family {
        Family::Weibull => param * gamma(1.0 + 1.0 / shape),
        Family::Gamma => param * shape,
        Family::Exponential => 1.0 / param,
        Family::InverseGaussian => param,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Law {
    Weibull(Weibull<f64>),
    Gamma(Gamma<f64>),
    Exponential(Exp<f64>),
    InverseGaussian(InverseGaussian<f64>),
}

/// A resolved parametric law: both the native parameter and the mean are
/// populated and consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    shape: f64,
    param: f64,
    mean: f64,
    law: Law,
}

impl DistributionSpec {
    /// Mean-parametrized construction (the canonical path).
    pub fn with_mean(family: Family, shape: f64, mean: f64) -> Result<Self> {
        let param = scale_for_mean(family, shape, mean)?;
        Self::build(family, shape, param, mean)
    }

    /// Native parametrization: Weibull/gamma scale, exponential rate or
    /// inverse-Gaussian mean.
    pub fn with_scale(family: Family, shape: f64, scale_or_rate: f64) -> Result<Self> {
        if !(scale_or_rate > 0.0 && scale_or_rate.is_finite()) {
            return Err(Error::domain("scale", format!("must be positive, got {scale_or_rate}")));
        }
        if family != Family::Exponential && !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::domain("shape", format!("must be positive, got {shape}")));
        }
        let mean = mean_for_scale(family, shape, scale_or_rate);
        Self::build(family, shape, scale_or_rate, mean)
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        Self::with_mean(Family::Exponential, 1.0, mean)
    }

    fn build(family: Family, shape: f64, param: f64, mean: f64) -> Result<Self> {
        let bad = |e: &dyn std::fmt::Display| Error::domain("distribution", e.to_string());
        let law = match family {
            Family::Weibull => Law::Weibull(Weibull::new(param, shape).map_err(|e| bad(&e))?),
            Family::Gamma => Law::Gamma(Gamma::new(shape, param).map_err(|e| bad(&e))?),
            Family::Exponential => Law::Exponential(Exp::new(param).map_err(|e| bad(&e))?),
            Family::InverseGaussian => Law::InverseGaussian(InverseGaussian::new(param, shape).map_err(|e| bad(&e))?),
        };
        let shape = if family == Family::Exponential { 1.0 } else { shape };
        Ok(Self {
            family,
            shape,
            param,
            mean,
            law,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Shape parameter (`λ` for the inverse Gaussian, 1 for the exponential).
    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Weibull/gamma scale, exponential rate, or inverse-Gaussian mean.
    pub fn scale_or_rate(&self) -> f64 {
        self.param
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

impl Variate for DistributionSpec {
    fn sample(&self, rng: &mut RngStream) -> f64 {
        let x = match &self.law {
            Law::Weibull(d) => d.sample(rng),
            Law::Gamma(d) => d.sample(rng),
            Law::Exponential(d) => d.sample(rng),
            Law::InverseGaussian(d) => d.sample(rng),
        };
        // every family has support (0, inf); guard the measure-zero underflow
        if x > 0.0 {
            x
        } else {
            f64::MIN_POSITIVE
        }
    }
}
