//! Problem instance, channel state and the Rayleigh block-fading sampler.
//!
//! Noise at every receiver has unit variance, so all powers here are linear
//! SNR-like quantities. Decibels appear only at the CLI boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::DomainError;

/// Number of phases in one transmission cycle (S₁ → R, S₂ → R, R broadcast).
pub const PHASES: u32 = 3;

/// SNR threshold `2^(phases·rate) − 1` that a link must reach to carry `rate`
/// bits per channel use when it only gets `1/phases` of the cycle.
pub fn delta_of_rate(rate: f64, phases: u32) -> std::result::Result<f64, DomainError> {
    if !(rate.is_finite() && rate > 0.0) || phases == 0 {
        return Err(DomainError(rate));
    }
    let exponent = phases as f64 * rate;
    let delta = if exponent < 0.5 {
        (exponent * std::f64::consts::LN_2).exp_m1()
    } else {
        exponent.exp2() - 1.0
    };
    Ok(delta)
}

fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { field, value })
    }
}

/// Session rates and mean channel gains; everything except the power budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Rate of the S₁ → S₂ session, bits per channel use.
    pub rate_1: f64,
    /// Rate of the S₂ → S₁ session, bits per channel use.
    pub rate_2: f64,
    /// Mean of the squared S₁–R amplitude.
    pub omega_x: f64,
    /// Mean of the squared S₂–R amplitude.
    pub omega_y: f64,
}

impl LinkConfig {
    pub fn new(rate_1: f64, rate_2: f64, omega_x: f64, omega_y: f64) -> Result<Self> {
        let link = Self {
            rate_1,
            rate_2,
            omega_x,
            omega_y,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("rate_1", self.rate_1)?;
        check_positive("rate_2", self.rate_2)?;
        check_positive("omega_x", self.omega_x)?;
        check_positive("omega_y", self.omega_y)?;
        Ok(())
    }

    /// δ₁, the SNR threshold of the S₁ → S₂ session.
    pub fn delta1(&self) -> f64 {
        delta_of_rate(self.rate_1, PHASES).expect("validated rate")
    }

    /// δ₂, the SNR threshold of the S₂ → S₁ session.
    pub fn delta2(&self) -> f64 {
        delta_of_rate(self.rate_2, PHASES).expect("validated rate")
    }
}

/// A full problem instance: link parameters plus the three average power
/// budgets (linear, relative to unit noise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub link: LinkConfig,
    pub pbar_s1: f64,
    pub pbar_s2: f64,
    pub p_avg_relay: f64,
}

impl SystemConfig {
    pub fn new(link: LinkConfig, pbar_s1: f64, pbar_s2: f64, p_avg_relay: f64) -> Result<Self> {
        let config = Self {
            link,
            pbar_s1,
            pbar_s2,
            p_avg_relay,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        check_positive("pbar_s1", self.pbar_s1)?;
        check_positive("pbar_s2", self.pbar_s2)?;
        check_positive("p_avg_relay", self.p_avg_relay)?;
        Ok(())
    }
}

/// Squared channel amplitudes `(x, y)` of the S₁–R and S₂–R links for one
/// transmission cycle. Reciprocity makes them valid for the broadcast phase
/// as well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub x: f64,
    pub y: f64,
}

impl ChannelState {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        for (field, v) in [("x", x), ("y", y)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter { field, value: v });
            }
        }
        Ok(Self { x, y })
    }
}

/// Deterministic Rayleigh block-fading source.
///
/// Each `(seed, stream_index)` pair selects an independent ChaCha8 stream.
/// Gains are drawn by inverting the exponential CDF, `x = −Ω·ln(u)` with
/// `u ∈ (0, 1]`, so rescaling Ω rescales the draws exactly.
#[derive(Debug, Clone)]
pub struct FadingSampler {
    rng: ChaCha8Rng,
    omega_x: f64,
    omega_y: f64,
}

impl FadingSampler {
    pub fn new(seed: u64, stream_index: u64, omega_x: f64, omega_y: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            rng,
            omega_x,
            omega_y,
        }
    }

    fn unit_exponential(&mut self) -> f64 {
        // gen::<f64>() is in [0, 1); flip it to (0, 1] so ln never sees 0.
        let u = 1.0 - self.rng.gen::<f64>();
        -u.ln()
    }

    pub fn sample_state(&mut self) -> ChannelState {
        let x = self.omega_x * self.unit_exponential();
        let y = self.omega_y * self.unit_exponential();
        ChannelState { x, y }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of_rate(1.0 / 3.0, 3).unwrap(), 1.0);
        assert_eq!(delta_of_rate(1.0, 3).unwrap(), 7.0);
        let tiny = delta_of_rate(1e-12, 3).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-11);
        assert!(delta_of_rate(0.0, 3).is_err());
        assert!(delta_of_rate(-0.1, 3).is_err());
        assert!(delta_of_rate(0.5, 0).is_err());
    }

    #[test]
    fn delta_strictly_increasing() {
        let mut prev = 0.0;
        for i in 1..2000 {
            let d = delta_of_rate(i as f64 * 1e-3, 3).unwrap();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn config_rejects_nonpositive_fields() {
        let link = LinkConfig::new(1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0).unwrap();
        assert!(SystemConfig::new(link, 1.0, 1.0, 1.0).is_ok());
        assert!(SystemConfig::new(link, 0.0, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(link, 1.0, f64::INFINITY, 1.0).is_err());
        assert!(LinkConfig::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(LinkConfig::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn channel_state_validation() {
        assert!(ChannelState::new(0.0, 0.0).is_ok());
        assert!(ChannelState::new(-1e-9, 0.0).is_err());
        assert!(ChannelState::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn sampler_is_deterministic() {
        let mut a = FadingSampler::new(7, 3, 1.0, 2.0);
        let mut b = FadingSampler::new(7, 3, 1.0, 2.0);
        for _ in 0..1000 {
            assert_eq!(a.sample_state(), b.sample_state());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = FadingSampler::new(7, 0, 1.0, 1.0);
        let mut b = FadingSampler::new(7, 1, 1.0, 1.0);
        let same = (0..100)
            .filter(|_| a.sample_state() == b.sample_state())
            .count();
        assert_eq!(same, 0);
    }

    #[test]
    fn draws_scale_exactly_with_omega() {
        let mut unit = FadingSampler::new(11, 0, 1.0, 1.0);
        let mut scaled = FadingSampler::new(11, 0, 2.0, 0.5);
        for _ in 0..1000 {
            let u = unit.sample_state();
            let s = scaled.sample_state();
            assert_eq!(s.x, 2.0 * u.x);
            assert_eq!(s.y, 0.5 * u.y);
        }
    }

    #[test]
    fn sample_mean_close_to_omega() {
        let n = 1_000_000;
        let mut s = FadingSampler::new(1, 0, 1.0, 1.0);
        let mean = (0..n).map(|_| s.sample_state().x).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }
}
