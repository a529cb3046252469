//! Closed-form system outage probabilities.
//!
//! A cycle is in outage when at least one of the two sessions fails, which
//! under the optimal policies happens exactly when the relay stays silent.

use crate::error::{Error, Result};
use crate::relay::{outage_case_a, outage_case_b, RegionCase, RelayCutoff, RelayPolicy};
use crate::system::LinkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageCase {
    /// `δ₂·y0 <= δ₁·x0` with a finite relay cutoff.
    A,
    /// `δ₂·y0 > δ₁·x0` with a finite relay cutoff.
    B,
    /// Relay never truncates; the outage floor.
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageReport {
    pub p_out: f64,
    pub case_used: OutageCase,
    pub delta1: f64,
    pub delta2: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub x0: f64,
    pub y0: f64,
    pub rho: RelayCutoff,
}

/// Outage floor `1 − e^(−x0/Ω_X)·e^(−y0/Ω_Y)`, reached when the relay budget
/// covers the static policy.
pub fn min_outage(x0: f64, y0: f64, omega_x: f64, omega_y: f64) -> f64 {
    -(-(x0 / omega_x) - y0 / omega_y).exp_m1()
}

/// System outage probability under the optimal policies.
pub fn outage_opa(policy: &RelayPolicy) -> OutageReport {
    let p = &policy.params;
    let (p_out, case_used) = match (policy.rho, policy.case) {
        (RelayCutoff::Unbounded, _) => (
            min_outage(p.x0, p.y0, p.omega_x, p.omega_y),
            OutageCase::Min,
        ),
        (RelayCutoff::Finite(_), RegionCase::A) => (
            outage_case_a(p, policy.lambda1, policy.lambda2),
            OutageCase::A,
        ),
        (RelayCutoff::Finite(_), RegionCase::B) => (
            outage_case_b(p, policy.lambda1, policy.lambda2),
            OutageCase::B,
        ),
    };
    OutageReport {
        p_out: p_out.clamp(0.0, 1.0),
        case_used,
        delta1: p.delta1,
        delta2: p.delta2,
        omega_x: p.omega_x,
        omega_y: p.omega_y,
        x0: p.x0,
        y0: p.y0,
        rho: policy.rho,
    }
}

/// Fixed transmit powers of the constant-power baseline (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpaConfig {
    pub p_s1_fix: f64,
    pub p_s2_fix: f64,
    pub p_r_fix: f64,
}

impl FpaConfig {
    pub fn new(p_s1_fix: f64, p_s2_fix: f64, p_r_fix: f64) -> Result<Self> {
        for (field, value) in [
            ("p_s1_fix", p_s1_fix),
            ("p_s2_fix", p_s2_fix),
            ("p_r_fix", p_r_fix),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { field, value });
            }
        }
        Ok(Self {
            p_s1_fix,
            p_s2_fix,
            p_r_fix,
        })
    }

    /// Every node at the same power.
    pub fn uniform(power: f64) -> Result<Self> {
        Self::new(power, power, power)
    }

    /// Smallest x (S₁–R gain) for which both the uplink and the broadcast
    /// towards S₁ succeed.
    pub fn x_threshold(&self, delta1: f64, delta2: f64) -> f64 {
        (delta1 / self.p_s1_fix).max(delta2 / self.p_r_fix)
    }

    /// Smallest y (S₂–R gain) for which both the uplink and the broadcast
    /// towards S₂ succeed.
    pub fn y_threshold(&self, delta1: f64, delta2: f64) -> f64 {
        (delta2 / self.p_s2_fix).max(delta1 / self.p_r_fix)
    }
}

/// Outage probability with fixed powers: the cycle succeeds iff both uplinks
/// and both broadcast directions carry their rates.
pub fn outage_fpa(link: &LinkConfig, fpa: &FpaConfig) -> f64 {
    let (d1, d2) = (link.delta1(), link.delta2());
    min_outage(
        fpa.x_threshold(d1, d2),
        fpa.y_threshold(d1, d2),
        link.omega_x,
        link.omega_y,
    )
}
