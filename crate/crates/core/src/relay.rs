//! Relay power control for the broadcast phase.
//!
//! The relay forwards only when it decoded both uplink codewords, i.e. when
//! `x >= x0` and `y >= y0`. It then needs `max(δ₁/y, δ₂/x)` to reach both end
//! nodes at their rates (the static policy). Under a long-term budget it keeps
//! that power whenever it does not exceed a cutoff ρ and stays silent
//! otherwise. The cutoff is found by inverting the closed-form average power.
//!
//! Everything below uses the auxiliary bounds `λ₁ = max(x0, δ₂/ρ)` and
//! `λ₂ = max(y0, δ₁/ρ)`: the relay transmits exactly on the quadrant
//! `x >= λ₁, y >= λ₂`.

use crate::endnode::EndNodePolicy;
use crate::error::{Error, Result};
use crate::specfun::{e1_positive, solve_monotone, Monotonicity};
use crate::system::{ChannelState, SystemConfig};

/// Truncation level of the relay policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelayCutoff {
    Finite(f64),
    /// The budget covers the static policy everywhere; the relay never
    /// truncates.
    Unbounded,
}

impl RelayCutoff {
    pub fn is_unbounded(self) -> bool {
        matches!(self, RelayCutoff::Unbounded)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RelayCutoff::Finite(rho) => Some(rho),
            RelayCutoff::Unbounded => None,
        }
    }
}

/// Which broadcast constraint binds at the corner `(x0, y0)` of the decode
/// region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionCase {
    /// `δ₂·y0 <= δ₁·x0`; the corner lies in the sub-region where the relay
    /// spends `δ₁/y`.
    A,
    /// `δ₂·y0 > δ₁·x0`; the corner lies where the relay spends `δ₂/x`.
    B,
}

/// Everything the relay policy depends on except ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayParams {
    pub delta1: f64,
    pub delta2: f64,
    pub x0: f64,
    pub y0: f64,
    pub omega_x: f64,
    pub omega_y: f64,
}

impl RelayParams {
    pub fn new(
        delta1: f64,
        delta2: f64,
        x0: f64,
        y0: f64,
        omega_x: f64,
        omega_y: f64,
    ) -> Result<Self> {
        let params = Self {
            delta1,
            delta2,
            x0,
            y0,
            omega_x,
            omega_y,
        };
        for (field, value) in [
            ("delta1", delta1),
            ("delta2", delta2),
            ("x0", x0),
            ("y0", y0),
            ("omega_x", omega_x),
            ("omega_y", omega_y),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { field, value });
            }
        }
        Ok(params)
    }

    pub fn from_end_nodes(s1: &EndNodePolicy, s2: &EndNodePolicy) -> Result<Self> {
        Self::new(s1.delta, s2.delta, s1.cutoff, s2.cutoff, s1.omega, s2.omega)
    }

    /// Ties go to case A.
    pub fn case(&self) -> RegionCase {
        if self.delta2 * self.y0 <= self.delta1 * self.x0 {
            RegionCase::A
        } else {
            RegionCase::B
        }
    }

    /// Largest static power the relay can ever be asked for,
    /// `max(δ₁/y0, δ₂/x0)`. Any ρ at or above it never truncates.
    pub fn saturation_rho(&self) -> f64 {
        (self.delta1 / self.y0).max(self.delta2 / self.x0)
    }

    /// `(λ₁, λ₂)` for a given cutoff.
    pub fn lambdas(&self, rho: RelayCutoff) -> (f64, f64) {
        match rho {
            RelayCutoff::Finite(rho) => (
                self.x0.max(self.delta2 / rho),
                self.y0.max(self.delta1 / rho),
            ),
            RelayCutoff::Unbounded => (self.x0, self.y0),
        }
    }

    fn sum_weight(&self) -> f64 {
        // Σ = δ₁Ω_X + δ₂Ω_Y
        self.delta1 * self.omega_x + self.delta2 * self.omega_y
    }

    // Decay rate along the ray y = (δ₁/δ₂)x, per unit of x.
    fn rate_a(&self) -> f64 {
        1.0 / self.omega_x + self.delta1 / (self.delta2 * self.omega_y)
    }

    // Decay rate along the same ray, per unit of y.
    fn rate_b(&self) -> f64 {
        1.0 / self.omega_y + self.delta2 / (self.delta1 * self.omega_x)
    }
}

/// Average relay power in case A for the quadrant `x >= λ₁, y >= λ₂`.
///
/// The `δ₁/y` sub-region is integrated from `x = λ₁`; at saturation
/// (`λ₁ = x0`) this is the textbook four-term expression.
pub fn avg_power_case_a(p: &RelayParams, lambda1: f64, lambda2: f64) -> f64 {
    let (d1, d2, ox, oy) = (p.delta1, p.delta2, p.omega_x, p.omega_y);
    let c = p.rate_a();
    let decay = (-lambda1 / ox).exp();
    d1 / oy * e1_positive(lambda2 / oy) * decay
        - d1 / oy * e1_positive(d1 * lambda1 / (d2 * oy)) * decay
        + d1 / oy * e1_positive(c * lambda1)
        + d2 / ox * e1_positive(c * lambda1)
}

/// Mirror image of [`avg_power_case_a`] for case B.
pub fn avg_power_case_b(p: &RelayParams, lambda1: f64, lambda2: f64) -> f64 {
    let (d1, d2, ox, oy) = (p.delta1, p.delta2, p.omega_x, p.omega_y);
    let c = p.rate_b();
    let decay = (-lambda2 / oy).exp();
    d2 / ox * e1_positive(lambda1 / ox) * decay
        - d2 / ox * e1_positive(d2 * lambda2 / (d1 * ox)) * decay
        + d2 / ox * e1_positive(c * lambda2)
        + d1 / oy * e1_positive(c * lambda2)
}

/// Average power of the untruncated static policy, case A form.
pub fn max_avg_power_case_a(p: &RelayParams) -> f64 {
    let (d1, d2, ox, oy) = (p.delta1, p.delta2, p.omega_x, p.omega_y);
    d1 / oy * (-p.x0 / ox).exp() * (e1_positive(p.y0 / oy) - e1_positive(d1 * p.x0 / (d2 * oy)))
        + (d1 / oy + d2 / ox) * e1_positive(p.x0 / ox + d1 * p.x0 / (d2 * oy))
}

/// Average power of the untruncated static policy, case B form.
pub fn max_avg_power_case_b(p: &RelayParams) -> f64 {
    let (d1, d2, ox, oy) = (p.delta1, p.delta2, p.omega_x, p.omega_y);
    d2 / ox * (-p.y0 / oy).exp() * (e1_positive(p.x0 / ox) - e1_positive(d2 * p.y0 / (d1 * ox)))
        + (d1 / oy + d2 / ox) * e1_positive(p.y0 / oy + d2 * p.y0 / (d1 * ox))
}

/// Outage probability in case A for the transmit quadrant `(λ₁, λ₂)`.
pub fn outage_case_a(p: &RelayParams, lambda1: f64, lambda2: f64) -> f64 {
    let (ox, oy) = (p.omega_x, p.omega_y);
    let sigma = p.sum_weight();
    let tail = (-lambda1 * p.rate_a()).exp();
    // Grouped so that small outages keep their relative precision: the
    // leading pair via expm1, the three tail terms summed before scaling.
    -(-lambda1 / ox - lambda2 / oy).exp_m1()
        + tail * (p.delta2 * oy + p.delta1 * ox - sigma) / sigma
}

/// Outage probability in case B for the transmit quadrant `(λ₁, λ₂)`.
pub fn outage_case_b(p: &RelayParams, lambda1: f64, lambda2: f64) -> f64 {
    let (ox, oy) = (p.omega_x, p.omega_y);
    let sigma = p.sum_weight();
    let tail = (-lambda2 * p.rate_b()).exp();
    -(-lambda2 / oy - lambda1 / ox).exp_m1()
        + tail * (p.delta1 * ox + p.delta2 * oy - sigma) / sigma
}

/// Average relay power for cutoff `rho`, dispatched on the region case.
pub fn avg_relay_power(p: &RelayParams, rho: RelayCutoff) -> f64 {
    match rho {
        RelayCutoff::Unbounded => max_avg_relay_power(p),
        RelayCutoff::Finite(_) => {
            let (l1, l2) = p.lambdas(rho);
            match p.case() {
                RegionCase::A => avg_power_case_a(p, l1, l2),
                RegionCase::B => avg_power_case_b(p, l1, l2),
            }
        }
    }
}

/// Saturated average relay power, reached for every `ρ >= saturation_rho`.
pub fn max_avg_relay_power(p: &RelayParams) -> f64 {
    match p.case() {
        RegionCase::A => max_avg_power_case_a(p),
        RegionCase::B => max_avg_power_case_b(p),
    }
}

/// Relay cutoff that spends exactly `p_avg` on average, or
/// [`RelayCutoff::Unbounded`] when the budget covers the static policy.
pub fn solve_rho(p: &RelayParams, p_avg: f64) -> Result<RelayCutoff> {
    if !(p_avg.is_finite() && p_avg > 0.0) {
        return Err(Error::InvalidParameter {
            field: "p_avg",
            value: p_avg,
        });
    }
    if p_avg >= max_avg_relay_power(p) {
        return Ok(RelayCutoff::Unbounded);
    }
    // Average power is flat above saturation_rho, so the root sits below it.
    // It never exceeds rho itself, so rho = p_avg is a valid lower end.
    let hi = p.saturation_rho();
    let lo = p_avg.min(hi / 4.0);
    let rho = solve_monotone(
        |rho| avg_relay_power(p, RelayCutoff::Finite(rho)),
        p_avg,
        lo,
        hi,
        Monotonicity::Increasing,
    )?;
    Ok(RelayCutoff::Finite(rho))
}

/// Relay power-allocation policy with its cutoff resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayPolicy {
    pub params: RelayParams,
    pub rho: RelayCutoff,
    pub lambda1: f64,
    pub lambda2: f64,
    pub case: RegionCase,
}

impl RelayPolicy {
    pub fn new(params: RelayParams, rho: RelayCutoff) -> Result<Self> {
        if let RelayCutoff::Finite(r) = rho {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParameter {
                    field: "rho",
                    value: r,
                });
            }
        }
        let (lambda1, lambda2) = params.lambdas(rho);
        Ok(Self {
            params,
            rho,
            lambda1,
            lambda2,
            case: params.case(),
        })
    }

    /// Policy spending `p_avg` on average.
    pub fn from_budget(params: RelayParams, p_avg: f64) -> Result<Self> {
        Self::new(params, solve_rho(&params, p_avg)?)
    }

    /// Both uplink codewords decoded; the boundary counts as decoded.
    pub fn decodes(&self, state: ChannelState) -> bool {
        state.x >= self.params.x0 && state.y >= self.params.y0
    }

    /// Minimal broadcast power meeting both rates, zero outside the decode
    /// region.
    pub fn static_power(&self, state: ChannelState) -> f64 {
        if self.decodes(state) {
            (self.params.delta1 / state.y).max(self.params.delta2 / state.x)
        } else {
            0.0
        }
    }

    /// Static power truncated at ρ.
    pub fn optimal_power(&self, state: ChannelState) -> f64 {
        let p = self.static_power(state);
        match self.rho {
            RelayCutoff::Finite(rho) if p > rho => 0.0,
            _ => p,
        }
    }

    pub fn average_power(&self) -> f64 {
        avg_relay_power(&self.params, self.rho)
    }

    pub fn max_average_power(&self) -> f64 {
        max_avg_relay_power(&self.params)
    }
}

/// The three cooperating policies solved from one [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaPolicies {
    pub s1: EndNodePolicy,
    pub s2: EndNodePolicy,
    pub relay: RelayPolicy,
}

impl OpaPolicies {
    pub fn solve(config: &SystemConfig) -> Result<Self> {
        config.validate()?;
        let link = &config.link;
        let s1 =
            EndNodePolicy::from_budget_saturating(link.delta1(), link.omega_x, config.pbar_s1)?;
        let s2 =
            EndNodePolicy::from_budget_saturating(link.delta2(), link.omega_y, config.pbar_s2)?;
        let params = RelayParams::from_end_nodes(&s1, &s2)?;
        let relay = RelayPolicy::from_budget(params, config.p_avg_relay)?;
        Ok(Self { s1, s2, relay })
    }
}
