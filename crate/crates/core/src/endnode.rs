//! Truncated channel inversion at an end node.
//!
//! A node that needs SNR `delta` to carry its rate transmits `delta / gain`
//! whenever its own link gain reaches the cutoff and stays silent otherwise.
//! Under Rayleigh fading the long-term average of that policy is
//! `(delta / omega) · E1(cutoff / omega)`, which fixes the cutoff for a given
//! budget.

use crate::error::{Error, Result};
use crate::specfun::{e1_positive, solve_monotone, Monotonicity, EULER_GAMMA};

const CUTOFF_BRACKET_LO: f64 = 1e-12;
const CUTOFF_BRACKET_HI: f64 = 50.0;
/// Smallest cutoff, relative to `omega`, used by
/// [`EndNodePolicy::from_budget_saturating`].
pub const MIN_CUTOFF_RATIO: f64 = 1e-300;

/// Average power `(delta / omega) · E1(cutoff / omega)` spent by a node that
/// inverts its channel above `cutoff`.
pub fn average_power(delta: f64, omega: f64, cutoff: f64) -> f64 {
    delta / omega * e1_positive(cutoff / omega)
}

/// Cutoff `c > 0` with `(delta / omega) · E1(c / omega) = pbar`.
///
/// `E1` falls monotonically from `+inf` to `0`, so the root always exists;
/// for very large budgets it can however drop below the smallest positive
/// double, which is reported as [`Error::CutoffUnderflow`].
pub fn solve_cutoff(delta: f64, omega: f64, pbar: f64) -> Result<f64> {
    for (field, value) in [("delta", delta), ("omega", omega), ("pbar", pbar)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter { field, value });
        }
    }
    // E1(t) ≈ −γ − ln t for small t, which places the root near exp(−γ − s).
    let normalized = pbar * omega / delta;
    let small_root = (-EULER_GAMMA - normalized).exp();
    if small_root == 0.0 {
        return Err(Error::CutoffUnderflow { pbar, delta, omega });
    }
    let lo = omega * CUTOFF_BRACKET_LO.min(0.5 * small_root);
    let hi = omega * CUTOFF_BRACKET_HI;
    let cutoff = solve_monotone(
        |c| average_power(delta, omega, c),
        pbar,
        lo,
        hi,
        Monotonicity::Decreasing,
    )?;
    if cutoff > 0.0 {
        Ok(cutoff)
    } else {
        Err(Error::CutoffUnderflow { pbar, delta, omega })
    }
}

/// Truncated channel-inversion policy of one end node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndNodePolicy {
    pub delta: f64,
    pub cutoff: f64,
    pub omega: f64,
    pub pbar: f64,
}

impl EndNodePolicy {
    /// Policy meeting the average budget `pbar` exactly.
    pub fn from_budget(delta: f64, omega: f64, pbar: f64) -> Result<Self> {
        let cutoff = solve_cutoff(delta, omega, pbar)?;
        Ok(Self {
            delta,
            cutoff,
            omega,
            pbar,
        })
    }

    /// Like [`from_budget`](Self::from_budget), but a budget whose cutoff
    /// would fall below `MIN_CUTOFF_RATIO · omega` gets that cutoff instead.
    /// The node then spends less than `pbar` and `self.pbar` records what it
    /// actually spends. Outage contributed by such a link is below 1e−300.
    pub fn from_budget_saturating(delta: f64, omega: f64, pbar: f64) -> Result<Self> {
        let floor = Self::from_cutoff(delta, omega, MIN_CUTOFF_RATIO * omega)?;
        if pbar >= floor.pbar {
            Ok(floor)
        } else {
            Self::from_budget(delta, omega, pbar)
        }
    }

    /// Policy with a prescribed cutoff; the budget follows from it.
    pub fn from_cutoff(delta: f64, omega: f64, cutoff: f64) -> Result<Self> {
        for (field, value) in [("delta", delta), ("omega", omega), ("cutoff", cutoff)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { field, value });
            }
        }
        Ok(Self {
            delta,
            cutoff,
            omega,
            pbar: average_power(delta, omega, cutoff),
        })
    }

    /// Transmit power for link gain `gain`; the cutoff itself transmits.
    pub fn power(&self, gain: f64) -> f64 {
        if gain >= self.cutoff {
            self.delta / gain
        } else {
            0.0
        }
    }

    /// Whether the link carries the session rate at this gain.
    ///
    /// Above the cutoff the inverted channel reaches capacity exactly equal to
    /// the rate; below it the node is silent. The test therefore reduces to
    /// `gain >= cutoff`.
    pub fn link_supports_rate(&self, gain: f64) -> bool {
        gain >= self.cutoff
    }

    /// Probability that the link is truncated, `1 − e^(−cutoff/omega)`.
    pub fn truncation_probability(&self) -> f64 {
        -(-self.cutoff / self.omega).exp_m1()
    }
}
