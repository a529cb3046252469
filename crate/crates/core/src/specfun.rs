//! Exponential integral and a bracketing root solver for monotone functions.
//!
//! Every cutoff threshold in the allocation policies is the inverse of an
//! average-power expression built from `E1`, so the two live together.

use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Relative residual at which [`solve_monotone`] accepts a root.
pub const SOLVER_F_REL_TOL: f64 = 1e-12;
/// Relative bracket width at which [`solve_monotone`] accepts a root.
pub const SOLVER_X_REL_TOL: f64 = 1e-14;
/// Geometric factor applied to a bracket end that does not enclose the target.
pub const BRACKET_EXPANSION_FACTOR: f64 = 4.0;
/// Maximum number of bracket expansions before giving up.
pub const MAX_BRACKET_EXPANSIONS: usize = 200;
/// Maximum number of bisection steps.
pub const MAX_BISECTION_STEPS: usize = 200;

const SERIES_EPS: f64 = 1e-17;
const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("expected a strictly positive finite number, got {0}")]
pub struct DomainError(pub f64);

/// A strictly positive, finite real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PositiveReal(f64);

impl PositiveReal {
    pub fn new(value: f64) -> Result<Self, DomainError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(DomainError(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PositiveReal {
    type Error = DomainError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

/// Exponential integral `E1(x) = ∫ₓ^∞ e^(−t)/t dt`.
///
/// Power series for `x <= 1`, modified Lentz evaluation of the continued
/// fraction above that. Returns `0.0` once `e^(−x)` underflows.
pub fn exp_integral_e1(x: PositiveReal) -> f64 {
    e1_positive(x.get())
}

/// Checked convenience wrapper around [`exp_integral_e1`].
pub fn e1(x: f64) -> Result<f64, DomainError> {
    PositiveReal::new(x).map(exp_integral_e1)
}

/// `E1` for arguments already known to be positive. `+inf` maps to `0.0`.
pub(crate) fn e1_positive(x: f64) -> f64 {
    debug_assert!(x > 0.0, "E1 argument must be positive, got {x}");
    if x == f64::INFINITY {
        return 0.0;
    }
    if x <= 1.0 {
        e1_series(x)
    } else {
        e1_continued_fraction(x)
    }
}

// −γ − ln x + Σ_{k≥1} (−1)^{k+1} x^k / (k·k!)
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = -term / kf;
        sum += contrib;
        if contrib.abs() < SERIES_EPS * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

// E1(x) = e^(−x) · 1/(x+1− 1²/(x+3− 2²/(x+5− …)))
fn e1_continued_fraction(x: f64) -> f64 {
    let scale = (-x).exp();
    if scale == 0.0 {
        return 0.0;
    }
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h * scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error(
        "target {target} not bracketed after {expansions} expansions (last bracket [{lo}, {hi}])"
    )]
    BracketNotFound {
        target: f64,
        lo: f64,
        hi: f64,
        expansions: usize,
    },
    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("no convergence after {steps} bisection steps (bracket [{lo}, {hi}])")]
    NoConvergence { lo: f64, hi: f64, steps: usize },
}

fn expand_down(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        lo / BRACKET_EXPANSION_FACTOR
    } else {
        lo - (BRACKET_EXPANSION_FACTOR - 1.0) * (hi - lo)
    }
}

fn expand_up(lo: f64, hi: f64) -> f64 {
    if hi > 0.0 {
        hi * BRACKET_EXPANSION_FACTOR
    } else {
        hi + (BRACKET_EXPANSION_FACTOR - 1.0) * (hi - lo)
    }
}

/// Finds `x` with `f(x) = target` for a strictly monotone `f`.
///
/// The bracket is widened geometrically until it encloses the target, then
/// bisected. Brackets that stay on the positive axis are widened by division
/// so that the lower end never leaves the domain, and bisected geometrically
/// while they span more than a factor of two.
pub fn solve_monotone<F>(
    f: F,
    target: f64,
    bracket_lo: f64,
    bracket_hi: f64,
    direction: Monotonicity,
) -> Result<f64, SolveError>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (bracket_lo, bracket_hi);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(SolveError::InvalidBracket { lo, hi });
    }
    let sign = match direction {
        Monotonicity::Increasing => 1.0,
        Monotonicity::Decreasing => -1.0,
    };
    // Shifted so that h is increasing with the root at h = 0.
    let h = |x: f64| -> Result<f64, SolveError> {
        let v = f(x);
        if v.is_nan() {
            Err(SolveError::NonFinite { x })
        } else {
            Ok(sign * (v - target))
        }
    };

    let mut expansions = 0;
    let mut h_lo = h(lo)?;
    while h_lo > 0.0 {
        if expansions == MAX_BRACKET_EXPANSIONS {
            return Err(SolveError::BracketNotFound {
                target,
                lo,
                hi,
                expansions,
            });
        }
        let next = expand_down(lo, hi);
        if !next.is_finite() || next == lo {
            return Err(SolveError::BracketNotFound {
                target,
                lo,
                hi,
                expansions,
            });
        }
        lo = next;
        h_lo = h(lo)?;
        expansions += 1;
    }
    let mut h_hi = h(hi)?;
    while h_hi < 0.0 {
        if expansions == MAX_BRACKET_EXPANSIONS {
            return Err(SolveError::BracketNotFound {
                target,
                lo,
                hi,
                expansions,
            });
        }
        let next = expand_up(lo, hi);
        if !next.is_finite() || next == hi {
            return Err(SolveError::BracketNotFound {
                target,
                lo,
                hi,
                expansions,
            });
        }
        hi = next;
        h_hi = h(hi)?;
        expansions += 1;
    }
    if h_lo == 0.0 {
        return Ok(lo);
    }
    if h_hi == 0.0 {
        return Ok(hi);
    }

    let f_tol = SOLVER_F_REL_TOL * target.abs();
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = if lo > 0.0 && hi > 2.0 * lo {
            lo.sqrt() * hi.sqrt()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo || mid >= hi {
            return Ok(if -h_lo < h_hi { lo } else { hi });
        }
        let h_mid = h(mid)?;
        if h_mid.abs() <= f_tol {
            return Ok(mid);
        }
        if h_mid < 0.0 {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
            h_hi = h_mid;
        }
        if hi - lo <= SOLVER_X_REL_TOL * lo.abs().max(hi.abs()) {
            return Ok(lo + 0.5 * (hi - lo));
        }
    }
    Err(SolveError::NoConvergence {
        lo,
        hi,
        steps: MAX_BISECTION_STEPS,
    })
}
