//! Scenario sweeps behind the command-line front end.
//!
//! * `sweep-total-power`: outage of optimal vs. fixed allocation when a total
//!   power `P_T` is split equally over the three nodes.
//! * `power-gains`: power saved by the optimal policies at a target outage.
//! * `validate`: every closed form checked against its oracle.
//!
//! Powers enter and leave in dB (relative to unit noise); everything in
//! between is linear.

pub mod config;
pub mod table;
pub mod validate;

use std::path::PathBuf;

use crate::endnode::EndNodePolicy;
use crate::error::{Error, Result};
use crate::montecarlo::{run_fpa, run_policies};
use crate::outage::{outage_fpa, outage_opa, FpaConfig};
use crate::relay::{max_avg_relay_power, OpaPolicies, RelayParams};
use crate::system::{LinkConfig, SystemConfig};

pub use table::{format_number, Cell, Table};

pub const MIN_TRIALS: u64 = 1_000;
const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    SweepTotalPower,
    PowerGains,
    Validate,
}

impl ScenarioKind {
    /// Section name in configuration files.
    pub fn section(self) -> &'static str {
        match self {
            ScenarioKind::SweepTotalPower => "sweep_total_power",
            ScenarioKind::PowerGains => "power_gains",
            ScenarioKind::Validate => "validate",
        }
    }

    pub fn default_grid(self) -> Vec<f64> {
        match self {
            ScenarioKind::SweepTotalPower | ScenarioKind::Validate => {
                parse_grid("-10:30:2").expect("static grid")
            }
            ScenarioKind::PowerGains => vec![
                0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: ScenarioKind,
    pub rate_1: f64,
    pub rate_2: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    /// Total power in dB for the sweeps, target outage probability for
    /// `power-gains`.
    pub grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl ScenarioSpec {
    pub fn new(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            rate_1: 1.0 / 3.0,
            rate_2: 1.0 / 3.0,
            omega_x: 1.0,
            omega_y: 1.0,
            grid: scenario.default_grid(),
            trials: crate::montecarlo::DEFAULT_TRIALS,
            seed: 1,
            output_path: None,
        }
    }

    pub fn link(&self) -> Result<LinkConfig> {
        LinkConfig::new(self.rate_1, self.rate_2, self.omega_x, self.omega_y)
    }

    pub fn validate(&self) -> Result<()> {
        self.link()?;
        if self.grid.is_empty() {
            return Err(Error::Config("grid must not be empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("grid values must be finite".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("grid must be strictly increasing".into()));
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::Config(format!(
                "trials must be at least {MIN_TRIALS}, got {}",
                self.trials
            )));
        }
        if self.scenario == ScenarioKind::PowerGains {
            if let Some(&bad) = self.grid.iter().find(|&&op| !(op > 0.0 && op < 1.0)) {
                return Err(Error::InvalidOutageTarget(bad));
            }
        }
        Ok(())
    }
}

/// Parses `start:stop:step` into `start, start + step, …` up to `stop`
/// (inclusive within rounding).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("invalid grid `{text}`: {why}"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(bad("expected start:stop:step"));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| bad(&format!("`{s}` is not a number")))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop must not be below start"));
    }
    let span = (stop - start) / step;
    if span >= MAX_GRID_POINTS as f64 {
        return Err(bad("too many points"));
    }
    let n = (span + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Per-row seed, decorrelated from neighbouring rows and from `stream`.
pub fn derive_seed(seed: u64, row: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed
        .wrapping_add(row.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Analytic outages at total power `p_total` (linear), split equally.
pub fn total_power_point(link: &LinkConfig, p_total: f64) -> Result<(OpaPolicies, FpaConfig)> {
    let share = p_total / 3.0;
    let config = SystemConfig::new(*link, share, share, share)?;
    Ok((OpaPolicies::solve(&config)?, FpaConfig::uniform(share)?))
}

/// `[P_T_dB, op_opa_analytic, op_opa_mc, op_fpa_analytic, op_fpa_mc]` per
/// grid point.
pub fn scenario_total_power(spec: &ScenarioSpec) -> Result<Table> {
    spec.validate()?;
    let link = spec.link()?;
    let mut table = Table::new(vec![
        "P_T_dB",
        "op_opa_analytic",
        "op_opa_mc",
        "op_fpa_analytic",
        "op_fpa_mc",
    ]);
    for (row, &pt_db) in spec.grid.iter().enumerate() {
        let (policies, fpa) = total_power_point(&link, db_to_linear(pt_db))?;
        let opa_analytic = outage_opa(&policies.relay).p_out;
        let opa_mc = run_policies(
            &policies,
            spec.trials,
            derive_seed(spec.seed, row as u64, 0),
            0,
        )?;
        let fpa_analytic = outage_fpa(&link, &fpa);
        let fpa_mc = run_fpa(
            &link,
            &fpa,
            spec.trials,
            derive_seed(spec.seed, row as u64, 1),
        )?;
        table.push(vec![
            pt_db.into(),
            opa_analytic.into(),
            opa_mc.outage_rate.into(),
            fpa_analytic.into(),
            fpa_mc.outage_rate.into(),
        ]);
    }
    Ok(table)
}

/// Power gains of the optimal policies at one target outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerGains {
    pub op_target: f64,
    pub x0: f64,
    pub y0: f64,
    /// `P_S^fix / P̄_S` (identical for both end nodes under the equal split).
    pub gain_s: f64,
    /// `P_R^fix / P̄_R^max`.
    pub gain_r: f64,
}

/// Splits the outage exponent equally, `x0/Ω_X = y0/Ω_Y = −½·ln(1 − OP)`, and
/// compares the optimal budgets with the least fixed powers reaching the
/// same outage.
pub fn power_gains_at(link: &LinkConfig, op_target: f64) -> Result<PowerGains> {
    if !(op_target > 0.0 && op_target < 1.0) {
        return Err(Error::InvalidOutageTarget(op_target));
    }
    let (d1, d2) = (link.delta1(), link.delta2());
    let exponent = -0.5 * (-op_target).ln_1p();
    let x0 = exponent * link.omega_x;
    let y0 = exponent * link.omega_y;
    let s1 = EndNodePolicy::from_cutoff(d1, link.omega_x, x0)?;
    let s2 = EndNodePolicy::from_cutoff(d2, link.omega_y, y0)?;
    let params = RelayParams::from_end_nodes(&s1, &s2)?;

    let p_s1_fix = d1 / x0;
    let p_s2_fix = d2 / y0;
    let p_r_fix = (d1 * p_s2_fix / d2).max(d2 * p_s1_fix / d1);
    Ok(PowerGains {
        op_target,
        x0,
        y0,
        gain_s: p_s1_fix / s1.pbar,
        gain_r: p_r_fix / max_avg_relay_power(&params),
    })
}

/// `[op_target, gain_s_dB, gain_r_dB]` per grid point.
pub fn scenario_power_gains(spec: &ScenarioSpec) -> Result<Table> {
    spec.validate()?;
    let link = spec.link()?;
    let mut table = Table::new(vec!["op_target", "gain_s_dB", "gain_r_dB"]);
    for &op in &spec.grid {
        let g = power_gains_at(&link, op)?;
        table.push(vec![
            op.into(),
            linear_to_db(g.gain_s).into(),
            linear_to_db(g.gain_r).into(),
        ]);
    }
    Ok(table)
}

/// Result of running any scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub table: Table,
    /// False only when a validation check failed.
    pub passed: bool,
}

pub fn run(spec: &ScenarioSpec) -> Result<ScenarioOutput> {
    match spec.scenario {
        ScenarioKind::SweepTotalPower => Ok(ScenarioOutput {
            table: scenario_total_power(spec)?,
            passed: true,
        }),
        ScenarioKind::PowerGains => Ok(ScenarioOutput {
            table: scenario_power_gains(spec)?,
            passed: true,
        }),
        ScenarioKind::Validate => {
            let outcome = validate::scenario_validate(spec)?;
            Ok(ScenarioOutput {
                passed: outcome.all_passed(),
                table: outcome.to_table(),
            })
        }
    }
}
