//! Seeded Monte Carlo simulation of transmission cycles.
//!
//! Trials are split into fixed-size chunks. Chunk `i` draws from ChaCha
//! stream `i` of the run seed and the per-chunk sums are reduced in chunk
//! order, so a report depends only on `(seed, trials)` and never on how many
//! worker threads ran.
//!
//! Average powers are taken over *all* cycles, silent ones included. That is
//! what a long-term power budget constrains.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::outage::FpaConfig;
use crate::relay::OpaPolicies;
use crate::system::{ChannelState, FadingSampler, LinkConfig, SystemConfig};

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const CHUNK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Opa,
    Fpa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub outage_rate: f64,
    pub avg_power_s1: f64,
    pub avg_power_s2: f64,
    pub avg_power_relay: f64,
    /// `sqrt(r(1 − r)/trials)` for the outage rate `r`.
    pub binomial_sigma: f64,
    /// Standard errors of the three average powers.
    pub power_sigma_s1: f64,
    pub power_sigma_s2: f64,
    pub power_sigma_relay: f64,
    pub seed: u64,
    pub policy_kind: PolicyKind,
}

/// Result of one transmission cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOutcome {
    pub outage: bool,
    pub power_s1: f64,
    pub power_s2: f64,
    pub power_relay: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(&mut self, other: &Moments) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn mean_and_sigma(&self, n: f64) -> (f64, f64) {
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    outages: u64,
    s1: Moments,
    s2: Moments,
    relay: Moments,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.outages += other.outages;
        self.s1.merge(&other.s1);
        self.s2.merge(&other.s2);
        self.relay.merge(&other.relay);
    }
}

/// Runs `trials` cycles through `cycle` and aggregates them.
///
/// `workers == 0` uses the global rayon pool; any other value runs on a
/// dedicated pool of that size. The result is identical either way.
pub fn simulate<F>(
    omega_x: f64,
    omega_y: f64,
    trials: u64,
    seed: u64,
    workers: usize,
    policy_kind: PolicyKind,
    cycle: F,
) -> Result<SimReport>
where
    F: Fn(ChannelState) -> CycleOutcome + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidTrials);
    }
    let chunks = trials.div_ceil(CHUNK_SIZE);
    let run_chunk = |chunk: u64| {
        let start = chunk * CHUNK_SIZE;
        let len = CHUNK_SIZE.min(trials - start);
        let mut sampler = FadingSampler::new(seed, chunk, omega_x, omega_y);
        let mut tally = Tally::default();
        for _ in 0..len {
            let out = cycle(sampler.sample_state());
            tally.outages += out.outage as u64;
            tally.s1.push(out.power_s1);
            tally.s2.push(out.power_s2);
            tally.relay.push(out.power_relay);
        }
        tally
    };
    let collect = || {
        (0..chunks)
            .into_par_iter()
            .map(run_chunk)
            .collect::<Vec<_>>()
    };
    let per_chunk = if workers == 0 {
        collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(collect)
    };
    let mut total = Tally::default();
    for t in &per_chunk {
        total.merge(t);
    }

    let n = trials as f64;
    let outage_rate = total.outages as f64 / n;
    let (avg_power_s1, power_sigma_s1) = total.s1.mean_and_sigma(n);
    let (avg_power_s2, power_sigma_s2) = total.s2.mean_and_sigma(n);
    let (avg_power_relay, power_sigma_relay) = total.relay.mean_and_sigma(n);
    Ok(SimReport {
        trials,
        outage_rate,
        avg_power_s1,
        avg_power_s2,
        avg_power_relay,
        binomial_sigma: (outage_rate * (1.0 - outage_rate) / n).sqrt(),
        power_sigma_s1,
        power_sigma_s2,
        power_sigma_relay,
        seed,
        policy_kind,
    })
}

/// One cycle under the optimal policies.
pub fn opa_cycle(policies: &OpaPolicies, state: ChannelState) -> CycleOutcome {
    let power_s1 = policies.s1.power(state.x);
    let power_s2 = policies.s2.power(state.y);
    let power_relay = policies.relay.optimal_power(state);
    CycleOutcome {
        outage: power_relay == 0.0,
        power_s1,
        power_s2,
        power_relay,
    }
}

/// One cycle at fixed powers.
pub fn fpa_cycle(delta1: f64, delta2: f64, fpa: &FpaConfig, state: ChannelState) -> CycleOutcome {
    let uplinks = state.x >= delta1 / fpa.p_s1_fix && state.y >= delta2 / fpa.p_s2_fix;
    let broadcast = state.y >= delta1 / fpa.p_r_fix && state.x >= delta2 / fpa.p_r_fix;
    CycleOutcome {
        outage: !(uplinks && broadcast),
        power_s1: fpa.p_s1_fix,
        power_s2: fpa.p_s2_fix,
        power_relay: fpa.p_r_fix,
    }
}

/// Simulates already-solved policies (the relay cutoff may be arbitrary).
pub fn run_policies(
    policies: &OpaPolicies,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SimReport> {
    simulate(
        policies.s1.omega,
        policies.s2.omega,
        trials,
        seed,
        workers,
        PolicyKind::Opa,
        |s| opa_cycle(policies, s),
    )
}

/// Solves the optimal policies for `config` and simulates them.
pub fn run_opa(config: &SystemConfig, trials: u64, seed: u64) -> Result<SimReport> {
    run_opa_with_workers(config, trials, seed, 0)
}

pub fn run_opa_with_workers(
    config: &SystemConfig,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SimReport> {
    let policies = OpaPolicies::solve(config)?;
    run_policies(&policies, trials, seed, workers)
}

pub fn run_fpa(link: &LinkConfig, fpa: &FpaConfig, trials: u64, seed: u64) -> Result<SimReport> {
    run_fpa_with_workers(link, fpa, trials, seed, 0)
}

pub fn run_fpa_with_workers(
    link: &LinkConfig,
    fpa: &FpaConfig,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SimReport> {
    link.validate()?;
    let (d1, d2) = (link.delta1(), link.delta2());
    simulate(
        link.omega_x,
        link.omega_y,
        trials,
        seed,
        workers,
        PolicyKind::Fpa,
        |s| fpa_cycle(d1, d2, fpa, s),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::{min_outage, outage_fpa};
    use crate::relay::RelayCutoff;

    fn unit_link() -> LinkConfig {
        LinkConfig::new(1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = SystemConfig::new(unit_link(), 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(run_opa(&cfg, 0, 1), Err(Error::InvalidTrials)));
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = SystemConfig::new(unit_link(), 1.0, 1.0, 0.5).unwrap();
        let a = run_opa(&cfg, 200_000, 42).unwrap();
        let b = run_opa(&cfg, 200_000, 42).unwrap();
        assert_eq!(a, b);
        let c = run_opa(&cfg, 200_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let cfg = SystemConfig::new(unit_link(), 1.0, 1.5, 0.5).unwrap();
        let base = run_opa_with_workers(&cfg, 300_001, 7, 1).unwrap();
        for w in [2, 8] {
            assert_eq!(base, run_opa_with_workers(&cfg, 300_001, 7, w).unwrap());
        }
    }

    #[test]
    fn unbounded_regime_outage_matches_floor() {
        // x0 = y0 = 0.2 for δ = 1, Ω = 1.
        let pbar = crate::endnode::average_power(1.0, 1.0, 0.2);
        let cfg = SystemConfig::new(unit_link(), pbar, pbar, 10.0).unwrap();
        let policies = OpaPolicies::solve(&cfg).unwrap();
        assert_eq!(policies.relay.rho, RelayCutoff::Unbounded);
        let rep = run_policies(&policies, DEFAULT_TRIALS, 3, 0).unwrap();
        let p = min_outage(0.2, 0.2, 1.0, 1.0);
        assert!((rep.outage_rate - p).abs() <= 4.0 * rep.binomial_sigma);
        assert!(((rep.avg_power_s1 - pbar) / pbar).abs() < 0.01);
    }

    #[test]
    fn fpa_simulation() {
        let link = unit_link();
        let fpa = FpaConfig::uniform(10.0).unwrap();
        let rep = run_fpa(&link, &fpa, DEFAULT_TRIALS, 5).unwrap();
        let p = outage_fpa(&link, &fpa);
        assert!((rep.outage_rate - p).abs() <= 4.0 * rep.binomial_sigma);
        assert_eq!(rep.avg_power_relay, 10.0);
        assert_eq!(rep.avg_power_s1, 10.0);
        assert_eq!(rep.policy_kind, PolicyKind::Fpa);

        let uplink_limited = FpaConfig::new(4.0, 2.0, 1e9).unwrap();
        let rep = run_fpa(&link, &uplink_limited, DEFAULT_TRIALS, 6).unwrap();
        let p = min_outage(1.0 / 4.0, 1.0 / 2.0, 1.0, 1.0);
        assert!((rep.outage_rate - p).abs() <= 4.0 * rep.binomial_sigma);
    }

    #[test]
    fn report_invariants() {
        let cfg = SystemConfig::new(unit_link(), 0.3, 0.7, 0.2).unwrap();
        let rep = run_opa(&cfg, 10_000, 1).unwrap();
        assert!((0.0..=1.0).contains(&rep.outage_rate));
        assert!(rep.avg_power_s1 >= 0.0 && rep.avg_power_relay >= 0.0);
        let r = rep.outage_rate;
        assert_eq!(rep.binomial_sigma, (r * (1.0 - r) / 10_000.0).sqrt());
    }
}
