//! Acceptance criteria 1 to 8, one report line each.

use std::time::{Duration, Instant};

use tdbc_core::montecarlo::run_opa_with_workers;
use tdbc_core::outage::{outage_fpa, outage_opa};
use tdbc_core::relay::{avg_power_case_a, OpaPolicies};
use tdbc_core::scenario::validate::{
    case_boundary_error, compare_with_simulation, cutoff_round_trip_error, e1_oracle_deviation,
    rho_round_trip_error, saturation_identity_error, validation_cases, CASE_BOUNDARY_TOL,
    CUTOFF_ROUND_TRIP_TOL, E1_ORACLE_TOL, MC_POWER_REL_TOL, MC_SIGMAS, RHO_ROUND_TRIP_TOL,
    SATURATION_IDENTITY_TOL,
};
use tdbc_core::scenario::{
    db_to_linear, derive_seed, linear_to_db, power_gains_at, run, total_power_point, ScenarioKind,
    ScenarioSpec,
};
use tdbc_core::{LinkConfig, OutageCase};

const SEED: u64 = 20_240_501;
const TRIALS: u64 = 1_000_000;

fn report(n: u32, passed: bool, detail: String) -> bool {
    println!(
        "criterion {n}: {} {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}

fn criterion_1() -> bool {
    let start = Instant::now();
    let dev = e1_oracle_deviation();
    let took = start.elapsed();
    report(
        1,
        dev <= E1_ORACLE_TOL && took < Duration::from_secs(1),
        format!("E1 vs quadrature max rel err {dev:.3e} (tol {E1_ORACLE_TOL:e}) in {took:?}"),
    )
}

fn criterion_2() -> bool {
    let start = Instant::now();
    let cutoff = cutoff_round_trip_error(SEED, 50).unwrap();
    let rho = rho_round_trip_error(SEED + 1, 50).unwrap();
    let took = start.elapsed();
    report(
        2,
        cutoff <= CUTOFF_ROUND_TRIP_TOL
            && rho <= RHO_ROUND_TRIP_TOL
            && took < Duration::from_secs(1),
        format!("cutoff rel err {cutoff:.3e}, rho rel err {rho:.3e} in {took:?}"),
    )
}

fn criterion_3() -> bool {
    let err = saturation_identity_error(SEED + 2, 20).unwrap();
    report(
        3,
        err <= SATURATION_IDENTITY_TOL,
        format!("saturated outage vs floor max abs err {err:.3e} over 20 sets"),
    )
}

fn criterion_4() -> bool {
    let (outage, power) = case_boundary_error().unwrap();
    report(
        4,
        outage <= CASE_BOUNDARY_TOL && power <= CASE_BOUNDARY_TOL,
        format!("boundary rel gap outage {outage:.3e}, power {power:.3e} over 10 combos"),
    )
}

fn criterion_5() -> bool {
    let start = Instant::now();
    let cases = validation_cases();
    let mut worst_sigmas: f64 = 0.0;
    let mut worst_power: f64 = 0.0;
    let mut worst_budget = f64::NEG_INFINITY;
    let mut seen = [false; 3];
    for (i, case) in cases.iter().enumerate() {
        let cmp = compare_with_simulation(case, TRIALS, derive_seed(SEED, i as u64, 5)).unwrap();
        seen[match cmp.case {
            OutageCase::A => 0,
            OutageCase::B => 1,
            OutageCase::Min => 2,
        }] = true;
        worst_sigmas = worst_sigmas.max(cmp.outage_sigmas());
        worst_power = cmp.power_errors().into_iter().fold(worst_power, f64::max);
        worst_budget = worst_budget.max(cmp.relay_budget_excess());
    }
    let took = start.elapsed();
    report(
        5,
        cases.len() >= 20
            && seen.iter().all(|&s| s)
            && worst_sigmas <= MC_SIGMAS
            && worst_power <= MC_POWER_REL_TOL
            && worst_budget <= MC_POWER_REL_TOL
            && took < Duration::from_secs(60),
        format!(
            "{} sets (A/B/unbounded covered: {seen:?}), worst outage {worst_sigmas:.2} sigma, \
             worst power rel err {worst_power:.3e}, relay budget excess {worst_budget:.3e}, {took:?}",
            cases.len()
        ),
    )
}

fn criterion_6() -> bool {
    let link = LinkConfig::new(1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0).unwrap();
    let mut dominated = true;
    let mut strict = 0;
    for i in 0..30 {
        let db = -10.0 + 40.0 * i as f64 / 29.0;
        let (policies, fpa) = total_power_point(&link, db_to_linear(db)).unwrap();
        let opa = outage_opa(&policies.relay).p_out;
        let fixed = outage_fpa(&link, &fpa);
        dominated &= opa <= fixed;
        if opa <= 0.9 * fixed {
            strict += 1;
        }
    }
    report(
        6,
        dominated && strict >= 20,
        format!("OPA <= FPA at all 30 points: {dominated}; ratio <= 0.9 at {strict}/30"),
    )
}

fn criterion_7() -> bool {
    let link = LinkConfig::new(1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..=60)
        .map(|i| 10f64.powf(-3.0 + i as f64 * (0.9f64.log10() + 3.0) / 60.0))
        .collect();
    let gains: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|&op| {
            let g = power_gains_at(&link, op).unwrap();
            (op, linear_to_db(g.gain_s), linear_to_db(g.gain_r))
        })
        .collect();
    let positive = gains.iter().all(|&(_, s, r)| s > 0.0 && r > 0.0);
    let at = |op: f64| {
        let g = power_gains_at(&link, op).unwrap();
        (linear_to_db(g.gain_s), linear_to_db(g.gain_r))
    };
    let (lo_s, lo_r) = at(1e-3);
    let (hi_s, hi_r) = at(1e-1);
    let diverging = lo_s > hi_s && lo_r > hi_r;
    let mid_floor = gains
        .iter()
        .filter(|g| (0.3..=0.7).contains(&g.0))
        .map(|&(_, s, r)| s.min(r))
        .fold(f64::INFINITY, f64::min);
    let mid_ok = (mid_floor - 5.0) >= -1.0;
    report(
        7,
        positive && diverging && mid_ok,
        format!(
            "gains > 0 dB on [1e-3, 0.9]: {positive}; gain_s {lo_s:.2} dB at 1e-3 vs {hi_s:.2} dB at 0.1, \
             gain_r {lo_r:.2} vs {hi_r:.2}; mid-range floor {mid_floor:.2} dB (5 +/- 1)"
        ),
    )
}

fn criterion_8() -> bool {
    let mut spec = ScenarioSpec::new(ScenarioKind::Validate);
    spec.seed = SEED;
    spec.trials = 200_000;
    let first = run(&spec).unwrap().table.to_csv_string();
    let second = run(&spec).unwrap().table.to_csv_string();
    let csv_identical = first == second;

    let config = validation_cases()[3].config;
    let pools: Vec<_> = [1, 2, 8]
        .into_iter()
        .map(|w| run_opa_with_workers(&config, 500_000, SEED, w).unwrap())
        .collect();
    let workers_identical = pools.windows(2).all(|w| w[0] == w[1]);
    report(
        8,
        csv_identical && workers_identical,
        format!("validate CSV byte-identical: {csv_identical}; MC identical across 1/2/8 workers: {workers_identical}"),
    )
}

fn acceptance_criteria() -> bool {
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
    }
    failed.is_empty()
}

/// A sign flip in the first term of the case-A relay power formula must be
/// caught by the simulation check.
fn mutated_relay_power_is_detected() -> bool {
    let mut caught = 0;
    let mut ok = true;
    for (i, case) in validation_cases().iter().enumerate() {
        let policies = OpaPolicies::solve(&case.config).unwrap();
        if outage_opa(&policies.relay).case_used != OutageCase::A {
            continue;
        }
        let r = policies.relay;
        let p = r.params;
        let (l1, l2) = (r.lambda1, r.lambda2);
        let e1 = |x: f64| tdbc_core::exp_integral_e1(tdbc_core::PositiveReal::new(x).unwrap());
        let first = p.delta1 / p.omega_y
            * (-l1 / p.omega_x).exp()
            * (e1(l2 / p.omega_y) - e1(p.delta1 * l1 / (p.delta2 * p.omega_y)));
        let correct = avg_power_case_a(&p, l1, l2);
        let mutated = correct - 2.0 * first;
        let cmp =
            compare_with_simulation(case, TRIALS / 4, derive_seed(SEED, i as u64, 9)).unwrap();
        let mc = cmp.report.avg_power_relay;
        let shift = ((mutated - correct) / correct).abs();
        let detected = ((mc - mutated) / mutated).abs() > MC_POWER_REL_TOL;
        ok &= ((mc - correct) / correct).abs() <= MC_POWER_REL_TOL;
        // A shift well beyond the tolerance has to be caught; a vanishing
        // term cannot be.
        if shift > 3.0 * MC_POWER_REL_TOL {
            ok &= detected;
            caught += usize::from(detected);
        }
    }
    ok &= caught > 0;
    println!(
        "mutation: {} sign-flipped case-A relay power term caught on {caught} instance(s)",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn main() {
    let criteria = acceptance_criteria();
    let mutation = mutated_relay_power_is_detected();
    if !(criteria && mutation) {
        std::process::exit(1);
    }
}
