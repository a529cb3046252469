use tdbc_core::montecarlo::{run_opa, run_policies};
use tdbc_core::scenario::validate::validation_cases;
use tdbc_core::{EndNodePolicy, FadingSampler, LinkConfig, OpaPolicies, SystemConfig};

const N: usize = 1_000_000;

#[test]
fn channel_draws_are_exponential() {
    let omega_x = 1.7;
    let mut sampler = FadingSampler::new(11, 0, omega_x, 0.4);
    let mut xs = Vec::with_capacity(N);
    for _ in 0..N {
        xs.push(sampler.sample_state().x);
    }
    xs.sort_by(f64::total_cmp);
    let n = N as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = -(-x / omega_x).exp_m1();
            (cdf - i as f64 / n)
                .abs()
                .max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample Kolmogorov–Smirnov statistic.
    assert!(ks < 1.628 / n.sqrt(), "ks = {ks}");
}

#[test]
fn links_are_uncorrelated() {
    let mut sampler = FadingSampler::new(12, 3, 1.0, 1.0);
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..N {
        let s = sampler.sample_state();
        sx += s.x;
        sy += s.y;
        sxx += s.x * s.x;
        syy += s.y * s.y;
        sxy += s.x * s.y;
    }
    let n = N as f64;
    let cov = sxy / n - sx * sy / (n * n);
    let corr = cov / ((sxx / n - (sx / n).powi(2)) * (syy / n - (sy / n).powi(2))).sqrt();
    assert!(corr.abs() < 0.005, "corr = {corr}");
}

#[test]
fn single_link_outage_and_budget() {
    let node = EndNodePolicy::from_budget(1.0, 2.0, 0.8).unwrap();
    let mut sampler = FadingSampler::new(13, 0, 2.0, 1.0);
    let (mut silent, mut spent) = (0usize, 0.0);
    for _ in 0..N {
        let x = sampler.sample_state().x;
        if !node.link_supports_rate(x) {
            silent += 1;
        }
        spent += node.power(x);
    }
    let p = node.truncation_probability();
    let sigma = (p * (1.0 - p) / N as f64).sqrt();
    assert!((silent as f64 / N as f64 - p).abs() <= 4.0 * sigma);
    assert!((spent / N as f64 / 0.8 - 1.0).abs() <= 0.01);
}

#[test]
fn more_budget_never_hurts() {
    let link = LinkConfig::new(1.0 / 3.0, 0.5, 1.0, 2.0).unwrap();
    let base = SystemConfig::new(link, 2.0, 2.0, 2.0).unwrap();
    let reference = run_opa(&base, 200_000, 5).unwrap();
    for scale in [(2.0, 1.0, 1.0), (1.0, 2.0, 1.0), (1.0, 1.0, 2.0)] {
        let cfg = SystemConfig::new(link, 2.0 * scale.0, 2.0 * scale.1, 2.0 * scale.2).unwrap();
        let more = run_opa(&cfg, 200_000, 5).unwrap();
        assert!(
            more.outage_rate <= reference.outage_rate + reference.binomial_sigma,
            "{scale:?}: {} vs {}",
            more.outage_rate,
            reference.outage_rate
        );
    }
}

#[test]
fn finite_cutoff_spends_the_whole_budget() {
    for case in validation_cases() {
        let policies = OpaPolicies::solve(&case.config).unwrap();
        if policies.relay.rho.is_unbounded() {
            continue;
        }
        let rep = run_policies(&policies, 400_000, 21, 0).unwrap();
        let ratio = rep.avg_power_relay / case.config.p_avg_relay;
        assert!((ratio - 1.0).abs() <= 0.01, "{}: {ratio}", case.label);
    }
}
