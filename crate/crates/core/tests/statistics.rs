//! Statistical behaviour of the simulator across seeds.

use std::f64::consts::PI;

use ctxprob::interference::DEFAULT_TOL;
use ctxprob::twoslit::{gaussian_envelope, run_experiment, ExperimentReport, Grid, PhaseModel, TwoSlitScenario};

const SEEDS: u64 = 24;

fn scenario(n_emitted: u64, seed: u64) -> TwoSlitScenario {
    let grid = Grid {
        bins: 40,
        x_min: -4.0,
        x_max: 4.0,
    };
    let env = gaussian_envelope(grid.space().unwrap().positions().unwrap(), 0.0, 1.0);
    let phase = PhaseModel::FreeWave {
        momentum1: PI,
        momentum2: -PI,
        h: 1.0,
    };
    TwoSlitScenario::new(grid, env.clone(), env, phase, n_emitted, seed, 1).unwrap()
}

fn reports(n_emitted: u64) -> Vec<ExperimentReport> {
    (0..SEEDS)
        .map(|seed| run_experiment(&scenario(n_emitted, 1000 + seed), DEFAULT_TOL).unwrap())
        .collect()
}

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0.0), |(s, n), x| (s + x * x, n + 1.0));
    (s / n).sqrt()
}

/// `N1 ~ Binomial(N, 1/2)` gives `sd(ĉ1) = 1 / (2 sqrt N)`.
#[test]
fn coefficient_spread_follows_inverse_sqrt_n() {
    let mut spreads = Vec::new();
    for n in [10_000u64, 100_000] {
        let rs = reports(n);
        let spread = rms(rs.iter().map(|r| r.analysis.coefficients.c1 - 0.5));
        let expect = 0.5 / (n as f64).sqrt();
        // chi distribution with 24 degrees of freedom: ±40% is beyond 3σ
        assert!((0.6..1.4).contains(&(spread / expect)), "n = {n}: {spread} vs {expect}");
        for r in &rs {
            let c = r.analysis.coefficients;
            assert!((c.c1 - 0.5).abs() <= 5.0 / (2.0 * (n as f64).sqrt()));
            assert!((c.c2 - 0.5).abs() <= 5.0 / (2.0 * (n as f64).sqrt()));
        }
        spreads.push(spread);
    }
    let ratio = spreads[0] / spreads[1];
    assert!((10f64.sqrt() * 0.6..10f64.sqrt() / 0.6).contains(&ratio), "{ratio}");
}

/// The reported delta-method standard errors match the spread of `δ̂` and `λ̂` across seeds.
#[test]
fn reported_standard_errors_match_seed_spread() {
    let n = 100_000;
    let rs = reports(n);
    let model = scenario(n, 0).exact_model();
    // central bins carry the most counts
    for bin in 17..23 {
        let (p1, p2) = (model.dist_s1.probs[bin], model.dist_s2.probs[bin]);
        let delta = model.dist_s.probs[bin] - 0.5 * (p1 + p2);
        let spread = rms(rs.iter().map(|r| r.bins()[bin].delta - delta));
        let se = rms(rs.iter().map(|r| r.bins()[bin].stderr_delta));
        assert!(
            (0.6..1.4).contains(&(spread / se)),
            "bin {bin}: delta spread {spread} vs se {se}"
        );

        let lambda = delta / (p1 * p2).sqrt();
        let spread = rms(rs.iter().map(|r| r.bins()[bin].lambda.unwrap() - lambda));
        let se = rms(rs.iter().map(|r| r.bins()[bin].stderr_lambda.unwrap()));
        assert!(
            (0.6..1.4).contains(&(spread / se)),
            "bin {bin}: lambda spread {spread} vs se {se}"
        );
    }
}

/// The violation statistic grows like `sqrt N` when interference is present.
#[test]
fn violation_statistic_grows_with_sqrt_n() {
    let small: f64 = reports(10_000).iter().map(|r| r.violation_statistic()).sum::<f64>() / SEEDS as f64;
    let large: f64 = reports(100_000).iter().map(|r| r.violation_statistic()).sum::<f64>() / SEEDS as f64;
    let ratio = large / small;
    assert!((2.5..4.0).contains(&ratio), "{small} -> {large}");
}
