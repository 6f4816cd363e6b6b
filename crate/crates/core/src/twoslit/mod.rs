//! Monte Carlo two-slit ensembles.
//!
//! Three independent classical experiments are simulated over a 1-D screen:
//! both slits open (`S`), only slit 1 (`S1`), only slit 2 (`S2`). Each run
//! emits `n_emitted` particles per context. Under `S` every particle is
//! detected and lands according to
//!
//! ```text
//! p(x) = 1/2 [p1(x) + p2(x) + 2 sqrt(p1(x) p2(x)) cos θ(x)]
//! ```
//!
//! Under `S_j` a particle is detected with probability `1/2` and lands
//! according to the envelope `p_j`, so that `N_j / N ≈ 1/2`. Nothing else
//! links the contexts: the interference term is recovered purely from the
//! three sets of counts.

mod estimate;
mod stream;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::{
    Context, ContextualDistribution, ContextualModel, EnsembleCounts, OutcomeSpace, SplittingCoefficients,
    NORMALIZATION_TOL,
};
use crate::error::{Error, Result};

pub use estimate::{analyze_counts, BinEstimate, BinKind, EmpiricalAnalysis};
pub use stream::{stream, stream_id, CHUNK};

/// Splitting coefficient of each slit for a source symmetric about the slits.
pub const SLIT_COEFFICIENT: f64 = 0.5;

/// Bins with fewer counts than this in any context are left out of phase comparisons.
pub const MIN_PHASE_COUNT: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub bins: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Grid {
    pub fn space(&self) -> Result<OutcomeSpace> {
        OutcomeSpace::uniform_grid(self.bins, self.x_min, self.x_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseModel {
    /// Phase shift per bin.
    Explicit { values: Vec<f64> },
    /// Plane-wave branch phases `ξ_j(x) = p_j x / h`, shift `θ(x) = (p1 - p2) x / h`.
    FreeWave { momentum1: f64, momentum2: f64, h: f64 },
}

impl PhaseModel {
    pub fn theta(&self, positions: &[f64]) -> Vec<f64> {
        match self {
            PhaseModel::Explicit { values } => values.clone(),
            PhaseModel::FreeWave {
                momentum1,
                momentum2,
                h,
            } => positions.iter().map(|x| (momentum1 - momentum2) * x / h).collect(),
        }
    }

    pub fn scaling(&self) -> f64 {
        match self {
            PhaseModel::Explicit { .. } => 1.0,
            PhaseModel::FreeWave { h, .. } => *h,
        }
    }
}

/// Normalized Gaussian density evaluated at bin midpoints.
pub fn gaussian_envelope(positions: &[f64], mean: f64, sigma: f64) -> Vec<f64> {
    normalize(
        positions
            .iter()
            .map(|x| {
                let z = (x - mean) / sigma;
                (-0.5 * z * z).exp()
            })
            .collect(),
    )
}

pub fn uniform_envelope(bins: usize) -> Vec<f64> {
    vec![1.0 / bins as f64; bins]
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let z: f64 = v.iter().sum();
    v.into_iter().map(|x| x / z).collect()
}

/// `1/2 [p1 + p2 + 2 sqrt(p1 p2) cos θ]`, evaluated as
/// `1/2 [(sqrt p1 - sqrt p2)² + 2 sqrt(p1 p2)(1 + cos θ)]` so it is never negative.
pub fn two_slit_density(p1: f64, p2: f64, theta: f64) -> f64 {
    let (r1, r2) = (p1.sqrt(), p2.sqrt());
    let d = r1 - r2;
    0.5 * (d * d + 2.0 * r1 * r2 * (1.0 + theta.cos()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSlitScenario {
    grid: Grid,
    space: OutcomeSpace,
    envelope1: Vec<f64>,
    envelope2: Vec<f64>,
    phase: PhaseModel,
    theta: Vec<f64>,
    n_emitted: u64,
    seed: u64,
    runs: u32,
    acceptance: f64,
}

impl TwoSlitScenario {
    pub fn new(
        grid: Grid,
        envelope1: Vec<f64>,
        envelope2: Vec<f64>,
        phase: PhaseModel,
        n_emitted: u64,
        seed: u64,
        runs: u32,
    ) -> Result<Self> {
        let space = grid.space()?;
        let n = space.len();
        for (name, env) in [("envelope1", &envelope1), ("envelope2", &envelope2)] {
            if env.len() != n {
                return Err(Error::Scenario(format!("{name} has {} values for {n} bins", env.len())));
            }
            if let Some(v) = env.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Scenario(format!("{name} value {v} outside [0, 1]")));
            }
            let sum: f64 = env.iter().sum();
            if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
                return Err(Error::Scenario(format!("{name} sums to {sum}, not 1")));
            }
        }
        match &phase {
            PhaseModel::Explicit { values } => {
                if values.len() != n {
                    return Err(Error::Scenario(format!(
                        "explicit phase has {} values for {n} bins",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Scenario("explicit phase values must be finite".into()));
                }
            }
            PhaseModel::FreeWave {
                momentum1,
                momentum2,
                h,
            } => {
                if !(*h > 0.0 && h.is_finite()) {
                    return Err(Error::Scenario(format!("scaling factor h must be positive, got {h}")));
                }
                if !(momentum1.is_finite() && momentum2.is_finite()) {
                    return Err(Error::Scenario("momenta must be finite".into()));
                }
            }
        }
        if runs == 0 || runs >= stream::MAX_RUNS {
            return Err(Error::Scenario(format!(
                "runs must be in 1..{}, got {runs}",
                stream::MAX_RUNS
            )));
        }
        if n_emitted.div_ceil(CHUNK) >= stream::MAX_CHUNKS {
            return Err(Error::Scenario(format!("n_emitted {n_emitted} is too large")));
        }
        let theta = phase.theta(space.positions().expect("grid space has positions"));
        let scenario = Self {
            grid,
            space,
            envelope1,
            envelope2,
            phase,
            theta,
            n_emitted,
            seed,
            runs,
            acceptance: SLIT_COEFFICIENT,
        };
        if !(scenario.raw_pattern().iter().sum::<f64>() > 0.0) {
            return Err(Error::Scenario(
                "both-slit pattern has no mass (destructive everywhere)".into(),
            ));
        }
        Ok(scenario)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_emitted(mut self, n_emitted: u64) -> Self {
        self.n_emitted = n_emitted;
        self
    }

    /// Override the single-slit detection probability. Values other than
    /// `1/2` break the alternative condition and exist to exercise its check.
    pub fn with_acceptance(mut self, acceptance: f64) -> Self {
        assert!((0.0..=1.0).contains(&acceptance), "acceptance must be a probability");
        self.acceptance = acceptance;
        self
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn positions(&self) -> &[f64] {
        self.space.positions().expect("grid space has positions")
    }

    pub fn envelope1(&self) -> &[f64] {
        &self.envelope1
    }

    pub fn envelope2(&self) -> &[f64] {
        &self.envelope2
    }

    pub fn phase(&self) -> &PhaseModel {
        &self.phase
    }

    /// Phase shift `θ(x)` per bin.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn n_emitted(&self) -> u64 {
        self.n_emitted
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn runs(&self) -> u32 {
        self.runs
    }

    pub fn acceptance(&self) -> f64 {
        self.acceptance
    }

    pub fn coefficients(&self) -> SplittingCoefficients {
        SplittingCoefficients::new(SLIT_COEFFICIENT, SLIT_COEFFICIENT)
    }

    /// Unnormalized both-slit density per bin.
    pub fn raw_pattern(&self) -> Vec<f64> {
        self.envelope1
            .iter()
            .zip(&self.envelope2)
            .zip(&self.theta)
            .map(|((&p1, &p2), &t)| two_slit_density(p1, p2, t))
            .collect()
    }

    /// Exact contextual model `(S, S1, S2)` with coefficients `(1/2, 1/2)`.
    pub fn exact_model(&self) -> ContextualModel {
        ContextualModel {
            space: self.space.clone(),
            dist_s: analytic_pattern(self).distribution,
            dist_s1: ContextualDistribution::new(Context::S1, self.envelope1.clone()),
            dist_s2: ContextualDistribution::new(Context::S2, self.envelope2.clone()),
            coeffs: self.coefficients(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPattern {
    pub distribution: ContextualDistribution,
    /// Sum of the unnormalized density over the grid; 1 when the
    /// interference term integrates to zero on this grid.
    pub normalization: f64,
}

/// Both-slit distribution, renormalized over the grid.
pub fn analytic_pattern(scenario: &TwoSlitScenario) -> AnalyticPattern {
    let raw = scenario.raw_pattern();
    let normalization: f64 = raw.iter().sum();
    AnalyticPattern {
        distribution: ContextualDistribution::new(Context::S, raw.into_iter().map(|v| v / normalization).collect()),
        normalization,
    }
}

fn context_sampler(scenario: &TwoSlitScenario, which: Context) -> (WeightedIndex<f64>, f64) {
    let (weights, acceptance) = match which {
        Context::S => (analytic_pattern(scenario).distribution.probs, 1.0),
        Context::S1 => (scenario.envelope1.clone(), scenario.acceptance),
        Context::S2 => (scenario.envelope2.clone(), scenario.acceptance),
    };
    let index = WeightedIndex::new(weights).expect("validated distribution has positive mass");
    (index, acceptance)
}

fn simulate_chunk(
    scenario: &TwoSlitScenario,
    sampler: &WeightedIndex<f64>,
    acceptance: f64,
    which: Context,
    run: u32,
    chunk: u64,
) -> Vec<u64> {
    let mut counts = vec![0u64; scenario.space.len()];
    let start = chunk * CHUNK;
    let len = CHUNK.min(scenario.n_emitted - start);
    let mut rng = stream(scenario.seed, which, run, chunk);
    for _ in 0..len {
        if acceptance < 1.0 && rng.random::<f64>() >= acceptance {
            continue;
        }
        counts[sampler.sample(&mut rng)] += 1;
    }
    counts
}

fn add_into(mut acc: Vec<u64>, other: Vec<u64>) -> Vec<u64> {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
    acc
}

/// Counts of one collection period (`run`) of one context.
pub fn simulate_context_run(scenario: &TwoSlitScenario, which: Context, run: u32) -> EnsembleCounts {
    let (sampler, acceptance) = context_sampler(scenario, which);
    let chunks = scenario.n_emitted.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| simulate_chunk(scenario, &sampler, acceptance, which, run, chunk))
        .reduce(|| vec![0u64; scenario.space.len()], add_into);
    EnsembleCounts {
        context: which,
        counts,
        total_emitted: scenario.n_emitted,
    }
}

/// Counts of one context accumulated over all runs.
pub fn simulate_context(scenario: &TwoSlitScenario, which: Context) -> EnsembleCounts {
    let runs: Vec<EnsembleCounts> = (0..scenario.runs)
        .into_par_iter()
        .map(|run| simulate_context_run(scenario, which, run))
        .collect();
    accumulate(which, scenario.space.len(), &runs)
}

fn accumulate(which: Context, bins: usize, runs: &[EnsembleCounts]) -> EnsembleCounts {
    let mut counts = vec![0u64; bins];
    let mut total_emitted = 0;
    for r in runs {
        for (a, b) in counts.iter_mut().zip(&r.counts) {
            *a += b;
        }
        total_emitted += r.total_emitted;
    }
    EnsembleCounts {
        context: which,
        counts,
        total_emitted,
    }
}

/// Detected totals of one collection period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTotals {
    pub run: u32,
    pub detected_s: u64,
    pub detected_s1: u64,
    pub detected_s2: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub counts_s: EnsembleCounts,
    pub counts_s1: EnsembleCounts,
    pub counts_s2: EnsembleCounts,
    pub run_totals: Vec<RunTotals>,
    pub pattern_normalization: f64,
    pub tol: f64,
    #[serde(flatten)]
    pub analysis: EmpiricalAnalysis,
}

impl ExperimentReport {
    pub fn bins(&self) -> &[BinEstimate] {
        &self.analysis.bins
    }

    pub fn violation_statistic(&self) -> f64 {
        self.analysis.violation_statistic
    }
}

/// Simulate all three contexts and decompose the resulting counts.
pub fn run_experiment(scenario: &TwoSlitScenario, tol: f64) -> Result<ExperimentReport> {
    let tasks: Vec<(Context, u32)> = Context::ALL
        .iter()
        .flat_map(|&c| (0..scenario.runs).map(move |r| (c, r)))
        .collect();
    let per_run: Vec<EnsembleCounts> = tasks
        .par_iter()
        .map(|&(c, r)| simulate_context_run(scenario, c, r))
        .collect();
    let runs = scenario.runs as usize;
    let bins = scenario.space.len();
    let of = |c: Context| &per_run[c.index() * runs..(c.index() + 1) * runs];
    let counts_s = accumulate(Context::S, bins, of(Context::S));
    let counts_s1 = accumulate(Context::S1, bins, of(Context::S1));
    let counts_s2 = accumulate(Context::S2, bins, of(Context::S2));
    let run_totals = (0..scenario.runs)
        .map(|r| RunTotals {
            run: r,
            detected_s: of(Context::S)[r as usize].detected(),
            detected_s1: of(Context::S1)[r as usize].detected(),
            detected_s2: of(Context::S2)[r as usize].detected(),
        })
        .collect();
    let analysis = analyze_counts(&scenario.space, &counts_s, &counts_s1, &counts_s2, tol)?;
    Ok(ExperimentReport {
        counts_s,
        counts_s1,
        counts_s2,
        run_totals,
        pattern_normalization: analytic_pattern(scenario).normalization,
        tol,
        analysis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeCheck {
    pub pass: bool,
    /// `|N1 + N2 - N| / sqrt(N)`.
    pub deviation: f64,
}

/// Statistical alternative condition on detected totals: `|N1 + N2 - N| ≤ n_sigma sqrt(N)`.
pub fn alternative_condition_check(report: &ExperimentReport, n_sigma: f64) -> AlternativeCheck {
    let n = report.counts_s.detected() as f64;
    let n12 = (report.counts_s1.detected() + report.counts_s2.detected()) as f64;
    let deviation = if n > 0.0 {
        (n12 - n).abs() / n.sqrt()
    } else {
        f64::INFINITY
    };
    AlternativeCheck {
        pass: deviation <= n_sigma,
        deviation,
    }
}
