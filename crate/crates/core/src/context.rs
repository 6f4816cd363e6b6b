//! Contexts, outcome spaces and per-context distributions.
//!
//! A *context* is a complete set of experimental conditions (both slits
//! open, only slit 1 open, only slit 2 open). Each context carries its own
//! probability distribution over the same finite outcome space; nothing here
//! assumes the three distributions live in one common probability space.
//! The only coupling between contexts is the pair of splitting coefficients,
//! the ratios of detected-particle counts `N_j / N`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(p) == 1` for exact distributions.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Tolerance on `c1 + c2 == 1` for exact splitting coefficients.
pub const ALTERNATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Context {
    /// Both slits open.
    S,
    /// Only slit 1 open.
    S1,
    /// Only slit 2 open.
    S2,
}

impl Context {
    pub const ALL: [Context; 3] = [Context::S, Context::S1, Context::S2];

    pub fn index(self) -> usize {
        match self {
            Context::S => 0,
            Context::S1 => 1,
            Context::S2 => 2,
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Context::S => "S",
            Context::S1 => "S1",
            Context::S2 => "S2",
        })
    }
}

/// Ordered, finite set of outcome bins. Every event is a single bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpace {
    labels: Vec<String>,
    /// Bin midpoints, present when the space is a uniform 1-D grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<f64>>,
}

impl OutcomeSpace {
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        check_labels(&labels)?;
        Ok(Self {
            labels,
            positions: None,
        })
    }

    /// Uniform grid of `bins` cells on `[x_min, x_max]`, labelled by midpoint.
    pub fn uniform_grid(bins: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Space("grid needs at least one bin".into()));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Space(format!(
                "grid bounds must be finite with x_max > x_min (got [{x_min}, {x_max}])"
            )));
        }
        // midpoint ((2n - 2i - 1) x_min + (2i + 1) x_max) / 2n avoids the
        // cancellation of x_min + (i + 1/2) w near 0
        let n2 = 2.0 * bins as f64;
        let positions: Vec<f64> = (0..bins)
            .map(|i| {
                let k = 2.0 * i as f64 + 1.0;
                ((n2 - k) * x_min + k * x_max) / n2
            })
            .collect();
        let labels: Vec<String> = positions.iter().map(|&x| crate::format_sig(x)).collect();
        check_labels(&labels)?;
        Ok(Self {
            labels,
            positions: Some(positions),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, bin: usize) -> &str {
        &self.labels[bin]
    }

    pub fn positions(&self) -> Option<&[f64]> {
        self.positions.as_deref()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::Space("outcome space needs at least one bin".into()));
    }
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::Space(format!("duplicate bin label {l:?}")));
        }
    }
    Ok(())
}

/// Probabilities of each bin under one context, aligned with an [`OutcomeSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextualDistribution {
    pub context: Context,
    pub probs: Vec<f64>,
}

impl ContextualDistribution {
    /// Unchecked; see [`ContextualDistribution::violations`].
    pub fn new(context: Context, probs: Vec<f64>) -> Self {
        Self { context, probs }
    }

    pub fn checked(context: Context, probs: Vec<f64>, space: &OutcomeSpace) -> Result<Self> {
        let dist = Self::new(context, probs);
        let v = dist.violations(space);
        if v.is_empty() {
            Ok(dist)
        } else {
            Err(Error::InvalidModel(v))
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn violations(&self, space: &OutcomeSpace) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.probs.len() != space.len() {
            out.push(Violation {
                invariant: Invariant::SharedOutcomeSpace,
                context: Some(self.context),
                bin: None,
                value: self.probs.len() as f64,
            });
            return out;
        }
        for (i, &p) in self.probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                out.push(Violation {
                    invariant: Invariant::ProbabilityRange,
                    context: Some(self.context),
                    bin: Some(space.label(i).to_string()),
                    value: p,
                });
            }
        }
        let sum = self.sum();
        if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
            out.push(Violation {
                invariant: Invariant::Normalization,
                context: Some(self.context),
                bin: None,
                value: sum,
            });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoefficientSource {
    /// Model input; must satisfy `c1 + c2 = 1`.
    Exact,
    /// Estimated from counts; `deviation = |c1 + c2 - 1|`.
    Empirical { deviation: f64 },
}

/// Splitting coefficients `P(S -> S_j)`: sharing ratios of detected
/// particles between preparations, not probabilities of the contexts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub source: CoefficientSource,
}

impl SplittingCoefficients {
    /// Exact coefficients, unchecked.
    pub fn new(c1: f64, c2: f64) -> Self {
        Self {
            c1,
            c2,
            source: CoefficientSource::Exact,
        }
    }

    pub fn symmetric() -> Self {
        Self::new(0.5, 0.5)
    }

    pub fn sum(&self) -> f64 {
        self.c1 + self.c2
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self.source, CoefficientSource::Empirical { .. })
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for c in [self.c1, self.c2] {
            if !(c >= 0.0) {
                out.push(Violation {
                    invariant: Invariant::NonNegativeCoefficient,
                    context: None,
                    bin: None,
                    value: c,
                });
            }
        }
        let sum = self.sum();
        if !((sum - 1.0).abs() <= ALTERNATIVE_TOL) {
            out.push(Violation {
                invariant: Invariant::AlternativeCondition,
                context: None,
                bin: None,
                value: sum,
            });
        }
        out
    }
}

/// The context-transition triple `S -> S1`, `S -> S2` over one outcome space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextualModel {
    pub space: OutcomeSpace,
    pub dist_s: ContextualDistribution,
    pub dist_s1: ContextualDistribution,
    pub dist_s2: ContextualDistribution,
    pub coeffs: SplittingCoefficients,
}

impl ContextualModel {
    pub fn distribution(&self, context: Context) -> &ContextualDistribution {
        match context {
            Context::S => &self.dist_s,
            Context::S1 => &self.dist_s1,
            Context::S2 => &self.dist_s2,
        }
    }
}

/// Invariants a [`ContextualModel`] can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    /// Probability outside `[0, 1]`.
    ProbabilityRange,
    /// Distribution does not sum to 1.
    Normalization,
    /// Distribution is not defined over the model's outcome space.
    SharedOutcomeSpace,
    /// Distribution is labelled with the wrong context.
    ContextLabel,
    NonNegativeCoefficient,
    /// `c1 + c2 = 1`.
    AlternativeCondition,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::ProbabilityRange => "probability in range [0,1]",
            Invariant::Normalization => "probabilities sum to 1",
            Invariant::SharedOutcomeSpace => "distribution shares the model outcome space",
            Invariant::ContextLabel => "distribution context label",
            Invariant::NonNegativeCoefficient => "splitting coefficient >= 0",
            Invariant::AlternativeCondition => "statistical alternative condition c1 + c2 = 1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub context: Option<Context>,
    pub bin: Option<String>,
    /// The offending value (sum, probability, coefficient or length).
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated (value {})", self.invariant, self.value)?;
        if let Some(c) = self.context {
            write!(f, " in context {c}")?;
        }
        if let Some(b) = &self.bin {
            write!(f, " at bin {b}")?;
        }
        Ok(())
    }
}

/// All invariant violations of `model`; empty iff the model is valid.
pub fn validate_model(model: &ContextualModel) -> Vec<Violation> {
    let mut out = Vec::new();
    for ctx in Context::ALL {
        let dist = model.distribution(ctx);
        if dist.context != ctx {
            out.push(Violation {
                invariant: Invariant::ContextLabel,
                context: Some(dist.context),
                bin: None,
                value: ctx.index() as f64,
            });
        }
        out.extend(dist.violations(&model.space));
    }
    out.extend(model.coeffs.violations());
    out
}

/// Per-bin detection counts of one context over a collection period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleCounts {
    pub context: Context,
    pub counts: Vec<u64>,
    /// Particles emitted by the source while this ensemble was collected.
    pub total_emitted: u64,
}

impl EnsembleCounts {
    pub fn new(context: Context, counts: Vec<u64>, total_emitted: u64) -> Result<Self> {
        let detected: u64 = counts.iter().sum();
        if detected > total_emitted {
            return Err(Error::Scenario(format!(
                "context {context}: {detected} detected particles exceed {total_emitted} emitted"
            )));
        }
        Ok(Self {
            context,
            counts,
            total_emitted,
        })
    }

    /// Counts from data where the emission total is unknown; emitted = detected.
    pub fn detected_only(context: Context, counts: Vec<u64>) -> Self {
        let total_emitted = counts.iter().sum();
        Self {
            context,
            counts,
            total_emitted,
        }
    }

    /// Number of particles collected on the screen (`N` or `N_j`).
    pub fn detected(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Splitting coefficients `N_j / N` from detected counts, plus the
/// alternative-condition deviation `|N1/N + N2/N - 1|`. No renormalization.
pub fn estimate_splitting(
    counts_s1: &EnsembleCounts,
    counts_s2: &EnsembleCounts,
    counts_s: &EnsembleCounts,
) -> Result<(SplittingCoefficients, f64)> {
    let n = counts_s.detected();
    if n == 0 {
        return Err(Error::ZeroEnsemble(counts_s.context));
    }
    let n = n as f64;
    let c1 = counts_s1.detected() as f64 / n;
    let c2 = counts_s2.detected() as f64 / n;
    let deviation = (c1 + c2 - 1.0).abs();
    Ok((
        SplittingCoefficients {
            c1,
            c2,
            source: CoefficientSource::Empirical { deviation },
        },
        deviation,
    ))
}

/// Relative frequencies `count / sum(counts)`.
pub fn empirical_distribution(counts: &EnsembleCounts) -> Result<ContextualDistribution> {
    let total = counts.detected();
    if total == 0 {
        return Err(Error::ZeroEnsemble(counts.context));
    }
    let total = total as f64;
    Ok(ContextualDistribution::new(
        counts.context,
        counts.counts.iter().map(|&k| k as f64 / total).collect(),
    ))
}
