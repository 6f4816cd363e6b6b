//! Empirical decomposition of three context ensembles.
//!
//! With `N` particles detected under `S` and per-bin counts `k_S`, `k_1`,
//! `k_2`, the frequencies are `s = k_S / N`, `p̂_j = k_j / N_j` and the
//! estimated coefficients `ĉ_j = N_j / N`, so the weighted branch terms are
//! `a = ĉ1 p̂1 = k_1 / N` and `b = ĉ2 p̂2 = k_2 / N`. The three are treated as
//! independent binomial proportions over `N` and propagated to first order.
//!
//! Estimated coefficients only satisfy `ĉ1 + ĉ2 = 1` on average, so the
//! interference term is measured as the total-probability violation
//! `δ̂ = s - a - b`.

use serde::{Deserialize, Serialize};

use crate::context::{empirical_distribution, estimate_splitting, EnsembleCounts, OutcomeSpace, SplittingCoefficients};
use crate::error::{Error, Result};
use crate::interference::{classify, interference_scale, interference_term, total_probability, InterferenceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinKind {
    Trigonometric,
    Hyperbolic,
    Boundary,
    /// A conditional frequency is zero; λ is undefined.
    Degenerate,
}

impl BinKind {
    pub fn name(self) -> &'static str {
        match self {
            BinKind::Trigonometric => "trigonometric",
            BinKind::Hyperbolic => "hyperbolic",
            BinKind::Boundary => "boundary",
            BinKind::Degenerate => "degenerate",
        }
    }
}

impl From<Option<InterferenceKind>> for BinKind {
    fn from(k: Option<InterferenceKind>) -> Self {
        match k {
            Some(InterferenceKind::Trigonometric { .. }) => BinKind::Trigonometric,
            Some(InterferenceKind::Hyperbolic { .. }) => BinKind::Hyperbolic,
            Some(InterferenceKind::Boundary) => BinKind::Boundary,
            None => BinKind::Degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEstimate {
    pub bin: String,
    pub count_s: u64,
    pub count_1: u64,
    pub count_2: u64,
    pub p_hat_s: f64,
    pub p_hat_1: f64,
    pub p_hat_2: f64,
    /// `ĉ1 p̂1 + ĉ2 p̂2`.
    pub classical_part: f64,
    pub delta: f64,
    pub stderr_delta: f64,
    /// `|δ̂| / se(δ̂)`; absent when the bin is empty in every context.
    pub violation_z: Option<f64>,
    pub lambda: Option<f64>,
    pub stderr_lambda: Option<f64>,
    pub kind: BinKind,
    pub theta: Option<f64>,
    /// First-order standard error of θ̂; absent on the boundary.
    pub stderr_theta: Option<f64>,
}

impl BinEstimate {
    pub fn min_count(&self) -> u64 {
        self.count_s.min(self.count_1).min(self.count_2)
    }

    /// Whether the phase `theta` is compatible with this bin at `n_sigma`.
    ///
    /// `θ̂` is a monotone transform of `λ̂`, so the n-σ interval for θ is the
    /// image of `λ̂ ± n·se(λ̂)`; the test is therefore done on `λ`, where the
    /// normal approximation holds, and stays meaningful near `θ = 0, π` and
    /// for bins that noise pushes across `|λ| = 1`. A trigonometric phase is
    /// compared as `cos θ`; `None` for degenerate bins.
    pub fn phase_consistent(&self, theta: f64, n_sigma: f64) -> Option<bool> {
        let (lambda, se) = (self.lambda?, self.stderr_lambda?);
        Some((lambda - theta.cos()).abs() <= n_sigma * se)
    }

    pub fn interference_kind(&self) -> Option<InterferenceKind> {
        let lambda = self.lambda?;
        Some(match self.kind {
            BinKind::Trigonometric => InterferenceKind::Trigonometric { theta: self.theta? },
            BinKind::Hyperbolic => InterferenceKind::Hyperbolic {
                theta: self.theta?,
                sign: crate::interference::Sign::of(lambda),
            },
            BinKind::Boundary => InterferenceKind::Boundary,
            BinKind::Degenerate => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalAnalysis {
    pub coefficients: SplittingCoefficients,
    /// `|ĉ1 + ĉ2 - 1|`.
    pub alternative_deviation: f64,
    pub bins: Vec<BinEstimate>,
    /// Largest per-bin `|δ̂| / se(δ̂)`.
    pub violation_statistic: f64,
}

/// Decompose three aligned count vectors over `space`.
pub fn analyze_counts(
    space: &OutcomeSpace,
    counts_s: &EnsembleCounts,
    counts_s1: &EnsembleCounts,
    counts_s2: &EnsembleCounts,
    tol: f64,
) -> Result<EmpiricalAnalysis> {
    for c in [counts_s, counts_s1, counts_s2] {
        if c.counts.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: c.counts.len(),
            });
        }
    }
    let (coeffs, deviation) = estimate_splitting(counts_s1, counts_s2, counts_s)?;
    let ps = empirical_distribution(counts_s)?;
    let p1 = empirical_distribution(counts_s1)?;
    let p2 = empirical_distribution(counts_s2)?;
    let n = counts_s.detected() as f64;

    let bins: Vec<BinEstimate> = (0..space.len())
        .map(|i| {
            estimate_bin(
                space.label(i),
                [counts_s.counts[i], counts_s1.counts[i], counts_s2.counts[i]],
                [ps.probs[i], p1.probs[i], p2.probs[i]],
                &coeffs,
                n,
                tol,
            )
        })
        .collect();
    let violation_statistic = bins.iter().filter_map(|b| b.violation_z).fold(0.0, f64::max);
    Ok(EmpiricalAnalysis {
        coefficients: coeffs,
        alternative_deviation: deviation,
        bins,
        violation_statistic,
    })
}

fn binomial_var(p: f64, n: f64) -> f64 {
    (p * (1.0 - p)).max(0.0) / n
}

fn estimate_bin(
    label: &str,
    [count_s, count_1, count_2]: [u64; 3],
    [s, p1, p2]: [f64; 3],
    coeffs: &SplittingCoefficients,
    n: f64,
    tol: f64,
) -> BinEstimate {
    let a = coeffs.c1 * p1;
    let b = coeffs.c2 * p2;
    let (var_s, var_a, var_b) = (binomial_var(s, n), binomial_var(a, n), binomial_var(b, n));

    let classical_part = total_probability(coeffs, p1, p2);
    let delta = interference_term(coeffs, s, p1, p2);
    let stderr_delta = (var_s + var_a + var_b).sqrt();
    let violation_z = (stderr_delta > 0.0).then(|| delta.abs() / stderr_delta);

    let mut est = BinEstimate {
        bin: label.to_string(),
        count_s,
        count_1,
        count_2,
        p_hat_s: s,
        p_hat_1: p1,
        p_hat_2: p2,
        classical_part,
        delta,
        stderr_delta,
        violation_z,
        lambda: None,
        stderr_lambda: None,
        kind: BinKind::Degenerate,
        theta: None,
        stderr_theta: None,
    };
    let Ok(scale) = interference_scale(coeffs, p1, p2) else {
        return est;
    };
    let lambda = delta / scale;
    // ∂λ/∂s, ∂λ/∂a, ∂λ/∂b
    let gs = 1.0 / scale;
    let ga = -gs - lambda / (2.0 * a);
    let gb = -gs - lambda / (2.0 * b);
    let se_lambda = (gs * gs * var_s + ga * ga * var_a + gb * gb * var_b).sqrt();
    let kind = classify(lambda, tol);
    est.lambda = Some(lambda);
    est.stderr_lambda = Some(se_lambda);
    est.kind = BinKind::from(Some(kind));
    est.theta = kind.theta();
    est.stderr_theta = match kind {
        InterferenceKind::Trigonometric { .. } => Some(se_lambda / (1.0 - lambda * lambda).sqrt()),
        InterferenceKind::Hyperbolic { .. } => Some(se_lambda / (lambda * lambda - 1.0).sqrt()),
        InterferenceKind::Boundary => None,
    };
    est
}
