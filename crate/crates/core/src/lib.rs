//! Contextual probability calculus and a Monte Carlo two-slit ensemble
//! simulator.
//!
//! The crate decomposes the context-`S` probability of an event into the
//! classical total-probability term and an interference term, classifies
//! that term as trigonometric (`|λ| ≤ 1`, `λ = cos θ`) or hyperbolic
//! (`|λ| > 1`, `λ = ±cosh θ`), and builds linear (complex or split-complex)
//! amplitudes whose squared modulus reproduces the contextual probability.
//!
//! [`twoslit`] generates three independent classical ensembles (both slits,
//! slit 1, slit 2) and recovers all of these quantities from counts alone.

// `!(x <= tol)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitudes;
pub mod cli;
pub mod context;
pub mod error;
pub mod interference;
pub mod twoslit;

pub use context::{
    empirical_distribution, estimate_splitting, validate_model, Context, ContextualDistribution, ContextualModel,
    EnsembleCounts, OutcomeSpace, SplittingCoefficients,
};
pub use error::{Error, Result};

/// Significant decimal digits used by every text serialization.
pub const SIG_DIGITS: usize = 15;

/// Round to [`SIG_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{:.*e}", SIG_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal rendering of `v` rounded to 15 significant digits.
///
/// Formatting, parsing and formatting again yields the same string.
pub fn format_sig(v: f64) -> String {
    let r = round_sig(v);
    if r == 0.0 {
        "0".to_string()
    } else if !r.is_finite() || (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
