//! Context-transition calculus.
//!
//! For an event `E` and contexts `S -> S1`, `S -> S2` with splitting
//! coefficients `c1 + c2 = 1`:
//!
//! ```text
//! P_S(E) = c1 P_S1(E) + c2 P_S2(E) + δ
//! δ      = c1 (P_S(E) - P_S1(E)) + c2 (P_S(E) - P_S2(E))
//! λ      = δ / (2 sqrt(c1 P_S1(E) c2 P_S2(E)))
//! ```
//!
//! `|λ| ≤ 1` is written `λ = cos θ` (trigonometric interference, the usual
//! quantum rule); `|λ| > 1` is written `λ = ±cosh θ` (hyperbolic
//! interference). `|λ| = 1` sits in both branches and is reported as
//! [`InterferenceKind::Boundary`].
//!
//! The normalizing denominator uses `c1 = P(S -> S1)` for the first factor,
//! matching the reconstruction identity above.

use serde::{Deserialize, Serialize};

use crate::context::{validate_model, ContextualModel, SplittingCoefficients, ALTERNATIVE_TOL};
use crate::error::{Error, Result};

/// Default half-width of the `|λ| = 1` band.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Slack for rounding when checking that a transformed value is in `[0, 1]`.
const RANGE_SLACK: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterferenceKind {
    /// `λ = cos θ`, `θ ∈ [0, π]`.
    Trigonometric { theta: f64 },
    /// `λ = sign · cosh θ`, `θ ≥ 0`.
    Hyperbolic { theta: f64, sign: Sign },
    /// `|λ| = 1` within tolerance.
    Boundary,
}

impl InterferenceKind {
    pub fn theta(&self) -> Option<f64> {
        match *self {
            InterferenceKind::Trigonometric { theta } => Some(theta),
            InterferenceKind::Hyperbolic { theta, .. } => Some(theta),
            InterferenceKind::Boundary => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InterferenceKind::Trigonometric { .. } => "trigonometric",
            InterferenceKind::Hyperbolic { .. } => "hyperbolic",
            InterferenceKind::Boundary => "boundary",
        }
    }

    /// The `λ` this kind represents (`±1` for the boundary).
    pub fn lambda(&self, boundary_sign: Sign) -> f64 {
        match *self {
            InterferenceKind::Trigonometric { theta } => theta.cos(),
            InterferenceKind::Hyperbolic { theta, sign } => sign.value() * theta.cosh(),
            InterferenceKind::Boundary => boundary_sign.value(),
        }
    }
}

/// Classical formula of total probability, `c1 p1 + c2 p2`.
pub fn total_probability(coeffs: &SplittingCoefficients, p1: f64, p2: f64) -> f64 {
    coeffs.c1 * p1 + coeffs.c2 * p2
}

/// Perturbation `δ` from its defining sum `c1 (pS - p1) + c2 (pS - p2)`.
///
/// When `c1 + c2 = 1` this equals `pS - total_probability(..)`; the two forms
/// are compared in debug builds.
pub fn perturbation_delta(coeffs: &SplittingCoefficients, ps: f64, p1: f64, p2: f64) -> f64 {
    let delta = coeffs.c1 * (ps - p1) + coeffs.c2 * (ps - p2);
    debug_assert!(
        (coeffs.sum() - 1.0).abs() > ALTERNATIVE_TOL || (delta - interference_term(coeffs, ps, p1, p2)).abs() <= 1e-12,
        "δ forms disagree: {delta} vs {}",
        interference_term(coeffs, ps, p1, p2)
    );
    delta
}

/// Violation of the total-probability formula, `pS - (c1 p1 + c2 p2)`.
///
/// Coincides with [`perturbation_delta`] under `c1 + c2 = 1`; it is the form
/// used for estimated coefficients, whose sum is 1 only on average.
pub fn interference_term(coeffs: &SplittingCoefficients, ps: f64, p1: f64, p2: f64) -> f64 {
    ps - total_probability(coeffs, p1, p2)
}

/// `2 sqrt(c1 p1 c2 p2)`, or `DegenerateBranch` when either factor is zero.
pub fn interference_scale(coeffs: &SplittingCoefficients, p1: f64, p2: f64) -> Result<f64> {
    let w1 = coeffs.c1 * p1;
    let w2 = coeffs.c2 * p2;
    if !(w1 > 0.0 && w2 > 0.0) {
        return Err(Error::DegenerateBranch {
            weighted1: w1,
            weighted2: w2,
        });
    }
    Ok(2.0 * (w1 * w2).sqrt())
}

/// Normalized coefficient of the context transition, `λ = δ / (2 sqrt(c1 p1 c2 p2))`.
pub fn lambda_coefficient(coeffs: &SplittingCoefficients, ps: f64, p1: f64, p2: f64) -> Result<f64> {
    let scale = interference_scale(coeffs, p1, p2)?;
    Ok(perturbation_delta(coeffs, ps, p1, p2) / scale)
}

/// Split `λ` into the trigonometric or hyperbolic representation.
pub fn classify(lambda: f64, tol: f64) -> InterferenceKind {
    debug_assert!(tol > 0.0, "tolerance must be positive");
    debug_assert!(lambda.is_finite(), "λ must be finite");
    let mag = lambda.abs();
    if mag < 1.0 - tol {
        InterferenceKind::Trigonometric { theta: lambda.acos() }
    } else if mag > 1.0 + tol {
        InterferenceKind::Hyperbolic {
            theta: mag.acosh(),
            sign: Sign::of(lambda),
        }
    } else {
        InterferenceKind::Boundary
    }
}

/// Per-bin result of [`decompose`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinDecomposition {
    /// `c1 p1 + c2 p2`.
    pub classical_part: f64,
    pub delta: f64,
    /// `None` on degenerate bins (a conditional is zero).
    pub lambda: Option<f64>,
    pub kind: Option<InterferenceKind>,
}

impl BinDecomposition {
    pub fn is_degenerate(&self) -> bool {
        self.lambda.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceDecomposition {
    pub bins: Vec<BinDecomposition>,
}

impl InterferenceDecomposition {
    pub fn degenerate_bins(&self) -> impl Iterator<Item = usize> + '_ {
        self.bins
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_degenerate())
            .map(|(i, _)| i)
    }
}

/// Decompose every bin of a valid model. Degenerate bins are marked, never fatal.
pub fn decompose(model: &ContextualModel, tol: f64) -> Result<InterferenceDecomposition> {
    let violations = validate_model(model);
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations));
    }
    let coeffs = &model.coeffs;
    let bins = model
        .dist_s
        .probs
        .iter()
        .zip(&model.dist_s1.probs)
        .zip(&model.dist_s2.probs)
        .map(|((&ps, &p1), &p2)| {
            let lambda = lambda_coefficient(coeffs, ps, p1, p2).ok();
            BinDecomposition {
                classical_part: total_probability(coeffs, p1, p2),
                delta: perturbation_delta(coeffs, ps, p1, p2),
                lambda,
                kind: lambda.map(|l| classify(l, tol)),
            }
        })
        .collect();
    Ok(InterferenceDecomposition { bins })
}

/// Trigonometric transform: `c1 p1 + c2 p2 + 2 sqrt(c1 p1 c2 p2) cos θ`.
///
/// The value is `|sqrt(c1 p1) + sqrt(c2 p2) e^{iθ}|²`, so it lies in
/// `[0, (sqrt(c1 p1) + sqrt(c2 p2))²] ⊆ [0, p1 + p2]`; it is a probability
/// whenever `p1 + p2 ≤ 1`, and for every bin of a valid model. Negative
/// rounding residue is clamped to 0.
pub fn forward_trig(coeffs: &SplittingCoefficients, p1: f64, p2: f64, theta: f64) -> f64 {
    let w1 = coeffs.c1 * p1;
    let w2 = coeffs.c2 * p2;
    (w1 + w2 + 2.0 * (w1 * w2).sqrt() * theta.cos()).max(0.0)
}

/// Hyperbolic transform: `c1 p1 + c2 p2 ± 2 sqrt(c1 p1 c2 p2) cosh θ`.
///
/// Only some inputs yield a probability; anything outside `[0, 1]` is
/// `OutOfRange`.
pub fn forward_hyp(coeffs: &SplittingCoefficients, p1: f64, p2: f64, theta: f64, sign: Sign) -> Result<f64> {
    let w1 = coeffs.c1 * p1;
    let w2 = coeffs.c2 * p2;
    let value = w1 + w2 + sign.value() * 2.0 * (w1 * w2).sqrt() * theta.cosh();
    if (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&value) {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(Error::OutOfRange(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{Context, ContextualDistribution, OutcomeSpace};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    // mpmath, 40 digits
    const ACOS_0_8: f64 = 0.643_501_108_793_284_386_802_809_228_717_3;
    const ACOSH_8_9: f64 = 2.876_027_242_385_193_285_436_333_425_403;

    fn c(c1: f64, c2: f64) -> SplittingCoefficients {
        SplittingCoefficients::new(c1, c2)
    }

    #[test]
    fn total_probability_examples() {
        assert_eq!(total_probability(&c(0.5, 0.5), 0.3, 0.3), 0.3);
        assert!((total_probability(&c(0.5, 0.5), 0.2, 0.4) - 0.3).abs() < 1e-15);
        assert!((total_probability(&c(0.3, 0.7), 0.2, 0.6) - 0.48).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(perturbation_delta(&c(0.3, 0.7), 0.3, 0.3, 0.3), 0.0);
        assert!((perturbation_delta(&c(0.5, 0.5), 0.9, 0.5, 0.5) - 0.4).abs() < 1e-15);
        assert!((perturbation_delta(&c(0.3, 0.7), 0.5, 0.2, 0.6) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn lambda_examples() {
        let k = c(0.25, 0.75);
        let ps = total_probability(&k, 0.5, 0.25);
        assert_eq!(lambda_coefficient(&k, ps, 0.5, 0.25).unwrap(), 0.0);
        let l = lambda_coefficient(&c(0.5, 0.5), 0.9, 0.5, 0.5).unwrap();
        assert!((l - 0.8).abs() < 1e-14);
        let l = lambda_coefficient(&c(0.5, 0.5), 0.99, 0.1, 0.1).unwrap();
        assert!((l - 8.9).abs() < 1e-13);
    }

    #[test]
    fn lambda_degenerate() {
        let e = lambda_coefficient(&c(0.5, 0.5), 0.2, 0.0, 0.4).unwrap_err();
        assert!(matches!(e, Error::DegenerateBranch { weighted1, .. } if weighted1 == 0.0));
        assert!(lambda_coefficient(&c(1.0, 0.0), 0.2, 0.3, 0.4).is_err());
    }

    #[test]
    fn classify_examples() {
        match classify(0.8, 1e-9) {
            InterferenceKind::Trigonometric { theta } => assert!((theta - ACOS_0_8).abs() < 1e-15),
            k => panic!("unexpected {k:?}"),
        }
        match classify(8.9, 1e-9) {
            InterferenceKind::Hyperbolic { theta, sign } => {
                assert!((theta - ACOSH_8_9).abs() < 1e-14);
                assert_eq!(sign, Sign::Plus);
            }
            k => panic!("unexpected {k:?}"),
        }
        assert_eq!(classify(1.0, 1e-9), InterferenceKind::Boundary);
        assert_eq!(classify(-1.0 + 1e-10, 1e-9), InterferenceKind::Boundary);
        assert!(matches!(
            classify(-3.0, 1e-9),
            InterferenceKind::Hyperbolic { sign: Sign::Minus, .. }
        ));
        assert_eq!(classify(-1.0, 1e-9).theta(), None);
    }

    #[test]
    fn forward_trig_examples() {
        let k = c(0.5, 0.5);
        assert_eq!(forward_trig(&k, 0.5, 0.5, PI), 0.0);
        assert!((forward_trig(&k, 0.5, 0.5, FRAC_PI_2) - 0.5).abs() < 1e-15);
        assert!((forward_trig(&k, 0.5, 0.5, 0.8f64.acos()) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn forward_hyp_examples() {
        let k = c(0.5, 0.5);
        let v = forward_hyp(&k, 0.1, 0.1, 8.9f64.acosh(), Sign::Plus).unwrap();
        assert!((v - 0.99).abs() < 1e-14);
        let k2 = c(0.3, 0.7);
        assert_eq!(
            forward_hyp(&k2, 0.2, 0.4, 0.0, Sign::Plus).unwrap(),
            forward_trig(&k2, 0.2, 0.4, 0.0)
        );
        // 0.25 + 0.25 + 2 * 0.25 * cosh(1); mpmath: 1.2715403174076218892
        match forward_hyp(&k, 0.5, 0.5, 1.0, Sign::Plus).unwrap_err() {
            Error::OutOfRange(v) => assert!((v - 1.271_540_317_407_621_9).abs() < 1e-14),
            e => panic!("unexpected {e}"),
        }
        assert!(forward_hyp(&k, 0.5, 0.2, 2.0, Sign::Minus).is_err());
    }

    fn grid_model(ps: Vec<f64>, p1: Vec<f64>, p2: Vec<f64>) -> ContextualModel {
        let space = OutcomeSpace::uniform_grid(ps.len(), 0.0, 1.0).unwrap();
        ContextualModel {
            space,
            dist_s: ContextualDistribution::new(Context::S, ps),
            dist_s1: ContextualDistribution::new(Context::S1, p1),
            dist_s2: ContextualDistribution::new(Context::S2, p2),
            coeffs: c(0.5, 0.5),
        }
    }

    #[test]
    fn decompose_classical_model() {
        let p1 = vec![0.1, 0.2, 0.3, 0.4];
        let p2 = vec![0.4, 0.3, 0.2, 0.1];
        let ps: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
        let d = decompose(&grid_model(ps, p1, p2), DEFAULT_TOL).unwrap();
        for b in &d.bins {
            assert!(b.lambda.unwrap().abs() < 1e-15);
            let theta = b.kind.unwrap().theta().unwrap();
            assert!((theta - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn decompose_round_trip_symmetric() {
        // p1 = p2, pS built from the trigonometric transform with known θ(x)
        let n = 50;
        let env: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.3).sin().powi(2)).collect();
        let z: f64 = env.iter().sum();
        let p: Vec<f64> = env.iter().map(|v| v / z).collect();
        // choose θ so that Σ p cos θ = 0 exactly: pair bins i, n-1-i with θ, π-θ
        let thetas: Vec<f64> = (0..n)
            .map(|i| {
                if i < n / 2 {
                    0.1 + 0.05 * i as f64
                } else {
                    PI - (0.1 + 0.05 * (n - 1 - i) as f64)
                }
            })
            .collect();
        let p: Vec<f64> = (0..n).map(|i| p[i.min(n - 1 - i)]).collect();
        let z: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|v| v / z).collect();
        let k = c(0.5, 0.5);
        let ps: Vec<f64> = (0..n).map(|i| forward_trig(&k, p[i], p[i], thetas[i])).collect();
        let d = decompose(&grid_model(ps.clone(), p.clone(), p.clone()), DEFAULT_TOL).unwrap();
        for (i, b) in d.bins.iter().enumerate() {
            let theta = b.kind.unwrap().theta().unwrap();
            assert!((theta - thetas[i]).abs() < 1e-9, "bin {i}: {theta} vs {}", thetas[i]);
            let scale = interference_scale(&k, p[i], p[i]).unwrap();
            assert!((b.classical_part + scale * b.lambda.unwrap() - ps[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn decompose_marks_degenerate_bins() {
        let p1 = vec![0.0, 0.5, 0.5];
        let p2 = vec![0.2, 0.4, 0.4];
        let ps = vec![0.1, 0.45, 0.45];
        let d = decompose(&grid_model(ps, p1, p2), DEFAULT_TOL).unwrap();
        assert_eq!(d.degenerate_bins().collect::<Vec<_>>(), vec![0]);
        assert!(d.bins[0].kind.is_none());
        assert!(d.bins[1].kind.is_some() && d.bins[2].kind.is_some());
    }

    #[test]
    fn decompose_rejects_invalid_model() {
        let mut m = grid_model(vec![1.0], vec![1.0], vec![1.0]);
        m.coeffs = c(0.6, 0.6);
        assert!(matches!(decompose(&m, DEFAULT_TOL), Err(Error::InvalidModel(v)) if v.len() == 1));
    }

    #[test]
    fn correspondence_limit_identical_contexts() {
        for ps in [0.0, 0.01, 0.3, 0.77, 1.0] {
            assert_eq!(perturbation_delta(&c(0.3, 0.7), ps, ps, ps), 0.0);
        }
    }

    fn coeffs() -> impl Strategy<Value = SplittingCoefficients> {
        (0.05f64..0.95).prop_map(|c1| c(c1, 1.0 - c1))
    }

    proptest! {
        #[test]
        fn trig_round_trip(k in coeffs(), p1 in 0.05f64..1.0, p2 in 0.05f64..1.0, theta in 1e-3f64..(PI - 1e-3)) {
            let ps = forward_trig(&k, p1, p2, theta);
            let l = lambda_coefficient(&k, ps, p1, p2).unwrap();
            prop_assert!((l - theta.cos()).abs() <= 1e-12);
            match classify(l, DEFAULT_TOL) {
                InterferenceKind::Trigonometric { theta: t } => prop_assert!((t - theta).abs() <= 1e-9),
                other => prop_assert!(false, "{:?}", other),
            }
        }

        #[test]
        fn hyp_round_trip(k in coeffs(), p1 in 0.01f64..1.0, p2 in 0.01f64..1.0, theta in 1e-2f64..5.0, minus in any::<bool>()) {
            let sign = if minus { Sign::Minus } else { Sign::Plus };
            if let Ok(ps) = forward_hyp(&k, p1, p2, theta, sign) {
                let l = lambda_coefficient(&k, ps, p1, p2).unwrap();
                let expect = sign.value() * theta.cosh();
                prop_assert!((l - expect).abs() <= 1e-12 * expect.abs().max(1.0));
                match classify(l, DEFAULT_TOL) {
                    InterferenceKind::Hyperbolic { theta: t, sign: s } => {
                        prop_assert_eq!(s, sign);
                        prop_assert!((t - theta).abs() <= 1e-9, "{} vs {}", t, theta);
                    }
                    other => prop_assert!(false, "{:?}", other),
                }
            }
        }

        #[test]
        fn trig_stays_probability(c1 in 0.0f64..=1.0, p1 in 0.0f64..=1.0, share in 0.0f64..=1.0, theta in 0.0f64..=PI) {
            // p1 + p2 ≤ 1
            let p2 = (1.0 - p1) * share;
            let v = forward_trig(&c(c1, 1.0 - c1), p1, p2, theta);
            prop_assert!((0.0..=1.0).contains(&v), "{}", v);
        }

        #[test]
        fn trig_bounded_by_constructive_sum(c1 in 0.0f64..=1.0, p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, theta in 0.0f64..=PI) {
            let k = c(c1, 1.0 - c1);
            let v = forward_trig(&k, p1, p2, theta);
            let top = ((k.c1 * p1).sqrt() + (k.c2 * p2).sqrt()).powi(2);
            prop_assert!(v >= 0.0 && v <= top + 1e-15 && top <= p1 + p2 + 1e-15);
        }

        #[test]
        fn classify_round_trip(l in -50.0f64..50.0) {
            match classify(l, DEFAULT_TOL) {
                InterferenceKind::Trigonometric { theta } => {
                    prop_assert!((0.0..=PI).contains(&theta));
                    prop_assert!((theta.cos() - l).abs() <= 1e-12);
                }
                InterferenceKind::Hyperbolic { theta, sign } => {
                    prop_assert!(theta >= 0.0);
                    prop_assert!((sign.value() * theta.cosh() - l).abs() <= 1e-12 * l.abs());
                }
                InterferenceKind::Boundary => prop_assert!((l.abs() - 1.0).abs() <= DEFAULT_TOL),
            }
        }

        #[test]
        fn delta_forms_agree(k in coeffs(), ps in 0.0f64..=1.0, p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
            let a = perturbation_delta(&k, ps, p1, p2);
            let b = interference_term(&k, ps, p1, p2);
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn delta_is_lipschitz(k in coeffs(), ps in 0.0f64..=1.0, d1 in -0.5f64..0.5, d2 in -0.5f64..0.5) {
            let p1 = (ps + d1).clamp(0.0, 1.0);
            let p2 = (ps + d2).clamp(0.0, 1.0);
            let delta = perturbation_delta(&k, ps, p1, p2);
            let bound = 2.0 * k.c1.max(k.c2) * (ps - p1).abs().max((ps - p2).abs());
            prop_assert!(delta.abs() <= bound + 1e-15);
        }
    }
}
