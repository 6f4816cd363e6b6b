//! Linear representations of contextual probabilities.
//!
//! Trigonometric transforms are squared moduli of complex numbers,
//! `a² + b² + 2ab cos θ = |a + b e^{iθ}|²`. Hyperbolic transforms use the
//! same construction over split-complex numbers (`j² = +1`), whose
//! indefinite modulus gives `a² + b² + 2ab cosh θ = |a + b e^{jθ}|²`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::{OutcomeSpace, SplittingCoefficients};
use crate::error::{Error, Result};
use crate::interference::{forward_hyp, Sign};

/// A complex probability amplitude.
pub type ComplexAmplitude = Complex64;

/// Tolerance on `Σ |φ|² = 1` for a synthesized wave.
pub const WAVE_NORMALIZATION_TOL: f64 = 1e-9;

/// Both sides of `a² + b² + 2ab cos θ = |a + b e^{iθ}|²`.
pub fn cos_identity(a: f64, b: f64, theta: f64) -> (f64, f64) {
    let lhs = a * a + b * b + 2.0 * a * b * theta.cos();
    let rhs = (Complex64::from(a) + b * Complex64::cis(theta)).norm_sqr();
    (lhs, rhs)
}

/// Gauge for the two branch phases: only `θ1 - θ2 = θ` is observable, so
/// the convention fixes `θ2` and derives `θ1 = θ + θ2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseConvention {
    pub theta2: f64,
}

impl PhaseConvention {
    pub fn with_reference(theta2: f64) -> Self {
        Self { theta2 }
    }

    pub fn phases(&self, theta: f64) -> (f64, f64) {
        (theta + self.theta2, self.theta2)
    }
}

/// `φ = e^{iθ2} (sqrt(c1 p1) e^{iθ} + sqrt(c2 p2))`; `|φ|²` equals the
/// trigonometric transform of the same inputs.
pub fn synthesize_wave(
    coeffs: &SplittingCoefficients,
    p1: f64,
    p2: f64,
    theta: f64,
    convention: PhaseConvention,
) -> ComplexAmplitude {
    let (theta1, theta2) = convention.phases(theta);
    (coeffs.c1 * p1).sqrt() * Complex64::cis(theta1) + (coeffs.c2 * p2).sqrt() * Complex64::cis(theta2)
}

/// Phases attached to one bin of a [`ProbabilityWave`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinPhases {
    pub theta1: f64,
    pub theta2: f64,
    /// `θ_j / h`.
    pub xi1: f64,
    pub xi2: f64,
}

/// Complex amplitude field over an outcome space with `|φ(bin)|² = P_S(bin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityWave {
    pub space: OutcomeSpace,
    pub amplitudes: Vec<ComplexAmplitude>,
    pub phases: Vec<BinPhases>,
    /// Phase scaling factor.
    pub h: f64,
}

impl ProbabilityWave {
    pub fn born(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn total(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiply every amplitude by `e^{iα}`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let rot = Complex64::cis(alpha);
        Self {
            space: self.space.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * rot).collect(),
            phases: self
                .phases
                .iter()
                .map(|p| BinPhases {
                    theta1: p.theta1 + alpha,
                    theta2: p.theta2 + alpha,
                    xi1: (p.theta1 + alpha) / self.h,
                    xi2: (p.theta2 + alpha) / self.h,
                })
                .collect(),
            h: self.h,
        }
    }
}

/// Two-slit wave `φ(x) = (e^{iθ(x)} sqrt(p1(x)) + sqrt(p2(x))) / √2`, with
/// gauge `θ2 ≡ 0` and splitting coefficients `1/2`.
pub fn synthesize_two_slit_wave(
    space: &OutcomeSpace,
    p1: &[f64],
    p2: &[f64],
    theta: &[f64],
    h: f64,
) -> Result<ProbabilityWave> {
    let n = space.len();
    for len in [p1.len(), p2.len(), theta.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Scenario(format!("scaling factor h must be positive, got {h}")));
    }
    let convention = PhaseConvention::default();
    let mut amplitudes = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for i in 0..n {
        let (theta1, theta2) = convention.phases(theta[i]);
        amplitudes
            .push(FRAC_1_SQRT_2 * (Complex64::cis(theta1) * p1[i].sqrt() + Complex64::cis(theta2) * p2[i].sqrt()));
        phases.push(BinPhases {
            theta1,
            theta2,
            xi1: theta1 / h,
            xi2: theta2 / h,
        });
    }
    let wave = ProbabilityWave {
        space: space.clone(),
        amplitudes,
        phases,
        h,
    };
    let total = wave.total();
    if !((total - 1.0).abs() <= WAVE_NORMALIZATION_TOL) {
        return Err(Error::Normalization(total));
    }
    Ok(wave)
}

/// Hyperbolic number `x + j y` with `j² = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitComplex {
    pub x: f64,
    pub y: f64,
}

impl SplitComplex {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// `e^{jθ} = cosh θ + j sinh θ`.
    pub fn exp_j(theta: f64) -> Self {
        Self::new(theta.cosh(), theta.sinh())
    }

    pub fn conj(self) -> Self {
        Self::new(self.x, -self.y)
    }

    /// Indefinite squared modulus `x² - y²`; may be negative.
    pub fn modulus_sqr(self) -> f64 {
        // factored form keeps precision when |x| ≈ |y|
        (self.x - self.y) * (self.x + self.y)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl Add for SplitComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for SplitComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for SplitComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul for SplitComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.x * rhs.x + self.y * rhs.y, self.x * rhs.y + self.y * rhs.x)
    }
}

impl From<f64> for SplitComplex {
    fn from(x: f64) -> Self {
        Self::new(x, 0.0)
    }
}

pub fn split_modulus(z: SplitComplex) -> f64 {
    z.modulus_sqr()
}

/// Split-complex amplitude `sqrt(c1 p1) ± sqrt(c2 p2) e^{jθ}` whose indefinite
/// modulus equals the hyperbolic transform of the same inputs.
///
/// The minus branch negates the second term: `|a - b e^{jθ}|² = a² + b² - 2ab cosh θ`.
pub fn synthesize_hyperbolic(
    coeffs: &SplittingCoefficients,
    p1: f64,
    p2: f64,
    theta: f64,
    sign: Sign,
) -> Result<SplitComplex> {
    forward_hyp(coeffs, p1, p2, theta, sign)?;
    let a = (coeffs.c1 * p1).sqrt();
    let b = (coeffs.c2 * p2).sqrt();
    Ok(SplitComplex::from(a) + SplitComplex::exp_j(theta).scale(sign.value() * b))
}
