//! State-dependent angular imperfections of the preparation and measurement
//! devices.
//!
//! Alice's four signal states and Bob's four measurement vectors each carry
//! their own angular deviation (alpha_1..alpha_4 on the preparation side,
//! beta_1..beta_4 on the measurement side, radians). The preparation
//! deviations assemble into the generally non-unitary matrices returned by
//! [`prep_rect_matrix`] and [`prep_diag_matrix`]; the measurement deviations
//! tilt Bob's projectors and induce the bit-flip rate [`detection_flip_rate`].
//!
//! Bob's detector pair is modelled as a two-outcome rule with probabilities
//! proportional to the two projector overlaps, normalized by their sum. A
//! nearly parallel outcome pair makes that normalization meaningless and is
//! reported as [`Error::DegenerateBasis`].

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::linalg::{Ket2, Matrix2};

/// Angle pairs closer than this are treated as equal when classifying a
/// model as basis-dependent.
const ANGLE_EQ_TOL: f64 = 1e-12;

/// Overlap-sum threshold below which a two-outcome measurement pair is
/// degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Magnitude beyond which an angular deviation stops being a small
/// imperfection and a warning is attached (never an error).
const SANITY_LIMIT: f64 = FRAC_PI_4;

fn check_finite(label: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "angle {label} = {value} is not finite"
        )));
    }
    Ok(())
}

fn sanity_warnings(pairs: &[(&str, f64)]) -> Vec<String> {
    pairs
        .iter()
        .filter(|(_, v)| v.abs() >= SANITY_LIMIT)
        .map(|(name, v)| {
            format!("{name} = {v} rad has magnitude >= pi/4; outside the small-deviation regime")
        })
        .collect()
}

/// Alice's four angular deviations, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationAngles {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
}

impl PreparationAngles {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64, alpha4: f64) -> Result<Self> {
        check_finite("alpha1", alpha1)?;
        check_finite("alpha2", alpha2)?;
        check_finite("alpha3", alpha3)?;
        check_finite("alpha4", alpha4)?;
        Ok(Self {
            alpha1,
            alpha2,
            alpha3,
            alpha4,
        })
    }

    pub fn zero() -> Self {
        Self {
            alpha1: 0.0,
            alpha2: 0.0,
            alpha3: 0.0,
            alpha4: 0.0,
        }
    }

    /// Non-fatal notes for deviations outside |alpha| < pi/4.
    pub fn warnings(&self) -> Vec<String> {
        sanity_warnings(&[
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
            ("alpha4", self.alpha4),
        ])
    }
}

/// Bob's four angular deviations, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementAngles {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

impl MeasurementAngles {
    pub fn new(beta1: f64, beta2: f64, beta3: f64, beta4: f64) -> Result<Self> {
        check_finite("beta1", beta1)?;
        check_finite("beta2", beta2)?;
        check_finite("beta3", beta3)?;
        check_finite("beta4", beta4)?;
        Ok(Self {
            beta1,
            beta2,
            beta3,
            beta4,
        })
    }

    pub fn zero() -> Self {
        Self {
            beta1: 0.0,
            beta2: 0.0,
            beta3: 0.0,
            beta4: 0.0,
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        sanity_warnings(&[
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta3", self.beta3),
            ("beta4", self.beta4),
        ])
    }
}

/// The full eight-parameter device description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceModel {
    pub prep: PreparationAngles,
    pub meas: MeasurementAngles,
}

impl DeviceModel {
    pub fn new(prep: PreparationAngles, meas: MeasurementAngles) -> Self {
        Self { prep, meas }
    }

    pub fn ideal() -> Self {
        Self {
            prep: PreparationAngles::zero(),
            meas: MeasurementAngles::zero(),
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = self.prep.warnings();
        w.extend(self.meas.warnings());
        w
    }
}

/// True when the deviations coincide within each basis
/// (alpha1 = alpha3, alpha2 = alpha4, beta1 = beta3, beta2 = beta4),
/// i.e. the imperfection is basis-dependent rather than state-dependent.
pub fn is_basis_dependent(model: &DeviceModel) -> bool {
    let p = &model.prep;
    let m = &model.meas;
    (p.alpha1 - p.alpha3).abs() <= ANGLE_EQ_TOL
        && (p.alpha2 - p.alpha4).abs() <= ANGLE_EQ_TOL
        && (m.beta1 - m.beta3).abs() <= ANGLE_EQ_TOL
        && (m.beta2 - m.beta4).abs() <= ANGLE_EQ_TOL
}

/// Preparation matrix for the rectilinear branch: columns are the tilted
/// bit-0 state (cos a1, sin a1) and bit-1 state (-sin a3, cos a3).
/// Unit columns by construction; unitary only when alpha1 = alpha3.
pub fn prep_rect_matrix(prep: &PreparationAngles) -> Matrix2 {
    Matrix2::from_real([
        [prep.alpha1.cos(), -prep.alpha3.sin()],
        [prep.alpha1.sin(), prep.alpha3.cos()],
    ])
}

/// cos and sin of (x + pi/4), via the addition identity so that x = 0
/// reproduces the exact 1/sqrt(2) constant of the Hadamard matrix.
fn quarter_turn_plus(x: f64) -> (f64, f64) {
    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let (s, c) = x.sin_cos();
    ((c - s) * R, (c + s) * R)
}

/// cos and sin of (x - pi/4).
fn quarter_turn_minus(x: f64) -> (f64, f64) {
    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let (s, c) = x.sin_cos();
    ((c + s) * R, (s - c) * R)
}

/// Preparation matrix for the diagonal branch: columns are the tilted
/// 45-degree and -45-degree states. Reduces to the Hadamard matrix at
/// alpha2 = alpha4 = 0, exactly.
pub fn prep_diag_matrix(prep: &PreparationAngles) -> Matrix2 {
    let (c0, s0) = quarter_turn_plus(prep.alpha2);
    let (c1, s1) = quarter_turn_minus(prep.alpha4);
    Matrix2::from_real([[c0, c1], [s0, s1]])
}

/// Bob's four tilted measurement vectors.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementVectors {
    /// Outcome 0 in the rectilinear basis.
    pub rect0: Ket2,
    /// Outcome 1 in the rectilinear basis.
    pub rect1: Ket2,
    /// Outcome 0 in the diagonal basis.
    pub diag0: Ket2,
    /// Outcome 1 in the diagonal basis.
    pub diag1: Ket2,
}

pub fn meas_vectors(meas: &MeasurementAngles) -> MeasurementVectors {
    let (d0c, d0s) = quarter_turn_plus(meas.beta2);
    let (d1c, d1s) = quarter_turn_minus(meas.beta4);
    MeasurementVectors {
        rect0: Ket2::from_real(meas.beta1.cos(), meas.beta1.sin()),
        rect1: Ket2::from_real(-meas.beta3.sin(), meas.beta3.cos()),
        diag0: Ket2::from_real(d0c, d0s),
        diag1: Ket2::from_real(d1c, d1s),
    }
}

/// Probabilities of the two outcomes when `state` meets the detector pair
/// (v0, v1): each proportional to the projector overlap, normalized by
/// their sum.
pub fn two_outcome_probs(v0: &Ket2, v1: &Ket2, state: &Ket2) -> Result<(f64, f64)> {
    let w0 = v0.inner(state).norm_sqr();
    let w1 = v1.inner(state).norm_sqr();
    let denom = w0 + w1;
    if denom < DEGENERACY_TOL {
        return Err(Error::DegenerateBasis { denominator: denom });
    }
    Ok((w0 / denom, w1 / denom))
}

/// Bit-flip rate induced purely by the tilted measurement, averaged over
/// the two bases and the two ideal inputs per basis:
///
/// ```text
/// e_bit1 = 1/2 [ 1/2 ( sin^2 b1 / (sin^2 b1 + cos^2 b3)
///                    + sin^2 b3 / (sin^2 b3 + cos^2 b1) )
///              + 1/2 ( sin^2 b2 / (sin^2 b2 + cos^2 b4)
///                    + sin^2 b4 / (sin^2 b4 + cos^2 b2) ) ]
/// ```
///
/// Each fraction is the conditionally normalized wrong-outcome probability
/// for one ideal input state. Lives in [0, 1/2] for |beta| <= pi/4.
pub fn detection_flip_rate(meas: &MeasurementAngles) -> Result<f64> {
    let s1 = meas.beta1.sin().powi(2);
    let s2 = meas.beta2.sin().powi(2);
    let s3 = meas.beta3.sin().powi(2);
    let s4 = meas.beta4.sin().powi(2);
    let c1 = meas.beta1.cos().powi(2);
    let c2 = meas.beta2.cos().powi(2);
    let c3 = meas.beta3.cos().powi(2);
    let c4 = meas.beta4.cos().powi(2);

    for denom in [s1 + c3, s3 + c1, s2 + c4, s4 + c2] {
        if denom < DEGENERACY_TOL {
            return Err(Error::DegenerateBasis { denominator: denom });
        }
    }

    Ok(0.5 * (0.5 * (s1 / (s1 + c3) + s3 / (s3 + c1)) + 0.5 * (s2 / (s2 + c4) + s4 / (s4 + c2))))
}
