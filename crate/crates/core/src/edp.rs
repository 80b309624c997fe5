//! Post-sifting joint density matrices and error rates for the virtual
//! entanglement-distillation protocol.
//!
//! The channel is a Pauli channel: it applies X^u Z^v with probability
//! p_uv. Alice keeps half of a maximally entangled pair and transmits the
//! other half through her (possibly imperfect) preparation matrix; Bob
//! applies the perfect identity or Hadamard rotation for his basis choice.
//! Sifting discards the mismatched-basis cases, leaving the two matching
//! branches with weight 1/2 each (each of the four basis pairs occurs with
//! probability 1/4, and two of them survive). Bit and phase error rates
//! are Bell projections of the resulting state.
//!
//! Bob's measurement tilt never enters the density matrix here: the
//! virtual protocol defers it to the measurement step, where it acts as a
//! classical bit flip with probability e_bit1 and combines with the
//! distillation bit error into the observable QBER via [`combined_qber`].

use crate::device::{prep_diag_matrix, prep_rect_matrix, PreparationAngles};
use crate::error::{Error, Result};
use crate::linalg::{
    bell_projection, bell_state, standard_operator, tensor, DensityMatrix4, Matrix2, Matrix4,
    StandardOp,
};

/// Probability of each basis pair (i, j) before sifting.
pub const BASIS_PAIR_WEIGHT: f64 = 0.25;

/// Weight of each surviving branch after sifting discards i != j.
pub const SIFTED_BRANCH_WEIGHT: f64 = 0.5;

/// Probability vector (p00, p01, p10, p11) of the channel operator
/// X^u Z^v, indexed (u, v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel {
    p: [f64; 4],
}

impl PauliChannel {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        let p = [p00, p01, p10, p11];
        let valid = p.iter().all(|x| x.is_finite() && *x >= -Self::SUM_TOL)
            && (p.iter().sum::<f64>() - 1.0).abs() <= Self::SUM_TOL;
        if !valid {
            return Err(Error::InvalidChannel { p00, p01, p10, p11 });
        }
        Ok(Self {
            p: p.map(|x| x.max(0.0)),
        })
    }

    /// Noiseless channel.
    pub fn identity() -> Self {
        Self {
            p: [1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn p00(&self) -> f64 {
        self.p[0]
    }
    pub fn p01(&self) -> f64 {
        self.p[1]
    }
    pub fn p10(&self) -> f64 {
        self.p[2]
    }
    pub fn p11(&self) -> f64 {
        self.p[3]
    }

    /// Probabilities in (u, v) order: (0,0), (0,1), (1,0), (1,1).
    pub fn probabilities(&self) -> [f64; 4] {
        self.p
    }
}

/// Bit and phase error rates extracted from Bell projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub e_bit: f64,
    pub e_phase: f64,
}

/// The four channel operators X^u Z^v in (u, v) order matching
/// [`PauliChannel::probabilities`].
fn channel_operators() -> [Matrix2; 4] {
    let x = standard_operator(StandardOp::PauliX);
    let z = standard_operator(StandardOp::PauliZ);
    [Matrix2::identity(), z, x, x.mul(&z)]
}

/// Sums the two sifted branches over the channel distribution. `rect` and
/// `diag` are the operators applied to the transmitted qubit before and
/// after the channel in each branch: branch operator = after * X^u Z^v * before.
fn branch_sum(
    channel: &PauliChannel,
    rect_before: &Matrix2,
    rect_after: &Matrix2,
    diag_before: &Matrix2,
    diag_after: &Matrix2,
) -> DensityMatrix4 {
    let phi1 = bell_state(1).expect("index in range");
    let identity = Matrix2::identity();
    let mut acc = Matrix4::zero();
    for (puv, op) in channel
        .probabilities()
        .iter()
        .zip(channel_operators().iter())
    {
        if *puv == 0.0 {
            continue;
        }
        let k_rect = rect_after.mul(op).mul(rect_before);
        let k_diag = diag_after.mul(op).mul(diag_before);
        let psi_rect = tensor(&identity, &k_rect).apply(&phi1);
        let psi_diag = tensor(&identity, &k_diag).apply(&phi1);
        acc = acc.add(
            &psi_rect
                .outer()
                .scale(SIFTED_BRANCH_WEIGHT * puv)
                .add(&psi_diag.outer().scale(SIFTED_BRANCH_WEIGHT * puv)),
        );
    }
    let rho = DensityMatrix4::new(acc).expect("branch sum is Hermitian by construction");
    // Unit-column preparation matrices on a maximally entangled input keep
    // every branch normalized; a trace drift here means a modeling bug, so
    // assert instead of silently renormalizing.
    let trace = rho.trace();
    assert!(
        (trace - 1.0).abs() <= DensityMatrix4::TRACE_TOL,
        "sifted branch sum has trace {trace}, expected 1"
    );
    rho
}

/// Joint state for perfect devices: both branches use the ideal
/// preparation, the diagonal branch conjugates the channel by Hadamard.
pub fn rho_perfect(channel: &PauliChannel) -> DensityMatrix4 {
    let identity = Matrix2::identity();
    let h = standard_operator(StandardOp::Hadamard);
    branch_sum(channel, &identity, &identity, &h, &h)
}

/// Joint state for imperfect preparation: the transmitted qubit passes
/// through the tilted rectilinear or diagonal preparation matrix before
/// the channel; Bob's rotation stays perfect (identity / Hadamard).
/// Measurement angles deliberately do not appear here.
pub fn rho_imperfect(channel: &PauliChannel, prep: &PreparationAngles) -> DensityMatrix4 {
    let identity = Matrix2::identity();
    let h = standard_operator(StandardOp::Hadamard);
    let rect_prep = prep_rect_matrix(prep);
    let diag_prep = prep_diag_matrix(prep);
    branch_sum(channel, &rect_prep, &identity, &diag_prep, &h)
}

/// Bit and phase error rates of a unit-trace joint state:
/// e_bit = <phi2|rho|phi2> + <phi4|rho|phi4>,
/// e_phase = <phi3|rho|phi3> + <phi4|rho|phi4>.
pub fn edp_error_rates(rho: &DensityMatrix4) -> Result<ErrorRates> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > DensityMatrix4::TRACE_TOL {
        return Err(Error::InvalidState(format!(
            "error rates need a unit-trace state, got trace {trace}"
        )));
    }
    let p2 = bell_projection(rho, 2)?;
    let p3 = bell_projection(rho, 3)?;
    let p4 = bell_projection(rho, 4)?;
    Ok(ErrorRates {
        e_bit: p2 + p4,
        e_phase: p3 + p4,
    })
}

/// Closed forms for the one-parameter family alpha1 = a with every other
/// preparation angle zero (the same family as beta1 = beta2 = a on the
/// measurement side, which does not enter these rates):
///
/// ```text
/// e_bit   = 1/8 [cos^2 a (p11+p10) + sin^2 a (p00+p01) + cos a (2 p10 - 2 p11)
///                + 4 p01 + p10 + p11]
///         + 1/8 [cos^2 a (p11+p10) + sin^2 a (p00+p01) + cos a (-2 p10 + 2 p11)
///                + p10 + 5 p11]
/// e_phase = 1/8 [cos^2 a (p00+p01) + sin^2 a (p10+p11) + cos a (2 p01 - 2 p00)
///                + 4 p10 + p01 + p00]
///         + 1/8 [cos^2 a (p11+p10) + sin^2 a (p00+p01) + cos a (-2 p10 + 2 p11)
///                + p10 + 5 p11]
/// ```
///
/// Agrees with `edp_error_rates(rho_imperfect(...))` to floating-point
/// accuracy; the matrix route is the ground truth the test suite checks
/// against.
pub fn closed_form_rates_family_a(channel: &PauliChannel, a: f64) -> ErrorRates {
    let [p00, p01, p10, p11] = channel.probabilities();
    let (sin_a, cos_a) = a.sin_cos();
    let c2 = cos_a * cos_a;
    let s2 = sin_a * sin_a;

    let shared = 0.125
        * (c2 * (p11 + p10)
            + s2 * (p00 + p01)
            + cos_a * (-2.0 * p10 + 2.0 * p11)
            + p10
            + 5.0 * p11);
    let e_bit = 0.125
        * (c2 * (p11 + p10)
            + s2 * (p00 + p01)
            + cos_a * (2.0 * p10 - 2.0 * p11)
            + 4.0 * p01
            + p10
            + p11)
        + shared;
    let e_phase = 0.125
        * (c2 * (p00 + p01)
            + s2 * (p10 + p11)
            + cos_a * (2.0 * p01 - 2.0 * p00)
            + 4.0 * p10
            + p01
            + p00)
        + shared;
    ErrorRates { e_bit, e_phase }
}

/// Observable QBER from the distillation bit error and the measurement
/// flip rate: Q = 1 - (1 - e_bit1)(1 - e_bit) - e_bit * e_bit1. One and
/// only one of the two error sources firing produces an observed error.
pub fn combined_qber(e_bit: f64, e_bit1: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&e_bit) && (0.0..=1.0).contains(&e_bit1));
    1.0 - (1.0 - e_bit1) * (1.0 - e_bit) - e_bit * e_bit1
}

/// Recovers the distillation bit error from an observed QBER:
/// e_bit = (Q - e_bit1) / (1 - 2 e_bit1). Exact inverse of
/// [`combined_qber`] for e_bit1 < 1/2.
pub fn invert_qber(q: f64, e_bit1: f64) -> Result<f64> {
    if e_bit1 >= 0.5 {
        return Err(Error::DegenerateFlipRate { e_bit1 });
    }
    if q < e_bit1 {
        return Err(Error::OutOfModel { q, e_bit1 });
    }
    Ok((q - e_bit1) / (1.0 - 2.0 * e_bit1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_channel(rng: &mut impl Rng) -> PauliChannel {
        let raw: [f64; 4] = core::array::from_fn(|_| -(rng.gen::<f64>().max(1e-12)).ln());
        let sum: f64 = raw.iter().sum();
        PauliChannel::new(raw[0] / sum, raw[1] / sum, raw[2] / sum, raw[3] / sum).unwrap()
    }

    #[test]
    fn branch_weights_are_the_sifted_basis_pairs() {
        // each of the four (i, j) basis pairs occurs with probability 1/4;
        // sifting keeps the two matching pairs, renormalized to 1/2 each
        assert_eq!(BASIS_PAIR_WEIGHT, 0.25);
        assert_eq!(
            SIFTED_BRANCH_WEIGHT,
            BASIS_PAIR_WEIGHT / (2.0 * BASIS_PAIR_WEIGHT)
        );
    }

    #[test]
    fn channel_validation() {
        assert!(PauliChannel::new(0.25, 0.25, 0.25, 0.25).is_ok());
        assert!(PauliChannel::new(0.5, 0.5, 0.1, 0.0).is_err());
        assert!(PauliChannel::new(-0.1, 0.6, 0.3, 0.2).is_err());
        assert!(PauliChannel::new(f64::NAN, 0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn identity_channel_gives_phi1() {
        let rho = rho_perfect(&PauliChannel::identity());
        let phi1 = bell_state(1).unwrap();
        assert!(rho.matrix().max_abs_diff(&phi1.outer()) < 1e-15);
    }

    #[test]
    fn pure_x_channel_splits_between_phi2_and_phi3() {
        let rho = rho_perfect(&PauliChannel::new(0.0, 0.0, 1.0, 0.0).unwrap());
        let expected = bell_state(2)
            .unwrap()
            .outer()
            .scale(0.5)
            .add(&bell_state(3).unwrap().outer().scale(0.5));
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn depolarizing_channel_gives_maximally_mixed() {
        let rho = rho_perfect(&PauliChannel::new(0.25, 0.25, 0.25, 0.25).unwrap());
        assert!(rho.matrix().max_abs_diff(&Matrix4::identity().scale(0.25)) < 1e-15);
    }

    #[test]
    fn perfect_rates_on_bell_projectors() {
        let rho = rho_perfect(&PauliChannel::identity());
        let r = edp_error_rates(&rho).unwrap();
        assert_eq!((r.e_bit, r.e_phase), (0.0, 0.0));

        let phi4 = DensityMatrix4::new(bell_state(4).unwrap().outer()).unwrap();
        let r4 = edp_error_rates(&phi4).unwrap();
        assert!((r4.e_bit - 1.0).abs() < 1e-15 && (r4.e_phase - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_devices_have_equal_bit_and_phase_rates() {
        let rho = rho_perfect(&PauliChannel::new(0.9, 0.05, 0.03, 0.02).unwrap());
        let r = edp_error_rates(&rho).unwrap();
        assert!((r.e_bit - r.e_phase).abs() < 1e-12);
        // e_bit = (p01 + p10)/2 + p11
        assert!((r.e_bit - 0.06).abs() < 1e-12);
    }

    #[test]
    fn zero_prep_angles_reduce_to_perfect() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let ch = random_channel(&mut rng);
            let a = rho_perfect(&ch);
            let b = rho_imperfect(&ch, &PreparationAngles::zero());
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn degenerate_prep_mixes_rect_and_hadamard_branches() {
        // H_A1 = I_A1 = identity: the rectilinear branch carries phi1
        // untouched while the diagonal branch still sees Bob's Hadamard,
        // reproducing e_bit = e_phase = 1/4 on the noiseless channel.
        use std::f64::consts::PI;
        let prep = PreparationAngles::new(0.0, -PI / 4.0, 0.0, 3.0 * PI / 4.0).unwrap();
        let rho = rho_imperfect(&PauliChannel::identity(), &prep);
        let r = edp_error_rates(&rho).unwrap();
        assert!((r.e_bit - 0.25).abs() < 1e-12);
        assert!((r.e_phase - 0.25).abs() < 1e-12);

        // pure Z channel: e_phase saturates 3/4 while e_bit stays 1/4
        let rho_z = rho_imperfect(&PauliChannel::new(0.0, 1.0, 0.0, 0.0).unwrap(), &prep);
        let rz = edp_error_rates(&rho_z).unwrap();
        assert!((rz.e_bit - 0.25).abs() < 1e-12);
        assert!((rz.e_phase - 0.75).abs() < 1e-12);
    }

    #[test]
    fn family_a_closed_form_matches_matrix_route_at_test_points() {
        // frozen oracle values at a = 0.2, noiseless channel
        let ch = PauliChannel::identity();
        let prep = PreparationAngles::new(0.2, 0.0, 0.0, 0.0).unwrap();
        let matrix = edp_error_rates(&rho_imperfect(&ch, &prep)).unwrap();
        assert!((matrix.e_bit - 0.009867375749639364).abs() < 1e-12);
        assert!((matrix.e_phase - 0.004983355539689603).abs() < 1e-12);

        let closed = closed_form_rates_family_a(&ch, 0.2);
        assert!((closed.e_bit - matrix.e_bit).abs() < 1e-12);
        assert!((closed.e_phase - matrix.e_phase).abs() < 1e-12);
    }

    #[test]
    fn family_a_closed_form_at_zero_matches_perfect_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let ch = random_channel(&mut rng);
            let closed = closed_form_rates_family_a(&ch, 0.0);
            let expected = 0.5 * (ch.p01() + ch.p10()) + ch.p11();
            assert!((closed.e_bit - expected).abs() < 1e-12);
            assert!((closed.e_phase - expected).abs() < 1e-12);
            let matrix = edp_error_rates(&rho_perfect(&ch)).unwrap();
            assert!((closed.e_bit - matrix.e_bit).abs() < 1e-12);
        }
    }

    #[test]
    fn family_a_closed_form_matches_matrix_route_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..1000 {
            let ch = random_channel(&mut rng);
            let a = rng.gen_range(0.0..0.3);
            let prep = PreparationAngles::new(a, 0.0, 0.0, 0.0).unwrap();
            let matrix = edp_error_rates(&rho_imperfect(&ch, &prep)).unwrap();
            let closed = closed_form_rates_family_a(&ch, a);
            assert!(
                (matrix.e_bit - closed.e_bit).abs() < 1e-10,
                "e_bit mismatch at a={a}"
            );
            assert!(
                (matrix.e_phase - closed.e_phase).abs() < 1e-10,
                "e_phase mismatch at a={a}"
            );
        }
    }

    #[test]
    fn imperfect_rho_trace_one_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let ch = random_channel(&mut rng);
            let prep = PreparationAngles::new(
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
            )
            .unwrap();
            let rho = rho_imperfect(&ch, &prep);
            assert!((rho.trace() - 1.0).abs() < 1e-10);
            rho.validate_state().unwrap();
        }
    }

    #[test]
    fn error_rates_affine_in_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let prep = PreparationAngles::new(0.25, -0.1, 0.15, 0.05).unwrap();
        for _ in 0..100 {
            let ca = random_channel(&mut rng);
            let cb = random_channel(&mut rng);
            let lambda: f64 = rng.gen();
            let [a0, a1, a2, a3] = ca.probabilities();
            let [b0, b1, b2, b3] = cb.probabilities();
            let mix = PauliChannel::new(
                lambda * a0 + (1.0 - lambda) * b0,
                lambda * a1 + (1.0 - lambda) * b1,
                lambda * a2 + (1.0 - lambda) * b2,
                lambda * a3 + (1.0 - lambda) * b3,
            )
            .unwrap();
            let ra = edp_error_rates(&rho_imperfect(&ca, &prep)).unwrap();
            let rb = edp_error_rates(&rho_imperfect(&cb, &prep)).unwrap();
            let rm = edp_error_rates(&rho_imperfect(&mix, &prep)).unwrap();
            let eb = lambda * ra.e_bit + (1.0 - lambda) * rb.e_bit;
            let ep = lambda * ra.e_phase + (1.0 - lambda) * rb.e_phase;
            assert!((rm.e_bit - eb).abs() < 1e-12);
            assert!((rm.e_phase - ep).abs() < 1e-12);
        }
    }

    #[test]
    fn combined_qber_fixed_points() {
        assert_eq!(combined_qber(0.0, 0.0), 0.0);
        assert!((combined_qber(0.07, 0.0) - 0.07).abs() < 1e-15);
        assert!((combined_qber(0.0, 0.07) - 0.07).abs() < 1e-15);
        for x in [0.0, 0.1, 0.3, 0.45] {
            assert!((combined_qber(0.5, x) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn invert_qber_round_trips() {
        assert_eq!(invert_qber(0.019, 0.019).unwrap(), 0.0);
        assert!((invert_qber(0.5, 0.1).unwrap() - 0.5).abs() < 1e-15);
        let q = combined_qber(0.07, 0.019);
        assert!((invert_qber(q, 0.019).unwrap() - 0.07).abs() < 1e-12);
    }

    #[test]
    fn invert_qber_rejects_out_of_model_inputs() {
        assert!(matches!(
            invert_qber(0.1, 0.5),
            Err(Error::DegenerateFlipRate { .. })
        ));
        assert!(matches!(
            invert_qber(0.01, 0.02),
            Err(Error::OutOfModel { .. })
        ));
    }

    #[test]
    fn bell_projections_sum_to_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let ch = random_channel(&mut rng);
            let prep = PreparationAngles::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            )
            .unwrap();
            let rho = rho_imperfect(&ch, &prep);
            let sum: f64 = (1..=4).map(|k| bell_projection(&rho, k).unwrap()).sum();
            assert!((sum - rho.trace()).abs() < 1e-10);
        }
    }
}
