//! Key-rate formulas, phase-error bounds and QBER thresholds.
//!
//! The distillation yield 1 - h(e_bit) - h(e_phase) needs an upper bound on
//! the phase error rate, which is not directly observable. Two
//! interchangeable strategies provide it behind the [`PhaseErrorBound`]
//! trait, registered by name and selectable at runtime:
//!
//! - `analytic_family_a`: the closed-form bound e_phase <= e_bit + G(a)
//!   with G(a) = (1 + sin^2 a - cos a) / 2, valid for the one-parameter
//!   device family alpha1 = beta1 = beta2 = a (all other angles zero).
//! - `exact_optimizer`: maximizes e_phase over every Pauli channel
//!   consistent with the observed bit error rate. Both rates are affine in
//!   the channel probabilities, so the feasible set is a polytope whose
//!   vertices lie on edges of the probability simplex; enumerating them is
//!   exact and needs no iterative solver.

use std::sync::Arc;

use crate::device::{detection_flip_rate, DeviceModel, PreparationAngles};
use crate::edp::{edp_error_rates, invert_qber, rho_imperfect, PauliChannel};
use crate::error::{Error, Result};

/// Vertex feasibility slack and general numeric dust tolerance for the
/// exact optimizer.
const FEASIBILITY_TOL: f64 = 1e-12;

/// Secret-key rate along with every intermediate used to compute it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    /// Secret bits per sifted bit, clamped at zero.
    pub rate: f64,
    /// The same quantity before clamping; negative means no key.
    pub raw_rate: f64,
    /// Distillation bit error rate.
    pub e_bit: f64,
    /// Upper bound on the phase error rate that entered the yield.
    pub e_phase_bound: f64,
    /// Measurement-induced flip rate.
    pub e_bit1: f64,
    /// Observed QBER the result was computed from.
    pub q: f64,
}

/// Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
/// Inputs outside [0, 1] by more than 1e-12 are rejected; closer ones are
/// clamped.
pub fn binary_entropy(x: f64) -> Result<f64> {
    const TOL: f64 = 1e-12;
    if !x.is_finite() || !(-TOL..=1.0 + TOL).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "binary entropy argument {x} outside [0, 1]"
        )));
    }
    Ok(entropy_clamped(x))
}

fn entropy_clamped(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Key rate for perfect devices: R = 1 - h(e_phase) - h(e_bit) with
/// e_phase = e_bit, clamped at zero.
pub fn keyrate_perfect(e_bit: f64) -> Result<KeyRateResult> {
    if !(0.0..=0.5).contains(&e_bit) {
        return Err(Error::InvalidArgument(format!(
            "perfect-device bit error rate {e_bit} outside [0, 0.5]"
        )));
    }
    let h = entropy_clamped(e_bit);
    let raw = 1.0 - h - h;
    Ok(KeyRateResult {
        rate: raw.max(0.0),
        raw_rate: raw,
        e_bit,
        e_phase_bound: e_bit,
        e_bit1: 0.0,
        q: e_bit,
    })
}

/// G(a) = (1 + sin^2 a - cos a) / 2, the additive phase-error allowance of
/// the analytic family-a bound: e_phase <= e_bit + G(a).
pub fn phase_gap_bound_analytic(a: f64) -> f64 {
    0.5 * (1.0 + a.sin().powi(2) - a.cos())
}

/// Largest e_phase over all Pauli channels whose bit error rate equals
/// `e_bit_target`, for the given preparation angles.
///
/// Candidates are the four simplex vertices meeting the constraint plus,
/// for every vertex pair, the unique convex combination that does. Both
/// functionals are affine in the channel, so the maximum over the
/// constrained polytope is attained among these.
pub fn worst_case_phase_error(prep: &PreparationAngles, e_bit_target: f64) -> Result<f64> {
    let (bit, phase) = vertex_rates(prep)?;
    let min = bit.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = bit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if e_bit_target < min - FEASIBILITY_TOL || e_bit_target > max + FEASIBILITY_TOL {
        return Err(Error::InfeasibleTarget {
            target: e_bit_target,
            min,
            max,
        });
    }

    let mut best = f64::NEG_INFINITY;
    for k in 0..4 {
        if (bit[k] - e_bit_target).abs() <= FEASIBILITY_TOL {
            best = best.max(phase[k]);
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let span = bit[i] - bit[j];
            if span.abs() <= FEASIBILITY_TOL {
                continue;
            }
            let lambda = (e_bit_target - bit[j]) / span;
            if (0.0..=1.0).contains(&lambda) {
                best = best.max(lambda * phase[i] + (1.0 - lambda) * phase[j]);
            }
        }
    }
    debug_assert!(best.is_finite(), "feasible target must yield a candidate");
    Ok(best)
}

/// (e_bit, e_phase) at each simplex vertex e_k, i.e. for each pure channel
/// operator, computed through the density-matrix pipeline.
pub fn vertex_rates(prep: &PreparationAngles) -> Result<([f64; 4], [f64; 4])> {
    let mut bit = [0.0; 4];
    let mut phase = [0.0; 4];
    for k in 0..4 {
        let mut p = [0.0; 4];
        p[k] = 1.0;
        let channel = PauliChannel::new(p[0], p[1], p[2], p[3])?;
        let rates = edp_error_rates(&rho_imperfect(&channel, prep))?;
        bit[k] = rates.e_bit;
        phase[k] = rates.e_phase;
    }
    Ok((bit, phase))
}

/// Interchangeable phase-error bound strategies, keyed by name.
pub trait PhaseErrorBound: Send + Sync {
    fn name(&self) -> &'static str;

    /// Upper bound on e_phase given the device model and the distillation
    /// bit error rate inferred from the observed QBER.
    fn bound(&self, model: &DeviceModel, e_bit: f64) -> Result<f64>;

    /// Bit error rates the strategy can bound for this model; threshold
    /// searches restrict the observed QBER to the image of this interval.
    /// Also the place to reject models the strategy does not cover.
    fn e_bit_domain(&self, model: &DeviceModel) -> Result<(f64, f64)> {
        let _ = model;
        Ok((0.0, 1.0))
    }
}

/// Closed-form bound for the family alpha1 = beta1 = beta2 = a, everything
/// else zero. Rejects models outside that pattern.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyticFamilyA;

impl AnalyticFamilyA {
    pub const NAME: &'static str = "analytic_family_a";

    /// Extracts the family parameter a, or explains why the model does not
    /// fit the pattern.
    pub fn family_parameter(model: &DeviceModel) -> Result<f64> {
        const TOL: f64 = 1e-12;
        let a = model.prep.alpha1;
        let zeros = [
            ("alpha2", model.prep.alpha2),
            ("alpha3", model.prep.alpha3),
            ("alpha4", model.prep.alpha4),
            ("beta3", model.meas.beta3),
            ("beta4", model.meas.beta4),
        ];
        for (name, v) in zeros {
            if v.abs() > TOL {
                return Err(Error::ModelMismatch {
                    strategy: Self::NAME,
                    reason: format!("{name} = {v} must be 0"),
                });
            }
        }
        for (name, v) in [("beta1", model.meas.beta1), ("beta2", model.meas.beta2)] {
            if (v - a).abs() > TOL {
                return Err(Error::ModelMismatch {
                    strategy: Self::NAME,
                    reason: format!("{name} = {v} must equal alpha1 = {a}"),
                });
            }
        }
        Ok(a)
    }
}

impl PhaseErrorBound for AnalyticFamilyA {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn bound(&self, model: &DeviceModel, e_bit: f64) -> Result<f64> {
        let a = Self::family_parameter(model)?;
        Ok((e_bit + phase_gap_bound_analytic(a)).min(1.0))
    }

    fn e_bit_domain(&self, model: &DeviceModel) -> Result<(f64, f64)> {
        Self::family_parameter(model)?;
        Ok((0.0, 1.0))
    }
}

/// Exact worst case over the Pauli simplex; works for any preparation
/// angles and ignores the measurement side, which never enters the
/// distillation state.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOptimizer;

impl ExactOptimizer {
    pub const NAME: &'static str = "exact_optimizer";
}

impl PhaseErrorBound for ExactOptimizer {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn bound(&self, model: &DeviceModel, e_bit: f64) -> Result<f64> {
        worst_case_phase_error(&model.prep, e_bit)
    }

    fn e_bit_domain(&self, model: &DeviceModel) -> Result<(f64, f64)> {
        let (bit, _) = vertex_rates(&model.prep)?;
        let min = bit.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = bit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok((min, max))
    }
}

/// Names of the registered phase-error bound strategies.
pub const PHASE_BOUND_NAMES: &[&str] = &[AnalyticFamilyA::NAME, ExactOptimizer::NAME];

/// Looks up a phase-error bound strategy by its registered name.
pub fn phase_bound_strategy(name: &str) -> Result<Arc<dyn PhaseErrorBound>> {
    match name {
        AnalyticFamilyA::NAME => Ok(Arc::new(AnalyticFamilyA)),
        ExactOptimizer::NAME => Ok(Arc::new(ExactOptimizer)),
        _ => Err(Error::UnknownStrategy {
            name: name.to_string(),
            registered: PHASE_BOUND_NAMES,
        }),
    }
}

/// Key rate for imperfect devices at observed QBER `q`:
/// e_bit1 from the measurement angles, e_bit by inverting the QBER
/// composition, e_phase bounded by the chosen strategy, then
/// R = (1 - h(e_phase_bound) - h(e_bit)) * (1 - h(e_bit1)), clamped at 0.
pub fn keyrate_imperfect(
    q: f64,
    model: &DeviceModel,
    bound: &dyn PhaseErrorBound,
) -> Result<KeyRateResult> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "observed QBER {q} outside [0, 1]"
        )));
    }
    let e_bit1 = detection_flip_rate(&model.meas)?;
    let e_bit = invert_qber(q, e_bit1)?;
    if e_bit > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "observed QBER {q} implies a bit error rate {e_bit} above 1 at flip rate {e_bit1}"
        )));
    }
    let e_phase_bound = bound.bound(model, e_bit)?;
    let raw = (1.0 - entropy_clamped(e_phase_bound) - entropy_clamped(e_bit))
        * (1.0 - entropy_clamped(e_bit1));
    Ok(KeyRateResult {
        rate: raw.max(0.0),
        raw_rate: raw,
        e_bit,
        e_phase_bound,
        e_bit1,
        q,
    })
}

/// Bisection root of a continuous, decreasing rate function on [lo, hi]:
/// the largest tolerated QBER, to absolute tolerance 1e-6.
pub fn qber_threshold(rate_fn: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    const TOL: f64 = 1e-6;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "invalid bracket [{lo}, {hi}]"
        )));
    }
    let rate_lo = rate_fn(lo);
    if rate_lo.is_nan() || rate_lo <= 0.0 || rate_fn(hi) > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bracket [{lo}, {hi}] does not straddle the zero crossing"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > TOL {
        let mid = 0.5 * (lo + hi);
        if rate_fn(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Error rates of the degenerate rectilinear-only encoding and the crude
/// phase bound that comes with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectOnlyBound {
    /// e_bit = (p00 + p01 + 3 p10 + 3 p11) / 4.
    pub e_bit: f64,
    /// e_phase = (p00 + 3 p01 + p10 + 3 p11) / 4.
    pub e_phase: f64,
    /// e_phase <= e_bit + 1/2, capped at 1: the best bound available when
    /// only one basis is ever sent, and it never leaves a positive key.
    pub e_phase_upper: f64,
}

/// Closed-form rates for a protocol that only ever encodes in the
/// rectilinear basis (the degenerate preparation with
/// alpha2 = -pi/4, alpha4 = 3 pi/4).
pub fn rect_only_bound(channel: &PauliChannel) -> RectOnlyBound {
    let [p00, p01, p10, p11] = channel.probabilities();
    let e_bit = 0.25 * (p00 + p01 + 3.0 * p10 + 3.0 * p11);
    let e_phase = 0.25 * (p00 + 3.0 * p01 + p10 + 3.0 * p11);
    RectOnlyBound {
        e_bit,
        e_phase,
        e_phase_upper: (e_bit + 0.5).min(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::MeasurementAngles;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn family_a_model(a: f64) -> DeviceModel {
        DeviceModel::new(
            PreparationAngles::new(a, 0.0, 0.0, 0.0).unwrap(),
            MeasurementAngles::new(a, a, 0.0, 0.0).unwrap(),
        )
    }

    fn random_channel(rng: &mut impl Rng) -> PauliChannel {
        let raw: [f64; 4] = core::array::from_fn(|_| -(rng.gen::<f64>().max(1e-12)).ln());
        let sum: f64 = raw.iter().sum();
        PauliChannel::new(raw[0] / sum, raw[1] / sum, raw[2] / sum, raw[3] / sum).unwrap()
    }

    #[test]
    fn entropy_limits_and_midpoint() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        // frozen direct evaluations
        assert!((binary_entropy(0.11).unwrap() - 0.499915958164528).abs() < 1e-15);
        assert!((binary_entropy(0.25).unwrap() - 0.8112781244591328).abs() < 1e-15);
        assert!(binary_entropy(1.0 + 5e-13).unwrap() == 0.0);
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
    }

    #[test]
    fn keyrate_perfect_endpoints() {
        assert_eq!(keyrate_perfect(0.0).unwrap().rate, 1.0);
        let half = keyrate_perfect(0.5).unwrap();
        assert_eq!(half.rate, 0.0);
        assert!(half.raw_rate < 0.0);
        let near = keyrate_perfect(0.11).unwrap();
        assert!((near.rate - 0.0001680836709440081).abs() < 1e-14);
        assert!(keyrate_perfect(0.6).is_err());
    }

    #[test]
    fn analytic_gap_values() {
        assert_eq!(phase_gap_bound_analytic(0.0), 0.0);
        assert!((phase_gap_bound_analytic(0.2) - 0.02970146257865791).abs() < 1e-15);
        assert!((phase_gap_bound_analytic(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn worst_case_reduces_to_target_for_perfect_devices() {
        let prep = PreparationAngles::zero();
        for target in [0.0, 0.1, 0.3, 0.5, 1.0] {
            let got = worst_case_phase_error(&prep, target).unwrap();
            assert!((got - target).abs() < 1e-12, "target {target} gave {got}");
        }
    }

    #[test]
    fn worst_case_rejects_infeasible_targets() {
        // family a = 0.2: attainable e_bit starts at sin^2(0.2)/4 > 0
        let prep = PreparationAngles::new(0.2, 0.0, 0.0, 0.0).unwrap();
        let err = worst_case_phase_error(&prep, 0.0).unwrap_err();
        match err {
            Error::InfeasibleTarget { min, max, .. } => {
                assert!((min - 0.009867375749639364).abs() < 1e-12);
                assert!(max > 0.98);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn worst_case_dominates_every_consistent_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let prep = PreparationAngles::new(0.2, 0.0, 0.0, 0.0).unwrap();
        for _ in 0..300 {
            let ch = random_channel(&mut rng);
            let rates = edp_error_rates(&rho_imperfect(&ch, &prep)).unwrap();
            let worst = worst_case_phase_error(&prep, rates.e_bit).unwrap();
            assert!(worst >= rates.e_phase - 1e-10);
        }
    }

    #[test]
    fn worst_case_gap_never_exceeds_analytic_allowance() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for a in [0.05, 0.1, 0.2] {
            let prep = PreparationAngles::new(a, 0.0, 0.0, 0.0).unwrap();
            let g = phase_gap_bound_analytic(a);
            for _ in 0..1000 {
                let ch = random_channel(&mut rng);
                let rates = edp_error_rates(&rho_imperfect(&ch, &prep)).unwrap();
                assert!(rates.e_phase <= rates.e_bit + g + 1e-10);
                let worst = worst_case_phase_error(&prep, rates.e_bit).unwrap();
                assert!(worst <= rates.e_bit + g + 1e-10);
            }
        }
    }

    #[test]
    fn worst_case_matches_grid_oracle_family_a() {
        // brute-force oracle: scan the simplex on a coarse grid, compare the
        // constrained maximum at a fixed target against vertex enumeration
        let prep = PreparationAngles::new(0.2, 0.0, 0.0, 0.0).unwrap();
        let (bit, phase) = vertex_rates(&prep).unwrap();
        let target = 0.3;
        let exact = worst_case_phase_error(&prep, target).unwrap();

        let step = 0.005f64;
        let n = (1.0 / step).round() as usize;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=n {
            for j in 0..=(n - i) {
                for k in 0..=(n - i - j) {
                    let p = [
                        i as f64 * step,
                        j as f64 * step,
                        k as f64 * step,
                        1.0 - (i + j + k) as f64 * step,
                    ];
                    let eb: f64 = (0..4).map(|v| p[v] * bit[v]).sum();
                    if (eb - target).abs() > step {
                        continue;
                    }
                    let ep: f64 = (0..4).map(|v| p[v] * phase[v]).sum();
                    best = best.max(ep);
                }
            }
        }
        // the grid meets the constraint only within a +-step band, so it can
        // land on either side of the exact value by O(step)
        assert!(
            (best - exact).abs() <= 2.0 * step,
            "grid {best} far from exact {exact}"
        );
    }

    #[test]
    fn bound_strategies_registered_by_name() {
        for name in PHASE_BOUND_NAMES {
            assert_eq!(phase_bound_strategy(name).unwrap().name(), *name);
        }
        assert!(matches!(
            phase_bound_strategy("newton"),
            Err(Error::UnknownStrategy { .. })
        ));
    }

    #[test]
    fn analytic_strategy_requires_family_pattern() {
        let ok = family_a_model(0.2);
        assert!((AnalyticFamilyA::family_parameter(&ok).unwrap() - 0.2).abs() < 1e-15);

        let bad = DeviceModel::new(
            PreparationAngles::new(0.2, 0.1, 0.0, 0.0).unwrap(),
            MeasurementAngles::new(0.2, 0.2, 0.0, 0.0).unwrap(),
        );
        assert!(matches!(
            AnalyticFamilyA.bound(&bad, 0.1),
            Err(Error::ModelMismatch { .. })
        ));
    }

    #[test]
    fn both_strategies_coincide_for_perfect_devices() {
        let model = DeviceModel::ideal();
        for e_bit in [0.0, 0.05, 0.2, 0.4] {
            let analytic = AnalyticFamilyA.bound(&model, e_bit).unwrap();
            let exact = ExactOptimizer.bound(&model, e_bit).unwrap();
            assert!((analytic - e_bit).abs() < 1e-10);
            assert!((exact - e_bit).abs() < 1e-10);
        }
    }

    #[test]
    fn keyrate_imperfect_reduces_to_perfect_at_zero_angles() {
        let model = DeviceModel::ideal();
        for q in [0.0, 0.03, 0.08, 0.11] {
            let imp = keyrate_imperfect(q, &model, &AnalyticFamilyA).unwrap();
            let per = keyrate_perfect(q).unwrap();
            assert_eq!(imp.rate, per.rate);
            assert_eq!(imp.e_bit1, 0.0);
        }
    }

    #[test]
    fn keyrate_imperfect_at_device_floor() {
        // Q = e_bit1 means the channel contributed nothing
        let model = family_a_model(0.2);
        let e1 = detection_flip_rate(&model.meas).unwrap();
        let r = keyrate_imperfect(e1, &model, &AnalyticFamilyA).unwrap();
        assert_eq!(r.e_bit, 0.0);
        // frozen: (1 - h(G(0.2))) * (1 - h(e_bit1))
        assert!((r.rate - 0.6975786879032405).abs() < 1e-12);
    }

    #[test]
    fn keyrate_imperfect_positive_above_perfect_threshold() {
        let model = family_a_model(0.2);
        let r = keyrate_imperfect(0.11, &model, &AnalyticFamilyA).unwrap();
        assert!((r.rate - 0.005805903457312554).abs() < 1e-12);
        assert!(r.rate > 0.0);
    }

    #[test]
    fn keyrate_imperfect_rejects_qber_below_floor() {
        let model = family_a_model(0.2);
        assert!(matches!(
            keyrate_imperfect(0.01, &model, &AnalyticFamilyA),
            Err(Error::OutOfModel { .. })
        ));
    }

    #[test]
    fn keyrate_imperfect_rejects_qber_implying_bit_error_above_one() {
        // q close to 1 inverts past e_bit = 1 whenever e_bit1 > 0
        let model = family_a_model(0.2);
        assert!(matches!(
            keyrate_imperfect(0.999, &model, &AnalyticFamilyA),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            keyrate_imperfect(1.5, &model, &AnalyticFamilyA),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn keyrate_monotone_nonincreasing_in_q() {
        let model = family_a_model(0.2);
        let e1 = detection_flip_rate(&model.meas).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let q = e1 + (0.5 - e1) * i as f64 / 100.0;
            let r = keyrate_imperfect(q, &model, &AnalyticFamilyA).unwrap();
            assert!(r.rate <= prev + 1e-12);
            prev = r.rate;
        }
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let r = keyrate_perfect(0.5 * i as f64 / 100.0).unwrap();
            assert!(r.rate <= prev + 1e-12);
            prev = r.rate;
        }
    }

    #[test]
    fn perfect_threshold_matches_known_value() {
        let thr = qber_threshold(|q| keyrate_perfect(q).unwrap().raw_rate, 0.0, 0.5).unwrap();
        assert!((thr - 0.1100278644385071).abs() < 1e-4);
        assert!((0.109..=0.111).contains(&thr));
    }

    #[test]
    fn imperfect_threshold_exceeds_perfect() {
        let model = family_a_model(0.2);
        let e1 = detection_flip_rate(&model.meas).unwrap();
        let thr = qber_threshold(
            |q| {
                keyrate_imperfect(q, &model, &AnalyticFamilyA)
                    .map(|r| r.raw_rate)
                    .unwrap_or(-1.0)
            },
            e1,
            0.5,
        )
        .unwrap();
        // frozen oracle bisection
        assert!((thr - 0.11106669146165493).abs() < 1e-4);
        assert!(thr > 0.1100278644385071);
    }

    #[test]
    fn threshold_rejects_invalid_brackets() {
        assert!(qber_threshold(|_| 0.0, 0.0, 0.5).is_err());
        assert!(qber_threshold(|_| 1.0, 0.0, 0.5).is_err());
        assert!(qber_threshold(|q| 1.0 - q, 0.5, 0.0).is_err());
    }

    #[test]
    fn rect_only_bound_values() {
        let b = rect_only_bound(&PauliChannel::identity());
        assert_eq!(b.e_bit, 0.25);
        assert_eq!(b.e_phase, 0.25);
        assert_eq!(b.e_phase_upper, 0.75);

        let z = rect_only_bound(&PauliChannel::new(0.0, 1.0, 0.0, 0.0).unwrap());
        assert_eq!(z.e_bit, 0.25);
        assert_eq!(z.e_phase, 0.75);
        assert_eq!(z.e_phase_upper, 0.75);
    }

    #[test]
    fn rect_only_bound_matches_matrix_route() {
        use std::f64::consts::PI;
        let prep = PreparationAngles::new(0.0, -PI / 4.0, 0.0, 3.0 * PI / 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..100 {
            let ch = random_channel(&mut rng);
            let closed = rect_only_bound(&ch);
            let matrix = edp_error_rates(&rho_imperfect(&ch, &prep)).unwrap();
            assert!((closed.e_bit - matrix.e_bit).abs() < 1e-12);
            assert!((closed.e_phase - matrix.e_phase).abs() < 1e-12);
            assert!(matrix.e_phase <= closed.e_phase_upper + 1e-12);
        }
    }

    #[test]
    fn rect_only_rate_is_zero() {
        // 1 - h(1/4) - h(3/4) < 0: the crude bound never leaves a key
        let b = rect_only_bound(&PauliChannel::identity());
        let raw = 1.0 - binary_entropy(b.e_phase_upper).unwrap() - binary_entropy(b.e_bit).unwrap();
        assert!(raw < 0.0);
        assert_eq!(raw.max(0.0), 0.0);
    }
}
