//! Pulse-by-pulse simulation of the prepare-and-measure protocol with
//! imperfect devices and a sampled Pauli channel.
//!
//! Each pulse: Alice draws a uniform bit and basis and sends the matching
//! column of her tilted preparation matrix; the channel applies X^u Z^v
//! sampled from the channel distribution; the eavesdropper strategy (if
//! any) transforms the in-flight state; Bob draws a uniform basis and, when
//! it matches Alice's, measures with the normalized two-outcome rule.
//! Sifting keeps matching-basis pulses only.
//!
//! Pulses are processed in fixed-size batches, each on its own counter
//! stream of a seeded ChaCha generator. Batch boundaries are independent of
//! the thread count, so a config (seed included) maps to one exact result
//! no matter how the work is scheduled.
//!
//! Eavesdroppers are interchangeable strategies behind [`EveStrategy`],
//! registered by name: `none` and `intercept_resend_rect` (Eve measures
//! every pulse in the ideal rectilinear basis and resends her outcome as an
//! ideal state — her own apparatus is perfect).

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::device::{
    detection_flip_rate, meas_vectors, prep_diag_matrix, prep_rect_matrix, two_outcome_probs,
    DeviceModel,
};
use crate::edp::{combined_qber, edp_error_rates, rho_imperfect, PauliChannel};
use crate::error::{Error, Result};
use crate::linalg::Ket2;

/// Pulses per work unit; fixed so that scheduling cannot move a pulse to a
/// different random stream.
const BATCH_SIZE: u64 = 1 << 14;

/// What Eve does to the in-flight state between channel and Bob.
pub trait EveStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Transforms (or passes through) one transmitted state. May consume
    /// randomness; must be deterministic given the stream.
    fn intercept(&self, state: Ket2, rng: &mut dyn RngCore) -> Ket2;
}

/// No eavesdropper; the state passes through untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoEve;

impl NoEve {
    pub const NAME: &'static str = "none";
}

impl EveStrategy for NoEve {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn intercept(&self, state: Ket2, _rng: &mut dyn RngCore) -> Ket2 {
        state
    }
}

/// Intercept-resend in the ideal rectilinear basis.
#[derive(Debug, Clone, Copy, Default)]
pub struct InterceptResendRect;

impl InterceptResendRect {
    pub const NAME: &'static str = "intercept_resend_rect";
}

impl EveStrategy for InterceptResendRect {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn intercept(&self, state: Ket2, rng: &mut dyn RngCore) -> Ket2 {
        let w0 = state.amp(0).norm_sqr();
        let w1 = state.amp(1).norm_sqr();
        if rng.gen::<f64>() * (w0 + w1) < w1 {
            Ket2::from_real(0.0, 1.0)
        } else {
            Ket2::from_real(1.0, 0.0)
        }
    }
}

/// Names of the registered eavesdropper strategies.
pub const EVE_STRATEGY_NAMES: &[&str] = &[NoEve::NAME, InterceptResendRect::NAME];

/// Looks up an eavesdropper strategy by its registered name.
pub fn eve_strategy(name: &str) -> Result<Arc<dyn EveStrategy>> {
    match name {
        NoEve::NAME => Ok(Arc::new(NoEve)),
        InterceptResendRect::NAME => Ok(Arc::new(InterceptResendRect)),
        _ => Err(Error::UnknownStrategy {
            name: name.to_string(),
            registered: EVE_STRATEGY_NAMES,
        }),
    }
}

/// One protocol run: pulse count, seed, devices, channel and eavesdropper.
#[derive(Clone)]
pub struct ProtocolConfig {
    pub n_pulses: u64,
    pub seed: u64,
    pub model: DeviceModel,
    pub channel: PauliChannel,
    pub eve: Arc<dyn EveStrategy>,
}

impl ProtocolConfig {
    pub fn new(
        n_pulses: u64,
        seed: u64,
        model: DeviceModel,
        channel: PauliChannel,
        eve: Arc<dyn EveStrategy>,
    ) -> Result<Self> {
        if n_pulses == 0 {
            return Err(Error::InvalidArgument("n_pulses must be at least 1".into()));
        }
        Ok(Self {
            n_pulses,
            seed,
            model,
            channel,
            eve,
        })
    }
}

/// Counts and derived statistics of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// Matching-basis pulses kept by sifting.
    pub sifted: u64,
    /// Sifted pulses where Bob's bit differs from Alice's.
    pub errors: u64,
    /// errors / sifted (zero when nothing was sifted).
    pub qber: f64,
    /// Binomial standard error sqrt(qber (1 - qber) / sifted).
    pub stderr: f64,
}

impl SimResult {
    fn from_counts(sifted: u64, errors: u64) -> Self {
        let (qber, stderr) = if sifted == 0 {
            (0.0, 0.0)
        } else {
            let q = errors as f64 / sifted as f64;
            (q, (q * (1.0 - q) / sifted as f64).sqrt())
        };
        Self {
            sifted,
            errors,
            qber,
            stderr,
        }
    }
}

/// The QBER the analysis predicts for a device model and channel with no
/// eavesdropper: the distillation bit error composed with the measurement
/// flip rate.
pub fn analytic_qber(model: &DeviceModel, channel: &PauliChannel) -> Result<f64> {
    let rates = edp_error_rates(&rho_imperfect(channel, &model.prep))?;
    let e_bit1 = detection_flip_rate(&model.meas)?;
    Ok(combined_qber(rates.e_bit, e_bit1))
}

/// Exact expected QBER of the protocol with no eavesdropper, by
/// enumerating Alice's basis and bit, the channel operator and Bob's
/// two-outcome rule. This is the mean of the distribution the simulator
/// samples from, and the baseline an intercepting attacker must not
/// disturb to stay hidden.
pub fn expected_qber(model: &DeviceModel, channel: &PauliChannel) -> Result<f64> {
    use crate::linalg::{standard_operator, Matrix2, StandardOp};
    let x = standard_operator(StandardOp::PauliX);
    let z = standard_operator(StandardOp::PauliZ);
    let ops = [Matrix2::identity(), z, x, x.mul(&z)];

    let preps = [prep_rect_matrix(&model.prep), prep_diag_matrix(&model.prep)];
    let vectors = meas_vectors(&model.meas);
    let pairs = [
        (&vectors.rect0, &vectors.rect1),
        (&vectors.diag0, &vectors.diag1),
    ];

    let mut total = 0.0;
    for (prep, (v0, v1)) in preps.iter().zip(pairs) {
        for bit in 0..2 {
            let sent = prep.column(bit);
            for (puv, op) in channel.probabilities().iter().zip(ops.iter()) {
                if *puv == 0.0 {
                    continue;
                }
                let arrived = op.apply(&sent);
                let (p0, p1) = two_outcome_probs(v0, v1, &arrived)?;
                total += 0.25 * puv * if bit == 0 { p1 } else { p0 };
            }
        }
    }
    Ok(total)
}

/// Runs the full protocol. Deterministic for a fixed config, including
/// across thread counts.
pub fn run_protocol(config: &ProtocolConfig) -> Result<SimResult> {
    // fail fast on measurement pairs the two-outcome rule cannot normalize
    detection_flip_rate(&config.model.meas)?;

    let n_batches = config.n_pulses.div_ceil(BATCH_SIZE);
    let counts: Vec<(u64, u64)> = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let start = batch * BATCH_SIZE;
            let len = BATCH_SIZE.min(config.n_pulses - start);
            run_batch(config, batch, len)
        })
        .collect::<Result<_>>()?;

    let sifted = counts.iter().map(|c| c.0).sum();
    let errors = counts.iter().map(|c| c.1).sum();
    Ok(SimResult::from_counts(sifted, errors))
}

fn run_batch(config: &ProtocolConfig, batch: u64, len: u64) -> Result<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(batch);

    let rect_prep = prep_rect_matrix(&config.model.prep);
    let diag_prep = prep_diag_matrix(&config.model.prep);
    let vectors = meas_vectors(&config.model.meas);
    let [p00, p01, p10, _] = config.channel.probabilities();
    let (c1, c2, c3) = (p00, p00 + p01, p00 + p01 + p10);

    let mut sifted = 0u64;
    let mut errors = 0u64;
    for _ in 0..len {
        let alice_bit: bool = rng.gen();
        let alice_diag: bool = rng.gen();
        let prep = if alice_diag { &diag_prep } else { &rect_prep };
        let mut state = prep.column(usize::from(alice_bit));

        // sample X^u Z^v and apply it to the transmitted qubit
        let draw: f64 = rng.gen();
        state = if draw < c1 {
            state
        } else if draw < c2 {
            // Z
            Ket2::new([state.amp(0), -state.amp(1)])
        } else if draw < c3 {
            // X
            Ket2::new([state.amp(1), state.amp(0)])
        } else {
            // XZ
            Ket2::new([-state.amp(1), state.amp(0)])
        };

        state = config.eve.intercept(state, &mut rng);

        let bob_diag: bool = rng.gen();
        if bob_diag != alice_diag {
            continue;
        }
        let (v0, v1) = if bob_diag {
            (&vectors.diag0, &vectors.diag1)
        } else {
            (&vectors.rect0, &vectors.rect1)
        };
        let (_, p_one) = two_outcome_probs(v0, v1, &state)?;
        let bob_bit = rng.gen::<f64>() < p_one;

        sifted += 1;
        if bob_bit != alice_bit {
            errors += 1;
        }
    }
    Ok((sifted, errors))
}
