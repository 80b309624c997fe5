//! Security analysis of BB84 quantum key distribution with state-dependent
//! angular imperfections in state preparation and measurement.
//!
//! The crate computes the quantities an unconditional-security argument
//! needs when each of the four signal states and each of Bob's four
//! measurement vectors carries its own angular deviation:
//!
//! - [`linalg`]: fixed-size complex matrices, Bell states and projections.
//! - [`device`]: the eight-angle device model, tilted preparation matrices
//!   and measurement vectors, and the measurement-induced flip rate.
//! - [`edp`]: joint density matrices after sifting over a Pauli channel,
//!   bit/phase error rates, closed forms for the one-parameter device
//!   family, and the composition of distillation and measurement errors
//!   into the observable QBER.
//! - [`bounds`]: binary entropy, key rates, phase-error bound strategies
//!   (analytic and exact worst-case), QBER thresholds and the
//!   rectilinear-only degenerate case.
//! - [`sim`]: a deterministic, seedable Monte Carlo run of the
//!   prepare-and-measure protocol with pluggable eavesdropper strategies,
//!   used to validate the analytic pipeline.
//!
//! # Example
//!
//! Key rate at 5% observed QBER for the one-parameter device family
//! alpha1 = beta1 = beta2 = 0.2 rad:
//!
//! ```
//! use qkd_core::bounds::{keyrate_imperfect, phase_bound_strategy};
//! use qkd_core::device::{DeviceModel, MeasurementAngles, PreparationAngles};
//!
//! let model = DeviceModel::new(
//!     PreparationAngles::new(0.2, 0.0, 0.0, 0.0)?,
//!     MeasurementAngles::new(0.2, 0.2, 0.0, 0.0)?,
//! );
//! let bound = phase_bound_strategy("analytic_family_a")?;
//! let result = keyrate_imperfect(0.05, &model, bound.as_ref())?;
//! assert!(result.rate > 0.39 && result.rate < 0.40);
//! # Ok::<(), qkd_core::Error>(())
//! ```

pub mod bounds;
pub mod device;
pub mod edp;
pub mod error;
pub mod linalg;
pub mod sim;

pub use error::{Error, Result};
