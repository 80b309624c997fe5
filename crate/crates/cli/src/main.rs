use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qkd_cli::config::{AngleUnit, RawConfig, EXIT_VALIDATION};
use qkd_cli::{commands, CliError};

#[derive(Parser)]
#[command(
    name = "qkd",
    about = "Security quantities for BB84 with state-dependent angular device imperfections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Flat key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AngleOpts {
    /// Preparation deviation of the rectilinear bit-0 state.
    #[arg(long, allow_negative_numbers = true)]
    alpha1: Option<f64>,
    /// Preparation deviation of the diagonal bit-0 state.
    #[arg(long, allow_negative_numbers = true)]
    alpha2: Option<f64>,
    /// Preparation deviation of the rectilinear bit-1 state.
    #[arg(long, allow_negative_numbers = true)]
    alpha3: Option<f64>,
    /// Preparation deviation of the diagonal bit-1 state.
    #[arg(long, allow_negative_numbers = true)]
    alpha4: Option<f64>,
    /// Measurement deviation of the rectilinear outcome-0 vector.
    #[arg(long, allow_negative_numbers = true)]
    beta1: Option<f64>,
    /// Measurement deviation of the diagonal outcome-0 vector.
    #[arg(long, allow_negative_numbers = true)]
    beta2: Option<f64>,
    /// Measurement deviation of the rectilinear outcome-1 vector.
    #[arg(long, allow_negative_numbers = true)]
    beta3: Option<f64>,
    /// Measurement deviation of the diagonal outcome-1 vector.
    #[arg(long, allow_negative_numbers = true)]
    beta4: Option<f64>,

    /// Angles are degrees. Mandatory (or --radians) when any angle is set.
    #[arg(long, conflicts_with = "radians")]
    degrees: bool,

    /// Angles are radians. Mandatory (or --degrees) when any angle is set.
    #[arg(long)]
    radians: bool,
}

#[derive(Args)]
struct ChannelOpts {
    /// Probability of the identity channel operator.
    #[arg(long)]
    p00: Option<f64>,
    /// Probability of the phase-flip (Z) operator.
    #[arg(long)]
    p01: Option<f64>,
    /// Probability of the bit-flip (X) operator.
    #[arg(long)]
    p10: Option<f64>,
    /// Probability of the combined bit-phase-flip (XZ) operator.
    #[arg(long)]
    p11: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Flip rate, distillation error rates and observable QBER.
    Rates {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        angles: AngleOpts,
        #[command(flatten)]
        channel: ChannelOpts,
        /// Emit CSV instead of the aligned table.
        #[arg(long)]
        csv: bool,
    },
    /// Key-rate curves R(Q) for perfect and imperfect devices (CSV).
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        angles: AngleOpts,
        /// First QBER of the grid.
        #[arg(long)]
        q_min: Option<f64>,
        /// Last QBER of the grid.
        #[arg(long)]
        q_max: Option<f64>,
        /// Grid spacing.
        #[arg(long)]
        q_step: Option<f64>,
        /// Phase-error bound strategy.
        #[arg(long, default_value = "analytic_family_a")]
        bound: String,
    },
    /// Monte Carlo protocol run compared against the analytic QBER.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        angles: AngleOpts,
        #[command(flatten)]
        channel: ChannelOpts,
        /// Number of transmitted pulses.
        #[arg(long)]
        n_pulses: Option<u64>,
        /// RNG seed; a fixed seed reproduces the run bit for bit.
        #[arg(long)]
        seed: Option<u64>,
        /// Eavesdropper strategy.
        #[arg(long)]
        eve: Option<String>,
    },
    /// Maximal tolerated QBER for the device model.
    Threshold {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        angles: AngleOpts,
        /// Phase-error bound strategy.
        #[arg(long, default_value = "analytic_family_a")]
        bound: String,
    },
}

fn flags_config(angles: &AngleOpts, channel: Option<&ChannelOpts>) -> RawConfig {
    let unit = match (angles.degrees, angles.radians) {
        (true, _) => Some(AngleUnit::Degrees),
        (_, true) => Some(AngleUnit::Radians),
        _ => None,
    };
    let ch = channel
        .map(|c| [c.p00, c.p01, c.p10, c.p11])
        .unwrap_or_default();
    RawConfig {
        alpha: [angles.alpha1, angles.alpha2, angles.alpha3, angles.alpha4],
        beta: [angles.beta1, angles.beta2, angles.beta3, angles.beta4],
        unit,
        p: ch,
        ..Default::default()
    }
}

fn load_merged(
    common: &CommonOpts,
    mut flags: RawConfig,
    sim: Option<(Option<u64>, Option<u64>, Option<String>)>,
) -> Result<RawConfig, CliError> {
    if let Some((n_pulses, seed, eve)) = sim {
        flags.n_pulses = n_pulses;
        flags.seed = seed;
        flags.eve = eve;
    }
    let base = match &common.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    Ok(base.merged_with(flags))
}

fn emit(common: &CommonOpts, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::new(
                EXIT_VALIDATION,
                format!("cannot write {}: {e}", path.display()),
            )
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn_about_angles(cfg: &RawConfig) {
    if let Ok(model) = cfg.device_model() {
        for w in model.warnings() {
            eprintln!("warning: {w}");
        }
    }
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Rates {
            common,
            angles,
            channel,
            csv,
        } => {
            let cfg = load_merged(&common, flags_config(&angles, Some(&channel)), None)?;
            warn_about_angles(&cfg);
            let text = commands::cmd_rates(&cfg, csv)?;
            emit(&common, &text)?;
            Ok(0)
        }
        Command::Sweep {
            common,
            angles,
            q_min,
            q_max,
            q_step,
            bound,
        } => {
            let mut flags = flags_config(&angles, None);
            flags.q_min = q_min;
            flags.q_max = q_max;
            flags.q_step = q_step;
            let cfg = load_merged(&common, flags, None)?;
            warn_about_angles(&cfg);
            let text = commands::cmd_sweep(&cfg, &bound)?;
            emit(&common, &text)?;
            Ok(0)
        }
        Command::Simulate {
            common,
            angles,
            channel,
            n_pulses,
            seed,
            eve,
        } => {
            let cfg = load_merged(
                &common,
                flags_config(&angles, Some(&channel)),
                Some((n_pulses, seed, eve)),
            )?;
            warn_about_angles(&cfg);
            let (text, code) = commands::cmd_simulate(&cfg)?;
            emit(&common, &text)?;
            Ok(code)
        }
        Command::Threshold {
            common,
            angles,
            bound,
        } => {
            let cfg = load_merged(&common, flags_config(&angles, None), None)?;
            warn_about_angles(&cfg);
            let text = commands::cmd_threshold(&cfg, &bound)?;
            emit(&common, &text)?;
            Ok(0)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(err.code);
        }
    }
}
