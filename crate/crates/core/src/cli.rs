//! Command-line front end. Exit codes: 0 success, 1 verification found
//! violations, 2 bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::channels::{random_channel, validate_channel};
use crate::convexroof::{convex_roof, RoofConfig};
use crate::error::{Error, Result};
use crate::io::{channel_to_json, density_to_json, parse_state, DensityJson, LoadedState};
use crate::monotones::{appendix_closed_form, MonotoneId};
use crate::numerics;
use crate::states::{twirl, StandardState, SPECTRUM_EPS};
use crate::verify::{outcomes_csv, verify_monotonicity, VerifyParams};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATIONS: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "frameness",
    version,
    about = "U(1) frameness monotones and convex roofs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// vidal | entropy | concurrence | variance
    #[arg(long)]
    measure: String,
    #[arg(long)]
    k: Option<usize>,
}

impl MeasureArgs {
    fn id(&self) -> Result<MonotoneId> {
        MonotoneId::parse(&self.measure, self.k)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a pure-state monotone.
    Monotone {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        state: PathBuf,
        /// Pad the state to this many sectors.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Numerical convex roof of a measure at a density matrix.
    Roof {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        step_tolerance: f64,
    },
    /// Monte Carlo check of ensemble monotonicity.
    Verify {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
        shifts: String,
        #[arg(long, default_value_t = 2)]
        kraus_per_shift: usize,
        /// Also write per-trial rows to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Channel utilities.
    Channel {
        #[command(subcommand)]
        action: ChannelCommand,
    },
    /// Dephase a state in the number basis.
    Twirl {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Closed-form qubit quantities for spectral parameters `p`, `alpha`.
    Appendix {
        #[arg(long)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
}

#[derive(Debug, Subcommand)]
enum ChannelCommand {
    /// Sample a random trace-preserving U(1) channel.
    Sample {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
        shifts: String,
        #[arg(long, default_value_t = 1)]
        kraus_per_shift: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print per-n completeness sums to stderr.
        #[arg(long)]
        check: bool,
    },
}

/// Parses and runs one invocation, writing results to `out` and diagnostics
/// to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_shifts(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad shift '{t}'")))
        })
        .collect()
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}").map_err(|e| Error::Io(e.to_string()))
}

/// Pure standard state from any state file; density inputs must be rank one.
fn pure_standard(state: &LoadedState) -> Result<StandardState> {
    if let Some(st) = state.standard() {
        return st;
    }
    let rho = state.to_density()?;
    let eig = numerics::hermitian_eig(rho.matrix())?;
    if eig.values.iter().skip(1).any(|&v| v > SPECTRUM_EPS) {
        return Err(Error::InvalidState(
            "expected a pure state, got a mixed density matrix".into(),
        ));
    }
    rho.standard_form_of(&eig.vectors.column(0).into_owned())
}

#[derive(Serialize)]
struct AppendixJson {
    p: f64,
    alpha: f64,
    mu1: f64,
    mu2: f64,
    concurrence: f64,
    fof: f64,
    rho: DensityJson,
}

#[derive(Serialize)]
struct CompletenessJson {
    completeness: Vec<f64>,
    trace_preserving: bool,
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match cmd {
        Command::Monotone {
            measure,
            state,
            dim,
        } => {
            let id = measure.id()?;
            let mut st = pure_standard(&parse_state(&read(&state)?)?)?;
            if let Some(d) = dim {
                st = st.padded(d)?;
            }
            let value = id.evaluate(&st)?;
            writeln!(out, "{value:.12}").map_err(|e| Error::Io(e.to_string()))?;
        }
        Command::Roof {
            measure,
            rho,
            ensemble_size,
            restarts,
            seed,
            max_iters,
            step_tolerance,
        } => {
            let id = measure.id()?;
            let rho = parse_state(&read(&rho)?)?.to_density()?;
            let cfg = RoofConfig {
                ensemble_size,
                restarts,
                max_iters,
                step_tolerance,
                seed,
            };
            emit(out, &convex_roof(id, &rho, &cfg)?)?;
        }
        Command::Verify {
            measure,
            dim,
            trials,
            seed,
            shifts,
            kraus_per_shift,
            csv,
        } => {
            let mut params =
                VerifyParams::new(measure.id()?, dim, trials, seed, parse_shifts(&shifts)?);
            params.kraus_per_shift = kraus_per_shift;
            let (report, outcomes) = verify_monotonicity(&params)?;
            if let Some(path) = csv {
                fs::write(&path, outcomes_csv(&outcomes))
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            emit(out, &report)?;
            if report.violations > 0 {
                return Ok(EXIT_VIOLATIONS);
            }
        }
        Command::Channel {
            action:
                ChannelCommand::Sample {
                    dim,
                    shifts,
                    kraus_per_shift,
                    seed,
                    check,
                },
        } => {
            let ch = random_channel(dim, &parse_shifts(&shifts)?, kraus_per_shift, seed)?;
            let report = validate_channel(&ch)?;
            emit(out, &channel_to_json(&ch))?;
            if check {
                emit(
                    err,
                    &CompletenessJson {
                        completeness: report.completeness,
                        trace_preserving: report.trace_preserving,
                    },
                )?;
            }
        }
        Command::Twirl { input } => {
            let rho = parse_state(&read(&input)?)?.to_density()?;
            emit(out, &density_to_json(&twirl(&rho)))?;
        }
        Command::Appendix { p, alpha } => {
            let form = appendix_closed_form(p, alpha)?;
            emit(
                out,
                &AppendixJson {
                    p,
                    alpha,
                    mu1: form.mu1,
                    mu2: form.mu2,
                    concurrence: form.concurrence,
                    fof: form.fof,
                    rho: density_to_json(&form.rho),
                },
            )?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_lists() {
        assert_eq!(parse_shifts("-1,0,1").unwrap(), vec![-1, 0, 1]);
        assert_eq!(parse_shifts(" 0, 2 ").unwrap(), vec![0, 2]);
        assert_eq!(parse_shifts("").unwrap(), Vec::<i64>::new());
        assert!(parse_shifts("a").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["frameness", "monotone"], &mut o, &mut e), EXIT_INPUT);
        assert_eq!(run(["frameness", "bogus"], &mut o, &mut e), EXIT_INPUT);
    }
}
