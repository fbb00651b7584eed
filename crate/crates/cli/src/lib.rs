//! The `hallmhd` command line tool.
//!
//! Every subcommand returns a process exit code:
//! 0 ok, 1 usage, 2 identity failure, 3 blow-up trip, 4 numerical abort,
//! 5 replay mismatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hallmhd_core::cyltensor::{verify, Connection, Status, VerifyOptions};
use hallmhd_core::run::{diagnose, simulate, ExitStatus, RunConfig, RunError, PRESETS};

#[derive(Debug, Parser)]
#[command(
    name = "hallmhd",
    version,
    about = "Azimuthal Hall-MHD: tensor identities and simulation"
)]
struct Cli {
    /// Print the default run config as TOML and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the symbolic tensor identities.
    VerifyTensors(VerifyArgs),
    /// Run a simulation from a config file or named preset.
    Simulate(SimulateArgs),
    /// Replay a run directory and compare with its logged diagnostics.
    Diagnose(DiagnoseArgs),
    /// Print a default or preset config as TOML.
    PrintDefaults(PrintDefaultsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Fault {
    /// Flip the sign of the `r` Christoffel symbol with two `θ` indices.
    FlipChristoffelSign,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Highest covariant derivative order (at least 1).
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    /// Highest commutator weight.
    #[arg(long, default_value_t = 4)]
    pub max_commutator: u32,
    /// Write the full JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    pub fault: Option<Fault>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML run config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Named preset instead of a config file.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Run directory written by `simulate`.
    #[arg(long)]
    pub dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PrintDefaultsArgs {
    #[arg(long)]
    pub preset: Option<String>,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                ExitStatus::Usage.code()
            } else {
                let _ = write!(out, "{text}");
                ExitStatus::Ok.code()
            };
        }
    };
    match (cli.command, cli.print_defaults) {
        (None, true) => cmd_print_defaults(&PrintDefaultsArgs { preset: None }, out, err),
        (Some(Command::PrintDefaults(a)), _) => cmd_print_defaults(&a, out, err),
        (Some(Command::VerifyTensors(a)), _) => cmd_verify_tensors(&a, out, err),
        (Some(Command::Simulate(a)), _) => cmd_simulate(&a, out, err),
        (Some(Command::Diagnose(a)), _) => cmd_diagnose(&a, out, err),
        (None, false) => {
            let _ = writeln!(err, "no subcommand given; try --help");
            ExitStatus::Usage.code()
        }
    }
}

/// Caps the rayon pool at `HALLMHD_THREADS` workers when set.
pub fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HALLMHD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("HALLMHD_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("HALLMHD_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

pub fn cmd_verify_tensors(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let connection = match a.fault {
        Some(Fault::FlipChristoffelSign) => Connection::with_flipped_radial_sign(),
        None => Connection::standard(),
    };
    let opts = VerifyOptions {
        max_order: a.max_order,
        max_commutator: a.max_commutator,
        connection,
    };
    let rep = match verify(&opts) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "usage error: {e}");
            return ExitStatus::Usage.code();
        }
    };
    for id in &rep.identities {
        let status = serde_json::to_value(id.status).ok();
        let label = status.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
        let _ = writeln!(
            out,
            "{label:<8} {:<26} checked {:>6}  failures {}",
            id.identity, id.checked, id.failures
        );
    }
    let bad = rep
        .components
        .iter()
        .filter(|c| c.status == Status::Fail)
        .count();
    let _ = writeln!(out, "components {} (failing {bad})", rep.components.len());
    if let Some(path) = &a.report {
        let text = serde_json::to_string_pretty(&rep).expect("report serializes");
        if let Err(e) = fs::write(path, text + "\n") {
            let _ = writeln!(err, "cannot write {}: {e}", path.display());
            return ExitStatus::Usage.code();
        }
    }
    if rep.passed() {
        ExitStatus::Ok.code()
    } else {
        if let Some((identity, c)) = rep.first_counterexample() {
            let _ = writeln!(
                err,
                "first counterexample: {identity} at {}: got {}, expected {}",
                c.index, c.got, c.expected
            );
        }
        ExitStatus::IdentityFailure.code()
    }
}

fn report_run_error(e: &RunError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "{e}");
    match e {
        RunError::Config { .. } | RunError::Io { .. } | RunError::Grid(_) => {
            ExitStatus::Usage.code()
        }
        RunError::Solver(hallmhd_core::solver::SolverError::Config(_)) => ExitStatus::Usage.code(),
        RunError::Solver(_) => ExitStatus::NumericalAbort.code(),
    }
}

fn load_config(a: &SimulateArgs) -> Result<RunConfig, RunError> {
    match (&a.config, &a.preset) {
        (Some(path), _) => RunConfig::load(path),
        (None, Some(name)) => RunConfig::preset(name).ok_or_else(|| unknown_preset(name)),
        (None, None) => Err(RunError::Config {
            message: "either --config or --preset is required".into(),
            line: None,
            column: None,
        }),
    }
}

fn unknown_preset(name: &str) -> RunError {
    RunError::Config {
        message: format!("unknown preset {name:?}; known: {}", PRESETS.join(", ")),
        line: None,
        column: None,
    }
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cfg = match load_config(a) {
        Ok(c) => c,
        Err(e) => return report_run_error(&e, err),
    };
    match simulate(&cfg, &a.out) {
        Ok(rep) => {
            let v = &rep.manifest.verdicts;
            let _ = writeln!(
                out,
                "{}: {} steps, t = {}, {} rows written to {}",
                v.status,
                v.steps,
                v.final_time,
                rep.manifest.diagnostics_rows,
                a.out.display()
            );
            if let Some(t) = v.predicted_blowup_time {
                let _ = writeln!(out, "predicted blow-up time {t}");
            }
            if let Some(est) = &v.estimated_blowup {
                match est.time {
                    Some(t) => {
                        let _ = writeln!(out, "estimated blow-up time {t} ({})", est.status);
                    }
                    None => {
                        let _ = writeln!(out, "estimated blow-up time none ({})", est.status);
                    }
                }
            }
            if let Some(e) = &v.error {
                let _ = writeln!(err, "{e}");
            }
            rep.status.code()
        }
        Err(e) => report_run_error(&e, err),
    }
}

pub fn cmd_diagnose(a: &DiagnoseArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match diagnose(&a.dir) {
        Ok(rep) => {
            let _ = writeln!(
                out,
                "{} rows, {} snapshots replayed, {} plots",
                rep.rows,
                rep.snapshots_checked,
                rep.plots.len()
            );
            for m in &rep.mismatches {
                let _ = writeln!(err, "mismatch: {m}");
            }
            rep.status.code()
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            ExitStatus::Mismatch.code()
        }
    }
}

pub fn cmd_print_defaults(a: &PrintDefaultsArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cfg = match &a.preset {
        None => RunConfig::default(),
        Some(name) => match RunConfig::preset(name) {
            Some(c) => c,
            None => return report_run_error(&unknown_preset(name), err),
        },
    };
    let _ = write!(out, "{}", cfg.to_toml());
    ExitStatus::Ok.code()
}

/// Convenience for tests: runs with captured output.
pub fn run_captured(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["hallmhd"];
    full.extend_from_slice(args);
    let code = main_with_args(full, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}
