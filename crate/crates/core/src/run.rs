//! Config files, run directories and replay.
//!
//! A run directory holds `manifest.json`, `diagnostics.csv` and
//! `snapshots/step_XXXXXX.{vr,vth,vz,H}.cylf`. Every snapshot also has a
//! diagnostics row, which is what [`diagnose`] recomputes and compares.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{
    blowup_monitor, read_records, sample, svg_line_plot, write_records, BlowupEstimate,
    DiagnosticsRecord, CSV_COLUMNS,
};
use crate::grid::{AnnulusGrid, GridError, ScalarField2D, State};
use crate::solver::{
    predict_blowup, FluxScheme, HProfile, InitialCondition, Limiter, Mode, Solver, SolverConfig,
    SolverError, StreamFunction, Termination, VelocityProfile,
};
use crate::VERSION;

/// Process exit codes shared by the command line tool and the bindings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Ok,
    Usage,
    IdentityFailure,
    BlowUp,
    NumericalAbort,
    Mismatch,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::Usage => 1,
            ExitStatus::IdentityFailure => 2,
            ExitStatus::BlowUp => 3,
            ExitStatus::NumericalAbort => 4,
            ExitStatus::Mismatch => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{}", fmt_config_error(.message, *.line, *.column))]
    Config {
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn fmt_config_error(message: &str, line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!("config error at line {l}, column {c}: {message}"),
        _ => format!("config error: {message}"),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Everything a `simulate` run needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: AnnulusGrid,
    pub solver: SolverConfig,
    pub initial: InitialCondition,
}

pub const PRESETS: [&str; 4] = [
    "burgers_sine",
    "transport_cellular",
    "coupled_random",
    "coupled_swirl",
];

impl RunConfig {
    /// Parses TOML and validates it; parse errors carry 1-based line and column.
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = match e.span() {
                Some(span) => {
                    let (l, c) = line_col(text, span.start);
                    (Some(l), Some(c))
                }
                None => (None, None),
            };
            RunError::Config {
                message: e.message().trim().to_string(),
                line,
                column,
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is representable in TOML")
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let wrap = |message: String| RunError::Config {
            message,
            line: None,
            column: None,
        };
        self.grid.validate().map_err(|e| wrap(e.to_string()))?;
        self.solver.validate().map_err(|e| wrap(e.to_string()))?;
        Ok(())
    }

    /// Named configurations exercising each solver tier.
    pub fn preset(name: &str) -> Option<Self> {
        let two_pi = 2.0 * std::f64::consts::PI;
        let cfg = match name {
            "burgers_sine" => RunConfig {
                grid: AnnulusGrid {
                    r0: 0.5,
                    r1: 1.5,
                    lz: two_pi,
                    nr: 4,
                    nz: 1024,
                },
                solver: SolverConfig {
                    mode: Mode::Burgers,
                    t_end: 1.5,
                    flux: FluxScheme::Muscl,
                    limiter: Limiter::Minmod,
                    sample_every: 1,
                    snapshot_every: 100,
                    ..Default::default()
                },
                initial: InitialCondition::default(),
            },
            "transport_cellular" => RunConfig {
                grid: AnnulusGrid::default(),
                solver: SolverConfig {
                    mode: Mode::Transport,
                    hall_on: false,
                    stream_function: StreamFunction::Cellular,
                    stream_amplitude: 0.5,
                    sample_every: 10,
                    snapshot_every: 100,
                    ..Default::default()
                },
                initial: InitialCondition {
                    profile: HProfile::Cellular,
                    amplitude: 0.3,
                    offset: 1.0,
                    ..Default::default()
                },
            },
            "coupled_random" => RunConfig {
                grid: AnnulusGrid::default(),
                solver: SolverConfig {
                    mode: Mode::Coupled,
                    sample_every: 1,
                    snapshot_every: 10,
                    ..Default::default()
                },
                initial: InitialCondition {
                    profile: HProfile::Random,
                    amplitude: 0.2,
                    velocity: VelocityProfile::Random,
                    velocity_amplitude: 0.2,
                    ..Default::default()
                },
            },
            "coupled_swirl" => RunConfig {
                grid: AnnulusGrid {
                    nr: 32,
                    nz: 64,
                    ..Default::default()
                },
                solver: SolverConfig {
                    mode: Mode::Coupled,
                    sample_every: 1,
                    snapshot_every: 5,
                    ..Default::default()
                },
                initial: InitialCondition {
                    profile: HProfile::Radial,
                    amplitude: 0.3,
                    offset: 0.5,
                    velocity: VelocityProfile::Swirl,
                    velocity_amplitude: 0.5,
                    ..Default::default()
                },
            },
            _ => return None,
        };
        Some(cfg)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub step: usize,
    pub time: f64,
    /// Index of the matching row in `diagnostics.csv`.
    pub row: usize,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub nr: usize,
    pub nz: usize,
    pub r0: f64,
    pub r1: f64,
    pub lz: f64,
    pub dr: f64,
    pub dz: f64,
    pub domain: String,
}

/// Relative change `(final - initial) / initial` of logged quantities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    pub linf: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub status: String,
    pub exit_code: i32,
    pub steps: usize,
    pub final_time: f64,
    pub drift: Drift,
    /// Steps whose energy exceeded the previous one (coupled mode).
    pub energy_increases: usize,
    pub predicted_blowup_time: Option<f64>,
    pub estimated_blowup: Option<BlowupEstimateJson>,
    pub error: Option<String>,
}

/// [`BlowupEstimate`] with the infinite time spelled out for JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupEstimateJson {
    pub time: Option<f64>,
    pub coefficient: f64,
    pub residual: f64,
    pub samples_used: usize,
    pub status: String,
}

impl From<BlowupEstimate> for BlowupEstimateJson {
    fn from(e: BlowupEstimate) -> Self {
        BlowupEstimateJson {
            time: e.time.is_finite().then_some(e.time),
            coefficient: e.coefficient,
            residual: e.residual,
            samples_used: e.samples_used,
            status: serde_json::to_value(e.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub grid: GridSummary,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub wall_seconds: f64,
    pub verdicts: Verdicts,
    pub diagnostics_rows: usize,
    pub snapshots: Vec<SnapshotEntry>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self, RunError> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|e| RunError::Config {
            message: format!("manifest: {e}"),
            line: Some(e.line()),
            column: Some(e.column()),
        })
    }

    /// The manifest with wall-clock fields zeroed, for reproducibility checks.
    pub fn without_timestamps(&self) -> Self {
        RunManifest {
            started_unix: 0.0,
            finished_unix: 0.0,
            wall_seconds: 0.0,
            ..self.clone()
        }
    }
}

pub const MANIFEST: &str = "manifest.json";
pub const DIAGNOSTICS: &str = "diagnostics.csv";
pub const SNAPSHOTS: &str = "snapshots";

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn snapshot_name(step: usize, field: &str) -> String {
    format!("step_{step:06}.{field}.cylf")
}

fn write_snapshot(dir: &Path, step: usize, state: &State) -> Result<Vec<String>, RunError> {
    let mut files = Vec::new();
    for (name, field) in state.fields() {
        let rel = format!("{SNAPSHOTS}/{}", snapshot_name(step, name));
        field.save_cylf(&dir.join(&rel))?;
        files.push(rel);
    }
    Ok(files)
}

fn relative_drift(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        if b == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (b - a) / a
    }
}

fn json_safe(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX.copysign(x)
    }
}

/// Outcome of [`simulate`].
#[derive(Debug)]
pub struct SimulationReport {
    pub status: ExitStatus,
    pub manifest: RunManifest,
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: State,
    /// Per-step discrete energy (coupled mode).
    pub energies: Vec<f64>,
}

/// Runs `cfg`, writing all outputs into `out_dir` (created if needed). The
/// manifest is written even when the run fails.
pub fn simulate(cfg: &RunConfig, out_dir: &Path) -> Result<SimulationReport, RunError> {
    let started = unix_now();
    let clock = Instant::now();
    fs::create_dir_all(out_dir.join(SNAPSHOTS)).map_err(io_err(out_dir))?;
    let g = cfg.grid;
    let grid_summary = GridSummary {
        nr: g.nr,
        nz: g.nz,
        r0: g.r0,
        r1: g.r1,
        lz: g.lz,
        dr: g.dr(),
        dz: g.dz(),
        domain: "annulus r0 <= r <= r1 with slip walls, periodic in z (not R^3)".into(),
    };
    let mut manifest = RunManifest {
        tool: "hallmhd".into(),
        version: VERSION.into(),
        config: cfg.clone(),
        grid: grid_summary,
        started_unix: started,
        finished_unix: started,
        wall_seconds: 0.0,
        verdicts: Verdicts::default(),
        diagnostics_rows: 0,
        snapshots: Vec::new(),
    };

    let solver = match Solver::new(cfg.solver.clone(), g) {
        Ok(s) => s,
        Err(e) => {
            manifest.verdicts.status = "error".into();
            manifest.verdicts.exit_code = ExitStatus::Usage.code();
            manifest.verdicts.error = Some(e.to_string());
            write_manifest(out_dir, &manifest)?;
            return Err(e.into());
        }
    };
    let initial = solver.prepare(cfg.initial.build(&g));
    let predicted = cfg
        .solver
        .hall_on
        .then(|| predict_blowup(&initial.h).crossing_time);

    let sample_every = cfg.solver.sample_every;
    let snap_every = cfg.solver.snapshot_every;
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut snapshots = Vec::new();
    let mut io_error: Option<RunError> = None;
    let result = solver.run(initial, |step, state, last| {
        let snap = step == 0 || last || (snap_every > 0 && step % snap_every == 0);
        if !(snap || step % sample_every == 0) {
            return;
        }
        records.push(sample(state));
        if snap && io_error.is_none() {
            match write_snapshot(out_dir, step, state) {
                Ok(files) => snapshots.push(SnapshotEntry {
                    step,
                    time: state.time,
                    row: records.len() - 1,
                    files,
                }),
                Err(e) => io_error = Some(e),
            }
        }
    });

    let csv_path = out_dir.join(DIAGNOSTICS);
    let file = fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
    write_records(&records, BufWriter::new(file)).map_err(io_err(&csv_path))?;

    let (status, label, error) = match (&result.outcome, &io_error) {
        (_, Some(e)) => (ExitStatus::NumericalAbort, "error", Some(e.to_string())),
        (Ok(Termination::Completed), None) => (ExitStatus::Ok, "completed", None),
        (Ok(Termination::BlowUp { .. }), None) => (ExitStatus::BlowUp, "blow_up", None),
        (Err(SolverError::NonFinite { .. }), None) => (
            ExitStatus::NumericalAbort,
            "numerical_abort",
            result.outcome.as_ref().err().map(|e| e.to_string()),
        ),
        (Err(e), None) => (ExitStatus::NumericalAbort, "error", Some(e.to_string())),
    };
    let v = &mut manifest.verdicts;
    v.status = label.into();
    v.exit_code = status.code();
    v.steps = result.steps;
    v.final_time = result.state.time;
    v.error = error;
    if let (Some(a), Some(b)) = (records.first(), records.last()) {
        v.drift = Drift {
            l1: json_safe(relative_drift(a.l1, b.l1)),
            l2: json_safe(relative_drift(a.l2, b.l2)),
            l4: json_safe(relative_drift(a.l4, b.l4)),
            linf: json_safe(relative_drift(a.linf, b.linf)),
            energy: json_safe(relative_drift(a.energy, b.energy)),
        };
    }
    v.energy_increases = result.energies.windows(2).filter(|w| w[1] > w[0]).count();
    v.predicted_blowup_time = predicted.filter(|t| t.is_finite());
    if cfg.solver.hall_on {
        v.estimated_blowup = Some(blowup_monitor(&records).into());
    }
    manifest.diagnostics_rows = records.len();
    manifest.snapshots = snapshots;
    manifest.finished_unix = unix_now();
    manifest.wall_seconds = clock.elapsed().as_secs_f64();
    write_manifest(out_dir, &manifest)?;
    if let Some(e) = io_error {
        return Err(e);
    }
    Ok(SimulationReport {
        status,
        manifest,
        records,
        final_state: result.state,
        energies: result.energies,
    })
}

fn write_manifest(dir: &Path, m: &RunManifest) -> Result<(), RunError> {
    let path = dir.join(MANIFEST);
    let text = serde_json::to_string_pretty(m).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnoseReport {
    pub status: ExitStatus,
    pub rows: usize,
    pub snapshots_checked: usize,
    pub mismatches: Vec<String>,
    pub plots: Vec<String>,
}

fn load_state(dir: &Path, entry: &SnapshotEntry) -> Result<State, RunError> {
    let mut fields: Vec<ScalarField2D> = Vec::new();
    for rel in &entry.files {
        let path = dir.join(rel);
        let f = fs::File::open(&path).map_err(io_err(&path))?;
        fields.push(crate::grid::read_cylf(BufReader::new(f))?);
    }
    if fields.len() != 4 {
        return Err(RunError::Config {
            message: format!(
                "snapshot {} lists {} files, expected 4",
                entry.step,
                fields.len()
            ),
            line: None,
            column: None,
        });
    }
    let mut it = fields.into_iter();
    Ok(State {
        v_r: it.next().expect("vr"),
        v_theta: it.next().expect("vth"),
        v_z: it.next().expect("vz"),
        h: it.next().expect("H"),
        time: entry.time,
    })
}

/// Recomputes the diagnostics of every snapshot in a run directory and
/// compares them with the logged rows bit for bit; also writes one SVG plot
/// per column into `plots/`.
pub fn diagnose(dir: &Path) -> Result<DiagnoseReport, RunError> {
    let manifest = RunManifest::load(dir)?;
    let mut mismatches = Vec::new();
    let csv_path = dir.join(DIAGNOSTICS);
    let records = match fs::File::open(&csv_path) {
        Ok(f) => match read_records(BufReader::new(f)) {
            Ok(r) => r,
            Err(e) => {
                mismatches.push(e.to_string());
                Vec::new()
            }
        },
        Err(e) => {
            mismatches.push(format!("cannot open {}: {e}", csv_path.display()));
            Vec::new()
        }
    };
    if mismatches.is_empty() && records.len() != manifest.diagnostics_rows {
        mismatches.push(format!(
            "diagnostics has {} rows, manifest records {}",
            records.len(),
            manifest.diagnostics_rows
        ));
    }
    let mut checked = 0;
    for entry in &manifest.snapshots {
        let state = match load_state(dir, entry) {
            Ok(s) => s,
            Err(e) => {
                mismatches.push(format!("snapshot {}: {e}", entry.step));
                continue;
            }
        };
        checked += 1;
        let Some(logged) = records.get(entry.row) else {
            mismatches.push(format!(
                "snapshot {}: no diagnostics row {}",
                entry.step, entry.row
            ));
            continue;
        };
        let fresh = sample(&state);
        for (k, (a, b)) in fresh.values().iter().zip(logged.values()).enumerate() {
            if a.to_bits() != b.to_bits() {
                mismatches.push(format!(
                    "snapshot {} column {}: recomputed {a}, logged {b}",
                    entry.step, CSV_COLUMNS[k]
                ));
            }
        }
    }

    let plot_dir = dir.join("plots");
    fs::create_dir_all(&plot_dir).map_err(io_err(&plot_dir))?;
    let mut plots = Vec::new();
    for (k, col) in CSV_COLUMNS.iter().enumerate().skip(1) {
        let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.time, r.values()[k])).collect();
        let svg = svg_line_plot(&format!("{col} vs time"), "time", col, &pts);
        let rel = format!("plots/{col}.svg");
        let path = dir.join(&rel);
        fs::write(&path, svg).map_err(io_err(&path))?;
        plots.push(rel);
    }
    let status = if mismatches.is_empty() {
        ExitStatus::Ok
    } else {
        ExitStatus::Mismatch
    };
    Ok(DiagnoseReport {
        status,
        rows: records.len(),
        snapshots_checked: checked,
        mismatches,
        plots,
    })
}
