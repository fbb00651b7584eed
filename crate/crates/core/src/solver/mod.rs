//! Time integration of the axisymmetric ideal Hall-MHD system in three
//! tiers: the degenerate Burgers equation `∂_t H = ∂_z(H²)`, transport of `H`
//! by a frozen solenoidal flow, and the fully coupled system.
//!
//! The coupled tier evolves `(v_r, v_θ, v_z, h_θ)` with `h_θ = r H` in
//! conservative form,
//!
//! ```text
//! ∂_t v_r + ∇·(b v_r) =  v_θ²/r - h_θ²/r - ∂_r P
//! ∂_t v_θ + ∇·(b v_θ) = -v_θ v_r/r
//! ∂_t v_z + ∇·(b v_z) = -∂_z P
//! ∂_t h_θ + ∇·(b h_θ) =  h_θ v_r/r + ∂_z(h_θ²)/r
//! ```
//!
//! with `b = (v_r, v_z)`. The exchange terms cancel pairwise in the energy
//! `∫ |v|² + h_θ²`, which the scheme can only lose through upwinding and the
//! orthogonal projection.

mod flux;
mod presets;
mod projection;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::energy;
use crate::grid::{ddz, AnnulusGrid, GridError, ScalarField2D, State};

pub use flux::{advect, FaceFlux, FluxScheme, Limiter, Reconstruction};
pub use presets::{HProfile, InitialCondition, StreamFunction, VelocityProfile};
pub use projection::Projector;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Burgers,
    Transport,
    Coupled,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Ssprk2,
    #[default]
    Ssprk3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: Mode,
    pub cfl: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub hall_on: bool,
    pub flux: FluxScheme,
    pub limiter: Limiter,
    pub stream_function: StreamFunction,
    pub stream_amplitude: f64,
    /// Steps between field snapshots; 0 keeps only the first and last.
    pub snapshot_every: usize,
    /// Steps between diagnostics rows.
    pub sample_every: usize,
    /// Fixed step instead of the CFL step; rejected if it violates CFL.
    pub dt: Option<f64>,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Burgers,
            cfl: 0.4,
            t_end: 1.0,
            integrator: Integrator::Ssprk3,
            hall_on: true,
            flux: FluxScheme::Rusanov,
            limiter: Limiter::Minmod,
            stream_function: StreamFunction::Cellular,
            stream_amplitude: 0.5,
            snapshot_every: 0,
            sample_every: 1,
            dt: None,
            max_steps: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Config(m));
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1".into());
        }
        if !self.stream_amplitude.is_finite() {
            return bad("stream_amplitude must be finite".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("step dt = {dt} violates CFL; need dt <= {required}")]
    Cfl { dt: f64, required: f64 },
    #[error("non-finite value at step {step}, t = {time}")]
    NonFinite { step: usize, time: f64 },
    #[error("step limit {0} reached before t_end")]
    StepLimit(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// The sampled initial profile behind a blow-up prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacteristicOracle {
    /// `H_0` along the r-line with the steepest rising slope.
    pub h0_profile: Vec<f64>,
    /// `1 / (2 max ∂_z H_0)`, or `+∞` when no slope is positive.
    pub crossing_time: f64,
}

/// Time of first characteristic crossing for `∂_t H = ∂_z(H²)`, whose
/// characteristics are `z = z_0 - 2 H_0(z_0) t`.
pub fn predict_blowup(h0: &ScalarField2D) -> CharacteristicOracle {
    let d = ddz(h0);
    let g = h0.grid();
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..g.nr {
        let slope = d.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if slope > 0.0 {
            let t = 1.0 / (2.0 * slope);
            if t < best.0 {
                best = (t, i);
            }
        }
    }
    CharacteristicOracle {
        h0_profile: h0.row(best.1).to_vec(),
        crossing_time: best.0,
    }
}

/// Gradient-collapse test: the steepest z-jump spans at least a fifth of the
/// range of `H` within one cell.
pub fn blowup_tripped(h: &ScalarField2D) -> bool {
    let range = h.max() - h.min();
    if range <= 0.0 {
        return false;
    }
    ddz(h).max_abs() * h.grid().dz() >= 0.2 * range
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowUp { step: usize, time: f64 },
}

/// Final state and bookkeeping of [`Solver::run`]. `outcome` carries the
/// failure, if any; `state` is then the last finite state.
#[derive(Debug)]
pub struct RunResult {
    pub state: State,
    pub steps: usize,
    pub outcome: Result<Termination, SolverError>,
    /// Discrete energy after every step, starting with the initial state
    /// (coupled mode only).
    pub energies: Vec<f64>,
}

pub struct Solver {
    config: SolverConfig,
    grid: AnnulusGrid,
    recon: Reconstruction,
    frozen: Option<FaceFlux>,
    projector: Option<Projector>,
    beta: Vec<f64>,
}

impl Solver {
    pub fn new(config: SolverConfig, grid: AnnulusGrid) -> Result<Self, SolverError> {
        config.validate()?;
        grid.validate()?;
        let hall = if config.hall_on { 1.0 } else { 0.0 };
        let beta = (0..grid.nr)
            .map(|i| match config.mode {
                Mode::Coupled => hall / grid.r(i),
                _ => hall,
            })
            .collect();
        let frozen = (config.mode == Mode::Transport).then(|| {
            let (sf, a) = (config.stream_function, config.stream_amplitude);
            FaceFlux::from_stream_function(&grid, |r, z| sf.psi(&grid, a, r, z))
        });
        let projector = (config.mode == Mode::Coupled).then(|| Projector::new(grid));
        Ok(Solver {
            recon: Reconstruction::new(config.flux, config.limiter),
            config,
            grid,
            frozen,
            projector,
            beta,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    /// Brings a raw initial state into the form the mode evolves: no flow in
    /// burgers mode, the stream-function flow in transport mode, and a
    /// projected velocity in coupled mode.
    pub fn prepare(&self, mut state: State) -> State {
        let g = self.grid;
        match self.config.mode {
            Mode::Burgers => {
                state.v_r = ScalarField2D::zeros(g);
                state.v_theta = ScalarField2D::zeros(g);
                state.v_z = ScalarField2D::zeros(g);
            }
            Mode::Transport => {
                let (sf, a) = (self.config.stream_function, self.config.stream_amplitude);
                state.v_r = ScalarField2D::from_fn(g, |r, z| sf.velocity(&g, a, r, z).0);
                state.v_z = ScalarField2D::from_fn(g, |r, z| sf.velocity(&g, a, r, z).1);
                state.v_theta = ScalarField2D::zeros(g);
            }
            Mode::Coupled => {
                let p = self
                    .projector
                    .as_ref()
                    .expect("coupled solver has a projector");
                let (vr, vz) = p.project(&state.v_r, &state.v_z);
                state.v_r = vr;
                state.v_z = vz;
            }
        }
        state
    }

    /// Largest `|v_r|/dr + (|v_z| + 2|H|)/dz` over cells, the Hall speed
    /// counted only when the Hall flux is on. Coupled runs add the rate
    /// `(|v_r| + |v_θ| + |H|)/r` of the geometric source terms.
    fn rate(&self, s: &State) -> f64 {
        let g = &self.grid;
        let (dr, dz) = (g.dr(), g.dz());
        let hall = if self.config.hall_on { 2.0 } else { 0.0 };
        let mut rate: f64 = 0.0;
        for i in 0..g.nr {
            let ri = g.r(i);
            for j in 0..g.nz {
                let (vr, vz) = match self.config.mode {
                    Mode::Burgers => (0.0, 0.0),
                    Mode::Transport => {
                        let f = self.frozen.as_ref().expect("transport solver has fluxes");
                        let jm = if j == 0 { g.nz - 1 } else { j - 1 };
                        let fr = f.radial(i, j).abs().max(f.radial(i + 1, j).abs());
                        let fz = f.axial(i, j).abs().max(f.axial(i, jm).abs());
                        (fr / (ri * dz), fz / (ri * dr))
                    }
                    Mode::Coupled => (s.v_r[(i, j)].abs(), s.v_z[(i, j)].abs()),
                };
                let mut here = vr / dr + (vz + hall * s.h[(i, j)].abs()) / dz;
                if self.config.mode == Mode::Coupled {
                    here +=
                        (s.v_r[(i, j)].abs() + s.v_theta[(i, j)].abs() + s.h[(i, j)].abs()) / ri;
                }
                rate = rate.max(here);
            }
        }
        rate
    }

    /// Largest step allowed by the CFL condition.
    pub fn stable_dt(&self, state: &State) -> f64 {
        let rate = self.rate(state);
        if rate > 0.0 {
            self.config.cfl / rate
        } else {
            f64::INFINITY
        }
    }

    fn ssp<F>(&self, u: Vec<ScalarField2D>, euler: F) -> Vec<ScalarField2D>
    where
        F: Fn(&[ScalarField2D]) -> Vec<ScalarField2D>,
    {
        let mix =
            |a: f64, x: &[ScalarField2D], b: f64, y: &[ScalarField2D]| -> Vec<ScalarField2D> {
                x.iter()
                    .zip(y)
                    .map(|(p, q)| ScalarField2D::lincomb(a, p, b, q))
                    .collect()
            };
        match self.config.integrator {
            Integrator::Ssprk2 => {
                let u1 = euler(&u);
                let u2 = euler(&u1);
                mix(0.5, &u, 0.5, &u2)
            }
            Integrator::Ssprk3 => {
                let u1 = euler(&u);
                let u2 = mix(0.75, &u, 0.25, &euler(&u1));
                mix(1.0 / 3.0, &u, 2.0 / 3.0, &euler(&u2))
            }
        }
    }

    /// One SSP-RK step of `∂_t H = ∂_z(H²)` on every r-line.
    pub fn step_burgers(&self, state: &State, dt: f64) -> State {
        let out = self.ssp(vec![state.h.clone()], |u| {
            let d = advect(&u[0], None, &self.beta, self.recon);
            vec![ScalarField2D::lincomb(1.0, &u[0], dt, &d)]
        });
        let mut next = state.clone();
        next.h = out.into_iter().next().expect("one field");
        next.time = state.time + dt;
        next
    }

    /// One SSP-RK step of `H` under the frozen stream-function flow, plus
    /// the Hall flux when enabled.
    pub fn step_transport(&self, state: &State, dt: f64) -> State {
        let flux = self.frozen.as_ref().expect("transport solver has fluxes");
        let out = self.ssp(vec![state.h.clone()], |u| {
            let d = advect(&u[0], Some(flux), &self.beta, self.recon);
            vec![ScalarField2D::lincomb(1.0, &u[0], dt, &d)]
        });
        let mut next = state.clone();
        next.h = out.into_iter().next().expect("one field");
        next.time = state.time + dt;
        next
    }

    /// One SSP-RK step of the coupled system; every stage ends with the
    /// projection.
    pub fn step_coupled(&self, state: &State, dt: f64) -> State {
        let g = self.grid;
        let p = self
            .projector
            .as_ref()
            .expect("coupled solver has a projector");
        let zero = vec![0.0; g.nr];
        let h = state.h.map_with_r(|r, v| r * v);
        let u0 = vec![
            state.v_r.clone(),
            state.v_theta.clone(),
            state.v_z.clone(),
            h,
        ];
        let out = self.ssp(u0, |u| {
            let (vr, vt, vz, h) = (&u[0], &u[1], &u[2], &u[3]);
            let flux = FaceFlux::from_velocity(vr, vz);
            let mut dvr = advect(vr, Some(&flux), &zero, self.recon);
            let mut dvt = advect(vt, Some(&flux), &zero, self.recon);
            let dvz = advect(vz, Some(&flux), &zero, self.recon);
            let mut dh = advect(h, Some(&flux), &self.beta, self.recon);
            for i in 0..g.nr {
                let inv_r = 1.0 / g.r(i);
                for j in 0..g.nz {
                    let (a, b, c) = (vr[(i, j)], vt[(i, j)], h[(i, j)]);
                    dvr[(i, j)] += (b * b - c * c) * inv_r;
                    dvt[(i, j)] -= b * a * inv_r;
                    dh[(i, j)] += c * a * inv_r;
                }
            }
            let nr_ = ScalarField2D::lincomb(1.0, vr, dt, &dvr);
            let nz_ = ScalarField2D::lincomb(1.0, vz, dt, &dvz);
            let (pr, pz) = p.project(&nr_, &nz_);
            vec![
                pr,
                ScalarField2D::lincomb(1.0, vt, dt, &dvt),
                pz,
                ScalarField2D::lincomb(1.0, h, dt, &dh),
            ]
        });
        let mut it = out.into_iter();
        let mut next = state.clone();
        next.v_r = it.next().expect("v_r");
        next.v_theta = it.next().expect("v_theta");
        next.v_z = it.next().expect("v_z");
        next.h = it.next().expect("h").map_with_r(|r, v| v / r);
        next.time = state.time + dt;
        next
    }

    /// One step of the configured mode after checking CFL and finiteness.
    pub fn step(&self, state: &State, dt: f64) -> Result<State, SolverError> {
        let required = self.stable_dt(state);
        if !(dt <= required * (1.0 + 1e-12)) {
            return Err(SolverError::Cfl { dt, required });
        }
        let next = match self.config.mode {
            Mode::Burgers => self.step_burgers(state, dt),
            Mode::Transport => self.step_transport(state, dt),
            Mode::Coupled => self.step_coupled(state, dt),
        };
        if !next.is_finite() {
            return Err(SolverError::NonFinite {
                step: 0,
                time: next.time,
            });
        }
        Ok(next)
    }

    /// Integrates to `t_end` or until the blow-up trip (Hall flux on only).
    /// `observe(step, state, is_last)` sees the initial state and every
    /// accepted step.
    pub fn run<F: FnMut(usize, &State, bool)>(&self, initial: State, mut observe: F) -> RunResult {
        let coupled = self.config.mode == Mode::Coupled;
        let mut state = initial;
        let mut energies = Vec::new();
        if coupled {
            energies.push(energy(&state));
        }
        if !state.is_finite() {
            observe(0, &state, true);
            let time = state.time;
            return RunResult {
                state,
                steps: 0,
                outcome: Err(SolverError::NonFinite { step: 0, time }),
                energies,
            };
        }
        observe(0, &state, false);
        let t_end = self.config.t_end;
        let mut steps = 0;
        let finish = |state: State, steps, outcome, energies| RunResult {
            state,
            steps,
            outcome,
            energies,
        };
        while state.time < t_end {
            if steps >= self.config.max_steps {
                observe(steps, &state, true);
                return finish(state, steps, Err(SolverError::StepLimit(steps)), energies);
            }
            let mut dt = match self.config.dt {
                Some(dt) => dt,
                None => self.stable_dt(&state),
            };
            let last = state.time + dt >= t_end;
            if last {
                dt = t_end - state.time;
            }
            let next = match self.step(&state, dt) {
                Ok(s) => s,
                Err(e) => {
                    let e = match e {
                        SolverError::NonFinite { time, .. } => SolverError::NonFinite {
                            step: steps + 1,
                            time,
                        },
                        e => e,
                    };
                    observe(steps, &state, true);
                    return finish(state, steps, Err(e), energies);
                }
            };
            state = next;
            if last {
                state.time = t_end;
            }
            steps += 1;
            if coupled {
                energies.push(energy(&state));
            }
            if self.config.hall_on && blowup_tripped(&state.h) {
                observe(steps, &state, true);
                let time = state.time;
                return finish(
                    state,
                    steps,
                    Ok(Termination::BlowUp { step: steps, time }),
                    energies,
                );
            }
            observe(steps, &state, last);
        }
        finish(state, steps, Ok(Termination::Completed), energies)
    }
}
