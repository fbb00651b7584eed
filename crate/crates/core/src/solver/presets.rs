//! Named initial conditions and stream functions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{AnnulusGrid, ScalarField2D, State};

/// Frozen advecting flow for transport runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamFunction {
    None,
    /// `ψ = A sin(2πz/Lz) · 16 s²(1-s)²` with `s = (r-r0)/(r1-r0)`; one
    /// pair of counter-rotating cells, still at both walls.
    #[default]
    Cellular,
    /// `ψ = A r²/2`, i.e. `v_z = A`, `v_r = 0`.
    Uniform,
}

impl StreamFunction {
    pub fn psi(self, grid: &AnnulusGrid, amplitude: f64, r: f64, z: f64) -> f64 {
        match self {
            StreamFunction::None => 0.0,
            StreamFunction::Cellular => {
                let s = (r - grid.r0) / (grid.r1 - grid.r0);
                amplitude * (2.0 * PI * z / grid.lz).sin() * 16.0 * s * s * (1.0 - s) * (1.0 - s)
            }
            StreamFunction::Uniform => 0.5 * amplitude * r * r,
        }
    }

    /// Pointwise `(v_r, v_z)`.
    pub fn velocity(self, grid: &AnnulusGrid, amplitude: f64, r: f64, z: f64) -> (f64, f64) {
        match self {
            StreamFunction::None => (0.0, 0.0),
            StreamFunction::Cellular => {
                let l = grid.r1 - grid.r0;
                let s = (r - grid.r0) / l;
                let k = 2.0 * PI / grid.lz;
                let prof = 16.0 * s * s * (1.0 - s) * (1.0 - s);
                let dprof = 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / l;
                let vr = -amplitude * k * (k * z).cos() * prof / r;
                let vz = amplitude * (k * z).sin() * dprof / r;
                (vr, vz)
            }
            StreamFunction::Uniform => (0.0, amplitude),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HProfile {
    /// `H = offset`.
    Constant,
    /// `H = offset + A sin(2πkz/Lz)`.
    #[default]
    Sine,
    /// `H = offset + A cos(2πkz/Lz) cos(π s)`.
    Cellular,
    /// `H = offset + A cos(π s)`, no z dependence.
    Radial,
    /// Seeded sum of low modes, `|H - offset| <= A`.
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityProfile {
    #[default]
    None,
    /// `v_θ = U sin(π s)`; steady together with any z-independent `H`.
    Swirl,
    /// Seeded low modes in all three components (projected before use).
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialCondition {
    pub profile: HProfile,
    pub amplitude: f64,
    pub offset: f64,
    pub wavenumber: u32,
    pub velocity: VelocityProfile,
    pub velocity_amplitude: f64,
    pub seed: u64,
    pub modes: u32,
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition {
            profile: HProfile::Sine,
            amplitude: 0.5,
            offset: 0.0,
            wavenumber: 1,
            velocity: VelocityProfile::None,
            velocity_amplitude: 0.1,
            seed: 7,
            modes: 3,
        }
    }
}

/// `Σ_{m,n} c_mn · radial_m(s) · (cos or sin)(n k z)` with coefficients
/// uniform in `[-1, 1]`, scaled so the sum of their magnitudes is `amp`.
struct RandomModes {
    terms: Vec<(u32, u32, f64, f64)>,
    scale: f64,
}

impl RandomModes {
    fn new(rng: &mut ChaCha8Rng, modes: u32, amp: f64, with_zero: bool) -> Self {
        let lo = if with_zero { 0 } else { 1 };
        let mut terms: Vec<(u32, u32, f64, f64)> = Vec::new();
        for m in lo..=modes {
            for n in 0..=modes {
                terms.push((m, n, rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)));
            }
        }
        let total: f64 = terms.iter().map(|t| t.2.abs() + t.3.abs()).sum();
        let scale = if total > 0.0 { amp / total } else { 0.0 };
        RandomModes { terms, scale }
    }

    fn eval(&self, radial: impl Fn(u32, f64) -> f64, s: f64, kz: f64) -> f64 {
        let mut acc = 0.0;
        for &(m, n, a, b) in &self.terms {
            let nz = n as f64 * kz;
            acc += radial(m, s) * (a * nz.cos() + b * nz.sin());
        }
        self.scale * acc
    }
}

impl InitialCondition {
    pub fn build(&self, grid: &AnnulusGrid) -> State {
        let l = grid.r1 - grid.r0;
        let k = 2.0 * PI * self.wavenumber as f64 / grid.lz;
        let (a, c) = (self.amplitude, self.offset);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let h_modes = RandomModes::new(&mut rng, self.modes, a, true);
        let cos_r = |m: u32, s: f64| (PI * m as f64 * s).cos();
        let sin_r = |m: u32, s: f64| (PI * m as f64 * s).sin();
        let h = ScalarField2D::from_fn(*grid, |r, z| {
            let s = (r - grid.r0) / l;
            match self.profile {
                HProfile::Constant => c,
                HProfile::Sine => c + a * (k * z).sin(),
                HProfile::Cellular => c + a * (k * z).cos() * (PI * s).cos(),
                HProfile::Radial => c + a * (PI * s).cos(),
                HProfile::Random => c + h_modes.eval(cos_r, s, 2.0 * PI * z / grid.lz),
            }
        });
        let mut state = State::zeros(*grid);
        state.h = h;
        let u = self.velocity_amplitude;
        match self.velocity {
            VelocityProfile::None => {}
            VelocityProfile::Swirl => {
                state.v_theta =
                    ScalarField2D::from_fn(*grid, |r, _| u * (PI * (r - grid.r0) / l).sin());
            }
            VelocityProfile::Random => {
                let kz0 = 2.0 * PI / grid.lz;
                let vr = RandomModes::new(&mut rng, self.modes, u, false);
                let vt = RandomModes::new(&mut rng, self.modes, u, false);
                let vz = RandomModes::new(&mut rng, self.modes, u, true);
                let s_of = |r: f64| (r - grid.r0) / l;
                state.v_r = ScalarField2D::from_fn(*grid, |r, z| vr.eval(sin_r, s_of(r), kz0 * z));
                state.v_theta =
                    ScalarField2D::from_fn(*grid, |r, z| vt.eval(sin_r, s_of(r), kz0 * z));
                state.v_z = ScalarField2D::from_fn(*grid, |r, z| vz.eval(cos_r, s_of(r), kz0 * z));
            }
        }
        state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cellular_velocity_matches_stream_function() {
        let g = AnnulusGrid::default();
        let (r, z, e) = (0.83, 1.7, 1e-6);
        let sf = StreamFunction::Cellular;
        let (vr, vz) = sf.velocity(&g, 0.7, r, z);
        let dpsi_dz = (sf.psi(&g, 0.7, r, z + e) - sf.psi(&g, 0.7, r, z - e)) / (2.0 * e);
        let dpsi_dr = (sf.psi(&g, 0.7, r + e, z) - sf.psi(&g, 0.7, r - e, z)) / (2.0 * e);
        assert!((vr + dpsi_dz / r).abs() < 1e-8);
        assert!((vz - dpsi_dr / r).abs() < 1e-8);
    }

    #[test]
    fn random_profile_is_seeded_and_bounded() {
        let g = AnnulusGrid::new(0.5, 1.5, 2.0, 8, 16).unwrap();
        let ic = InitialCondition {
            profile: HProfile::Random,
            amplitude: 0.2,
            offset: 1.0,
            velocity: VelocityProfile::Random,
            ..Default::default()
        };
        let a = ic.build(&g);
        assert_eq!(a, ic.build(&g));
        assert!(a.h.values().iter().all(|&h| (h - 1.0).abs() <= 0.2));
        assert!(a.v_r.max_abs() > 0.0);
    }
}
