//! Finite-volume transport with a Burgers-type z flux.
//!
//! Cell `(i, j)` evolves `u` under volumetric face fluxes `Φ` (per radian)
//! plus, in z, the per-area flux `-β u²`. Radial faces at the walls carry
//! nothing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::{AnnulusGrid, ScalarField2D};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limiter {
    #[default]
    Minmod,
    VanLeer,
    Mc,
    /// Central slopes; second order on smooth data, not monotone.
    Unlimited,
}

impl Limiter {
    pub fn slope(self, a: f64, b: f64) -> f64 {
        match self {
            Limiter::Minmod => {
                if a * b <= 0.0 {
                    0.0
                } else if a.abs() < b.abs() {
                    a
                } else {
                    b
                }
            }
            Limiter::VanLeer => {
                if a * b <= 0.0 {
                    0.0
                } else {
                    2.0 * a * b / (a + b)
                }
            }
            Limiter::Mc => {
                if a * b <= 0.0 {
                    0.0
                } else {
                    let m = (2.0 * a.abs()).min(2.0 * b.abs()).min(0.5 * (a + b).abs());
                    m * a.signum()
                }
            }
            Limiter::Unlimited => 0.5 * (a + b),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxScheme {
    /// First-order local Lax-Friedrichs; monotone.
    #[default]
    Rusanov,
    /// Piecewise-linear reconstruction feeding the Rusanov flux.
    Muscl,
}

/// Volumetric fluxes `∫ r u·n` over each face, per radian.
#[derive(Clone, Debug)]
pub struct FaceFlux {
    nz: usize,
    /// Face `a` (between cells `a-1` and `a`), `a = 0..=nr`; index `a*nz + j`.
    radial: Vec<f64>,
    /// Face `j+½` of cell `(i, j)`; index `i*nz + j`.
    axial: Vec<f64>,
}

impl FaceFlux {
    pub fn zero(grid: &AnnulusGrid) -> Self {
        FaceFlux {
            nz: grid.nz,
            radial: vec![0.0; (grid.nr + 1) * grid.nz],
            axial: vec![0.0; grid.len()],
        }
    }

    /// Exactly divergence-free fluxes from corner values of a stream function
    /// with `v_r = -(1/r) ∂_z ψ`, `v_z = (1/r) ∂_r ψ`.
    pub fn from_stream_function<F: Fn(f64, f64) -> f64>(grid: &AnnulusGrid, psi: F) -> Self {
        let (nr, nz) = (grid.nr, grid.nz);
        let mut out = FaceFlux::zero(grid);
        for a in 1..nr {
            let rf = grid.r_face(a);
            for j in 0..nz {
                let up = grid.z_face((j + 1) % nz);
                out.radial[a * nz + j] = -(psi(rf, up) - psi(rf, grid.z_face(j)));
            }
        }
        for i in 0..nr {
            for j in 0..nz {
                let zf = grid.z_face((j + 1) % nz);
                out.axial[i * nz + j] = psi(grid.r_face(i + 1), zf) - psi(grid.r_face(i), zf);
            }
        }
        out
    }

    /// Face averages of a cell-centered velocity; zero through the walls.
    pub fn from_velocity(v_r: &ScalarField2D, v_z: &ScalarField2D) -> Self {
        let g = *v_r.grid();
        let (nr, nz) = (g.nr, g.nz);
        let (dr, dz) = (g.dr(), g.dz());
        let mut out = FaceFlux::zero(&g);
        for a in 1..nr {
            let (rl, rr) = (g.r(a - 1), g.r(a));
            for j in 0..nz {
                out.radial[a * nz + j] = 0.5 * dz * (rl * v_r[(a - 1, j)] + rr * v_r[(a, j)]);
            }
        }
        for i in 0..nr {
            let w = g.r(i) * dr * 0.5;
            for j in 0..nz {
                let jp = if j + 1 == nz { 0 } else { j + 1 };
                out.axial[i * nz + j] = w * (v_z[(i, j)] + v_z[(i, jp)]);
            }
        }
        out
    }

    pub fn radial(&self, a: usize, j: usize) -> f64 {
        self.radial[a * self.nz + j]
    }

    pub fn axial(&self, i: usize, j: usize) -> f64 {
        self.axial[i * self.nz + j]
    }

    /// Net outflow of each cell; zero up to rounding for a solenoidal field.
    pub fn net_outflow(&self, grid: &AnnulusGrid) -> ScalarField2D {
        let nz = grid.nz;
        let mut out = ScalarField2D::zeros(*grid);
        for i in 0..grid.nr {
            for j in 0..nz {
                let jm = if j == 0 { nz - 1 } else { j - 1 };
                out[(i, j)] = self.radial(i + 1, j) - self.radial(i, j) + self.axial(i, j)
                    - self.axial(i, jm);
            }
        }
        out
    }

    /// Largest `|Φ_r| / (r dr dz) / dr + |Φ_z| / (r dr dz) / dz` over cells,
    /// i.e. the advective part of the CFL rate.
    pub fn max_rate(&self, grid: &AnnulusGrid) -> f64 {
        let (dr, dz) = (grid.dr(), grid.dz());
        let mut rate: f64 = 0.0;
        for i in 0..grid.nr {
            let vol = grid.r(i) * dr * dz;
            for j in 0..grid.nz {
                let jm = if j == 0 { grid.nz - 1 } else { j - 1 };
                let fr = self.radial(i, j).abs().max(self.radial(i + 1, j).abs());
                let fz = self.axial(i, j).abs().max(self.axial(i, jm).abs());
                rate = rate.max(fr / (vol / dr) / dr + fz / (vol / dz) / dz);
            }
        }
        rate
    }
}

/// How cell values are extended to faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reconstruction {
    Constant,
    Linear(Limiter),
}

impl Reconstruction {
    pub fn new(flux: FluxScheme, limiter: Limiter) -> Self {
        match flux {
            FluxScheme::Rusanov => Reconstruction::Constant,
            FluxScheme::Muscl => Reconstruction::Linear(limiter),
        }
    }

    fn slope(self, back: f64, mid: f64, fwd: f64) -> f64 {
        match self {
            Reconstruction::Constant => 0.0,
            Reconstruction::Linear(l) => l.slope(mid - back, fwd - mid),
        }
    }
}

/// Time derivative of `u` under `flux` and the z flux `-β_i u²`, where
/// `beta` holds one coefficient per radial row.
pub fn advect(
    u: &ScalarField2D,
    flux: Option<&FaceFlux>,
    beta: &[f64],
    recon: Reconstruction,
) -> ScalarField2D {
    let g = *u.grid();
    let (nr, nz) = (g.nr, g.nz);
    let (dr, dz) = (g.dr(), g.dz());
    assert_eq!(beta.len(), nr);

    // Reconstructed face states in r: `up[i]` is cell i's value at its outer
    // face, `down[i]` at its inner face.
    let (up, down) = match (flux, recon) {
        (Some(_), Reconstruction::Linear(_)) => {
            let mut up = u.clone();
            let mut down = u.clone();
            for i in 1..nr - 1 {
                for j in 0..nz {
                    let s = recon.slope(u[(i - 1, j)], u[(i, j)], u[(i + 1, j)]);
                    up[(i, j)] += 0.5 * s;
                    down[(i, j)] -= 0.5 * s;
                }
            }
            (Some(up), Some(down))
        }
        _ => (None, None),
    };
    let up = up.as_ref().unwrap_or(u);
    let down = down.as_ref().unwrap_or(u);

    let radial_face = |a: usize, j: usize| -> f64 {
        let Some(f) = flux else { return 0.0 };
        if a == 0 || a == nr {
            return 0.0;
        }
        let phi = f.radial(a, j);
        if phi >= 0.0 {
            phi * up[(a - 1, j)]
        } else {
            phi * down[(a, j)]
        }
    };

    let mut out = ScalarField2D::zeros(g);
    out.values_mut()
        .par_chunks_mut(nz)
        .enumerate()
        .for_each(|(i, row_out)| {
            let row = u.row(i);
            let ri = g.r(i);
            let area = ri * dr;
            let b = beta[i];
            let at = |j: isize| row[j.rem_euclid(nz as isize) as usize];
            let mut fz = vec![0.0; nz];
            for (j, f) in fz.iter_mut().enumerate() {
                let jj = j as isize;
                let phi = flux.map_or(0.0, |fl| fl.axial(i, j));
                if phi == 0.0 && b == 0.0 {
                    continue;
                }
                let w = phi / area;
                let ul = at(jj) + 0.5 * recon.slope(at(jj - 1), at(jj), at(jj + 1));
                let ur = at(jj + 1) - 0.5 * recon.slope(at(jj), at(jj + 1), at(jj + 2));
                let fl = w * ul - b * ul * ul;
                let fr = w * ur - b * ur * ur;
                let alpha = (w - 2.0 * b * ul).abs().max((w - 2.0 * b * ur).abs());
                *f = area * (0.5 * (fl + fr) - 0.5 * alpha * (ur - ul));
            }
            let vol = area * dz;
            for j in 0..nz {
                let jm = if j == 0 { nz - 1 } else { j - 1 };
                let net = radial_face(i + 1, j) - radial_face(i, j) + fz[j] - fz[jm];
                row_out[j] = -net / vol;
            }
        });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limiters() {
        assert_eq!(Limiter::Minmod.slope(1.0, 2.0), 1.0);
        assert_eq!(Limiter::Minmod.slope(-1.0, 2.0), 0.0);
        assert_eq!(Limiter::VanLeer.slope(1.0, 1.0), 1.0);
        assert_eq!(Limiter::Mc.slope(1.0, 3.0), 2.0);
        assert_eq!(Limiter::Unlimited.slope(-1.0, 3.0), 1.0);
    }

    #[test]
    fn stream_function_fluxes_are_solenoidal() {
        let g = AnnulusGrid::new(0.5, 1.5, 2.0, 8, 12).unwrap();
        let f = FaceFlux::from_stream_function(&g, |r, z| {
            (r - 0.5).powi(2) * (1.5 - r).powi(2) * (std::f64::consts::PI * z).sin()
        });
        assert!(f.net_outflow(&g).max_abs() < 1e-15);
    }

    #[test]
    fn constant_state_is_steady() {
        let g = AnnulusGrid::new(0.5, 1.5, 2.0, 8, 12).unwrap();
        let u = ScalarField2D::constant(g, 0.7);
        let flux = FaceFlux::from_stream_function(&g, |r, z| {
            r * r + (r - 0.5).powi(2) * (1.5 - r).powi(2) * z.cos()
        });
        let d = advect(
            &u,
            Some(&flux),
            &[1.0; 8],
            Reconstruction::Linear(Limiter::Mc),
        );
        assert!(d.max_abs() < 1e-12);
    }
}
