//! Discrete Leray projection onto fields with zero slip divergence.
//!
//! The divergence `D` is [`crate::grid::cyl_divergence_slip`] and the
//! gradient is `G = -D*` in the `r`-weighted inner product, so the
//! projection `u - G (D G)⁻¹ D u` is orthogonal in that product and never
//! raises the discrete energy. In z everything is diagonal in Fourier modes;
//! in r each mode is a symmetric positive pentadiagonal system.
//!
//! Modes whose discrete z-derivative symbol vanishes (the mean and the
//! Nyquist mode) have a singular radial operator whose null space is the
//! radial checkerboard; there `v_r` is set to zero, which is both the
//! continuum answer for the mean and an orthogonal projection.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlannerScalar};
use std::sync::Arc;

use crate::grid::{AnnulusGrid, ScalarField2D};

type C64 = Complex<f64>;

pub struct Projector {
    grid: AnnulusGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `-W D_r G_r` in band form, columns `i-2..=i+2`.
    band: Vec<[f64; 5]>,
    /// Rows of `W D_r` (columns `i-1..=i+1`).
    wdr: Vec<[f64; 3]>,
    /// Rows of `G_r` (columns `i-1..=i+1`).
    gr: Vec<[f64; 3]>,
}

impl Projector {
    pub fn new(grid: AnnulusGrid) -> Self {
        let n = grid.nr;
        let h = 1.0 / (2.0 * grid.dr());
        let mut wdr = vec![[0.0; 3]; n];
        for (i, row) in wdr.iter_mut().enumerate() {
            if i + 1 < n {
                row[1] += grid.r(i) * h;
                row[2] += grid.r(i + 1) * h;
            }
            if i >= 1 {
                row[0] -= grid.r(i - 1) * h;
                row[1] -= grid.r(i) * h;
            }
        }
        let mut gr = vec![[0.0; 3]; n];
        for (i, row) in gr.iter_mut().enumerate() {
            if i == 0 {
                row[1] = -h;
                row[2] = h;
            } else if i == n - 1 {
                row[0] = -h;
                row[1] = h;
            } else {
                row[0] = -h;
                row[2] = h;
            }
        }
        let mut band = vec![[0.0; 5]; n];
        for i in 0..n {
            for (da, &d) in wdr[i].iter().enumerate() {
                let Some(a) = (i + da).checked_sub(1).filter(|&a| a < n) else {
                    continue;
                };
                for (db, &gv) in gr[a].iter().enumerate() {
                    let Some(b) = (a + db).checked_sub(1).filter(|&b| b < n) else {
                        continue;
                    };
                    band[i][b + 2 - i] -= d * gv;
                }
            }
        }
        let mut planner = FftPlannerScalar::<f64>::new();
        Projector {
            grid,
            fwd: planner.plan_fft_forward(grid.nz),
            inv: planner.plan_fft_inverse(grid.nz),
            band,
            wdr,
            gr,
        }
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    fn symbol(&self, k: usize) -> f64 {
        let nz = self.grid.nz;
        if k == 0 || 2 * k == nz {
            0.0
        } else {
            (2.0 * std::f64::consts::PI * k as f64 / nz as f64).sin() / self.grid.dz()
        }
    }

    fn spectra(&self, f: &ScalarField2D) -> Vec<C64> {
        let nz = self.grid.nz;
        let mut out: Vec<C64> = f.values().iter().map(|&x| C64::new(x, 0.0)).collect();
        out.par_chunks_mut(nz).for_each(|row| self.fwd.process(row));
        out
    }

    fn field(&self, mut spec: Vec<C64>) -> ScalarField2D {
        let nz = self.grid.nz;
        spec.par_chunks_mut(nz)
            .for_each(|row| self.inv.process(row));
        let scale = 1.0 / nz as f64;
        let values = spec.iter().map(|c| c.re * scale).collect();
        ScalarField2D::from_values(self.grid, values).expect("shape preserved")
    }

    fn project_mode(&self, k: usize, vr: &mut [C64], vz: &mut [C64]) {
        let n = self.grid.nr;
        let s = self.symbol(k);
        if s == 0.0 {
            vr.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
            return;
        }
        let at = |v: &[C64], i: usize, d: usize| -> C64 {
            match (i + d).checked_sub(1) {
                Some(c) if c < n => v[c],
                _ => C64::new(0.0, 0.0),
            }
        };
        let is = C64::new(0.0, s);
        let mut a: Vec<[f64; 5]> = self.band.clone();
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let ri = self.grid.r(i);
            a[i][2] += s * s * ri;
            let mut d = C64::new(0.0, 0.0);
            for (dd, &w) in self.wdr[i].iter().enumerate() {
                d += at(vr, i, dd) * w;
            }
            rhs[i] = -(d + is * vz[i] * ri);
        }
        solve_pentadiagonal(&mut a, &mut rhs);
        let phi = rhs;
        for i in 0..n {
            let mut g = C64::new(0.0, 0.0);
            for (dd, &w) in self.gr[i].iter().enumerate() {
                g += at(&phi, i, dd) * w;
            }
            vr[i] -= g;
            vz[i] -= is * phi[i];
        }
    }

    /// Returns the projected `(v_r, v_z)`.
    pub fn project(
        &self,
        v_r: &ScalarField2D,
        v_z: &ScalarField2D,
    ) -> (ScalarField2D, ScalarField2D) {
        let (nr, nz) = (self.grid.nr, self.grid.nz);
        let sr = self.spectra(v_r);
        let sz = self.spectra(v_z);
        let modes: Vec<(Vec<C64>, Vec<C64>)> = (0..nz)
            .into_par_iter()
            .map(|k| {
                let mut cr: Vec<C64> = (0..nr).map(|i| sr[i * nz + k]).collect();
                let mut cz: Vec<C64> = (0..nr).map(|i| sz[i * nz + k]).collect();
                self.project_mode(k, &mut cr, &mut cz);
                (cr, cz)
            })
            .collect();
        let mut or = vec![C64::new(0.0, 0.0); nr * nz];
        let mut oz = or.clone();
        for (k, (cr, cz)) in modes.into_iter().enumerate() {
            for i in 0..nr {
                or[i * nz + k] = cr[i];
                oz[i * nz + k] = cz[i];
            }
        }
        (self.field(or), self.field(oz))
    }
}

/// Gaussian elimination without pivoting on a symmetric positive definite
/// band matrix of half-width 2; the solution overwrites `rhs`.
fn solve_pentadiagonal(a: &mut [[f64; 5]], rhs: &mut [C64]) {
    let n = a.len();
    for i in 0..n {
        let pivot = a[i][2];
        for k in i + 1..(i + 3).min(n) {
            let f = a[k][2 + i - k] / pivot;
            if f == 0.0 {
                continue;
            }
            for c in i..(i + 3).min(n) {
                a[k][2 + c - k] -= f * a[i][2 + c - i];
            }
            let ri = rhs[i];
            rhs[k] -= ri * f;
        }
    }
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for c in i + 1..(i + 3).min(n) {
            acc -= rhs[c] * a[i][2 + c - i];
        }
        rhs[i] = acc / a[i][2];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{cyl_divergence_slip, weighted_inner};

    #[test]
    fn band_is_symmetric() {
        let p = Projector::new(AnnulusGrid::new(0.5, 1.5, 1.0, 9, 8).unwrap());
        let n = 9;
        for i in 0..n {
            for d in 0..5usize {
                let Some(c) = (i + d).checked_sub(2).filter(|&c| c < n) else {
                    continue;
                };
                let back = p.band[c][i + 2 - c];
                assert!((p.band[i][d] - back).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_solenoidal() {
        let g = AnnulusGrid::new(0.5, 1.5, 2.0, 16, 24).unwrap();
        let vr = ScalarField2D::from_fn(g, |r, z| (3.0 * z).sin() * r + (z * r).cos());
        let vz = ScalarField2D::from_fn(g, |r, z| (2.0 * z).cos() * r * r + 0.3);
        let p = Projector::new(g);
        let (pr, pz) = p.project(&vr, &vz);
        assert!(cyl_divergence_slip(&pr, &pz).max_abs() < 1e-11);
        let (qr, qz) = p.project(&pr, &pz);
        let d = qr.zip_map(&pr, |a, b| a - b).max_abs() + qz.zip_map(&pz, |a, b| a - b).max_abs();
        assert!(d < 1e-12);
        let e0 = weighted_inner(&vr, &vr) + weighted_inner(&vz, &vz);
        let e1 = weighted_inner(&pr, &pr) + weighted_inner(&pz, &pz);
        assert!(e1 <= e0);
    }
}
