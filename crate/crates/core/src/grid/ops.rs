use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlannerScalar;

use super::{GridError, ScalarField2D};

/// `∂_r`: centered in the interior, second-order one-sided at the walls.
pub fn ddr(f: &ScalarField2D) -> ScalarField2D {
    let g = *f.grid();
    let (nr, nz) = (g.nr, g.nz);
    let inv = 1.0 / (2.0 * g.dr());
    let mut out = ScalarField2D::zeros(g);
    out.values_mut()
        .par_chunks_mut(nz)
        .enumerate()
        .for_each(|(i, row)| {
            for (j, o) in row.iter_mut().enumerate() {
                let v = |k: usize| f[(k, j)];
                *o = if i == 0 {
                    (-3.0 * v(0) + 4.0 * v(1) - v(2)) * inv
                } else if i == nr - 1 {
                    (3.0 * v(nr - 1) - 4.0 * v(nr - 2) + v(nr - 3)) * inv
                } else {
                    (v(i + 1) - v(i - 1)) * inv
                };
            }
        });
    out
}

/// `∂_z`: centered, periodic.
pub fn ddz(f: &ScalarField2D) -> ScalarField2D {
    let g = *f.grid();
    let nz = g.nz;
    let inv = 1.0 / (2.0 * g.dz());
    let mut out = ScalarField2D::zeros(g);
    out.values_mut()
        .par_chunks_mut(nz)
        .zip(f.values().par_chunks(nz))
        .for_each(|(o, row)| {
            for j in 0..nz {
                let jp = if j + 1 == nz { 0 } else { j + 1 };
                let jm = if j == 0 { nz - 1 } else { j - 1 };
                o[j] = (row[jp] - row[jm]) * inv;
            }
        });
    out
}

/// `∂_z` by Fourier differentiation along each row; the Nyquist mode is
/// dropped.
pub fn ddz_spectral(f: &ScalarField2D) -> ScalarField2D {
    let g = *f.grid();
    let nz = g.nz;
    let mut planner = FftPlannerScalar::<f64>::new();
    let fwd = planner.plan_fft_forward(nz);
    let inv = planner.plan_fft_inverse(nz);
    let k0 = 2.0 * PI / g.lz;
    let mut out = ScalarField2D::zeros(g);
    out.values_mut()
        .par_chunks_mut(nz)
        .zip(f.values().par_chunks(nz))
        .for_each(|(o, row)| {
            let mut buf: Vec<Complex<f64>> = row.iter().map(|&x| Complex::new(x, 0.0)).collect();
            fwd.process(&mut buf);
            for (k, c) in buf.iter_mut().enumerate() {
                let kk = if 2 * k < nz {
                    k as f64
                } else if 2 * k == nz {
                    0.0
                } else {
                    k as f64 - nz as f64
                };
                *c *= Complex::new(0.0, kk * k0);
            }
            inv.process(&mut buf);
            for (x, c) in o.iter_mut().zip(&buf) {
                *x = c.re / nz as f64;
            }
        });
    out
}

fn divergence_with_walls(
    u_r: &ScalarField2D,
    u_z: &ScalarField2D,
    wall: impl Fn(&[f64], bool) -> f64 + Sync,
) -> ScalarField2D {
    let g = *u_r.grid();
    assert!(g.same_shape(u_z.grid()), "field grids differ");
    let (nr, nz) = (g.nr, g.nz);
    let dr = g.dr();
    let dzu = ddz(u_z);
    let mut out = ScalarField2D::zeros(g);
    out.values_mut()
        .par_chunks_mut(nz)
        .enumerate()
        .for_each(|(i, row)| {
            let ri = g.r(i);
            for (j, o) in row.iter_mut().enumerate() {
                let q = |k: usize| g.r(k) * u_r[(k, j)];
                let lower = if i == 0 {
                    wall(&[q(0), q(1)], false)
                } else {
                    0.5 * (q(i - 1) + q(i))
                };
                let upper = if i == nr - 1 {
                    wall(&[q(nr - 1), q(nr - 2)], true)
                } else {
                    0.5 * (q(i) + q(i + 1))
                };
                *o = (upper - lower) / (ri * dr) + dzu[(i, j)];
            }
        });
    out
}

/// `(1/r) ∂_r(r u_r) + ∂_z u_z` in flux form, with `r u_r` averaged to
/// interior faces and linearly extrapolated to the walls.
pub fn cyl_divergence(u_r: &ScalarField2D, u_z: &ScalarField2D) -> ScalarField2D {
    divergence_with_walls(u_r, u_z, |q, _| 1.5 * q[0] - 0.5 * q[1])
}

/// As [`cyl_divergence`] but with zero flux through both walls (slip
/// boundary), which is the operator the projection makes vanish.
pub fn cyl_divergence_slip(u_r: &ScalarField2D, u_z: &ScalarField2D) -> ScalarField2D {
    divergence_with_walls(u_r, u_z, |_, _| 0.0)
}

/// `∫ f dx = 2π Σ f_ij r_i dr dz`, summed in a fixed order.
pub fn integrate(f: &ScalarField2D) -> f64 {
    let g = f.grid();
    let mut total = 0.0;
    for i in 0..g.nr {
        let row: f64 = f.row(i).iter().sum();
        total += row * g.r(i);
    }
    2.0 * PI * total * g.dr() * g.dz()
}

/// `∫ f g dx`.
pub fn weighted_inner(f: &ScalarField2D, g: &ScalarField2D) -> f64 {
    integrate(&f.zip_map(g, |a, b| a * b))
}

/// `(∫ |f|^p dx)^{1/p}`, or `max |f|` for infinite `p`.
pub fn lp_norm(f: &ScalarField2D, p: f64) -> f64 {
    assert!(p >= 1.0, "p must be at least 1");
    if p.is_infinite() {
        return f.max_abs();
    }
    let s = if p == 1.0 {
        integrate(&f.map(f64::abs))
    } else if p == 2.0 {
        integrate(&f.map(|v| v * v))
    } else {
        integrate(&f.map(|v| v.abs().powf(p)))
    };
    s.powf(1.0 / p)
}

/// Discrete `∂_z^{m_z} ∂_r^{m_r} ((1/r) ∂_r)^{m_c} f`.
pub fn compound_derivative(f: &ScalarField2D, m_c: u32, m_r: u32, m_z: u32) -> ScalarField2D {
    let mut out = f.clone();
    for _ in 0..m_c {
        out = ddr(&out).map_with_r(|r, v| v / r);
    }
    for _ in 0..m_r {
        out = ddr(&out);
    }
    for _ in 0..m_z {
        out = ddz(&out);
    }
    out
}

/// `sqrt(Σ_{|M| = m} ‖D^M f‖²_{L²})` for `m` in `1..=3`.
pub fn sobolev_seminorm(f: &ScalarField2D, m: u32) -> Result<f64, GridError> {
    if !(1..=3).contains(&m) {
        return Err(GridError::Invalid(format!(
            "seminorm order must be 1..=3, got {m}"
        )));
    }
    let mut total = 0.0;
    for m_c in 0..=m / 2 {
        for m_r in 0..=(m - 2 * m_c) {
            let m_z = m - 2 * m_c - m_r;
            let d = compound_derivative(f, m_c, m_r, m_z);
            total += integrate(&d.map(|v| v * v));
        }
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AnnulusGrid;

    fn grid(nr: usize, nz: usize) -> AnnulusGrid {
        AnnulusGrid::new(1.0, 2.0, 1.0, nr, nz).unwrap()
    }

    #[test]
    fn constants_have_zero_derivatives() {
        let f = ScalarField2D::constant(grid(8, 8), 3.0);
        assert_eq!(ddr(&f).max_abs(), 0.0);
        assert_eq!(ddz(&f).max_abs(), 0.0);
    }

    #[test]
    fn linear_in_r_is_exact() {
        let g = grid(8, 8);
        let f = ScalarField2D::from_fn(g, |r, _| r);
        assert!(ddr(&f).values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn periodic_wrap() {
        let g = grid(4, 8);
        let mut f = ScalarField2D::zeros(g);
        f[(0, 7)] = 1.0;
        let d = ddz(&f);
        assert_eq!(d[(0, 0)], -1.0 / (2.0 * g.dz()));
        assert_eq!(d[(0, 6)], 1.0 / (2.0 * g.dz()));
    }

    #[test]
    fn unit_field_l2() {
        let f = ScalarField2D::constant(grid(16, 8), 1.0);
        assert!((lp_norm(&f, 2.0) - (3.0 * PI).sqrt()).abs() < 1e-12);
        let mut s = ScalarField2D::zeros(grid(4, 4));
        s[(2, 1)] = 5.0;
        assert_eq!(lp_norm(&s, f64::INFINITY), 5.0);
        assert_eq!(lp_norm(&ScalarField2D::zeros(grid(4, 4)), 1.0), 0.0);
    }

    #[test]
    fn inverse_r_radial_flow_is_divergence_free() {
        let g = grid(16, 8);
        let ur = ScalarField2D::from_fn(g, |r, _| 1.0 / r);
        let uz = ScalarField2D::zeros(g);
        assert!(cyl_divergence(&ur, &uz).max_abs() < 1e-12);
        let uz = ScalarField2D::constant(g, 2.0);
        assert_eq!(cyl_divergence(&ScalarField2D::zeros(g), &uz).max_abs(), 0.0);
    }

    #[test]
    fn seminorm_order_bounds() {
        let f = ScalarField2D::constant(grid(8, 8), 1.0);
        assert_eq!(sobolev_seminorm(&f, 2).unwrap(), 0.0);
        assert!(sobolev_seminorm(&f, 0).is_err());
        assert!(sobolev_seminorm(&f, 4).is_err());
    }
}
