//! Cell-centered fields on an annulus `r0 <= r <= r1`, periodic in `z`.

mod io;
mod ops;

use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{read_csv, read_cylf, write_csv, write_cylf, CYLF_MAGIC, CYLF_VERSION};
pub use ops::{
    compound_derivative, cyl_divergence, cyl_divergence_slip, ddr, ddz, ddz_spectral, integrate,
    lp_norm, sobolev_seminorm, weighted_inner,
};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error("grid mismatch: {0}")]
    Mismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed field file: {0}")]
    Format(String),
}

/// `Nr × Nz` cells covering `[r0, r1] × [0, Lz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnulusGrid {
    pub r0: f64,
    pub r1: f64,
    pub lz: f64,
    pub nr: usize,
    pub nz: usize,
}

impl Default for AnnulusGrid {
    fn default() -> Self {
        AnnulusGrid {
            r0: 0.5,
            r1: 1.5,
            lz: 2.0 * PI,
            nr: 128,
            nz: 256,
        }
    }
}

impl AnnulusGrid {
    pub fn new(r0: f64, r1: f64, lz: f64, nr: usize, nz: usize) -> Result<Self, GridError> {
        let g = AnnulusGrid { r0, r1, lz, nr, nz };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            return Err(GridError::Invalid(format!(
                "r0 must be positive, got {}",
                self.r0
            )));
        }
        if !(self.r1.is_finite() && self.r1 > self.r0) {
            return Err(GridError::Invalid(format!(
                "r1 must exceed r0, got r0 = {}, r1 = {}",
                self.r0, self.r1
            )));
        }
        if !(self.lz.is_finite() && self.lz > 0.0) {
            return Err(GridError::Invalid(format!(
                "Lz must be positive, got {}",
                self.lz
            )));
        }
        if self.nr < 4 || self.nz < 4 {
            return Err(GridError::Invalid(format!(
                "need Nr, Nz >= 4, got {} x {}",
                self.nr, self.nz
            )));
        }
        Ok(())
    }

    pub fn dr(&self) -> f64 {
        (self.r1 - self.r0) / self.nr as f64
    }

    pub fn dz(&self) -> f64 {
        self.lz / self.nz as f64
    }

    /// Cell-center radius.
    pub fn r(&self, i: usize) -> f64 {
        self.r0 + (i as f64 + 0.5) * self.dr()
    }

    /// Radius of the face between cells `i - 1` and `i` (`i = 0..=nr`).
    pub fn r_face(&self, i: usize) -> f64 {
        self.r0 + i as f64 * self.dr()
    }

    /// Cell-center height.
    pub fn z(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dz()
    }

    /// Height of the face between cells `j - 1` and `j`.
    pub fn z_face(&self, j: usize) -> f64 {
        j as f64 * self.dz()
    }

    pub fn len(&self) -> usize {
        self.nr * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `2π r_i dr dz`.
    pub fn cell_volume(&self, i: usize) -> f64 {
        2.0 * PI * self.r(i) * self.dr() * self.dz()
    }

    pub fn same_shape(&self, other: &AnnulusGrid) -> bool {
        self == other
    }
}

/// Row-major (`r` outer, `z` inner) cell-centered samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField2D {
    grid: AnnulusGrid,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn zeros(grid: AnnulusGrid) -> Self {
        ScalarField2D {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: AnnulusGrid, c: f64) -> Self {
        ScalarField2D {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(r, z)` at cell centers.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: AnnulusGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nr {
            let r = grid.r(i);
            for j in 0..grid.nz {
                values.push(f(r, grid.z(j)));
            }
        }
        ScalarField2D { grid, values }
    }

    pub fn from_values(grid: AnnulusGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::Mismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(ScalarField2D { grid, values })
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let nz = self.grid.nz;
        &self.values[i * nz..(i + 1) * nz]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let nz = self.grid.nz;
        &mut self.values[i * nz..(i + 1) * nz]
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        ScalarField2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `f(r_i, a_ij)`.
    pub fn map_with_r<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        for i in 0..self.grid.nr {
            let r = self.grid.r(i);
            for v in out.row_mut(i) {
                *v = f(r, *v);
            }
        }
        out
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        assert!(self.grid.same_shape(&other.grid), "field grids differ");
        ScalarField2D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        assert!(self.grid.same_shape(&x.grid), "field grids differ");
        for (s, &v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
    }

    /// `a * x + b * y`.
    pub fn lincomb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x.zip_map(y, |u, v| a * u + b * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for ScalarField2D {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[i * self.grid.nz + j]
    }
}

impl IndexMut<(usize, usize)> for ScalarField2D {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.values[i * self.grid.nz + j]
    }
}

/// Axisymmetric flow and field: velocity components and `H = h_θ / r`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub v_r: ScalarField2D,
    pub v_theta: ScalarField2D,
    pub v_z: ScalarField2D,
    pub h: ScalarField2D,
    pub time: f64,
}

impl State {
    pub fn zeros(grid: AnnulusGrid) -> Self {
        State {
            v_r: ScalarField2D::zeros(grid),
            v_theta: ScalarField2D::zeros(grid),
            v_z: ScalarField2D::zeros(grid),
            h: ScalarField2D::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &AnnulusGrid {
        self.h.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.v_r.is_finite()
            && self.v_theta.is_finite()
            && self.v_z.is_finite()
            && self.h.is_finite()
    }

    /// Named components in a fixed order.
    pub fn fields(&self) -> [(&'static str, &ScalarField2D); 4] {
        [
            ("vr", &self.v_r),
            ("vth", &self.v_theta),
            ("vz", &self.v_z),
            ("H", &self.h),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(AnnulusGrid::new(0.0, 1.0, 1.0, 8, 8).is_err());
        assert!(AnnulusGrid::new(1.0, 0.5, 1.0, 8, 8).is_err());
        assert!(AnnulusGrid::new(0.5, 1.5, 1.0, 3, 8).is_err());
        assert!(AnnulusGrid::new(0.5, 1.5, 1.0, 4, 4).is_ok());
        AnnulusGrid::default().validate().unwrap();
    }

    #[test]
    fn coordinates() {
        let g = AnnulusGrid::new(1.0, 2.0, 1.0, 4, 8).unwrap();
        assert_eq!(g.r(0), 1.125);
        assert_eq!(g.r_face(4), 2.0);
        assert_eq!(g.z(0), 0.0625);
        let f = ScalarField2D::from_fn(g, |r, z| r + 10.0 * z);
        assert_eq!(f[(1, 2)], g.r(1) + 10.0 * g.z(2));
        assert_eq!(f.row(1)[2], f[(1, 2)]);
    }
}
