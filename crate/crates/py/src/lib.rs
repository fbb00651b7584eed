//! Python bindings: grids and fields, the tensor identity checks, the
//! θ-cancellation probes, and whole simulation runs driven by TOML configs.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use hallmhd_core::cyltensor::{self, Connection, MultiIndexM, VerifyOptions};
use hallmhd_core::diagnostics::{self, AnalyticField, Verdict};
use hallmhd_core::grid::{self, AnnulusGrid, ScalarField2D};
use hallmhd_core::run::{self, ExitStatus, RunConfig, RunError};
use hallmhd_core::solver;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn run_err(e: RunError) -> PyErr {
    match e {
        RunError::Io { .. } => PyOSError::new_err(e.to_string()),
        other => value_err(other),
    }
}

/// Annulus `r0 <= r <= r1`, periodic in `z` with period `lz`, cell-centred.
#[pyclass(name = "Grid", module = "hallmhd", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyGrid {
    inner: AnnulusGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (r0 = 0.5, r1 = 1.5, lz = std::f64::consts::TAU, nr = 128, nz = 256))]
    fn new(r0: f64, r1: f64, lz: f64, nr: usize, nz: usize) -> PyResult<Self> {
        let inner = AnnulusGrid::new(r0, r1, lz, nr, nz).map_err(value_err)?;
        Ok(PyGrid { inner })
    }

    #[getter]
    fn r0(&self) -> f64 {
        self.inner.r0
    }
    #[getter]
    fn r1(&self) -> f64 {
        self.inner.r1
    }
    #[getter]
    fn lz(&self) -> f64 {
        self.inner.lz
    }
    #[getter]
    fn nr(&self) -> usize {
        self.inner.nr
    }
    #[getter]
    fn nz(&self) -> usize {
        self.inner.nz
    }
    #[getter]
    fn dr(&self) -> f64 {
        self.inner.dr()
    }
    #[getter]
    fn dz(&self) -> f64 {
        self.inner.dz()
    }

    /// Cell-centre radii.
    fn radii(&self) -> Vec<f64> {
        (0..self.inner.nr).map(|i| self.inner.r(i)).collect()
    }

    /// Cell-centre heights.
    fn heights(&self) -> Vec<f64> {
        (0..self.inner.nz).map(|j| self.inner.z(j)).collect()
    }

    fn __repr__(&self) -> String {
        let g = &self.inner;
        format!(
            "Grid(r0={}, r1={}, lz={}, nr={}, nz={})",
            g.r0, g.r1, g.lz, g.nr, g.nz
        )
    }
}

/// Cell-centred scalar on a grid, stored row-major (`nr` rows of `nz`).
#[pyclass(name = "Field", module = "hallmhd", skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: ScalarField2D,
}

#[pymethods]
impl PyField {
    /// Builds a field from `nr` rows of `nz` values.
    #[new]
    fn new(grid: &PyGrid, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let g = grid.inner;
        if rows.len() != g.nr || rows.iter().any(|r| r.len() != g.nz) {
            return Err(value_err(format!(
                "expected {} rows of {} values",
                g.nr, g.nz
            )));
        }
        let inner = ScalarField2D::from_values(g, rows.concat()).map_err(value_err)?;
        Ok(PyField { inner })
    }

    #[staticmethod]
    fn constant(grid: &PyGrid, value: f64) -> Self {
        PyField {
            inner: ScalarField2D::constant(grid.inner, value),
        }
    }

    /// Samples `f(r, z)` at every cell centre.
    #[staticmethod]
    fn from_function(grid: &PyGrid, f: &Bound<'_, PyAny>) -> PyResult<Self> {
        let g = grid.inner;
        let mut values = Vec::with_capacity(g.len());
        for i in 0..g.nr {
            for j in 0..g.nz {
                values.push(f.call1((g.r(i), g.z(j)))?.extract::<f64>()?);
            }
        }
        Ok(PyField {
            inner: ScalarField2D::from_values(g, values).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn load_cylf(path: PathBuf) -> PyResult<Self> {
        let inner = ScalarField2D::load_cylf(&path).map_err(value_err)?;
        Ok(PyField { inner })
    }

    fn save_cylf(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_cylf(&path).map_err(value_err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: *self.inner.grid(),
        }
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        let g = self.inner.grid();
        (0..g.nr).map(|i| self.inner.row(i).to_vec()).collect()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<f64> {
        let g = self.inner.grid();
        if idx.0 >= g.nr || idx.1 >= g.nz {
            return Err(pyo3::exceptions::PyIndexError::new_err(
                "cell index out of range",
            ));
        }
        Ok(self.inner[idx])
    }

    fn ddr(&self) -> Self {
        PyField {
            inner: grid::ddr(&self.inner),
        }
    }

    fn ddz(&self) -> Self {
        PyField {
            inner: grid::ddz(&self.inner),
        }
    }

    fn ddz_spectral(&self) -> Self {
        PyField {
            inner: grid::ddz_spectral(&self.inner),
        }
    }

    fn integrate(&self) -> f64 {
        grid::integrate(&self.inner)
    }

    /// `p = float("inf")` gives the maximum norm.
    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        if !(p >= 1.0) {
            return Err(value_err(format!("p must be at least 1, got {p}")));
        }
        Ok(grid::lp_norm(&self.inner, p))
    }

    fn sobolev_seminorm(&self, m: u32) -> PyResult<f64> {
        grid::sobolev_seminorm(&self.inner, m).map_err(value_err)
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    /// `1/(2 max ∂_z H)`, the first characteristic crossing time for
    /// `∂_t H = ∂_z(H²)`.
    fn crossing_time(&self) -> f64 {
        solver::predict_blowup(&self.inner).crossing_time
    }
}

/// Runs the symbolic identity checks; returns `(exit_code, report_json)`.
#[pyfunction]
#[pyo3(signature = (max_order = 6, max_commutator = 4, flip_christoffel_sign = false))]
fn verify_tensors(
    max_order: usize,
    max_commutator: u32,
    flip_christoffel_sign: bool,
) -> PyResult<(i32, String)> {
    let connection = if flip_christoffel_sign {
        Connection::with_flipped_radial_sign()
    } else {
        Connection::standard()
    };
    let rep = cyltensor::verify(&VerifyOptions {
        max_order,
        max_commutator,
        connection,
    })
    .map_err(value_err)?;
    let code = if rep.passed() {
        ExitStatus::Ok
    } else {
        ExitStatus::IdentityFailure
    };
    let json = serde_json::to_string(&rep).map_err(value_err)?;
    Ok((code.code(), json))
}

/// `(family, integral, scale, passed)` for every θ-cancellation preset.
#[pyfunction]
#[pyo3(signature = (n_r = 12, n_z = 32, n_theta = 32))]
fn theta_cancellation(n_r: usize, n_z: usize, n_theta: usize) -> Vec<(String, f64, f64, bool)> {
    let dom = AnnulusGrid::default();
    diagnostics::theta_presets()
        .into_iter()
        .map(|(f, g)| {
            let p = diagnostics::theta_cancellation_check(&f, g, &dom, n_r, n_z, n_theta);
            (p.family, p.integral, p.scale, p.verdict == Verdict::Pass)
        })
        .collect()
}

/// `(preset, (m_c, m_r, m_z), max_ring_average, passed)` over the analytic
/// presets and all multi-indices up to `max_weight`.
#[pyfunction]
#[pyo3(signature = (max_weight = 3, tolerance = 1e-6, samples = 6, seed = 11))]
fn corollary_checks(
    max_weight: u32,
    tolerance: f64,
    samples: usize,
    seed: u64,
) -> Vec<(String, (u32, u32, u32), f64, bool)> {
    let dom = AnnulusGrid::default();
    let mut out = Vec::new();
    for g in AnalyticField::presets() {
        for m in MultiIndexM::up_to_weight(max_weight) {
            let c =
                diagnostics::corollary_theta_average_check(&g, m, &dom, samples, seed, tolerance);
            out.push((
                c.preset,
                (m.m_c, m.m_r, m.m_z),
                c.max_ring_average,
                c.verdict == Verdict::Pass,
            ));
        }
    }
    out
}

/// The default run config, or a named preset, as TOML.
#[pyfunction]
#[pyo3(signature = (preset = None))]
fn default_config(preset: Option<&str>) -> PyResult<String> {
    let cfg = match preset {
        None => RunConfig::default(),
        Some(name) => {
            RunConfig::preset(name).ok_or_else(|| value_err(format!("unknown preset {name:?}")))?
        }
    };
    Ok(cfg.to_toml())
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    run::PRESETS.to_vec()
}

/// Runs a simulation from TOML text into `out_dir`; returns
/// `(exit_code, manifest_json)`. The GIL is released while stepping.
#[pyfunction]
fn simulate(py: Python<'_>, config: &str, out_dir: PathBuf) -> PyResult<(i32, String)> {
    let cfg = RunConfig::from_toml(config).map_err(run_err)?;
    let rep = py
        .detach(|| run::simulate(&cfg, &out_dir))
        .map_err(run_err)?;
    let json = serde_json::to_string(&rep.manifest).map_err(value_err)?;
    Ok((rep.status.code(), json))
}

/// Replays a run directory; returns `(exit_code, mismatches)`.
#[pyfunction]
fn diagnose(py: Python<'_>, run_dir: PathBuf) -> PyResult<(i32, Vec<String>)> {
    let rep = py.detach(|| run::diagnose(&run_dir)).map_err(run_err)?;
    Ok((rep.status.code(), rep.mismatches))
}

#[pymodule]
fn hallmhd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", hallmhd_core::VERSION)?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(verify_tensors, m)?)?;
    m.add_function(wrap_pyfunction!(theta_cancellation, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_checks, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(diagnose, m)?)?;
    Ok(())
}
