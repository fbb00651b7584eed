//! Conserved quantities, θ-cancellation probes and blow-up monitoring.

mod corollary;
mod monitor;
mod plot;
mod theta;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{cyl_divergence_slip, ddz, integrate, lp_norm, sobolev_seminorm, State};

pub use corollary::{corollary_theta_average_check, AnalyticField, CorollaryCheck, LaurentPoly};
pub use monitor::{blowup_monitor, BlowupEstimate, BlowupStatus};
pub use plot::svg_line_plot;
pub use theta::{
    gauss_legendre, theta_cancellation_check, theta_presets, ThetaCancellationProbe, ThetaField,
    Verdict,
};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("diagnostics CSV: {0}")]
    Csv(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub const CSV_COLUMNS: [&str; 11] = [
    "time",
    "l1",
    "l2",
    "l4",
    "linf",
    "energy",
    "max_dzH",
    "h1",
    "h2",
    "h3",
    "div_residual",
];

/// One row of the diagnostics log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    pub linf: f64,
    /// `∫ |v|² + h_θ²` with `h_θ = r H`.
    pub energy: f64,
    pub max_dz_h: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    /// `max |div_slip(v_r, v_z)|`.
    pub div_residual: f64,
}

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; 11] {
        [
            self.time,
            self.l1,
            self.l2,
            self.l4,
            self.linf,
            self.energy,
            self.max_dz_h,
            self.h1,
            self.h2,
            self.h3,
            self.div_residual,
        ]
    }

    pub fn from_values(v: [f64; 11]) -> Self {
        DiagnosticsRecord {
            time: v[0],
            l1: v[1],
            l2: v[2],
            l4: v[3],
            linf: v[4],
            energy: v[5],
            max_dz_h: v[6],
            h1: v[7],
            h2: v[8],
            h3: v[9],
            div_residual: v[10],
        }
    }

    /// CSV row with shortest round-trip formatting.
    pub fn csv_row(&self) -> String {
        self.values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// `∫ v_r² + v_θ² + v_z² + (r H)²`.
pub fn energy(s: &State) -> f64 {
    let sq = s
        .v_r
        .zip_map(&s.v_theta, |a, b| a * a + b * b)
        .zip_map(&s.v_z, |a, b| a + b * b)
        .zip_map(&s.h.map_with_r(|r, h| r * h), |a, b| a + b * b);
    integrate(&sq)
}

/// All diagnostics of one state. Pure: equal states give equal records.
pub fn sample(s: &State) -> DiagnosticsRecord {
    let h = &s.h;
    DiagnosticsRecord {
        time: s.time,
        l1: lp_norm(h, 1.0),
        l2: lp_norm(h, 2.0),
        l4: lp_norm(h, 4.0),
        linf: lp_norm(h, f64::INFINITY),
        energy: energy(s),
        max_dz_h: ddz(h).max_abs(),
        h1: sobolev_seminorm(h, 1).expect("order in range"),
        h2: sobolev_seminorm(h, 2).expect("order in range"),
        h3: sobolev_seminorm(h, 3).expect("order in range"),
        div_residual: cyl_divergence_slip(&s.v_r, &s.v_z).max_abs(),
    }
}

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn write_records<W: Write>(records: &[DiagnosticsRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{}", csv_header())?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Parses a diagnostics CSV, rejecting a wrong header or malformed rows.
pub fn read_records<R: BufRead>(r: R) -> Result<Vec<DiagnosticsRecord>, DiagnosticsError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| DiagnosticsError::Csv("empty file".into()))??;
    if header.trim_end() != csv_header() {
        return Err(DiagnosticsError::Csv(format!(
            "unexpected header `{header}`"
        )));
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != CSV_COLUMNS.len() {
            return Err(DiagnosticsError::Csv(format!(
                "row {} has {} columns, expected {}",
                n + 1,
                cells.len(),
                CSV_COLUMNS.len()
            )));
        }
        let mut v = [0.0; 11];
        for (k, c) in cells.iter().enumerate() {
            v[k] = c.trim().parse().map_err(|_| {
                DiagnosticsError::Csv(format!(
                    "row {}, column {}: bad number `{c}`",
                    n + 1,
                    CSV_COLUMNS[k]
                ))
            })?;
        }
        out.push(DiagnosticsRecord::from_values(v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{AnnulusGrid, ScalarField2D};

    #[test]
    fn zero_state_has_zero_record() {
        let s = State::zeros(AnnulusGrid::new(0.5, 1.5, 1.0, 8, 8).unwrap());
        let r = sample(&s);
        assert!(r.values()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = AnnulusGrid::new(0.5, 1.5, 1.0, 8, 8).unwrap();
        let mut s = State::zeros(g);
        s.h = ScalarField2D::from_fn(g, |r, z| (r * 3.1).sin() + z / 7.0);
        s.time = 0.1 + 0.2;
        let recs = vec![sample(&s), sample(&s)];
        let mut buf = Vec::new();
        write_records(&recs, &mut buf).unwrap();
        assert_eq!(read_records(&buf[..]).unwrap(), recs);
        let cut = &buf[..buf.iter().rposition(|&b| b == b',').unwrap()];
        assert!(read_records(cut).is_err());
    }
}
