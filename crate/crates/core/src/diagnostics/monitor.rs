//! Blow-up time estimate from the growth of `max |∂_z H|`.
//!
//! Gradient blow-up of the Burgers wave follows `g(t) ≈ c / (T - t)`, so
//! `1/g` is linear in `t` and vanishes at `T`. The fit uses the samples
//! with `1.5 g_0 <= g <= 0.3 g_peak` before the peak, which drops both the
//! flat start and the resolution-limited end; when that window holds fewer
//! than eight samples every pre-peak sample is used.

use serde::Serialize;

use super::DiagnosticsRecord;

/// Relative RMS misfit of `1/g` above which the estimate is flagged.
pub const UNRELIABLE_RESIDUAL: f64 = 0.05;
const MIN_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BlowupStatus {
    Estimated,
    Unreliable,
    NoBlowUp,
    InsufficientData,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowupEstimate {
    /// Estimated blow-up time, `+∞` without growth.
    pub time: f64,
    /// Fitted `c` in `c / (T - t)`.
    pub coefficient: f64,
    /// Relative RMS misfit of `1/g`.
    pub residual: f64,
    pub samples_used: usize,
    pub status: BlowupStatus,
}

fn no_blowup(samples_used: usize, status: BlowupStatus) -> BlowupEstimate {
    BlowupEstimate {
        time: f64::INFINITY,
        coefficient: 0.0,
        residual: 0.0,
        samples_used,
        status,
    }
}

pub fn blowup_monitor(history: &[DiagnosticsRecord]) -> BlowupEstimate {
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|r| r.max_dz_h.is_finite() && r.time.is_finite())
        .map(|r| (r.time, r.max_dz_h))
        .collect();
    if pts.len() < MIN_SAMPLES {
        return no_blowup(pts.len(), BlowupStatus::InsufficientData);
    }
    let g0 = pts[0].1;
    let peak = pts
        .iter()
        .enumerate()
        .fold(0, |best, (k, p)| if p.1 > pts[best].1 { k } else { best });
    let g_peak = pts[peak].1;
    if !(g_peak > g0) || g_peak <= 0.0 {
        return no_blowup(pts.len(), BlowupStatus::NoBlowUp);
    }
    let pre = &pts[..=peak];
    let window: Vec<(f64, f64)> = pre
        .iter()
        .copied()
        .filter(|&(_, g)| g >= 1.5 * g0 && g <= 0.3 * g_peak)
        .collect();
    let used: Vec<(f64, f64)> = if window.len() >= MIN_SAMPLES {
        window
    } else {
        pre.iter().copied().filter(|&(_, g)| g > 0.0).collect()
    };
    if used.len() < 2 {
        return no_blowup(used.len(), BlowupStatus::InsufficientData);
    }
    // Least squares for 1/g = a + b t.
    let n = used.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, g) in &used {
        let y = 1.0 / g;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let den = n * stt - st * st;
    if den == 0.0 {
        return no_blowup(used.len(), BlowupStatus::InsufficientData);
    }
    let b = (n * sty - st * sy) / den;
    let a = (sy - b * st) / n;
    if b >= 0.0 {
        return no_blowup(used.len(), BlowupStatus::NoBlowUp);
    }
    let mut ss = 0.0;
    for &(t, g) in &used {
        let y = 1.0 / g;
        ss += ((a + b * t - y) / y).powi(2);
    }
    let residual = (ss / n).sqrt();
    let status = if used.len() < MIN_SAMPLES || residual > UNRELIABLE_RESIDUAL {
        BlowupStatus::Unreliable
    } else {
        BlowupStatus::Estimated
    };
    BlowupEstimate {
        time: -a / b,
        coefficient: -1.0 / b,
        residual,
        samples_used: used.len(),
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, n: usize, dt: f64) -> Vec<DiagnosticsRecord> {
        (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                let mut v = [0.0; 11];
                v[0] = t;
                v[6] = f(t);
                DiagnosticsRecord::from_values(v)
            })
            .collect()
    }

    #[test]
    fn reciprocal_series() {
        let e = blowup_monitor(&series(|t| 1.0 / (1.0 - t), 10, 0.1));
        assert_eq!(e.status, BlowupStatus::Estimated);
        assert!((e.time - 1.0).abs() < 0.01);
    }

    #[test]
    fn constant_series() {
        let e = blowup_monitor(&series(|_| 2.0, 20, 0.1));
        assert_eq!(e.status, BlowupStatus::NoBlowUp);
        assert_eq!(e.time, f64::INFINITY);
    }

    #[test]
    fn too_short() {
        let e = blowup_monitor(&series(|t| 1.0 / (1.0 - t), 5, 0.1));
        assert_eq!(e.status, BlowupStatus::InsufficientData);
    }
}
