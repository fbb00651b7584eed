use std::f64::consts::PI;

use hallmhd_core::cyltensor::MultiIndexM;
use hallmhd_core::diagnostics::*;
use hallmhd_core::grid::{AnnulusGrid, ScalarField2D, State};
use proptest::prelude::*;

#[test]
fn energy_of_a_pure_field_state() {
    // v = 0, H = 1: ∫ r² dx = 2π Lz (r1⁴ - r0⁴)/4, midpoint error O(dr²)
    let err = |nr: usize| {
        let g = AnnulusGrid::new(0.5, 1.5, 1.0, nr, 4).unwrap();
        let mut s = State::zeros(g);
        s.h = ScalarField2D::constant(g, 1.0);
        let exact = 2.0 * PI * (1.5f64.powi(4) - 0.5f64.powi(4)) / 4.0;
        (energy(&s) - exact).abs() / exact
    };
    let (a, b) = (err(16), err(32));
    assert!(a < 1e-2 && (a / b).log2() > 1.9, "{a} {b}");
}

#[test]
fn sampling_is_pure() {
    let g = AnnulusGrid::new(0.5, 1.5, 2.0, 8, 16).unwrap();
    let mut s = State::zeros(g);
    s.h = ScalarField2D::from_fn(g, |r, z| r * (PI * z).sin());
    s.v_theta = ScalarField2D::from_fn(g, |r, _| r - 1.0);
    let (a, b) = (sample(&s), sample(&s.clone()));
    assert!(a
        .values()
        .iter()
        .zip(b.values())
        .all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_eq!(a.div_residual, 0.0);
}

#[test]
fn every_theta_preset_cancels() {
    let dom = AnnulusGrid::default();
    for (f, g) in theta_presets() {
        let p = theta_cancellation_check(&f, g, &dom, 10, 24, 8);
        assert_eq!(p.n_theta, 16);
        assert_eq!(
            p.verdict,
            Verdict::Pass,
            "{}: {} vs {}",
            p.family,
            p.integral,
            p.scale
        );
    }
}

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    let (x, w) = gauss_legendre(6);
    // degree 11 is the highest exact degree for six nodes
    for k in 0..=11 {
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
        let exact = if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        };
        assert!((got - exact).abs() < 1e-13, "degree {k}: {got}");
    }
}

#[test]
fn theta_averaged_remainder_vanishes_for_every_preset() {
    let dom = AnnulusGrid::default();
    for g in AnalyticField::presets() {
        for m in MultiIndexM::up_to_weight(3) {
            let c = corollary_theta_average_check(&g, m, &dom, 4, 3, 1e-6);
            assert_eq!(
                c.verdict,
                Verdict::Pass,
                "{} {m}: {}",
                g.id,
                c.max_ring_average
            );
        }
    }
}

#[test]
fn non_axisymmetric_remainder_is_pointwise_nonzero() {
    // the average vanishes while individual ring points do not, so the
    // check is not passing vacuously
    let dom = AnnulusGrid::default();
    let g = &AnalyticField::presets()[1];
    assert!(!g.is_axisymmetric());
    let c = corollary_theta_average_check(g, MultiIndexM::new(1, 0, 0), &dom, 4, 5, 1e-6);
    assert_eq!(c.verdict, Verdict::Pass);
    assert!(c.max_pointwise > 1e-3, "{}", c.max_pointwise);
}

fn reciprocal_history(t_star: f64, c: f64, n: usize, t_end: f64) -> Vec<DiagnosticsRecord> {
    (0..n)
        .map(|k| {
            let t = t_end * k as f64 / n as f64;
            let mut v = [0.0; 11];
            v[0] = t;
            v[6] = c / (t_star - t);
            DiagnosticsRecord::from_values(v)
        })
        .collect()
}

#[test]
fn monitor_recovers_reciprocal_growth() {
    let e = blowup_monitor(&reciprocal_history(1.3, 0.7, 200, 1.28));
    assert_eq!(e.status, BlowupStatus::Estimated);
    assert!((e.time - 1.3).abs() < 1e-9 && (e.coefficient - 0.7).abs() < 1e-9);
}

#[test]
fn monitor_flags_growth_that_is_not_reciprocal() {
    let hist: Vec<DiagnosticsRecord> = (0..100)
        .map(|k| {
            let t = k as f64 * 0.05;
            let mut v = [0.0; 11];
            v[0] = t;
            v[6] = (t * t * t).exp();
            DiagnosticsRecord::from_values(v)
        })
        .collect();
    let e = blowup_monitor(&hist);
    assert_eq!(e.status, BlowupStatus::Unreliable, "{e:?}");
}

#[test]
fn csv_rejects_bad_header_and_numbers() {
    assert!(read_records(&b""[..]).is_err());
    assert!(read_records(&b"t,l1\n"[..]).is_err());
    let bad = format!("{}\n0,1,2,3,4,5,6,7,8,9,x\n", csv_header());
    assert!(read_records(bad.as_bytes()).is_err());
}

#[test]
fn svg_plot_survives_degenerate_series() {
    let s = svg_line_plot("flat", "t", "y", &[(0.0, 1.0), (1.0, 1.0)]);
    assert!(s.contains("polyline") && !s.contains("NaN"));
    let e = svg_line_plot("empty", "t", "y", &[]);
    assert!(e.ends_with("</svg>\n") && !e.contains("polyline"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6f64..1e6,
        -1e-6f64..1e-6,
        Just(0.0),
        Just(f64::MAX),
        Just(f64::MIN_POSITIVE)
    ]
}

proptest! {
    #[test]
    fn csv_round_trip_is_bit_exact(rows in prop::collection::vec(prop::array::uniform11(finite()), 0..8)) {
        let recs: Vec<DiagnosticsRecord> = rows.into_iter().map(DiagnosticsRecord::from_values).collect();
        let mut buf = Vec::new();
        write_records(&recs, &mut buf).unwrap();
        let back = read_records(&buf[..]).unwrap();
        prop_assert_eq!(back.len(), recs.len());
        for (a, b) in back.iter().zip(&recs) {
            prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}
