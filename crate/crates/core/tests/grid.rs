use std::f64::consts::PI;

use hallmhd_core::grid::*;
use proptest::prelude::*;

fn grid(nr: usize, nz: usize) -> AnnulusGrid {
    AnnulusGrid::new(1.0, 2.0, 1.0, nr, nz).unwrap()
}

fn interior_max(f: &ScalarField2D, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let g = *f.grid();
    let mut worst: f64 = 0.0;
    for i in 1..g.nr - 1 {
        for j in 0..g.nz {
            worst = worst.max((f[(i, j)] - exact(g.r(i), g.z(j))).abs());
        }
    }
    worst
}

fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[test]
fn radial_derivative_converges_at_second_order() {
    // r³ rather than r², whose centered difference is exact
    let err = |n: usize| {
        let f = ScalarField2D::from_fn(grid(n, 4), |r, _| r * r * r);
        interior_max(&ddr(&f), |r, _| 3.0 * r * r)
    };
    let order = observed_order(err(32), err(64));
    assert!(order >= 1.9, "{order}");

    let f = ScalarField2D::from_fn(grid(16, 4), |r, _| r * r);
    assert!(interior_max(&ddr(&f), |r, _| 2.0 * r) < 1e-12);
}

#[test]
fn axial_derivative_converges_and_wraps() {
    let k = 2.0 * PI;
    let err = |n: usize| {
        let f = ScalarField2D::from_fn(grid(4, n), |_, z| (k * z).sin());
        ddz(&f)
            .values()
            .iter()
            .enumerate()
            .map(|(idx, v)| (v - k * (k * grid(4, n).z(idx % n)).cos()).abs())
            .fold(0.0, f64::max)
    };
    let order = observed_order(err(64), err(128));
    assert!(order >= 1.9, "{order}");

    // column 0 sees column nz-1 as its left neighbour
    let g = grid(4, 8);
    let mut f = ScalarField2D::zeros(g);
    f[(1, 7)] = 1.0;
    let d = ddz(&f);
    assert_eq!(d[(1, 0)], -1.0 / (2.0 * g.dz()));
    assert_eq!(d[(1, 6)], 1.0 / (2.0 * g.dz()));
}

#[test]
fn spectral_derivative_is_exact_for_resolved_modes() {
    let g = AnnulusGrid::new(0.5, 1.5, 2.0 * PI, 4, 32).unwrap();
    let f = ScalarField2D::from_fn(g, |r, z| r * (3.0 * z).cos() + (5.0 * z).sin());
    let d = ddz_spectral(&f);
    let exact =
        ScalarField2D::from_fn(g, |r, z| -3.0 * r * (3.0 * z).sin() + 5.0 * (5.0 * z).cos());
    let err = d.zip_map(&exact, |a, b| a - b).max_abs();
    assert!(err < 1e-12, "{err}");
}

#[test]
fn divergence_of_source_free_fields() {
    // r u_r is constant, so face averages and wall extrapolation are exact
    let g = grid(16, 8);
    let ur = ScalarField2D::from_fn(g, |r, _| 1.0 / r);
    assert!(cyl_divergence(&ur, &ScalarField2D::zeros(g)).max_abs() < 1e-12);

    let g = grid(8, 8);
    let d = cyl_divergence(&ScalarField2D::zeros(g), &ScalarField2D::constant(g, 2.5));
    assert_eq!(d.max_abs(), 0.0);
}

#[test]
fn stream_function_velocity_is_discretely_nearly_solenoidal() {
    let err = |n: usize| {
        let g = AnnulusGrid::new(1.0, 2.0, 2.0, n, 2 * n).unwrap();
        let k = PI;
        let s = |r: f64| (r - 1.0) * (r - 1.0) * (2.0 - r) * (2.0 - r);
        let ds = |r: f64| 2.0 * (r - 1.0) * (2.0 - r) * (3.0 - 2.0 * r);
        let ur = ScalarField2D::from_fn(g, |r, z| -k * (k * z).cos() * s(r) / r);
        let uz = ScalarField2D::from_fn(g, |r, z| (k * z).sin() * ds(r) / r);
        let d = cyl_divergence(&ur, &uz);
        (interior_max(&d, |_, _| 0.0), d.max_abs())
    };
    let ((ia, wa), (ib, wb)) = (err(64), err(128));
    // the extrapolated wall flux is second order, so wall cells lose one
    assert!(observed_order(ia, ib) >= 1.9, "{ia} {ib}");
    assert!(observed_order(wa, wb) >= 0.8, "{wa} {wb}");
}

#[test]
fn norms_against_exact_integrals() {
    let g = grid(10, 7);
    let one = ScalarField2D::constant(g, 1.0);
    // ∫₁² r dr = 3/2, so ‖1‖₂ = sqrt(2π · 3/2)
    assert!((lp_norm(&one, 2.0) - (3.0 * PI).sqrt()).abs() < 1e-12);
    let zero = ScalarField2D::zeros(g);
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        assert_eq!(lp_norm(&zero, p), 0.0);
    }
    let mut spike = ScalarField2D::zeros(g);
    spike[(4, 3)] = 5.0;
    assert_eq!(lp_norm(&spike, f64::INFINITY), 5.0);
}

#[test]
fn first_seminorm_of_axial_sine() {
    let g = AnnulusGrid::new(1.0, 2.0, 1.0, 16, 256).unwrap();
    let k = 2.0 * PI;
    let f = ScalarField2D::from_fn(g, |_, z| (k * z).sin());
    // ∫ k² cos² (kz) r dr dθ dz = k² · (1/2) · (3/2) · 2π
    let exact = (k * k * 0.5 * 1.5 * 2.0 * PI).sqrt();
    let got = sobolev_seminorm(&f, 1).unwrap();
    assert!((got - exact).abs() / exact < 1e-3, "{got} {exact}");
    assert_eq!(
        sobolev_seminorm(&ScalarField2D::constant(g, 2.0), 2).unwrap(),
        0.0
    );
    assert!(sobolev_seminorm(&f, 0).is_err());
    assert!(sobolev_seminorm(&f, 4).is_err());
}

#[test]
fn second_seminorm_includes_the_compound_term() {
    // f = r²/2 has (1/r)∂_r f = 1 and ∂_r² f = 1, ∂_z f = 0; the seminorm
    // sums the squares of both unit components
    let g = grid(32, 4);
    let f = ScalarField2D::from_fn(g, |r, _| 0.5 * r * r);
    let got = sobolev_seminorm(&f, 2).unwrap();
    let exact = (2.0 * 3.0 * PI).sqrt();
    assert!((got - exact).abs() / exact < 1e-9, "{got} {exact}");
}

fn field_strategy() -> impl Strategy<Value = ScalarField2D> {
    prop::collection::vec(-10.0f64..10.0, 6 * 5)
        .prop_map(|v| ScalarField2D::from_values(grid(6, 5), v).unwrap())
}

proptest! {
    #[test]
    fn lp_norms_are_homogeneous_and_subadditive(f in field_strategy(), h in field_strategy(), c in -5.0f64..5.0) {
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let scaled = lp_norm(&f.map(|v| c * v), p);
            prop_assert!((scaled - c.abs() * lp_norm(&f, p)).abs() <= 1e-9 * (1.0 + scaled));
            let sum = lp_norm(&ScalarField2D::lincomb(1.0, &f, 1.0, &h), p);
            prop_assert!(sum <= lp_norm(&f, p) + lp_norm(&h, p) + 1e-9);
        }
    }

    #[test]
    fn integration_is_linear(f in field_strategy(), h in field_strategy(), a in -3.0f64..3.0) {
        let lhs = integrate(&ScalarField2D::lincomb(a, &f, 1.0, &h));
        let rhs = a * integrate(&f) + integrate(&h);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn cylf_round_trip_is_bit_exact(f in field_strategy()) {
        let mut buf = Vec::new();
        write_cylf(&f, &mut buf).unwrap();
        let back = read_cylf(&buf[..]).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
