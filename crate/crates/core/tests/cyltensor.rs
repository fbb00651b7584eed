use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use hallmhd_core::cyltensor::{
    closed_form, compound_derivative, expand_commutator_transport, nabla_component,
    odd_double_factorial, to_unit_frame, verify, BasisFamily, Connection, IndexList, MultiIndexM,
    NablaTable, Status, VerifyOptions,
};
use hallmhd_core::symexpr::{int, Expression, FieldSymbol, VectorTriple};

#[test]
fn full_order_verification_passes_within_budget() {
    let t0 = Instant::now();
    let rep = verify(&VerifyOptions::default()).unwrap();
    assert!(t0.elapsed() < Duration::from_secs(120));
    assert_eq!(
        rep.status,
        Status::Pass,
        "{:#?}",
        rep.first_counterexample()
    );
    let odd = &rep.identities[0];
    // f: 3 + 9 + ... + 729 components, and the same for g
    assert_eq!(odd.checked, 2 * (3 + 9 + 27 + 81 + 243 + 729));
    assert!(rep.commutator_tables.iter().all(|t| t.ok()));
}

#[test]
fn flipped_christoffel_sign_is_detected() {
    let rep = verify(&VerifyOptions {
        max_order: 4,
        max_commutator: 2,
        connection: Connection::with_flipped_radial_sign(),
    })
    .unwrap();
    assert_eq!(rep.status, Status::Fail);
    let (identity, c) = rep.first_counterexample().unwrap();
    assert_eq!(identity, "closed-form");
    assert_eq!(c.index, "(θ,θ)");
}

#[test]
fn unit_components_are_integer_multiples_of_compound_derivatives() {
    let f = FieldSymbol::axisymmetric("f");
    let table = NablaTable::build(&f, 6);
    for n in 1..=6 {
        for (idx, c) in table.level(n) {
            let unit = to_unit_frame(c, idx);
            match idx.multi_index() {
                None => assert!(unit.is_zero()),
                Some(m) => {
                    let k = odd_double_factorial(m.m_c) as i64;
                    let dm = compound_derivative(&Expression::field(&f), m);
                    assert_eq!(unit, dm.scale(&int(k)), "{idx}");
                }
            }
        }
    }
}

#[test]
fn closed_form_for_two_one_one() {
    let f = FieldSymbol::axisymmetric("f");
    let m = MultiIndexM::new(2, 1, 1);
    let expect = closed_form(&f, m);
    let orderings = IndexList::orderings(m);
    assert_eq!(orderings.len(), 30);
    for idx in orderings {
        assert_eq!(nabla_component(&f, &idx), expect);
    }
}

/// Polynomial in Cartesian `(x, y, z)` with exponent keys.
type Poly = BTreeMap<(u32, u32, u32), f64>;

fn poly_d(p: &Poly, axis: usize) -> Poly {
    let mut out = Poly::new();
    for (&(a, b, c), &v) in p {
        let e = [a, b, c][axis];
        if e == 0 {
            continue;
        }
        let mut k = [a, b, c];
        k[axis] -= 1;
        *out.entry((k[0], k[1], k[2])).or_default() += v * e as f64;
    }
    out
}

fn poly_eval(p: &Poly, x: f64, y: f64, z: f64) -> f64 {
    p.iter()
        .map(|(&(a, b, c), &v)| v * x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32))
        .sum()
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `f(r, z) = Σ c_jk r^{2j} z^k` and its Cartesian form `Σ c_jk (x² + y²)^j z^k`.
fn test_polynomial() -> (Vec<((u32, u32), f64)>, Poly) {
    let coeffs = vec![
        ((0, 1), 0.7),
        ((1, 0), -1.3),
        ((1, 2), 0.4),
        ((2, 1), 0.9),
        ((3, 0), -0.25),
        ((3, 3), 0.05),
        ((4, 1), 0.11),
    ];
    let mut cart = Poly::new();
    for &((j, k), c) in &coeffs {
        for i in 0..=j {
            *cart.entry((2 * i, 2 * (j - i), k)).or_default() += c * binom(j, i);
        }
    }
    (coeffs, cart)
}

fn radial_atom(coeffs: &[((u32, u32), f64)], n_r: u32, n_z: u32, r: f64, z: f64) -> f64 {
    coeffs
        .iter()
        .map(|&((j, k), c)| {
            let pr = 2 * j;
            if n_r > pr || n_z > k {
                return 0.0;
            }
            let fr: f64 = (0..n_r).map(|i| (pr - i) as f64).product();
            let fz: f64 = (0..n_z).map(|i| (k - i) as f64).product();
            c * fr * fz * r.powi((pr - n_r) as i32) * z.powi((k - n_z) as i32)
        })
        .sum()
}

#[test]
fn unit_components_match_cartesian_partials() {
    // At θ = 0 the unit frame (e_r, e_θ, e_z) is the Cartesian (x, y, z) frame,
    // so the unit component is the plain Cartesian partial there.
    let (coeffs, cart) = test_polynomial();
    let f = FieldSymbol::axisymmetric("f");
    let table = NablaTable::build(&f, 6);
    let (r0, z0) = (1.3, -0.6);
    for n in 1..=6 {
        for (idx, c) in table.level(n) {
            let mut p = cart.clone();
            for _ in 0..idx.chi_r() {
                p = poly_d(&p, 0);
            }
            for _ in 0..idx.chi_theta() {
                p = poly_d(&p, 1);
            }
            for _ in 0..idx.chi_z() {
                p = poly_d(&p, 2);
            }
            let oracle = poly_eval(&p, r0, 0.0, z0);
            let got =
                to_unit_frame(c, idx).evaluate(r0, |a| radial_atom(&coeffs, a.n_r, a.n_z, r0, z0));
            let scale = oracle.abs().max(1.0);
            assert!(
                (got - oracle).abs() <= 1e-9 * scale,
                "{idx}: {got} vs {oracle}"
            );
        }
    }
}

#[test]
fn transport_commutator_extraction_is_integral_and_stable() {
    let u = VectorTriple::divergence_free(
        FieldSymbol::general("u_r"),
        FieldSymbol::general("u_theta"),
        FieldSymbol::general("u_z"),
    );
    let f = FieldSymbol::axisymmetric("f");
    for m in MultiIndexM::up_to_weight(4) {
        let a = expand_commutator_transport(m, &u, &f).unwrap();
        let b = expand_commutator_transport(m, &u, &f).unwrap();
        assert!(a.residual_is_zero(), "{m}");
        assert!(a.integer_coefficients(), "{m}");
        let ca: Vec<_> = a
            .coefficients
            .iter()
            .map(|c| (c.label.clone(), c.coefficient.clone()))
            .collect();
        let cb: Vec<_> = b
            .coefficients
            .iter()
            .map(|c| (c.label.clone(), c.coefficient.clone()))
            .collect();
        assert_eq!(ca, cb);
    }
    // the first-order compound case carries exactly two non-zero coefficients
    let e = expand_commutator_transport(MultiIndexM::new(1, 0, 0), &u, &f).unwrap();
    let nz: Vec<_> = e
        .nonzero()
        .map(|c| (c.family, c.coefficient.clone()))
        .collect();
    assert_eq!(
        nz,
        vec![
            (BasisFamily::TransverseDivergence, int(-1)),
            (BasisFamily::AxialVelocity, int(1))
        ]
    );
}
