//! Plain-text rendering used in reports, e.g. `3*r^2*dr(f)*dz(g)`.

use num_traits::{One, Signed};

use super::{Coeff, DerivAtom, Expression, Monomial};

pub(super) fn render(e: &Expression) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in e.iter().enumerate() {
        let body = render_term(&c.abs(), m);
        match (i, c.is_negative()) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

fn render_term(abs_coeff: &Coeff, m: &Monomial) -> String {
    let mut factors: Vec<String> = Vec::new();
    let unit_coeff = abs_coeff.is_one();
    if !unit_coeff {
        factors.push(abs_coeff.to_string());
    }
    match m.r_power {
        0 => {}
        1 => factors.push("r".to_string()),
        k => factors.push(format!("r^{k}")),
    }
    let atoms = m.atoms();
    let mut i = 0;
    while i < atoms.len() {
        let mut j = i + 1;
        while j < atoms.len() && atoms[j] == atoms[i] {
            j += 1;
        }
        let base = render_atom(&atoms[i]);
        if j - i == 1 {
            factors.push(base);
        } else {
            factors.push(format!("{base}^{}", j - i));
        }
        i = j;
    }
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

pub(super) fn render_atom(a: &DerivAtom) -> String {
    let mut ops = String::new();
    for (label, n) in [("dr", a.n_r), ("dz", a.n_z), ("dth", a.n_theta)] {
        match n {
            0 => {}
            1 => ops.push_str(label),
            n => ops.push_str(&format!("{label}{n}")),
        }
    }
    if ops.is_empty() {
        a.symbol.name().to_string()
    } else {
        format!("{ops}({})", a.symbol.name())
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn renders_reference_shape() {
        let f = FieldSymbol::axisymmetric("f");
        let g = FieldSymbol::axisymmetric("g");
        let e = &(&Expression::r_pow(int(3), 2) * &Expression::deriv(&f, 1, 0, 0))
            * &Expression::deriv(&g, 0, 1, 0);
        assert_eq!(e.to_string(), "3*r^2*dr(f)*dz(g)");
    }

    #[test]
    fn renders_signs_fractions_and_powers() {
        let u = FieldSymbol::general("u_theta");
        let e = &Expression::deriv(&u, 2, 1, 1)
            .scale(&ratio(-1, 2))
            .shift_r(-1)
            + &Expression::field(&u).pow(2);
        assert_eq!(e.to_string(), "-1/2*r^-1*dr2dzdth(u_theta) + u_theta^2");
        assert_eq!(Expression::zero().to_string(), "0");
        assert_eq!(Expression::integer(-1).to_string(), "-1");
    }
}
