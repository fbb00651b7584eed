//! Elimination of `d_r u_r` through the incompressibility constraint
//! `d_r u_r + u_r/r + (d_theta u_theta)/r + d_z u_z = 0`.

use std::collections::HashMap;

use super::{DerivAtom, Direction, Expression, FieldSymbol, SymError};

/// Cylindrical components `(u_r, u_theta, u_z)` of a vector field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorTriple {
    pub r: FieldSymbol,
    pub theta: FieldSymbol,
    pub z: FieldSymbol,
    divergence_free: bool,
}

impl VectorTriple {
    /// A triple registered as divergence-free.
    pub fn divergence_free(r: FieldSymbol, theta: FieldSymbol, z: FieldSymbol) -> Self {
        VectorTriple {
            r,
            theta,
            z,
            divergence_free: true,
        }
    }

    /// A triple with no constraint.
    pub fn unconstrained(r: FieldSymbol, theta: FieldSymbol, z: FieldSymbol) -> Self {
        VectorTriple {
            r,
            theta,
            z,
            divergence_free: false,
        }
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// `-u_r/r - (d_theta u_theta)/r - d_z u_z`, the value of `d_r u_r`.
    pub fn radial_derivative_rule(&self) -> Expression {
        let a = Expression::field(&self.r).shift_r(-1);
        let b = Expression::deriv(&self.theta, 0, 0, 1).shift_r(-1);
        let c = Expression::deriv(&self.z, 0, 1, 0);
        -(&(&a + &b) + &c)
    }

    /// `(d_theta u_theta)/r + d_z u_z`, which equals `-(d_r u_r + u_r/r)`.
    pub fn transverse_divergence(&self) -> Expression {
        &Expression::deriv(&self.theta, 0, 0, 1).shift_r(-1) + &Expression::deriv(&self.z, 0, 1, 0)
    }

    /// `d_r u_r + u_r/r + (d_theta u_theta)/r + d_z u_z`.
    pub fn divergence(&self) -> Expression {
        let dr = Expression::deriv(&self.r, 1, 0, 0);
        let ur = Expression::field(&self.r).shift_r(-1);
        &(&dr + &ur) + &self.transverse_divergence()
    }
}

/// Rewrites every atom `d_r^a d_z^b d_theta^c u_r` with `a >= 1` through the
/// differentiated constraint until no such atom remains.
pub fn substitute_divergence(e: &Expression, u: &VectorTriple) -> Result<Expression, SymError> {
    if !u.divergence_free {
        return Err(SymError::NotDivergenceFree(
            u.r.name().to_string(),
            u.theta.name().to_string(),
            u.z.name().to_string(),
        ));
    }
    let rule = u.radial_derivative_rule();
    let mut memo: HashMap<DerivAtom, Expression> = HashMap::new();
    Ok(rewrite(e, u, &rule, &mut memo))
}

fn rewrite(
    e: &Expression,
    u: &VectorTriple,
    rule: &Expression,
    memo: &mut HashMap<DerivAtom, Expression>,
) -> Expression {
    e.substitute_atoms(|a| {
        if a.symbol != u.r || a.n_r == 0 {
            return None;
        }
        Some(rewrite_atom(a, u, rule, memo))
    })
}

fn rewrite_atom(
    a: &DerivAtom,
    u: &VectorTriple,
    rule: &Expression,
    memo: &mut HashMap<DerivAtom, Expression>,
) -> Expression {
    if let Some(hit) = memo.get(a) {
        return hit.clone();
    }
    let raw = rule
        .d_n(Direction::R, a.n_r - 1)
        .d_n(Direction::Z, a.n_z)
        .d_n(Direction::Theta, a.n_theta);
    // `raw` only holds u_r atoms with fewer r-derivatives than `a`, so the
    // recursion terminates.
    let out = rewrite(&raw, u, rule, memo);
    memo.insert(a.clone(), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple() -> VectorTriple {
        VectorTriple::divergence_free(
            FieldSymbol::general("u_r"),
            FieldSymbol::general("u_theta"),
            FieldSymbol::general("u_z"),
        )
    }

    #[test]
    fn base_rule() {
        let u = triple();
        let got = substitute_divergence(&Expression::deriv(&u.r, 1, 0, 0), &u).unwrap();
        assert_eq!(got.to_string(), "-r^-1*u_r - r^-1*dth(u_theta) - dz(u_z)");
        assert_eq!(got, u.radial_derivative_rule());
    }

    #[test]
    fn untouched_without_target() {
        let u = triple();
        let e = Expression::deriv(&u.z, 0, 1, 0);
        assert_eq!(substitute_divergence(&e, &u).unwrap(), e);
    }

    #[test]
    fn commutes_with_dz() {
        let u = triple();
        let direct = substitute_divergence(&Expression::deriv(&u.r, 1, 1, 0), &u).unwrap();
        let oracle = substitute_divergence(&Expression::deriv(&u.r, 1, 0, 0), &u)
            .unwrap()
            .d(Direction::Z);
        assert_eq!(direct, oracle);
        let expect = -(&(&Expression::deriv(&u.r, 0, 1, 0).shift_r(-1)
            + &Expression::deriv(&u.theta, 0, 1, 1).shift_r(-1))
            + &Expression::deriv(&u.z, 0, 2, 0));
        assert_eq!(direct, expect);
    }

    #[test]
    fn higher_radial_derivatives_fully_eliminated() {
        let u = triple();
        let got = substitute_divergence(&Expression::deriv(&u.r, 3, 1, 2), &u).unwrap();
        assert!(got.atoms().iter().all(|a| a.symbol != u.r || a.n_r == 0));
        // the divergence itself is zero modulo the constraint
        assert!(substitute_divergence(&u.divergence(), &u)
            .unwrap()
            .is_zero());
        assert!(
            substitute_divergence(&u.divergence().d(Direction::R).d(Direction::R), &u)
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn rejects_unregistered_triple() {
        let u = VectorTriple::unconstrained(
            FieldSymbol::general("a"),
            FieldSymbol::general("b"),
            FieldSymbol::general("c"),
        );
        assert!(matches!(
            substitute_divergence(&Expression::zero(), &u),
            Err(SymError::NotDivergenceFree(..))
        ));
    }
}
