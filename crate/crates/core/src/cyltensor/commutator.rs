use num_traits::Zero;
use serde::Serialize;

use super::frame::{MultiIndexL, MultiIndexM};
use super::linsolve;
use super::tensor::{axisymmetric_gradient, compound_derivative};
use super::CylError;
use crate::symexpr::{
    substitute_divergence, Coeff, Direction, Expression, FieldSymbol, VectorTriple,
};

/// Which product family a basis element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisFamily {
    /// `D^N g · D^{M-N} d_z f`
    CoefficientDz,
    /// `D^N u_z · D^{M-N} d_z f`
    AxialVelocity,
    /// `D^N ((d_θ u_θ)/r + d_z u_z) · D^{M-N} f`
    TransverseDivergence,
    /// `d_z^{l_z} d_r^{l_r} u_r · d_r D^{M-(0,l_r,l_z)} f`
    RadialVelocity,
}

#[derive(Clone, Debug)]
struct BasisTerm {
    family: BasisFamily,
    index: String,
    label: String,
    expression: Expression,
}

/// One extracted coefficient; `merged` lists other basis labels that
/// normalized to the same expression and share this coefficient.
#[derive(Clone, Debug, Serialize)]
pub struct ExtractedCoefficient {
    pub family: BasisFamily,
    pub index: String,
    pub label: String,
    #[serde(serialize_with = "serialize_coeff")]
    pub coefficient: Coeff,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub merged: Vec<String>,
}

fn serialize_coeff<S: serde::Serializer>(c: &Coeff, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

/// Expanded commutator together with its decomposition over a product basis.
#[derive(Clone, Debug)]
pub struct CommutatorExpansion {
    pub m: MultiIndexM,
    pub expression: Expression,
    pub coefficients: Vec<ExtractedCoefficient>,
    /// Basis elements that normalized to zero and were dropped.
    pub vanishing: Vec<String>,
    pub residual: Expression,
    pub unique: bool,
}

impl CommutatorExpansion {
    pub fn residual_is_zero(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn integer_coefficients(&self) -> bool {
        self.coefficients.iter().all(|c| c.coefficient.is_integer())
    }

    /// Non-zero coefficients only.
    pub fn nonzero(&self) -> impl Iterator<Item = &ExtractedCoefficient> {
        self.coefficients
            .iter()
            .filter(|c| !c.coefficient.is_zero())
    }
}

fn decompose(m: MultiIndexM, target: Expression, basis: Vec<BasisTerm>) -> CommutatorExpansion {
    let mut vanishing = Vec::new();
    let mut columns: Vec<(BasisTerm, Vec<String>)> = Vec::new();
    for b in basis {
        if b.expression.is_zero() {
            vanishing.push(b.label);
            continue;
        }
        match columns
            .iter_mut()
            .find(|(c, _)| c.expression == b.expression)
        {
            Some((_, merged)) => merged.push(b.label),
            None => columns.push((b, Vec::new())),
        }
    }
    let exprs: Vec<Expression> = columns.iter().map(|(b, _)| b.expression.clone()).collect();
    let fit = linsolve::solve(&exprs, &target);
    let coefficients = columns
        .into_iter()
        .zip(fit.coefficients.iter())
        .map(|((b, merged), c)| ExtractedCoefficient {
            family: b.family,
            index: b.index,
            label: b.label,
            coefficient: c.clone(),
            merged,
        })
        .collect();
    CommutatorExpansion {
        m,
        expression: target,
        coefficients,
        vanishing,
        unique: fit.is_unique(),
        residual: fit.residual,
    }
}

fn require_axisymmetric(s: &FieldSymbol) -> Result<(), CylError> {
    if s.depends_theta() {
        return Err(CylError::Precondition(format!(
            "field `{}` must be axisymmetric",
            s.name()
        )));
    }
    Ok(())
}

/// `[D^M, g d_z] f` expanded and decomposed over `D^N g · D^{M-N} d_z f`.
pub fn expand_commutator_dz(
    m: MultiIndexM,
    g: &FieldSymbol,
    f: &FieldSymbol,
) -> Result<CommutatorExpansion, CylError> {
    require_axisymmetric(g)?;
    require_axisymmetric(f)?;
    let gf = Expression::field(g);
    let dzf = Expression::field(f).d(Direction::Z);
    let target = &compound_derivative(&(&gf * &dzf), m) - &(&gf * &compound_derivative(&dzf, m));

    let basis = m
        .sub_indices()
        .into_iter()
        .filter(|n| n.weight() >= 1)
        .map(|n| {
            let rest = m.checked_sub(&n).unwrap();
            BasisTerm {
                family: BasisFamily::CoefficientDz,
                index: n.to_string(),
                label: format!("D^{n} {} * D^{rest} dz {}", g.name(), f.name()),
                expression: &compound_derivative(&gf, n) * &compound_derivative(&dzf, rest),
            }
        })
        .collect();
    Ok(decompose(m, target, basis))
}

/// `[D^M, g d_z] f`, failing when the product-basis decomposition leaves a
/// residual or a non-integer coefficient.
pub fn commutator_dz(
    m: MultiIndexM,
    g: &FieldSymbol,
    f: &FieldSymbol,
) -> Result<Expression, CylError> {
    let e = expand_commutator_dz(m, g, f)?;
    validate(&e, "commutator-dz")?;
    Ok(e.expression)
}

/// `[D^M, u_r d_r + u_z d_z] f` expanded, with `d_r u_r` eliminated through
/// the divergence constraint, and decomposed over the three product families.
pub fn expand_commutator_transport(
    m: MultiIndexM,
    u: &VectorTriple,
    f: &FieldSymbol,
) -> Result<CommutatorExpansion, CylError> {
    require_axisymmetric(f)?;
    if !u.is_divergence_free() {
        return Err(CylError::Precondition(format!(
            "velocity ({}, {}, {}) is not registered as divergence-free",
            u.r.name(),
            u.theta.name(),
            u.z.name()
        )));
    }
    let subst = |e: &Expression| substitute_divergence(e, u).map_err(CylError::from);

    let fe = Expression::field(f);
    let ur = Expression::field(&u.r);
    let uz = Expression::field(&u.z);
    let advect = |h: &Expression| &(&ur * &h.d(Direction::R)) + &(&uz * &h.d(Direction::Z));
    let raw = &compound_derivative(&advect(&fe), m) - &advect(&compound_derivative(&fe, m));
    let target = subst(&raw)?;

    let dzf = fe.d(Direction::Z);
    let div_t = u.transverse_divergence();
    let mut basis = Vec::new();
    for n in m.sub_indices() {
        let rest = m.checked_sub(&n).unwrap();
        if n.weight() >= 1 {
            basis.push(BasisTerm {
                family: BasisFamily::AxialVelocity,
                index: n.to_string(),
                label: format!("D^{n} {} * D^{rest} dz {}", u.z.name(), f.name()),
                expression: subst(
                    &(&compound_derivative(&uz, n) * &compound_derivative(&dzf, rest)),
                )?,
            });
        }
        if rest.weight() >= 1 {
            basis.push(BasisTerm {
                family: BasisFamily::TransverseDivergence,
                index: n.to_string(),
                label: format!(
                    "D^{n} (dth({})/r + dz({})) * D^{rest} {}",
                    u.theta.name(),
                    u.z.name(),
                    f.name()
                ),
                expression: subst(
                    &(&compound_derivative(&div_t, n) * &compound_derivative(&fe, rest)),
                )?,
            });
        }
    }
    for l_r in 0..=m.m_r {
        for l_z in 0..=m.m_z {
            let l = MultiIndexL::new(l_r, l_z);
            if l.weight() == 0 {
                continue;
            }
            let rest = MultiIndexM::new(m.m_c, m.m_r - l_r, m.m_z - l_z);
            basis.push(BasisTerm {
                family: BasisFamily::RadialVelocity,
                index: l.to_string(),
                label: format!("grad^{l} {} * dr D^{rest} {}", u.r.name(), f.name()),
                expression: subst(
                    &(&axisymmetric_gradient(&ur, l)
                        * &compound_derivative(&fe, rest).d(Direction::R)),
                )?,
            });
        }
    }
    Ok(decompose(m, target, basis))
}

/// `[D^M, u_r d_r + u_z d_z] f`, divergence-substituted; fails on a nonzero
/// residual or a non-integer coefficient.
pub fn commutator_transport(
    m: MultiIndexM,
    u: &VectorTriple,
    f: &FieldSymbol,
) -> Result<Expression, CylError> {
    let e = expand_commutator_transport(m, u, f)?;
    validate(&e, "commutator-transport")?;
    Ok(e.expression)
}

fn validate(e: &CommutatorExpansion, identity: &str) -> Result<(), CylError> {
    if !e.residual_is_zero() {
        return Err(CylError::Residual {
            identity: identity.into(),
            index: e.m.to_string(),
            residual: e.residual.to_string(),
        });
    }
    if let Some(c) = e.coefficients.iter().find(|c| !c.coefficient.is_integer()) {
        return Err(CylError::NonInteger {
            identity: identity.into(),
            index: e.m.to_string(),
            label: c.label.clone(),
            value: c.coefficient.to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::int;

    fn f() -> FieldSymbol {
        FieldSymbol::axisymmetric("f")
    }
    fn g() -> FieldSymbol {
        FieldSymbol::axisymmetric("g")
    }
    fn u() -> VectorTriple {
        VectorTriple::divergence_free(
            FieldSymbol::general("u_r"),
            FieldSymbol::general("u_theta"),
            FieldSymbol::general("u_z"),
        )
    }

    #[test]
    fn dz_first_order() {
        let e = commutator_dz(MultiIndexM::new(0, 0, 1), &g(), &f()).unwrap();
        assert_eq!(
            e,
            &Expression::deriv(&g(), 0, 1, 0) * &Expression::deriv(&f(), 0, 1, 0)
        );
        let x = expand_commutator_dz(MultiIndexM::new(1, 0, 0), &g(), &f()).unwrap();
        assert_eq!(
            x.expression,
            &Expression::deriv(&g(), 1, 0, 0).shift_r(-1) * &Expression::deriv(&f(), 0, 1, 0)
        );
        let nz: Vec<_> = x.nonzero().collect();
        assert_eq!(nz.len(), 1);
        assert_eq!(nz[0].coefficient, int(1));
    }

    #[test]
    fn transport_base_cases() {
        let u = u();
        let e = commutator_transport(MultiIndexM::new(0, 0, 1), &u, &f()).unwrap();
        let expect = &(&Expression::deriv(&u.r, 0, 1, 0) * &Expression::deriv(&f(), 1, 0, 0))
            + &(&Expression::deriv(&u.z, 0, 1, 0) * &Expression::deriv(&f(), 0, 1, 0));
        assert_eq!(e, expect);

        let e = commutator_transport(MultiIndexM::new(1, 0, 0), &u, &f()).unwrap();
        let expect = &(&Expression::deriv(&u.z, 1, 0, 0).shift_r(-1)
            * &Expression::deriv(&f(), 0, 1, 0))
            - &(&u.transverse_divergence() * &Expression::deriv(&f(), 1, 0, 0).shift_r(-1));
        assert_eq!(e, expect);
    }

    #[test]
    fn rejects_theta_dependent_scalar() {
        let h = FieldSymbol::general("h");
        assert!(matches!(
            commutator_dz(MultiIndexM::new(0, 0, 1), &h, &f()),
            Err(CylError::Precondition(_))
        ));
    }
}
