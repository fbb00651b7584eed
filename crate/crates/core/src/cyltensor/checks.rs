use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::commutator::{
    expand_commutator_dz, expand_commutator_transport, CommutatorExpansion, ExtractedCoefficient,
};
use super::frame::{FrameIndex, IndexList, MultiIndexL, MultiIndexM};
use super::remark::{check_remark_m1, RemarkReport};
use super::tensor::{closed_form, vector_component, Connection, NablaTable};
use super::CylError;
use crate::symexpr::{Expression, FieldSymbol, VectorTriple};

const MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: String,
    pub got: String,
    pub expected: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub status: Status,
    pub checked: usize,
    pub failures: usize,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityReport {
    fn new(identity: &str) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            status: Status::Pass,
            checked: 0,
            failures: 0,
            counterexamples: Vec::new(),
            note: None,
        }
    }

    fn skipped(identity: &str, note: String) -> Self {
        IdentityReport {
            status: Status::Skipped,
            note: Some(note),
            ..Self::new(identity)
        }
    }

    fn record(&mut self, ok: bool, index: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            self.status = Status::Fail;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(index());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

fn describe(e: &Expression) -> String {
    if e.is_zero() {
        "0".into()
    } else {
        e.to_string()
    }
}

fn axisymmetric_f() -> FieldSymbol {
    FieldSymbol::axisymmetric("f")
}

fn generic_g() -> FieldSymbol {
    FieldSymbol::general("g")
}

fn require_order(max_order: usize, min: usize, what: &str) -> Result<(), CylError> {
    if max_order < min {
        return Err(CylError::Precondition(format!(
            "{what} needs max_order >= {min}, got {max_order}"
        )));
    }
    Ok(())
}

/// Axisymmetric `f`: every component with an odd number of θ indices is
/// zero and every other one is not. Generic `g`: no component vanishes.
pub fn check_odd_vanish(max_order: usize) -> Result<IdentityReport, CylError> {
    require_order(max_order, 1, "odd-theta vanishing check")?;
    let f = NablaTable::build(&axisymmetric_f(), max_order);
    let g = NablaTable::build(&generic_g(), max_order);
    Ok(odd_vanish_report(&f, Some(&g)))
}

fn odd_vanish_report(f: &NablaTable, g: Option<&NablaTable>) -> IdentityReport {
    let mut rep = IdentityReport::new("odd-theta-vanishing");
    for n in 1..=f.max_order() {
        for (idx, c) in f.level(n) {
            let odd = idx.chi_theta() % 2 == 1;
            rep.record(c.is_zero() == odd, || Counterexample {
                index: format!("{}{idx}", f.field().name()),
                got: describe(c),
                expected: if odd { "0".into() } else { "nonzero".into() },
            });
        }
    }
    if let Some(g) = g {
        for n in 1..=g.max_order() {
            for (idx, c) in g.level(n) {
                rep.record(!c.is_zero(), || Counterexample {
                    index: format!("{}{idx}", g.field().name()),
                    got: "0".into(),
                    expected: "nonzero".into(),
                });
            }
        }
    }
    rep
}

/// Every ordering of `2 m_c` θ's, `m_r` r's, `m_z` z's gives the closed form
/// `(2 m_c - 1)!! r^{2 m_c} D^M f`.
pub fn check_closed_form(max_order: usize) -> Result<IdentityReport, CylError> {
    require_order(max_order, 2, "closed-form check")?;
    let f = NablaTable::build(&axisymmetric_f(), max_order);
    Ok(closed_form_report(&f))
}

fn closed_form_report(f: &NablaTable) -> IdentityReport {
    let mut rep = IdentityReport::new("closed-form");
    let mut cache: BTreeMap<MultiIndexM, Expression> = BTreeMap::new();
    for n in 1..=f.max_order() {
        for (idx, c) in f.level(n) {
            let Some(m) = idx.multi_index() else { continue };
            let expect = cache
                .entry(m)
                .or_insert_with(|| closed_form(f.field(), m))
                .clone();
            rep.record(*c == expect, || Counterexample {
                index: idx.to_string(),
                got: describe(c),
                expected: describe(&expect),
            });
        }
    }
    rep
}

/// Components agree across all orderings of the same index multiset.
pub fn check_permutation_invariance(max_order: usize) -> Result<IdentityReport, CylError> {
    require_order(max_order, 2, "permutation invariance check")?;
    let f = NablaTable::build(&axisymmetric_f(), max_order);
    let g = NablaTable::build(&generic_g(), max_order);
    Ok(permutation_report(&[&f, &g]))
}

fn permutation_report(tables: &[&NablaTable]) -> IdentityReport {
    let mut rep = IdentityReport::new("permutation-invariance");
    for t in tables {
        for n in 1..=t.max_order() {
            let mut first: BTreeMap<(u32, u32, u32), (&IndexList, &Expression)> = BTreeMap::new();
            for (idx, c) in t.level(n) {
                let key = (idx.chi_r(), idx.chi_theta(), idx.chi_z());
                match first.get(&key) {
                    None => {
                        first.insert(key, (idx, c));
                        rep.checked += 1;
                    }
                    Some((idx0, c0)) => rep.record(*c0 == c, || Counterexample {
                        index: format!("{}{idx} vs {}{idx0}", t.field().name(), t.field().name()),
                        got: describe(c),
                        expected: describe(c0),
                    }),
                }
            }
        }
    }
    rep
}

/// The r/z components of `∇^n v` along r/z lower indices are plain partials.
pub fn check_vector_components(max_order: usize) -> IdentityReport {
    let v = VectorTriple::unconstrained(
        FieldSymbol::general("v_r"),
        FieldSymbol::general("v_theta"),
        FieldSymbol::general("v_z"),
    );
    let mut rep = IdentityReport::new("vector-components");
    let mut cases = Vec::new();
    for w in 1..=max_order as u32 {
        for l_r in 0..=w {
            for which in [FrameIndex::R, FrameIndex::Z] {
                cases.push((which, MultiIndexL::new(l_r, w - l_r)));
            }
        }
    }
    let results: Vec<_> = cases
        .par_iter()
        .map(|&(which, l)| (which, l, vector_component(&v, which, l)))
        .collect();
    for (which, l, res) in results {
        let err = res.err();
        rep.record(err.is_none(), || Counterexample {
            index: format!("v_{which} {l}"),
            got: err.map(|e| e.to_string()).unwrap_or_default(),
            expected: "plain partial derivative".into(),
        });
    }
    rep
}

/// Coefficient table for one multi-index of a commutator identity.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorTable {
    pub commutator: String,
    pub m: MultiIndexM,
    pub residual_zero: bool,
    pub integer_coefficients: bool,
    pub unique: bool,
    pub coefficients: Vec<ExtractedCoefficient>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vanishing_basis: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl CommutatorTable {
    fn from_expansion(name: &str, e: CommutatorExpansion) -> Self {
        CommutatorTable {
            commutator: name.to_string(),
            m: e.m,
            residual_zero: e.residual_is_zero(),
            integer_coefficients: e.integer_coefficients(),
            unique: e.unique,
            residual: (!e.residual_is_zero()).then(|| e.residual.to_string()),
            coefficients: e.coefficients,
            vanishing_basis: e.vanishing,
        }
    }

    pub fn ok(&self) -> bool {
        self.residual_zero && self.integer_coefficients
    }
}

/// Decomposes both commutators for every `1 <= |M| <= max_weight`.
pub fn commutator_tables(max_weight: u32) -> Result<Vec<CommutatorTable>, CylError> {
    let f = axisymmetric_f();
    let g = FieldSymbol::axisymmetric("g");
    let u = VectorTriple::divergence_free(
        FieldSymbol::general("u_r"),
        FieldSymbol::general("u_theta"),
        FieldSymbol::general("u_z"),
    );
    let ms = MultiIndexM::up_to_weight(max_weight);
    let dz: Vec<_> = ms
        .par_iter()
        .map(|&m| expand_commutator_dz(m, &g, &f).map(|e| CommutatorTable::from_expansion("dz", e)))
        .collect::<Result<_, _>>()?;
    let tr: Vec<_> = ms
        .par_iter()
        .map(|&m| {
            expand_commutator_transport(m, &u, &f)
                .map(|e| CommutatorTable::from_expansion("transport", e))
        })
        .collect::<Result<_, _>>()?;
    Ok(dz.into_iter().chain(tr).collect())
}

fn commutator_report(name: &str, tables: &[CommutatorTable]) -> IdentityReport {
    let mut rep = IdentityReport::new(&format!("commutator-{name}"));
    for t in tables.iter().filter(|t| t.commutator == name) {
        rep.record(t.ok(), || Counterexample {
            index: t.m.to_string(),
            got: t
                .residual
                .clone()
                .unwrap_or_else(|| "non-integer coefficient".into()),
            expected: "zero residual, integer coefficients".into(),
        });
    }
    rep
}

/// What `verify` should cover.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub max_order: usize,
    pub max_commutator: u32,
    pub connection: Connection,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_order: 6,
            max_commutator: 4,
            connection: Connection::standard(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub max_order: usize,
    pub max_commutator: u32,
    pub status: Status,
    pub identities: Vec<IdentityReport>,
    pub remark: RemarkReport,
    pub commutator_tables: Vec<CommutatorTable>,
    /// One entry per component of `∇^n f`, `1 <= n <= max_order`.
    pub components: Vec<ComponentVerdict>,
}

/// Odd-θ vanishing verdict for a single component of the axisymmetric table.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentVerdict {
    pub index: IndexList,
    pub order: usize,
    pub chi_theta: u32,
    pub expected_zero: bool,
    pub is_zero: bool,
    pub status: Status,
}

fn component_verdicts(f: &NablaTable) -> Vec<ComponentVerdict> {
    let mut out = Vec::new();
    for n in 1..=f.max_order() {
        for (idx, c) in f.level(n) {
            let expected_zero = idx.chi_theta() % 2 == 1;
            let is_zero = c.is_zero();
            out.push(ComponentVerdict {
                index: idx.clone(),
                order: n,
                chi_theta: idx.chi_theta(),
                expected_zero,
                is_zero,
                status: if expected_zero == is_zero {
                    Status::Pass
                } else {
                    Status::Fail
                },
            });
        }
    }
    out
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// First failing identity and its first counterexample.
    pub fn first_counterexample(&self) -> Option<(&str, &Counterexample)> {
        self.identities
            .iter()
            .find_map(|r| r.counterexamples.first().map(|c| (r.identity.as_str(), c)))
    }
}

/// Runs every symbolic identity check.
pub fn verify(opts: &VerifyOptions) -> Result<VerificationReport, CylError> {
    require_order(opts.max_order, 1, "verify-tensors")?;
    let (f, g) = rayon::join(
        || NablaTable::build_with(&axisymmetric_f(), opts.max_order, &opts.connection),
        || NablaTable::build_with(&generic_g(), opts.max_order, &opts.connection),
    );
    let mut identities = vec![odd_vanish_report(&f, Some(&g))];
    if opts.max_order >= 2 {
        identities.push(closed_form_report(&f));
        identities.push(permutation_report(&[&f, &g]));
    } else {
        let note = format!("requires max_order >= 2, got {}", opts.max_order);
        identities.push(IdentityReport::skipped("closed-form", note.clone()));
        identities.push(IdentityReport::skipped("permutation-invariance", note));
    }
    identities.push(check_vector_components(opts.max_order));

    let commutator_tables = if opts.max_commutator >= 1 {
        commutator_tables(opts.max_commutator)?
    } else {
        Vec::new()
    };
    for name in ["dz", "transport"] {
        if opts.max_commutator >= 1 {
            identities.push(commutator_report(name, &commutator_tables));
        } else {
            identities.push(IdentityReport::skipped(
                &format!("commutator-{name}"),
                "max_commutator is 0".into(),
            ));
        }
    }

    let remark = check_remark_m1(
        &FieldSymbol::general("v_theta"),
        &FieldSymbol::axisymmetric("H"),
    );
    let mut remark_id = IdentityReport::new("remark-theta-average");
    remark_id.record(remark.passed(), || Counterexample {
        index: "sum over i = 1, 2".into(),
        got: remark.reduced_integrand.clone(),
        expected: "null integral".into(),
    });
    identities.push(remark_id);

    let status = if identities.iter().all(IdentityReport::passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        max_order: opts.max_order,
        max_commutator: opts.max_commutator,
        status,
        identities,
        remark,
        commutator_tables,
        components: component_verdicts(&f),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_vanish_low_orders() {
        let r = check_odd_vanish(2).unwrap();
        assert_eq!(r.status, Status::Pass);
        // f and g tables, 3 + 9 entries each
        assert_eq!(r.checked, 24);
        assert!(check_odd_vanish(0).is_err());
    }

    #[test]
    fn closed_form_low_orders() {
        let r = check_closed_form(4).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(check_closed_form(1).is_err());
    }

    #[test]
    fn flipped_connection_fails_at_theta_theta() {
        let opts = VerifyOptions {
            max_order: 2,
            max_commutator: 1,
            connection: Connection::with_flipped_radial_sign(),
        };
        let rep = verify(&opts).unwrap();
        assert!(!rep.passed());
        let (id, c) = rep.first_counterexample().unwrap();
        assert_eq!(id, "closed-form");
        assert_eq!(c.index, "(θ,θ)");
    }
}
