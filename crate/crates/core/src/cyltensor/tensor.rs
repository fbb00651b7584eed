use std::collections::BTreeMap;

use rayon::prelude::*;

use super::frame::{odd_double_factorial, FrameIndex, IndexList, MultiIndexL, MultiIndexM};
use super::CylError;
use crate::symexpr::{int, Direction, Expression, FieldSymbol, VectorTriple};

/// Christoffel symbols of the cylindrical covariant frame.
///
/// The only non-zero entries are `Γ^r_θθ = -r` and `Γ^θ_rθ = Γ^θ_θr = 1/r`.
/// A connection with a flipped `Γ^r_θθ` sign can be constructed to exercise
/// the failure paths of the checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Connection {
    flip_radial: bool,
}

impl Connection {
    pub fn standard() -> Self {
        Connection { flip_radial: false }
    }

    /// The standard table with the sign of `Γ^r_θθ` flipped.
    pub fn with_flipped_radial_sign() -> Self {
        Connection { flip_radial: true }
    }

    pub fn is_standard(&self) -> bool {
        !self.flip_radial
    }

    pub fn symbol(&self, upper: FrameIndex, lower1: FrameIndex, lower2: FrameIndex) -> Expression {
        use FrameIndex::*;
        match (upper, lower1, lower2) {
            (R, Theta, Theta) => Expression::r_pow(int(if self.flip_radial { 1 } else { -1 }), 1),
            (Theta, R, Theta) | (Theta, Theta, R) => Expression::r_pow(int(1), -1),
            _ => Expression::zero(),
        }
    }
}

/// `Γ^upper_{lower1 lower2}` for the standard cylindrical frame.
pub fn christoffel(upper: FrameIndex, lower1: FrameIndex, lower2: FrameIndex) -> Expression {
    Connection::standard().symbol(upper, lower1, lower2)
}

/// All covariant components of `∇^n f` for `n = 1..=max_order`.
#[derive(Clone, Debug)]
pub struct NablaTable {
    field: FieldSymbol,
    levels: Vec<BTreeMap<IndexList, Expression>>,
}

impl NablaTable {
    pub fn build(f: &FieldSymbol, max_order: usize) -> Self {
        Self::build_with(f, max_order, &Connection::standard())
    }

    pub fn build_with(f: &FieldSymbol, max_order: usize, conn: &Connection) -> Self {
        let mut levels: Vec<BTreeMap<IndexList, Expression>> = Vec::with_capacity(max_order);
        if max_order == 0 {
            return NablaTable {
                field: f.clone(),
                levels,
            };
        }
        let base: BTreeMap<IndexList, Expression> = FrameIndex::ALL
            .iter()
            .map(|&i| {
                (
                    IndexList::new(vec![i]),
                    Expression::field(f).d(i.direction()),
                )
            })
            .collect();
        levels.push(base);
        for n in 1..max_order {
            let prev = &levels[n - 1];
            let lists = IndexList::all_of_length(n + 1);
            let next: BTreeMap<IndexList, Expression> = lists
                .into_par_iter()
                .map(|l| {
                    let c = covariant_step(prev, &l, conn);
                    (l, c)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect();
            levels.push(next);
        }
        NablaTable {
            field: f.clone(),
            levels,
        }
    }

    pub fn field(&self) -> &FieldSymbol {
        &self.field
    }

    pub fn max_order(&self) -> usize {
        self.levels.len()
    }

    /// Covariant component, `None` if the list is longer than the table.
    pub fn get(&self, idx: &IndexList) -> Option<&Expression> {
        if idx.is_empty() {
            return None;
        }
        self.levels.get(idx.len() - 1)?.get(idx)
    }

    /// Components of order `n`, sorted by index list.
    pub fn level(&self, n: usize) -> impl Iterator<Item = (&IndexList, &Expression)> {
        self.levels
            .get(n.wrapping_sub(1))
            .into_iter()
            .flat_map(|m| m.iter())
    }
}

fn covariant_step(
    prev: &BTreeMap<IndexList, Expression>,
    l: &IndexList,
    conn: &Connection,
) -> Expression {
    let n = l.len() - 1;
    let j = l.indices()[n];
    let head = IndexList::new(l.indices()[..n].to_vec());
    let mut out = prev[&head].d(j.direction());
    for (i, &ii) in head.indices().iter().enumerate() {
        for s in FrameIndex::ALL {
            let g = conn.symbol(s, ii, j);
            if g.is_zero() {
                continue;
            }
            out = &out - &(&g * &prev[&head.with(i, s)]);
        }
    }
    out
}

/// `(∇^n f)_{ι1…ιn}` in the covariant frame.
pub fn nabla_component(f: &FieldSymbol, idx: &IndexList) -> Expression {
    if idx.is_empty() {
        return Expression::field(f);
    }
    NablaTable::build(f, idx.len())
        .get(idx)
        .cloned()
        .expect("table covers the requested order")
}

/// Converts a covariant scalar-tensor component to the unit frame.
pub fn to_unit_frame(covariant: &Expression, idx: &IndexList) -> Expression {
    covariant.shift_r(-(idx.chi_theta() as i32))
}

/// `d_z^{m_z} d_r^{m_r} (d_r / r)^{m_c}` applied to an expression.
pub fn compound_derivative(e: &Expression, m: MultiIndexM) -> Expression {
    let mut out = e.clone();
    for _ in 0..m.m_c {
        out = out.d_r_over_r();
    }
    out.d_n(Direction::R, m.m_r).d_n(Direction::Z, m.m_z)
}

/// `d_z^{l_z} d_r^{l_r}` applied to an expression.
pub fn axisymmetric_gradient(e: &Expression, l: MultiIndexL) -> Expression {
    e.d_n(Direction::R, l.l_r).d_n(Direction::Z, l.l_z)
}

/// `(2 m_c - 1)!! r^{2 m_c} D^M f`.
pub fn closed_form(f: &FieldSymbol, m: MultiIndexM) -> Expression {
    let c = int(odd_double_factorial(m.m_c) as i64);
    compound_derivative(&Expression::field(f), m)
        .shift_r(2 * m.m_c as i32)
        .scale(&c)
}

/// Contravariant-upper, covariant-lower components of `∇^n v` for a vector
/// field given by its unit-frame components, `n = 0..=max_order`.
#[derive(Clone, Debug)]
pub struct VectorTable {
    levels: Vec<BTreeMap<(FrameIndex, IndexList), Expression>>,
}

impl VectorTable {
    pub fn build(v: &VectorTriple, max_order: usize) -> Self {
        let conn = Connection::standard();
        let mut base = BTreeMap::new();
        base.insert(
            (FrameIndex::R, IndexList::new(vec![])),
            Expression::field(&v.r),
        );
        base.insert(
            (FrameIndex::Theta, IndexList::new(vec![])),
            Expression::field(&v.theta).shift_r(-1),
        );
        base.insert(
            (FrameIndex::Z, IndexList::new(vec![])),
            Expression::field(&v.z),
        );
        let mut levels = vec![base];
        for n in 0..max_order {
            let prev = &levels[n];
            let keys: Vec<(FrameIndex, IndexList)> = FrameIndex::ALL
                .iter()
                .flat_map(|&k| {
                    IndexList::all_of_length(n + 1)
                        .into_iter()
                        .map(move |l| (k, l))
                })
                .collect();
            let next = keys
                .into_par_iter()
                .map(|(k, l)| {
                    let c = vector_step(prev, k, &l, &conn);
                    ((k, l), c)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect();
            levels.push(next);
        }
        VectorTable { levels }
    }

    /// Covariant-frame component `T^k_{ι…}`.
    pub fn get(&self, k: FrameIndex, idx: &IndexList) -> Option<&Expression> {
        self.levels.get(idx.len())?.get(&(k, idx.clone()))
    }

    /// Unit-frame component on `e_k ⊗ e_{ι1} ⊗ …`.
    pub fn unit(&self, k: FrameIndex, idx: &IndexList) -> Option<Expression> {
        let c = self.get(k, idx)?;
        let up = if k == FrameIndex::Theta { 1 } else { 0 };
        Some(c.shift_r(up - idx.chi_theta() as i32))
    }
}

fn vector_step(
    prev: &BTreeMap<(FrameIndex, IndexList), Expression>,
    k: FrameIndex,
    l: &IndexList,
    conn: &Connection,
) -> Expression {
    let n = l.len() - 1;
    let j = l.indices()[n];
    let head = IndexList::new(l.indices()[..n].to_vec());
    let mut out = prev[&(k, head.clone())].d(j.direction());
    for s in FrameIndex::ALL {
        let g = conn.symbol(k, s, j);
        if !g.is_zero() {
            out = &out + &(&g * &prev[&(s, head.clone())]);
        }
    }
    for (i, &ii) in head.indices().iter().enumerate() {
        for s in FrameIndex::ALL {
            let g = conn.symbol(s, ii, j);
            if !g.is_zero() {
                out = &out - &(&g * &prev[&(k, head.with(i, s))]);
            }
        }
    }
    out
}

/// `d_z^{l_z} d_r^{l_r} v_k` for `k ∈ {r, z}`, verified against every
/// ordering of the matching unit-frame component of `∇^{|L|} v`.
pub fn vector_component(
    v: &VectorTriple,
    which: FrameIndex,
    l: MultiIndexL,
) -> Result<Expression, CylError> {
    let sym = match which {
        FrameIndex::R => &v.r,
        FrameIndex::Z => &v.z,
        FrameIndex::Theta => {
            return Err(CylError::Precondition(
                "vector_component is defined for the r and z components only".into(),
            ))
        }
    };
    let expect = axisymmetric_gradient(&Expression::field(sym), l);
    let table = VectorTable::build(v, l.weight() as usize);
    for idx in IndexList::orderings(MultiIndexM::new(0, l.l_r, l.l_z)) {
        let got = table.unit(which, &idx).expect("table covers order");
        if got != expect {
            return Err(CylError::Mismatch {
                identity: "vector-component".into(),
                index: format!("{which};{idx}"),
                got: got.to_string(),
                expected: expect.to_string(),
            });
        }
    }
    if l.weight() == 0 {
        let got = table.unit(which, &IndexList::new(vec![])).unwrap();
        debug_assert_eq!(got, expect);
    }
    Ok(expect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use FrameIndex::*;

    fn f() -> FieldSymbol {
        FieldSymbol::axisymmetric("f")
    }

    #[test]
    fn christoffel_table() {
        assert_eq!(christoffel(R, Theta, Theta).to_string(), "-r");
        assert_eq!(christoffel(Theta, R, Theta).to_string(), "r^-1");
        assert_eq!(christoffel(Theta, Theta, R).to_string(), "r^-1");
        assert!(christoffel(Z, R, Z).is_zero());
        let mut nonzero = 0;
        for a in FrameIndex::ALL {
            for b in FrameIndex::ALL {
                for c in FrameIndex::ALL {
                    assert_eq!(christoffel(a, b, c), christoffel(a, c, b));
                    if !christoffel(a, b, c).is_zero() {
                        nonzero += 1;
                    }
                }
            }
        }
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn second_order_components() {
        let tt = nabla_component(&f(), &IndexList::new(vec![Theta, Theta]));
        assert_eq!(tt, Expression::deriv(&f(), 1, 0, 0).shift_r(1));
        assert!(nabla_component(&f(), &IndexList::new(vec![R, Theta])).is_zero());
        assert_eq!(
            nabla_component(&f(), &IndexList::new(vec![Z, Z])),
            Expression::deriv(&f(), 0, 2, 0)
        );
        let g = FieldSymbol::general("g");
        assert_eq!(
            nabla_component(&g, &IndexList::new(vec![Z, Z])),
            Expression::deriv(&g, 0, 2, 0)
        );
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            closed_form(&f(), MultiIndexM::new(1, 0, 0)),
            Expression::deriv(&f(), 1, 0, 0).shift_r(1)
        );
        // 3 r^4 (d_r/r)^2 f = 3 r^2 d_r^2 f - 3 r d_r f
        let expect = &Expression::deriv(&f(), 2, 0, 0).shift_r(2).scale(&int(3))
            - &Expression::deriv(&f(), 1, 0, 0).shift_r(1).scale(&int(3));
        assert_eq!(closed_form(&f(), MultiIndexM::new(2, 0, 0)), expect);
        assert_eq!(
            closed_form(&f(), MultiIndexM::new(1, 1, 1)),
            nabla_component(&f(), &IndexList::new(vec![Theta, Theta, R, Z]))
        );
    }

    #[test]
    fn unit_frame_scaling() {
        let idx = IndexList::new(vec![Theta, Theta]);
        let unit = to_unit_frame(&nabla_component(&f(), &idx), &idx);
        assert_eq!(unit, Expression::deriv(&f(), 1, 0, 0).shift_r(-1));
    }

    fn velocity() -> VectorTriple {
        VectorTriple::unconstrained(
            FieldSymbol::general("v_r"),
            FieldSymbol::general("v_theta"),
            FieldSymbol::general("v_z"),
        )
    }

    #[test]
    fn vector_components_along_flat_directions() {
        let v = velocity();
        assert_eq!(
            vector_component(&v, R, MultiIndexL::new(1, 0)).unwrap(),
            Expression::deriv(&v.r, 1, 0, 0)
        );
        assert_eq!(
            vector_component(&v, Z, MultiIndexL::new(0, 2)).unwrap(),
            Expression::deriv(&v.z, 0, 2, 0)
        );
        assert_eq!(
            vector_component(&v, R, MultiIndexL::new(2, 1)).unwrap(),
            Expression::deriv(&v.r, 2, 1, 0)
        );
        assert!(vector_component(&v, Theta, MultiIndexL::new(1, 0)).is_err());
    }

    #[test]
    fn vector_second_derivative_with_angular_indices() {
        let v = velocity();
        let t = VectorTable::build(&v, 3);
        // e_z ⊗ e_θ ⊗ e_θ : d_r v_z / r + d_θ^2 v_z / r^2
        let got = t.unit(Z, &IndexList::new(vec![Theta, Theta])).unwrap();
        let expect = &Expression::deriv(&v.z, 1, 0, 0).shift_r(-1)
            + &Expression::deriv(&v.z, 0, 0, 2).shift_r(-2);
        assert_eq!(got, expect);

        // e_z ⊗ e_r ⊗ e_θ ⊗ e_θ : d_r(d_r v_z / r) + (d_θ / r^2)(d_θ d_r v_z - 2 d_θ v_z / r)
        let got = t.unit(Z, &IndexList::new(vec![R, Theta, Theta])).unwrap();
        let a = Expression::deriv(&v.z, 1, 0, 0).shift_r(-1).d(Direction::R);
        let inner = &Expression::deriv(&v.z, 1, 0, 1)
            - &Expression::deriv(&v.z, 0, 0, 1).shift_r(-1).scale(&int(2));
        let b = inner.d(Direction::Theta).shift_r(-2);
        assert_eq!(got, &a + &b);

        // e_z ⊗ e_θ ⊗ e_θ ⊗ e_z : d_z(d_r v_z / r) + d_θ^2 d_z v_z / r^2
        let got = t.unit(Z, &IndexList::new(vec![Theta, Theta, Z])).unwrap();
        let expect = &Expression::deriv(&v.z, 1, 1, 0).shift_r(-1)
            + &Expression::deriv(&v.z, 0, 1, 2).shift_r(-2);
        assert_eq!(got, expect);
    }
}
