//! θ-average cancellation of `Σ_i H ∂_{x_i}((∂_θ v_θ)/r) ∂_{x_i} H`.
//!
//! Cartesian derivatives bring in `cos θ` and `sin θ`, which live only in
//! [`TrigExpr`]: a polynomial in `cos θ` and at most one power of `sin θ`
//! with [`Expression`] coefficients, reduced by `sin² = 1 − cos²`. An
//! integral over the annulus vanishes for all compactly supported fields
//! exactly when its density (including the measure factor `r`) is a null
//! Lagrangian; that is decided with Euler operators in `(r, θ, z)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::symexpr::{int, ratio, Coeff, DerivAtom, Direction, Expression, FieldSymbol};

/// `Σ cos^a θ · sin^b θ · E_{a,b}` with `b ∈ {0, 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigExpr {
    terms: BTreeMap<(u32, u32), Expression>,
}

impl TrigExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_expr(e: Expression) -> Self {
        let mut t = Self::zero();
        t.add_term(0, 0, e);
        t
    }

    pub fn cos() -> Self {
        let mut t = Self::zero();
        t.add_term(1, 0, Expression::one());
        t
    }

    pub fn sin() -> Self {
        let mut t = Self::zero();
        t.add_term(0, 1, Expression::one());
        t
    }

    fn add_term(&mut self, a: u32, b: u32, e: Expression) {
        if e.is_zero() {
            return;
        }
        if b >= 2 {
            self.add_term(a, b - 2, e.clone());
            self.add_term(a + 2, b - 2, -e);
            return;
        }
        let slot = self.terms.entry((a, b)).or_default();
        *slot += e;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient when no trigonometric factor remains.
    pub fn trig_free(&self) -> Option<Expression> {
        match self.terms.len() {
            0 => Some(Expression::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn map(&self, f: impl Fn(&Expression) -> Expression) -> Self {
        let mut t = Self::zero();
        for (&(a, b), e) in &self.terms {
            t.add_term(a, b, f(e));
        }
        t
    }

    pub fn add(&self, o: &TrigExpr) -> Self {
        let mut t = self.clone();
        for (&(a, b), e) in &o.terms {
            t.add_term(a, b, e.clone());
        }
        t
    }

    pub fn sub(&self, o: &TrigExpr) -> Self {
        self.add(&o.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn mul(&self, o: &TrigExpr) -> Self {
        let mut t = Self::zero();
        for (&(a1, b1), e1) in &self.terms {
            for (&(a2, b2), e2) in &o.terms {
                t.add_term(a1 + a2, b1 + b2, e1 * e2);
            }
        }
        t
    }

    pub fn mul_expr(&self, e: &Expression) -> Self {
        self.map(|x| x * e)
    }

    /// Total derivative; in θ it acts on both the trig factors and the atoms.
    pub fn d(&self, dir: Direction) -> Self {
        let mut t = Self::zero();
        for (&(a, b), e) in &self.terms {
            t.add_term(a, b, e.d(dir));
            if dir == Direction::Theta {
                if a > 0 {
                    t.add_term(a - 1, b + 1, e.scale(&int(-(a as i64))));
                }
                if b > 0 {
                    t.add_term(a + 1, b - 1, e.scale(&int(b as i64)));
                }
            }
        }
        t
    }

    pub fn d_n(&self, dir: Direction, n: u32) -> Self {
        (0..n).fold(self.clone(), |t, _| t.d(dir))
    }

    pub fn partial_atom(&self, atom: &DerivAtom) -> Self {
        self.map(|e| e.partial_atom(atom))
    }

    pub fn atoms(&self) -> Vec<DerivAtom> {
        let mut v: Vec<DerivAtom> = self.terms.values().flat_map(|e| e.atoms()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `(1/2π) ∫ · dθ` over the trig factors, coefficients left untouched.
    pub fn theta_average(&self) -> Expression {
        let mut out = Expression::zero();
        for (&(a, b), e) in &self.terms {
            if b == 0 && a % 2 == 0 {
                let num: i64 = (1..a as i64).step_by(2).product();
                let den: i64 = (2..=a as i64).step_by(2).product();
                out += e.scale(&ratio(num, den));
            }
        }
        out
    }

    /// Drops every term containing an atom of a θ-dependent field.
    fn without_theta_fields(&self) -> Self {
        self.map(|e| e.filter_terms(|m| m.atoms().iter().all(|a| !a.symbol.depends_theta())))
    }
}

fn euler_3d(l: &TrigExpr, sym: &FieldSymbol) -> TrigExpr {
    let mut out = TrigExpr::zero();
    for a in l.atoms().into_iter().filter(|a| &a.symbol == sym) {
        let mut t = l
            .partial_atom(&a)
            .d_n(Direction::R, a.n_r)
            .d_n(Direction::Z, a.n_z)
            .d_n(Direction::Theta, a.n_theta);
        if a.order() % 2 == 1 {
            t = t.scale(&int(-1));
        }
        out = out.add(&t);
    }
    out
}

/// Euler operator in `(r, z)` only, for an axisymmetric field.
fn euler_rz(l: &TrigExpr, sym: &FieldSymbol) -> TrigExpr {
    let mut out = TrigExpr::zero();
    for a in l.atoms().into_iter().filter(|a| &a.symbol == sym) {
        let mut t = l
            .partial_atom(&a)
            .d_n(Direction::R, a.n_r)
            .d_n(Direction::Z, a.n_z);
        if (a.n_r + a.n_z) % 2 == 1 {
            t = t.scale(&int(-1));
        }
        out = out.add(&t);
    }
    out
}

/// True when `∫_0^{2π} g dθ` vanishes at every `(r, z)` for all fields.
fn theta_average_vanishes(g: &TrigExpr) -> bool {
    let mut families: BTreeMap<(FieldSymbol, u32, u32), Vec<DerivAtom>> = BTreeMap::new();
    for a in g.atoms().into_iter().filter(|a| a.symbol.depends_theta()) {
        families
            .entry((a.symbol.clone(), a.n_r, a.n_z))
            .or_default()
            .push(a);
    }
    for atoms in families.values() {
        let mut e = TrigExpr::zero();
        for a in atoms {
            let mut t = g.partial_atom(a).d_n(Direction::Theta, a.n_theta);
            if a.n_theta % 2 == 1 {
                t = t.scale(&int(-1));
            }
            e = e.add(&t);
        }
        if !e.is_zero() {
            return false;
        }
    }
    g.without_theta_fields().theta_average().is_zero()
}

/// True when `∫ l dr dθ dz` vanishes for all compactly supported fields.
pub fn is_null_integral(l: &TrigExpr) -> bool {
    let mut syms: Vec<FieldSymbol> = l.atoms().into_iter().map(|a| a.symbol).collect();
    syms.dedup();
    for s in &syms {
        let ok = if s.depends_theta() {
            euler_3d(l, s).is_zero()
        } else {
            theta_average_vanishes(&euler_rz(l, s))
        };
        if !ok {
            return false;
        }
    }
    l.map(|e| e.filter_terms(|m| m.atoms().is_empty()))
        .theta_average()
        .is_zero()
}

/// `cos θ ∂_r − (sin θ / r) ∂_θ`.
pub fn d_x1(t: &TrigExpr) -> TrigExpr {
    let a = TrigExpr::cos().mul(&t.d(Direction::R));
    let b = TrigExpr::sin()
        .mul(&t.d(Direction::Theta))
        .map(|e| e.shift_r(-1));
    a.sub(&b)
}

/// `sin θ ∂_r + (cos θ / r) ∂_θ`.
pub fn d_x2(t: &TrigExpr) -> TrigExpr {
    let a = TrigExpr::sin().mul(&t.d(Direction::R));
    let b = TrigExpr::cos()
        .mul(&t.d(Direction::Theta))
        .map(|e| e.shift_r(-1));
    a.add(&b)
}

/// `H ∂_{x_i}((∂_θ v_θ)/r) ∂_{x_i} H` for `i ∈ {1, 2}`.
pub fn remark_term(i: u8, v_theta: &FieldSymbol, h: &FieldSymbol) -> TrigExpr {
    let a = TrigExpr::from_expr(Expression::deriv(v_theta, 0, 0, 1).shift_r(-1));
    let hh = TrigExpr::from_expr(Expression::field(h));
    let dx = if i == 1 { d_x1 } else { d_x2 };
    hh.mul(&dx(&a)).mul(&dx(&hh))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "NOT-ZERO")]
    NotZero,
}

/// Verdict on `∫ H ∂_{x_i}(...) ∂_{x_i} H` alone.
pub fn remark_single_term(i: u8, v_theta: &FieldSymbol, h: &FieldSymbol) -> Verdict {
    let density = remark_term(i, v_theta, h).map(|e| e.shift_r(1));
    if is_null_integral(&density) {
        Verdict::Pass
    } else {
        Verdict::NotZero
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleTerm {
    pub i: u8,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemarkReport {
    pub verdict: Verdict,
    pub integrand_identically_zero: bool,
    pub trig_free_after_summation: bool,
    pub reduced_integrand: String,
    /// `r S - ∂_r P` equals `r T` with `P = ½ r A ∂_r(H²)`.
    pub radial_integration_by_parts: bool,
    /// `T = -½ (∂_θ v_θ / r) (∂_rr + ∂_r / r)(H²)`.
    pub paired_term: String,
    pub paired_term_zero_theta_average: bool,
    /// `r S = ∂_r P + ∂_θ Q` with `Q = -½ v_θ (∂_rr + ∂_r / r)(H²)`.
    pub divergence_certificate: bool,
    pub sum_null_integral: bool,
    pub single_terms: Vec<SingleTerm>,
}

impl RemarkReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Checks that `Σ_{i=1,2} H ∂_{x_i}((∂_θ v_θ)/r) ∂_{x_i} H` integrates to
/// zero over the annulus for axisymmetric `H`.
pub fn check_remark_m1(v_theta: &FieldSymbol, h: &FieldSymbol) -> RemarkReport {
    let sum = remark_term(1, v_theta, h).add(&remark_term(2, v_theta, h));
    let density = sum.map(|e| e.shift_r(1));
    let reduced = sum.trig_free();

    let half = ratio(1, 2);
    let hsq = Expression::field(h).pow(2);
    let a = Expression::deriv(v_theta, 0, 0, 1).shift_r(-1);
    let k = &hsq.d_n(Direction::R, 2) + &hsq.d(Direction::R).shift_r(-1);
    let p = (&a * &hsq.d(Direction::R)).shift_r(1).scale(&half);
    let q = (&Expression::field(v_theta) * &k).scale(&-half.clone());
    let t = (&a * &k).scale(&-half);

    let dp = TrigExpr::from_expr(p.d(Direction::R));
    let dq = TrigExpr::from_expr(q).d(Direction::Theta);
    let rt = TrigExpr::from_expr(t.shift_r(1));
    let radial = density.sub(&dp) == rt;
    let certificate = density == dp.add(&dq);
    let paired_null = is_null_integral(&rt);
    let sum_null = is_null_integral(&density);

    let single_terms = [1u8, 2]
        .iter()
        .map(|&i| SingleTerm {
            i,
            verdict: remark_single_term(i, v_theta, h),
        })
        .collect();

    let ok = reduced.is_some() && radial && certificate && paired_null && sum_null;
    RemarkReport {
        verdict: if ok { Verdict::Pass } else { Verdict::NotZero },
        integrand_identically_zero: sum.is_zero(),
        trig_free_after_summation: reduced.is_some(),
        reduced_integrand: match &reduced {
            Some(e) if e.is_zero() => "0".into(),
            Some(e) => e.to_string(),
            None => "(trigonometric factors remain)".into(),
        },
        radial_integration_by_parts: radial,
        paired_term: if t.is_zero() {
            "0".into()
        } else {
            t.to_string()
        },
        paired_term_zero_theta_average: paired_null,
        divergence_certificate: certificate,
        sum_null_integral: sum_null,
        single_terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> FieldSymbol {
        FieldSymbol::general("v_theta")
    }
    fn h() -> FieldSymbol {
        FieldSymbol::axisymmetric("H")
    }

    #[test]
    fn pythagorean_reduction() {
        let one = TrigExpr::cos()
            .mul(&TrigExpr::cos())
            .add(&TrigExpr::sin().mul(&TrigExpr::sin()));
        assert_eq!(one, TrigExpr::from_expr(Expression::one()));
    }

    #[test]
    fn theta_derivatives_of_trig() {
        assert_eq!(
            TrigExpr::cos().d(Direction::Theta),
            TrigExpr::sin().scale(&int(-1))
        );
        assert_eq!(TrigExpr::sin().d(Direction::Theta), TrigExpr::cos());
    }

    #[test]
    fn averages() {
        let c2 = TrigExpr::cos().mul(&TrigExpr::cos());
        assert_eq!(c2.theta_average().as_constant(), Some(ratio(1, 2)));
        let c4 = c2.mul(&c2);
        assert_eq!(c4.theta_average().as_constant(), Some(ratio(3, 8)));
        assert!(TrigExpr::cos()
            .mul(&TrigExpr::sin())
            .theta_average()
            .is_zero());
    }

    #[test]
    fn summed_integrand_is_trig_free() {
        let rep = check_remark_m1(&v(), &h());
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.trig_free_after_summation);
        assert!(rep.radial_integration_by_parts);
        assert!(rep.divergence_certificate);
        assert!(rep.paired_term_zero_theta_average);
        assert!(!rep.integrand_identically_zero);
        assert!(rep
            .single_terms
            .iter()
            .all(|s| s.verdict == Verdict::NotZero));
    }

    #[test]
    fn axisymmetric_velocity_gives_zero_integrand() {
        let rep = check_remark_m1(&FieldSymbol::axisymmetric("v_theta"), &h());
        assert!(rep.integrand_identically_zero);
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn single_term_is_not_null() {
        assert_eq!(remark_single_term(1, &v(), &h()), Verdict::NotZero);
    }

    #[test]
    fn null_lagrangian_detection() {
        let g = FieldSymbol::general("g");
        // exact θ-derivative
        let l = TrigExpr::from_expr(Expression::field(&g).pow(2)).d(Direction::Theta);
        assert!(is_null_integral(&l));
        // positive density
        let l = TrigExpr::from_expr(Expression::field(&g).pow(2));
        assert!(!is_null_integral(&l));
        // cos θ times an axisymmetric density averages out
        let l = TrigExpr::cos().mul_expr(&Expression::field(&h()).pow(2));
        assert!(is_null_integral(&l));
    }
}
