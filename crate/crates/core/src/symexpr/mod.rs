//! Exact term algebra over derivative atoms of named scalar fields.
//!
//! An [`Expression`] is a finite sum of terms `c * r^k * A1 * A2 * ...` where
//! `c` is an exact rational, `k` is any integer and each `Ai` is a
//! [`DerivAtom`]: a field symbol with a count of `r`, `z` and `theta`
//! partial derivatives applied to it. Expressions are kept in canonical form
//! at all times (like terms merged, zero terms dropped, atoms sorted), so
//! structural equality is mathematical equality within the algebra and
//! [`Expression::is_zero`] is a complete decision procedure.

mod divergence;
mod render;

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use divergence::{substitute_divergence, VectorTriple};

/// Exact coefficient type.
pub type Coeff = BigRational;

/// Convenience constructor for an integer coefficient.
pub fn int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Convenience constructor for the coefficient `num / den`.
pub fn ratio(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("symbol `{0}` is already declared")]
    DuplicateSymbol(String),
    #[error("vector triple ({0}, {1}, {2}) is not registered as divergence-free")]
    NotDivergenceFree(String, String, String),
}

/// A named scalar field in cylindrical coordinates.
///
/// `depends_theta = false` declares the field axisymmetric: any atom with a
/// `theta` derivative on it is identically zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldSymbol {
    name: Arc<str>,
    depends_theta: bool,
}

impl FieldSymbol {
    pub fn new(name: &str, depends_theta: bool) -> Self {
        FieldSymbol {
            name: Arc::from(name),
            depends_theta,
        }
    }

    /// A field `f(r, z)`.
    pub fn axisymmetric(name: &str) -> Self {
        Self::new(name, false)
    }

    /// A field `g(r, z, theta)`.
    pub fn general(name: &str) -> Self {
        Self::new(name, true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depends_theta(&self) -> bool {
        self.depends_theta
    }
}

/// Hands out [`FieldSymbol`]s with unique names.
#[derive(Debug, Default)]
pub struct SymbolTable {
    names: HashSet<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, depends_theta: bool) -> Result<FieldSymbol, SymError> {
        if !self.names.insert(name.to_string()) {
            return Err(SymError::DuplicateSymbol(name.to_string()));
        }
        Ok(FieldSymbol::new(name, depends_theta))
    }
}

/// Coordinate direction of a partial derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    R,
    Z,
    Theta,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::R, Direction::Z, Direction::Theta];
}

/// `d_r^{n_r} d_z^{n_z} d_theta^{n_theta}` applied to a field symbol.
///
/// Ordering is lexicographic on `(symbol, n_r, n_z, n_theta)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivAtom {
    pub symbol: FieldSymbol,
    pub n_r: u32,
    pub n_z: u32,
    pub n_theta: u32,
}

impl DerivAtom {
    pub fn new(symbol: FieldSymbol, n_r: u32, n_z: u32, n_theta: u32) -> Self {
        DerivAtom {
            symbol,
            n_r,
            n_z,
            n_theta,
        }
    }

    pub fn plain(symbol: FieldSymbol) -> Self {
        Self::new(symbol, 0, 0, 0)
    }

    /// True when the atom is identically zero (theta derivative of an
    /// axisymmetric field).
    pub fn vanishes(&self) -> bool {
        self.n_theta > 0 && !self.symbol.depends_theta
    }

    pub fn differentiated(&self, dir: Direction) -> DerivAtom {
        let mut a = self.clone();
        match dir {
            Direction::R => a.n_r += 1,
            Direction::Z => a.n_z += 1,
            Direction::Theta => a.n_theta += 1,
        }
        a
    }

    pub fn order(&self) -> u32 {
        self.n_r + self.n_z + self.n_theta
    }
}

/// The non-coefficient part of a term: `r^r_power` times a sorted multiset of
/// atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub r_power: i32,
    atoms: Vec<DerivAtom>,
}

impl Monomial {
    pub fn new(r_power: i32, mut atoms: Vec<DerivAtom>) -> Self {
        atoms.sort();
        Monomial { r_power, atoms }
    }

    pub fn one() -> Self {
        Monomial {
            r_power: 0,
            atoms: Vec::new(),
        }
    }

    pub fn atoms(&self) -> &[DerivAtom] {
        &self.atoms
    }

    fn vanishes(&self) -> bool {
        self.atoms.iter().any(DerivAtom::vanishes)
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut atoms = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        atoms.extend_from_slice(&self.atoms);
        atoms.extend_from_slice(&other.atoms);
        Monomial::new(self.r_power + other.r_power, atoms)
    }
}

/// A single `coeff * monomial`, as seen by callers iterating an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Coeff,
    pub monomial: Monomial,
}

impl Term {
    pub fn r_power(&self) -> i32 {
        self.monomial.r_power
    }

    pub fn atoms(&self) -> &[DerivAtom] {
        &self.monomial.atoms
    }
}

/// Canonical sum of terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Expression {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Expression {
    pub fn zero() -> Self {
        Expression::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::monomial(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(int(n))
    }

    /// `c * r^k`.
    pub fn r_pow(c: Coeff, k: i32) -> Self {
        Self::monomial(c, Monomial::new(k, Vec::new()))
    }

    pub fn monomial(c: Coeff, m: Monomial) -> Self {
        let mut e = Expression::zero();
        e.add_term(c, m);
        e
    }

    pub fn atom(a: DerivAtom) -> Self {
        Self::monomial(Coeff::one(), Monomial::new(0, vec![a]))
    }

    /// The undifferentiated field.
    pub fn field(s: &FieldSymbol) -> Self {
        Self::atom(DerivAtom::plain(s.clone()))
    }

    /// `d_r^{n_r} d_z^{n_z} d_theta^{n_theta} s`.
    pub fn deriv(s: &FieldSymbol, n_r: u32, n_z: u32, n_theta: u32) -> Self {
        Self::atom(DerivAtom::new(s.clone(), n_r, n_z, n_theta))
    }

    /// Builds a normalized expression from arbitrary (possibly repeated or
    /// zero) terms.
    pub fn from_terms<I: IntoIterator<Item = (Coeff, Monomial)>>(terms: I) -> Self {
        let mut e = Expression::zero();
        for (c, m) in terms {
            e.add_term(c, m);
        }
        e
    }

    fn add_term(&mut self, c: Coeff, m: Monomial) {
        if c.is_zero() || m.vanishes() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-normalizes. Expressions are always stored normalized, so this is
    /// the identity; it exists so the idempotence law can be stated.
    pub fn normalize(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (c.clone(), m.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(m, c)| Term {
            coeff: c.clone(),
            monomial: m.clone(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial, zero if absent.
    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// If the expression is a single rational constant, returns it.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.r_power == 0 && m.atoms.is_empty()).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Expression::zero();
        }
        Expression {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Multiplies by `r^k`.
    pub fn shift_r(&self, k: i32) -> Self {
        Expression {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.r_power += k;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Expression::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Partial derivative in one coordinate direction (Leibniz rule).
    pub fn d(&self, dir: Direction) -> Self {
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            if dir == Direction::R && m.r_power != 0 {
                let mut dm = m.clone();
                dm.r_power -= 1;
                out.add_term(c * int(m.r_power as i64), dm);
            }
            for i in 0..m.atoms.len() {
                // Repeated atoms are differentiated once per occurrence, which
                // is exactly the multiplicity factor of the power rule.
                let mut atoms = m.atoms.clone();
                atoms[i] = atoms[i].differentiated(dir);
                out.add_term(c.clone(), Monomial::new(m.r_power, atoms));
            }
        }
        out
    }

    /// Applies `d` repeatedly.
    pub fn d_n(&self, dir: Direction, n: u32) -> Self {
        (0..n).fold(self.clone(), |e, _| e.d(dir))
    }

    /// `(1/r) d_r`.
    pub fn d_r_over_r(&self) -> Self {
        self.d(Direction::R).shift_r(-1)
    }

    /// Partial derivative with respect to an atom treated as an independent
    /// variable (jet-space derivative).
    pub fn partial_atom(&self, atom: &DerivAtom) -> Self {
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            let count = m.atoms.iter().filter(|a| *a == atom).count();
            if count == 0 {
                continue;
            }
            let mut atoms = m.atoms.clone();
            let pos = atoms.iter().position(|a| a == atom).unwrap();
            atoms.remove(pos);
            out.add_term(c * int(count as i64), Monomial::new(m.r_power, atoms));
        }
        out
    }

    /// Replaces atoms for which `rule` returns `Some` by the returned
    /// expression.
    pub fn substitute_atoms<F>(&self, mut rule: F) -> Self
    where
        F: FnMut(&DerivAtom) -> Option<Expression>,
    {
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            let mut prod = Expression::r_pow(c.clone(), m.r_power);
            let mut kept = Vec::new();
            for a in &m.atoms {
                match rule(a) {
                    Some(e) => prod = &prod * &e,
                    None => kept.push(a.clone()),
                }
            }
            out += &prod * &Expression::monomial(Coeff::one(), Monomial::new(0, kept));
        }
        out
    }

    /// Keeps only terms satisfying the predicate.
    pub fn filter_terms<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Self {
        Expression {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// All distinct atoms occurring in the expression.
    pub fn atoms(&self) -> Vec<DerivAtom> {
        let mut v: Vec<DerivAtom> = self
            .terms
            .keys()
            .flat_map(|m| m.atoms.iter().cloned())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// True when every coefficient is an integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Numerical value at radius `r`, given the value of every atom.
    pub fn evaluate<F: Fn(&DerivAtom) -> f64>(&self, r: f64, atom_value: F) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                m.atoms
                    .iter()
                    .fold(c * r.powi(m.r_power), |acc, a| acc * atom_value(a))
            })
            .sum()
    }

    /// Largest absolute coefficient, if any.
    pub fn max_abs_coeff(&self) -> Option<Coeff> {
        self.terms.values().map(|c| c.abs()).max()
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

impl<'a> Add<&'a Expression> for &'a Expression {
    type Output = Expression;
    fn add(self, rhs: &Expression) -> Expression {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Expression {
    type Output = Expression;
    fn add(mut self, rhs: Expression) -> Expression {
        self += &rhs;
        self
    }
}

impl AddAssign<&Expression> for Expression {
    fn add_assign(&mut self, rhs: &Expression) {
        for (m, c) in &rhs.terms {
            self.add_term(c.clone(), m.clone());
        }
    }
}

impl AddAssign for Expression {
    fn add_assign(&mut self, rhs: Expression) {
        for (m, c) in rhs.terms {
            self.add_term(c, m);
        }
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        -&self
    }
}

impl<'a> Sub<&'a Expression> for &'a Expression {
    type Output = Expression;
    fn sub(self, rhs: &Expression) -> Expression {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(-c, m.clone());
        }
        out
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Expression> for &'a Expression {
    type Output = Expression;
    fn mul(self, rhs: &Expression) -> Expression {
        let mut out = Expression::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ca * cb, ma.times(mb));
            }
        }
        out
    }
}

impl Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        &self * &rhs
    }
}

/// Normalized sum.
pub fn add(a: &Expression, b: &Expression) -> Expression {
    a + b
}

/// Normalized product.
pub fn mul(a: &Expression, b: &Expression) -> Expression {
    a * b
}

/// Partial derivative of `e` in direction `dir`.
pub fn d(e: &Expression, dir: Direction) -> Expression {
    e.d(dir)
}

pub fn is_zero(e: &Expression) -> bool {
    e.is_zero()
}
