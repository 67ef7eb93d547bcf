//! Symbolic parameters and the coefficient ring `Q(i)[params]`.
//!
//! A [`ParamScalar`] is a polynomial in named parameters (`f1`, `a7`, `mu`, ...)
//! with Gaussian-rational coefficients. Parameters are constants of the
//! problem: differentiation and substitution in phase variables never touch
//! them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::gaussian::{GaussianRational, Rational};

/// How a parameter behaves under complex conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// Self-conjugate, e.g. the potential coefficients `f1..f4`.
    Real,
    /// A complex parameter `a7`; its partner is `a7c`.
    Complex,
    /// The conjugate `a7c` of a complex parameter `a7`.
    Conjugate,
}

/// A named parameter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    kind: SymbolKind,
}

impl Symbol {
    pub fn real(name: &str) -> Self {
        Self { name: name.into(), kind: SymbolKind::Real }
    }

    /// A complex parameter; its conjugate partner is named `<name>c`.
    pub fn complex(name: &str) -> Self {
        Self { name: name.into(), kind: SymbolKind::Complex }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    /// The conjugate partner. Real symbols map to themselves.
    pub fn conjugate(&self) -> Symbol {
        match self.kind {
            SymbolKind::Real => self.clone(),
            SymbolKind::Complex => Symbol {
                name: format!("{}c", self.name).into(),
                kind: SymbolKind::Conjugate,
            },
            SymbolKind::Conjugate => Symbol {
                name: self.name[..self.name.len() - 1].into(),
                kind: SymbolKind::Complex,
            },
        }
    }

    /// Names of the form `<letters><digits>c` denote the conjugate of
    /// `<letters><digits>`.
    pub fn conjugate_base(name: &str) -> Option<&str> {
        let base = name.strip_suffix('c')?;
        base.chars().last().filter(char::is_ascii_digit).map(|_| base)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A product of parameter powers, sorted by symbol with no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ParamMonomial(Vec<(Symbol, u32)>);

impl ParamMonomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Self(vec![(s, 1)])
    }

    pub fn from_powers(mut powers: Vec<(Symbol, u32)>) -> Self {
        powers.retain(|(_, e)| *e > 0);
        powers.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(powers.len());
        for (s, e) in powers {
            match out.last_mut() {
                Some((last, le)) if *last == s => *le += e,
                _ => out.push((s, e)),
            }
        }
        Self(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn powers(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::new();
        let mut j = 0;
        for (s, e) in &self.0 {
            let mut e = *e;
            if j < other.0.len() && other.0[j].0 == *s {
                if other.0[j].1 > e {
                    return None;
                }
                e -= other.0[j].1;
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *s {
                return None;
            }
            if e > 0 {
                out.push((s.clone(), e));
            }
        }
        (j == other.0.len()).then_some(Self(out))
    }

    pub fn conjugate(&self) -> Self {
        Self::from_powers(self.0.iter().map(|(s, e)| (s.conjugate(), *e)).collect())
    }

    /// Lexicographic comparison with earlier symbols dominating and a larger
    /// exponent ranking higher.
    fn lex_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }

    /// Graded lexicographic order; the leading term of a scalar is its
    /// maximum under this order.
    pub fn grlex_cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

/// Storage order: ascending degree, and within a degree the lex-larger
/// monomial first, so `f1^2` prints before `f1*f2`.
impl Ord for ParamMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.lex_cmp(self))
    }
}

impl PartialOrd for ParamMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, e) in &self.0 {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in parameters with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ParamScalar {
    terms: BTreeMap<ParamMonomial, GaussianRational>,
}

impl ParamScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ParamMonomial::one(), c);
        }
        Self { terms }
    }

    pub fn rational(r: Rational) -> Self {
        Self::constant(GaussianRational::real(r))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::term(ParamMonomial::var(s), GaussianRational::one())
    }

    /// Shorthand for a real parameter.
    pub fn real_symbol(name: &str) -> Self {
        Self::symbol(Symbol::real(name))
    }

    pub fn term(m: ParamMonomial, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMonomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// The value when no parameter occurs (zero counts as numeric).
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The rational value when numeric and real.
    pub fn as_rational(&self) -> Option<Rational> {
        self.as_constant().filter(|c| c.is_real()).map(|c| c.re)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn add_term(&mut self, m: ParamMonomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, rhs: &ParamScalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign_ref(&mut self, rhs: &ParamScalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    /// Adds `a * b` into `self` without materializing the product.
    pub fn add_mul(&mut self, a: &ParamScalar, b: &ParamScalar) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), &(ca * cb));
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&GaussianRational::real(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Conjugates the numeric parts and maps each parameter to its partner.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.conjugate(), &c.conj());
        }
        out
    }

    /// Replaces parameters by scalars; symbols absent from `values` are kept.
    pub fn substitute(&self, values: &BTreeMap<Symbol, ParamScalar>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = Self::constant(c.clone());
            for (s, e) in m.powers() {
                let factor = match values.get(s) {
                    Some(v) => v.pow(*e),
                    None => Self::term(
                        ParamMonomial::from_powers(vec![(s.clone(), *e)]),
                        GaussianRational::one(),
                    ),
                };
                acc = &acc * &factor;
            }
            out.add_assign_ref(&acc);
        }
        out
    }

    fn leading(&self) -> Option<(&ParamMonomial, &GaussianRational)> {
        self.terms.iter().max_by(|a, b| a.0.grlex_cmp(b.0))
    }

    /// Multivariate division by a single divisor under graded lex order.
    /// The remainder is zero exactly when `divisor` divides `self`.
    pub fn div_rem(&self, divisor: &ParamScalar) -> Option<(ParamScalar, ParamScalar)> {
        let (lm, lc) = divisor.leading()?;
        let lc_inv = lc.inv()?;
        let mut rest = self.clone();
        let mut quotient = Self::zero();
        let mut remainder = Self::zero();
        while let Some((m, c)) = rest.leading().map(|(m, c)| (m.clone(), c.clone())) {
            match m.checked_div(lm) {
                Some(qm) => {
                    let t = Self::term(qm, &c * &lc_inv);
                    rest = &rest - &(&t * divisor);
                    quotient.add_assign_ref(&t);
                }
                None => {
                    rest.add_term(m.clone(), &-&c);
                    remainder.add_term(m, &c);
                }
            }
        }
        Some((quotient, remainder))
    }
}

impl From<GaussianRational> for ParamScalar {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl From<Rational> for ParamScalar {
    fn from(r: Rational) -> Self {
        Self::rational(r)
    }
}

impl<'a> Add<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: &ParamScalar) -> ParamScalar {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: &ParamScalar) -> ParamScalar {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<'a> Mul<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn mul(self, rhs: &ParamScalar) -> ParamScalar {
        let mut out = ParamScalar::zero();
        out.add_mul(self, rhs);
        out
    }
}

impl Neg for &ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        ParamScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: ParamScalar) -> ParamScalar {
        &self + &rhs
    }
}

impl Sub for ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: ParamScalar) -> ParamScalar {
        &self - &rhs
    }
}

impl Mul for ParamScalar {
    type Output = ParamScalar;
    fn mul(self, rhs: ParamScalar) -> ParamScalar {
        &self * &rhs
    }
}

impl Neg for ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        -&self
    }
}
