//! Sparse polynomials in the `2n` phase variables.
//!
//! Variables are stored positions-first: in the real basis slot `j` is `q_{j+1}`
//! and slot `n + j` is `eta_{j+1}`; in the complex basis the same slots hold
//! `z_{j+1}` and `zb_{j+1}`, with `z = q + i·eta` and `zb = q - i·eta`.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gaussian::{rat, GaussianRational, Rational};
use crate::param::{ParamScalar, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `(q, eta)` coordinates.
    Real,
    /// `(z, zb)` coordinates.
    Complex,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Real => "real",
            Basis::Complex => "complex",
        }
    }

    /// Printable name of variable slot `index` for `n` degrees of freedom.
    pub fn var_name(self, index: usize, n: usize) -> String {
        let (pos, mom) = match self {
            Basis::Real => ("q", "eta"),
            Basis::Complex => ("z", "zb"),
        };
        if index < n {
            format!("{pos}{}", index + 1)
        } else {
            format!("{mom}{}", index - n + 1)
        }
    }
}

/// Exponents of the `2n` phase variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn new(exponents: Vec<u16>) -> Self {
        Self(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Positions part `alpha` and momenta part `beta` for `n` degrees of freedom.
    pub fn split(&self) -> (&[u16], &[u16]) {
        self.0.split_at(self.0.len() / 2)
    }

    /// Swaps position and momentum exponents; conjugation in the complex basis.
    pub fn swap_halves(&self) -> Monomial {
        let (a, b) = self.split();
        Monomial(b.iter().chain(a).copied().collect())
    }

    /// All exponent vectors of total degree `degree` in `nvars` variables, in
    /// canonical order.
    pub fn all_of_degree(nvars: usize, degree: usize) -> Vec<Monomial> {
        fn rec(slot: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            if slot + 1 == cur.len() {
                cur[slot] = left as u16;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[slot] = e as u16;
                rec(slot + 1, left - e, cur, out);
            }
        }
        if nvars == 0 {
            return if degree == 0 { vec![Monomial(vec![])] } else { vec![] };
        }
        let mut out = Vec::new();
        rec(0, degree, &mut vec![0; nvars], &mut out);
        out
    }
}

/// Graded lexicographic: lower degree first, then the monomial with the larger
/// exponent in the earliest variable first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the phase variables with [`ParamScalar`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhasePolynomial {
    basis: Basis,
    n: usize,
    terms: BTreeMap<Monomial, ParamScalar>,
}

impl PhasePolynomial {
    pub fn zero(basis: Basis, n: usize) -> Self {
        Self { basis, n, terms: BTreeMap::new() }
    }

    pub fn constant(basis: Basis, n: usize, c: ParamScalar) -> Self {
        let mut p = Self::zero(basis, n);
        p.add_term(Monomial::one(2 * n), &c);
        p
    }

    /// The variable in slot `index`.
    pub fn var(basis: Basis, n: usize, index: usize) -> Self {
        let mut p = Self::zero(basis, n);
        p.add_term(Monomial::var(2 * n, index), &ParamScalar::one());
        p
    }

    pub fn monomial(basis: Basis, n: usize, m: Monomial, c: ParamScalar) -> Self {
        assert_eq!(m.0.len(), 2 * n, "monomial arity");
        let mut p = Self::zero(basis, n);
        p.add_term(m, &c);
        p
    }

    pub fn from_terms(
        basis: Basis,
        n: usize,
        terms: impl IntoIterator<Item = (Monomial, ParamScalar)>,
    ) -> Self {
        let mut p = Self::zero(basis, n);
        for (m, c) in terms {
            assert_eq!(m.0.len(), 2 * n, "monomial arity");
            p.add_term(m, &c);
        }
        p
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        2 * self.n
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ParamScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> ParamScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Lowest total degree, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn add_term(&mut self, m: Monomial, c: &ParamScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_product(&mut self, m: Monomial, a: &ParamScalar, b: &ParamScalar) {
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                let prod = a * b;
                if !prod.is_zero() {
                    v.insert(prod);
                }
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_mul(a, b);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch { expected: self.n, found: other.n });
        }
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.name(),
                right: other.basis.name(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    /// In-place sum. Panics on arity or basis mismatch.
    pub fn add_assign_ref(&mut self, other: &Self) {
        self.check_compatible(other).expect("incompatible polynomials");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign_ref(&mut self, other: &Self) {
        self.check_compatible(other).expect("incompatible polynomials");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    pub fn scale(&self, c: &ParamScalar) -> Self {
        let mut out = Self::zero(self.basis, self.n);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &(x * c));
        }
        out
    }

    pub fn scale_gaussian(&self, c: &GaussianRational) -> Self {
        self.map_coefficients(|x| x.scale(c))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale_gaussian(&GaussianRational::real(r.clone()))
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&ParamScalar) -> ParamScalar) -> Self {
        let mut out = Self::zero(self.basis, self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        Self {
            basis: self.basis,
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, k: usize) -> Self {
        self.filter_terms(|m| m.degree() == k)
    }

    pub fn truncate(&self, rho: usize) -> Self {
        self.filter_terms(|m| m.degree() <= rho)
    }

    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == k)
    }

    pub fn check_homogeneous(&self, k: usize) -> Result<()> {
        match self.terms.keys().find(|m| m.degree() != k) {
            Some(m) => Err(Error::NotHomogeneous { expected: k, found: m.degree() }),
            None => Ok(()),
        }
    }

    /// Product with every term of total degree above `rho` discarded.
    pub fn mul_truncated(&self, other: &Self, rho: usize) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.basis, self.n);
        let other_terms: Vec<(&Monomial, usize, &ParamScalar)> =
            other.terms.iter().map(|(m, c)| (m, m.degree(), c)).collect();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > rho {
                break;
            }
            for &(mb, db, cb) in &other_terms {
                // terms are sorted by degree
                if da + db > rho {
                    break;
                }
                out.add_product(ma.mul(mb), ca, cb);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let rho = self.degree().unwrap_or(0) + other.degree().unwrap_or(0);
        self.mul_truncated(other, rho)
    }

    pub fn pow_truncated(&self, e: u32, rho: usize) -> Result<Self> {
        let mut acc = Self::constant(self.basis, self.n, ParamScalar::one());
        for _ in 0..e {
            acc = acc.mul_truncated(self, rho)?;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to variable slot `var`.
    pub fn partial(&self, var: usize) -> Result<Self> {
        if var >= self.nvars() {
            return Err(Error::UnknownVariable { index: var, n: self.n });
        }
        let mut out = Self::zero(self.basis, self.n);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[var] -= 1;
            out.add_term(dm, &c.scale(&GaussianRational::from_int(e as i64)));
        }
        Ok(out)
    }

    /// Composition `p(images)` with all terms above `rho` discarded.
    ///
    /// `images[v]` replaces variable slot `v`; images may live in another
    /// basis, which then becomes the basis of the result. Degree-`d` terms of
    /// the output only depend on image terms of degree at most `d`.
    pub fn substitute_truncated(&self, images: &[PhasePolynomial], rho: usize) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.n, found: images.len() / 2 });
        }
        let (basis, n) = (images[0].basis, images[0].n);
        for img in images {
            img.check_compatible(&images[0])?;
        }
        let mut min_deg = Vec::with_capacity(images.len());
        for (v, img) in images.iter().enumerate() {
            match img.min_degree() {
                Some(0) => return Err(Error::ConstantImage { index: v }),
                Some(d) => min_deg.push(d),
                None => min_deg.push(usize::MAX),
            }
        }
        let truncated: Vec<PhasePolynomial> = images.iter().map(|i| i.truncate(rho)).collect();
        let mut powers: Vec<Vec<PhasePolynomial>> = truncated
            .iter()
            .map(|_| vec![Self::constant(basis, n, ParamScalar::one())])
            .collect();
        let mut out = Self::zero(basis, n);
        for (m, c) in &self.terms {
            let lower: usize = m
                .0
                .iter()
                .zip(&min_deg)
                .map(|(&e, &d)| if e == 0 { 0 } else { d.saturating_mul(e as usize) })
                .fold(0usize, |a, b| a.saturating_add(b));
            if lower > rho {
                continue;
            }
            let mut acc: Option<PhasePolynomial> = None;
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().unwrap().mul_truncated(&truncated[v], rho)?;
                    powers[v].push(next);
                }
                let factor = &powers[v][e as usize];
                acc = Some(match acc {
                    None => factor.clone(),
                    Some(a) => a.mul_truncated(factor, rho)?,
                });
            }
            let product = acc.unwrap_or_else(|| Self::constant(basis, n, ParamScalar::one()));
            if c.is_one() {
                out.add_assign_ref(&product);
            } else {
                for (pm, pc) in &product.terms {
                    out.add_product(pm.clone(), pc, c);
                }
            }
        }
        Ok(out)
    }

    fn substitute_linear(&self, images: &[PhasePolynomial]) -> Self {
        let rho = self.degree().unwrap_or(0);
        self.substitute_truncated(images, rho)
            .expect("linear substitution images are well formed")
    }

    /// Rewrites a real-basis polynomial in `(z, zb)` via
    /// `q = (z + zb)/2`, `eta = (z - zb)/(2i)`. Complex input is returned as is.
    pub fn to_complex(&self) -> Self {
        if self.basis == Basis::Complex {
            return self.clone();
        }
        let n = self.n;
        let half = ParamScalar::rational(rat(1, 2));
        let minus_half_i =
            ParamScalar::constant(GaussianRational::new(Rational::zero(), rat(-1, 2)));
        let z = |j| Self::var(Basis::Complex, n, j);
        let zb = |j| Self::var(Basis::Complex, n, n + j);
        let mut images = Vec::with_capacity(2 * n);
        for j in 0..n {
            images.push((&z(j) + &zb(j)).scale(&half));
        }
        for j in 0..n {
            images.push((&z(j) - &zb(j)).scale(&minus_half_i));
        }
        self.substitute_linear(&images)
    }

    /// Rewrites a complex-basis polynomial in `(q, eta)` via
    /// `z = q + i·eta`, `zb = q - i·eta`. Real input is returned as is.
    pub fn to_real(&self) -> Self {
        if self.basis == Basis::Real {
            return self.clone();
        }
        let n = self.n;
        let i = ParamScalar::constant(GaussianRational::i());
        let q = |j| Self::var(Basis::Real, n, j);
        let eta = |j| Self::var(Basis::Real, n, n + j).scale(&i);
        let mut images = Vec::with_capacity(2 * n);
        for j in 0..n {
            images.push(&q(j) + &eta(j));
        }
        for j in 0..n {
            images.push(&q(j) - &eta(j));
        }
        self.substitute_linear(&images)
    }

    pub fn to_basis(&self, basis: Basis) -> Self {
        match basis {
            Basis::Real => self.to_real(),
            Basis::Complex => self.to_complex(),
        }
    }

    /// Complex conjugation: conjugates coefficients and parameters, and in the
    /// complex basis swaps `z_j` with `zb_j`.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero(self.basis, self.n);
        for (m, c) in &self.terms {
            let m = match self.basis {
                Basis::Real => m.clone(),
                Basis::Complex => m.swap_halves(),
            };
            out.add_term(m, &c.conjugate());
        }
        out
    }

    /// True when the polynomial is invariant under [`conjugate`](Self::conjugate).
    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    pub fn substitute_params(&self, values: &BTreeMap<Symbol, ParamScalar>) -> Self {
        self.map_coefficients(|c| c.substitute(values))
    }

    /// True when every coefficient is free of parameters.
    pub fn is_numeric(&self) -> bool {
        self.terms.values().all(ParamScalar::is_numeric)
    }
}

impl<'a> Add<&'a PhasePolynomial> for &'a PhasePolynomial {
    type Output = PhasePolynomial;
    fn add(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a PhasePolynomial> for &'a PhasePolynomial {
    type Output = PhasePolynomial;
    fn sub(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl Neg for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn neg(self) -> PhasePolynomial {
        self.map_coefficients(|c| -c)
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::format_polynomial(self, " "))
    }
}
