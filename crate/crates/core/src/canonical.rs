//! The oscillator operator `D = sum_j nu_j (q_j d/deta_j - eta_j d/dq_j)`,
//! its kernel/image splitting on homogeneous polynomials, and its inverse on
//! the image.
//!
//! On complex monomials `z^a zb^b` the operator is diagonal with eigenvalue
//! `i sum_j nu_j (a_j - b_j)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gaussian::{rat, GaussianRational, Rational};
use crate::param::ParamScalar;
use crate::poly::{Basis, Monomial, PhasePolynomial};
use crate::text;

/// Frequencies `nu_1..nu_n` of the harmonic part, all nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyVector {
    nu: Vec<Rational>,
    // nu scaled by the lcm of the denominators, for exact resonance tests
    weights: Vec<BigInt>,
}

impl FrequencyVector {
    pub fn new(nu: Vec<Rational>) -> Result<Self> {
        if nu.is_empty() || nu.iter().any(Zero::is_zero) {
            return Err(Error::ZeroFrequency);
        }
        let lcm = nu.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let weights = nu.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
        Ok(Self { nu, weights })
    }

    pub fn from_ints(nu: &[i64]) -> Result<Self> {
        Self::new(nu.iter().map(|&v| rat(v, 1)).collect())
    }

    /// Parses a comma-separated list such as `1,1` or `1/2,3`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut nu = Vec::new();
        for (k, part) in src.split(',').enumerate() {
            let bad = || Error::Parse {
                line: 1,
                column: k + 1,
                message: format!("frequency '{}' is not a rational number", part.trim()),
            };
            let s = text::parse_scalar(part).map_err(|_| bad())?;
            nu.push(s.as_rational().ok_or_else(bad)?);
        }
        Self::new(nu)
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.nu
    }

    /// `sum_j w_j (a_j - b_j)` with integer weights proportional to `nu`.
    /// Zero exactly on kernel monomials.
    pub fn weight(&self, m: &Monomial) -> BigInt {
        let (a, b) = m.split();
        let mut acc = BigInt::zero();
        for ((w, &x), &y) in self.weights.iter().zip(a).zip(b) {
            acc += w * BigInt::from(x as i64 - y as i64);
        }
        acc
    }

    /// Eigenvalue `i sum_j nu_j (a_j - b_j)` of `D` on the complex monomial `m`.
    pub fn eigenvalue(&self, m: &Monomial) -> GaussianRational {
        let (a, b) = m.split();
        let mut acc = Rational::zero();
        for ((nu, &x), &y) in self.nu.iter().zip(a).zip(b) {
            acc += nu * Rational::from_integer(BigInt::from(x as i64 - y as i64));
        }
        GaussianRational::new(Rational::zero(), acc)
    }

    /// The harmonic part `sum_j nu_j/2 (eta_j^2 + q_j^2)` in the given basis.
    pub fn quadratic(&self, basis: Basis) -> PhasePolynomial {
        let n = self.n();
        let mut terms = Vec::new();
        for (j, nu) in self.nu.iter().enumerate() {
            match basis {
                Basis::Real => {
                    let c = ParamScalar::rational(nu / rat(2, 1));
                    let mut a = vec![0; 2 * n];
                    a[j] = 2;
                    terms.push((Monomial::new(a), c.clone()));
                    let mut b = vec![0; 2 * n];
                    b[n + j] = 2;
                    terms.push((Monomial::new(b), c));
                }
                Basis::Complex => {
                    let mut a = vec![0; 2 * n];
                    a[j] = 1;
                    a[n + j] = 1;
                    terms.push((Monomial::new(a), ParamScalar::rational(nu / rat(2, 1))));
                }
            }
        }
        PhasePolynomial::from_terms(basis, n, terms)
    }

    fn check(&self, p: &PhasePolynomial) -> Result<()> {
        if p.n() != self.n() {
            return Err(Error::ArityMismatch { expected: self.n(), found: p.n() });
        }
        Ok(())
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.nu.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// `D p`. The real basis uses the derivative formula, the complex basis the
/// eigenvalues; the two agree through basis conversion.
pub fn apply_d(p: &PhasePolynomial, nu: &FrequencyVector) -> Result<PhasePolynomial> {
    nu.check(p)?;
    let n = p.n();
    match p.basis() {
        Basis::Real => {
            let mut out = PhasePolynomial::zero(Basis::Real, n);
            for j in 0..n {
                let c = ParamScalar::rational(nu.values()[j].clone());
                let q = PhasePolynomial::var(Basis::Real, n, j);
                let eta = PhasePolynomial::var(Basis::Real, n, n + j);
                let term = &q.mul(&p.partial(n + j)?)? - &eta.mul(&p.partial(j)?)?;
                out.add_assign_ref(&term.scale(&c));
            }
            Ok(out)
        }
        Basis::Complex => Ok(PhasePolynomial::from_terms(
            Basis::Complex,
            n,
            p.terms().map(|(m, c)| (m.clone(), c.scale(&nu.eigenvalue(m)))),
        )),
    }
}

/// Splitting of a homogeneous polynomial into kernel and image components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub image_part: PhasePolynomial,
    pub kernel_part: PhasePolynomial,
}

/// Splits homogeneous `p` into its kernel and image components, returned in
/// the basis of `p`.
pub fn decompose(p: &PhasePolynomial, nu: &FrequencyVector) -> Result<Decomposition> {
    nu.check(p)?;
    if let Some(k) = p.min_degree() {
        p.check_homogeneous(k)?;
    }
    let c = p.to_complex();
    let kernel = c.filter_terms(|m| nu.weight(m).is_zero());
    let image = c.filter_terms(|m| !nu.weight(m).is_zero());
    Ok(Decomposition {
        image_part: image.to_basis(p.basis()),
        kernel_part: kernel.to_basis(p.basis()),
    })
}

/// Kernel component only; works on non-homogeneous input as well.
pub fn kernel_part(p: &PhasePolynomial, nu: &FrequencyVector) -> PhasePolynomial {
    p.to_complex().filter_terms(|m| nu.weight(m).is_zero()).to_basis(p.basis())
}

/// Image component only; works on non-homogeneous input as well.
pub fn image_part(p: &PhasePolynomial, nu: &FrequencyVector) -> PhasePolynomial {
    p.to_complex().filter_terms(|m| !nu.weight(m).is_zero()).to_basis(p.basis())
}

/// The unique `w` in the image with `D w = p`. Fails if `p` has a kernel
/// component.
pub fn invert_d_on_image(p: &PhasePolynomial, nu: &FrequencyVector) -> Result<PhasePolynomial> {
    nu.check(p)?;
    let c = p.to_complex();
    let mut terms = Vec::with_capacity(c.len());
    for (m, x) in c.terms() {
        let inv = nu.eigenvalue(m).inv().ok_or(Error::KernelComponent)?;
        terms.push((m.clone(), x.scale(&inv)));
    }
    Ok(PhasePolynomial::from_terms(Basis::Complex, c.n(), terms).to_basis(p.basis()))
}

/// Complex monomials of degree `k` annihilated by `D`, in canonical order.
pub fn kernel_basis(k: usize, n: usize, nu: &FrequencyVector) -> Vec<Monomial> {
    Monomial::all_of_degree(2 * n, k)
        .into_iter()
        .filter(|m| nu.weight(m).is_zero())
        .collect()
}

/// Complex monomials of degree `k` outside the kernel, in canonical order.
pub fn image_basis(k: usize, n: usize, nu: &FrequencyVector) -> Vec<Monomial> {
    Monomial::all_of_degree(2 * n, k)
        .into_iter()
        .filter(|m| !nu.weight(m).is_zero())
        .collect()
}

/// One representative of each conjugate pair `(m, swap(m))` of image
/// monomials: the one with positive weight. Ordered by descending
/// position degree, then descending exponent vector, e.g. `z1^3, z1^2*z2,
/// ..., z1^2*zb1, ...` for two degrees of freedom.
pub fn image_representatives(k: usize, n: usize, nu: &FrequencyVector) -> Vec<Monomial> {
    let mut reps: Vec<Monomial> = Monomial::all_of_degree(2 * n, k)
        .into_iter()
        .filter(|m| nu.weight(m).is_positive())
        .collect();
    reps.sort_by(|a, b| {
        let da: u32 = a.split().0.iter().map(|&e| e as u32).sum();
        let db: u32 = b.split().0.iter().map(|&e| e as u32).sum();
        match db.cmp(&da) {
            Ordering::Equal => b.exponents().cmp(a.exponents()),
            o => o,
        }
    });
    reps
}
