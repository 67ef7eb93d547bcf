//! The inverse problem: all Hamiltonians `H` whose normal form is a given
//! `G`, together with third-type generating functions
//! `S = -sum_j q_j eta_j - sum_k S_k` satisfying
//! `H(q, eta + dS/dq) = G(q + dS/deta, eta)` (pieces written with a plus sign
//! since the stored `S_k` enter with a minus sign twice).
//!
//! The image component of each `H_k` is free. Two solvers are provided: the
//! direct one determines all of `S` at once, the staged one applies one
//! homogeneous transformation per degree and updates the higher pieces with
//! the Taylor sums of [`compute_theta`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::calculus::{d_deta, d_dq, shift};
use crate::canonical::{self, FrequencyVector};
use crate::error::{Error, Result};
use crate::gaussian::Rational;
use crate::normalizer::{check_setup, normal_form_violation, relation_residual};
use crate::param::{ParamScalar, Symbol};
use crate::poly::{Basis, Monomial, PhasePolynomial};
use crate::series::{GeneratingFunction, GeneratingKind, GradedSeries};
use crate::text::{self, ParseOptions};

/// What to use as the image component of `H_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImageChoice {
    Zero,
    /// One fresh complex parameter per conjugate pair of image monomials,
    /// named `<prefix><index>` with conjugate `<prefix><index>c`.
    Fresh(String),
    /// A given polynomial; must be homogeneous of degree `k` with no kernel
    /// component.
    Explicit(PhasePolynomial),
}

/// Image choices per degree; degrees without an entry use [`ImageChoice::Zero`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RestoreChoices {
    per_degree: BTreeMap<usize, ImageChoice>,
}

impl RestoreChoices {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The same fresh prefix at every degree `3..=rho`; numbering continues
    /// across degrees.
    pub fn fresh(prefix: &str, rho: usize) -> Self {
        let mut c = Self::default();
        for k in 3..=rho {
            c.set(k, ImageChoice::Fresh(prefix.to_string()));
        }
        c
    }

    pub fn set(&mut self, k: usize, choice: ImageChoice) -> &mut Self {
        self.per_degree.insert(k, choice);
        self
    }

    pub fn with(mut self, k: usize, choice: ImageChoice) -> Self {
        self.set(k, choice);
        self
    }

    pub fn get(&self, k: usize) -> &ImageChoice {
        self.per_degree.get(&k).unwrap_or(&ImageChoice::Zero)
    }

    /// Reads lines `degree k: zero | fresh <prefix> | explicit <polynomial>`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(src: &str, opts: &ParseOptions) -> Result<Self> {
        let complex = text::complex_names_in(src);
        let mut out = Self::default();
        for (idx, line) in src.lines().enumerate() {
            let lineno = idx + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |column: usize, message: String| Error::Parse { line: lineno, column, message };
            let rest = body
                .strip_prefix("degree")
                .ok_or_else(|| err(1, "expected 'degree k: ...'".into()))?;
            let (k, spec) = rest
                .split_once(':')
                .ok_or_else(|| err(1, "missing ':' after the degree".into()))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| err(7, format!("invalid degree '{}'", k.trim())))?;
            let spec = spec.trim();
            let offset = line.find(spec).unwrap_or(0) + 1;
            let (word, arg) = spec.split_once(char::is_whitespace).unwrap_or((spec, ""));
            let choice = match word {
                "zero" if arg.trim().is_empty() => ImageChoice::Zero,
                "fresh" => {
                    let prefix = arg.trim();
                    if prefix.is_empty() || !prefix.chars().all(|c| c.is_ascii_alphabetic() || c == '_') {
                        return Err(err(offset, format!("invalid parameter prefix '{prefix}'")));
                    }
                    ImageChoice::Fresh(prefix.to_string())
                }
                "explicit" => {
                    let col = line.find(arg).unwrap_or(0);
                    let popts = ParseOptions { first_line: lineno, ..opts.clone() };
                    let p = text::parse_polynomial_in(arg, &popts, &complex).map_err(|e| match e {
                        Error::Parse { line, column, message } => {
                            Error::Parse { line, column: column + col, message }
                        }
                        other => other,
                    })?;
                    ImageChoice::Explicit(p)
                }
                _ => return Err(err(offset, format!("unknown choice '{spec}'"))),
            };
            if out.per_degree.insert(k, choice).is_some() {
                return Err(err(1, format!("degree {k} given twice")));
            }
        }
        Ok(out)
    }
}

/// Image polynomial in the complex basis filled with fresh parameters
/// `<prefix><start>, <prefix><start+1>, ...`.
pub fn fresh_image(k: usize, nu: &FrequencyVector, prefix: &str, start: usize) -> PhasePolynomial {
    let n = nu.n();
    let mut out = PhasePolynomial::zero(Basis::Complex, n);
    for (idx, m) in canonical::image_representatives(k, n, nu).into_iter().enumerate() {
        let sym = Symbol::complex(&format!("{prefix}{}", start + idx));
        out.add_term(m.swap_halves(), &ParamScalar::symbol(sym.conjugate()));
        out.add_term(m, &ParamScalar::symbol(sym));
    }
    out
}

/// Turns the choices into explicit complex-basis image polynomials for
/// degrees `3..=rho`.
pub fn resolve_choices(
    choices: &RestoreChoices,
    nu: &FrequencyVector,
    rho: usize,
) -> Result<BTreeMap<usize, PhasePolynomial>> {
    let n = nu.n();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for k in 3..=rho {
        let p = match choices.get(k) {
            ImageChoice::Zero => PhasePolynomial::zero(Basis::Complex, n),
            ImageChoice::Fresh(prefix) => {
                let next = counters.entry(prefix.clone()).or_insert(1);
                let p = fresh_image(k, nu, prefix, *next);
                *next += canonical::image_representatives(k, n, nu).len();
                p
            }
            ImageChoice::Explicit(p) => {
                let invalid = |reason: String| Error::InvalidChoice { degree: k, reason };
                if p.n() != n {
                    return Err(invalid(format!("{} degrees of freedom, expected {n}", p.n())));
                }
                p.check_homogeneous(k).map_err(|e| invalid(e.to_string()))?;
                let c = p.to_complex();
                if !canonical::kernel_part(&c, nu).is_zero() {
                    return Err(invalid("the polynomial has a kernel component".into()));
                }
                c
            }
        };
        out.insert(k, p);
    }
    Ok(out)
}

fn check_input(g: &GradedSeries, nu: &FrequencyVector, rho: usize) -> Result<()> {
    check_setup(g, nu, rho)?;
    if let Some((degree, monomial)) = normal_form_violation(g, nu) {
        return Err(Error::NotNormalForm { degree, monomial });
    }
    Ok(())
}

/// Output of [`restore_direct`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restoration {
    pub hamiltonian: GradedSeries,
    pub generating: GeneratingFunction,
}

fn split(p: &PhasePolynomial, nu: &FrequencyVector) -> (PhasePolynomial, PhasePolynomial) {
    let ker = p.filter_terms(|m| nu.weight(m).is_zero());
    let img = p - &ker;
    (ker, img)
}

/// Solves the inverse problem degree by degree: `H_k = G_k - Psi_k^ker +
/// choice_k` and `S_k = D^-1(choice_k + Psi_k^img)`, where `Psi_k` is the
/// degree-`k` residual of the relation with the pieces found so far.
pub fn restore_direct(
    g: &GradedSeries,
    nu: &FrequencyVector,
    rho: usize,
    choices: &RestoreChoices,
) -> Result<Restoration> {
    check_input(g, nu, rho)?;
    let chosen = resolve_choices(choices, nu, rho)?;
    let n = g.n();
    let gc = g.to_basis(Basis::Complex);
    let mut h = GradedSeries::new(Basis::Complex, n, Some(nu.clone()), rho);
    let mut s = GeneratingFunction::new(GeneratingKind::ThirdType, Basis::Complex, n, rho);
    for k in 3..=rho {
        // H(q, eta + dS/dq) - G(q + dS/deta, eta) at degree k
        let psi = -&relation_residual(&gc.head(k - 1), &h.head(k - 1), &s.perturbation(), k)?;
        let (psi_ker, psi_img) = split(&psi, nu);
        let choice = &chosen[&k];
        let hk = &(&gc.piece(k) - &psi_ker) + choice;
        h.set_piece(k, hk)?;
        s.set_piece(k, canonical::invert_d_on_image(&(choice + &psi_img), nu)?)?;
    }
    Ok(Restoration {
        hamiltonian: h.to_basis(g.basis()),
        generating: s.to_basis(g.basis()),
    })
}

/// `H(q, eta + dS/dq) - G(q + dS/deta, eta)` through degree `rho`.
pub fn inverse_residual(
    h: &GradedSeries,
    g: &GradedSeries,
    s: &GeneratingFunction,
    rho: usize,
) -> Result<PhasePolynomial> {
    if s.kind() != GeneratingKind::ThirdType {
        return Err(Error::WrongKind("restoration uses a third-type generating function".into()));
    }
    let basis = h.basis();
    let sp = s.to_basis(basis).truncate(rho).perturbation();
    let hp = h.truncate(rho).to_polynomial();
    let gp = g.to_basis(basis).truncate(rho).to_polynomial();
    let a = shift(&hp, &[], &crate::calculus::grad_q(&sp)?, rho)?;
    let b = shift(&gp, &crate::calculus::grad_eta(&sp)?, &[], rho)?;
    Ok(&a - &b)
}

pub fn verify_inverse_equation(
    h: &GradedSeries,
    g: &GradedSeries,
    s: &GeneratingFunction,
    rho: usize,
) -> bool {
    inverse_residual(h, g, s, rho).map(|r| r.is_zero()).unwrap_or(false)
}

/// Output of [`restore_staged`]: the final Hamiltonian and the homogeneous
/// generator `S_r` of each stage `r = 3..=rho`, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagedRestoration {
    pub hamiltonian: GradedSeries,
    pub stage_generators: Vec<PhasePolynomial>,
}

fn factorial(k: u16) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |acc, x| acc * BigInt::from(x))
}

/// Degree-`k` correction picked up by the Hamiltonian at stage `r`:
///
/// `sum_{1 <= |a| <= (k-2)/(r-2)} 1/a! [ (dS_r/deta)^a (d/dq)^a H_prev_m
///  - (dS_r/dq)^a (d/deta)^a H_cur_m ]` with `m = k - (r-2)|a|`.
///
/// `h_cur` must already hold the new pieces of degree below `k`; degree 2
/// means the harmonic part of each series.
pub fn compute_theta(
    r: usize,
    k: usize,
    s_r: &PhasePolynomial,
    h_prev: &GradedSeries,
    h_cur: &GradedSeries,
) -> Result<PhasePolynomial> {
    if r < 3 || k <= r {
        return Err(Error::Precondition(format!("stage {r} cannot correct degree {k}")));
    }
    s_r.check_homogeneous(r)?;
    let n = s_r.n();
    let basis = s_r.basis();
    let h_prev = h_prev.to_basis(basis);
    let h_cur = h_cur.to_basis(basis);
    let ds_deta: Vec<PhasePolynomial> = (0..n).map(|j| d_deta(s_r, j)).collect::<Result<_>>()?;
    let ds_dq: Vec<PhasePolynomial> = (0..n).map(|j| d_dq(s_r, j)).collect::<Result<_>>()?;
    let mut theta = PhasePolynomial::zero(basis, n);
    if s_r.is_zero() {
        return Ok(theta);
    }
    let bound = (k - 2) / (r - 2);
    for order in 1..=bound {
        let m = k - (r - 2) * order;
        let (hp, hc) = (h_prev.piece(m), h_cur.piece(m));
        for alpha in Monomial::all_of_degree(n, order) {
            let a = alpha.exponents();
            let denom: BigInt = a.iter().map(|&e| factorial(e)).product();
            let weight = ParamScalar::rational(Rational::new(BigInt::one(), denom));
            let mut left = hp.clone();
            let mut right = hc.clone();
            let mut left_factor = PhasePolynomial::constant(basis, n, weight.clone());
            let mut right_factor = PhasePolynomial::constant(basis, n, weight);
            for (j, &e) in a.iter().enumerate() {
                for _ in 0..e {
                    left = d_dq(&left, j)?;
                    right = d_deta(&right, j)?;
                    left_factor = left_factor.mul_truncated(&ds_deta[j], k)?;
                    right_factor = right_factor.mul_truncated(&ds_dq[j], k)?;
                }
            }
            theta.add_assign_ref(&left_factor.mul_truncated(&left, k)?);
            theta.sub_assign_ref(&right_factor.mul_truncated(&right, k)?);
        }
    }
    Ok(theta.homogeneous_part(k))
}

/// Staged solver: starting from `H^(2) = G`, stage `r` keeps the pieces below
/// `r`, sets `H^(r)_r = H^(r-1),ker_r + choice_r` with
/// `S_r = D^-1(choice_r - H^(r-1),img_r)`, and adds `Theta^(r)_k` to every
/// higher piece.
pub fn restore_staged(
    g: &GradedSeries,
    nu: &FrequencyVector,
    rho: usize,
    choices: &RestoreChoices,
) -> Result<StagedRestoration> {
    check_input(g, nu, rho)?;
    let chosen = resolve_choices(choices, nu, rho)?;
    let n = g.n();
    let mut prev = g.to_basis(Basis::Complex).truncate(rho);
    let mut generators = Vec::new();
    for r in 3..=rho {
        let mut cur = GradedSeries::new(Basis::Complex, n, Some(nu.clone()), rho);
        for k in 3..r {
            cur.set_piece(k, prev.piece(k))?;
        }
        let (ker, img) = split(&prev.piece(r), nu);
        let choice = &chosen[&r];
        let s_r = canonical::invert_d_on_image(&(choice - &img), nu)?;
        cur.set_piece(r, &ker + choice)?;
        for k in r + 1..=rho {
            let theta = compute_theta(r, k, &s_r, &prev, &cur)?;
            cur.set_piece(k, &prev.piece(k) + &theta)?;
        }
        generators.push(s_r.to_basis(g.basis()));
        prev = cur;
    }
    Ok(StagedRestoration { hamiltonian: prev.to_basis(g.basis()), stage_generators: generators })
}

/// Number of fresh complex parameters a [`ImageChoice::Fresh`] choice
/// introduces at degree `k`.
pub fn fresh_parameter_count(k: usize, nu: &FrequencyVector) -> usize {
    canonical::image_representatives(k, nu.n(), nu).len()
}
