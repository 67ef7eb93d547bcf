//! Bertrand-Darboux integrability conditions for natural Hamiltonians
//! `1/2 (p1^2 + p2^2) + V(q1, q2)`.
//!
//! The general condition asks for constants `(alpha, beta, beta', gamma,
//! gamma')`, not all zero, with
//!
//! ```text
//! (V_22 - V_11)(-2 alpha q1 q2 - beta' q2 - beta q1 + gamma)
//!   + 2 V_12 (alpha q2^2 - alpha q1^2 + beta q2 - beta' q1 + gamma')
//!   + V_1 (6 alpha q2 + 3 beta) - V_2 (6 alpha q1 + 3 beta') = 0.
//! ```
//!
//! This is the compatibility condition for `dk = (2a V_1 + b V_2) dq1 +
//! (b V_1 + 2c V_2) dq2`, where `a p1^2 + b p1 p2 + c p2^2 + k(q)` is the
//! quadratic integral and `a = alpha q2^2 + beta q2 + ..`,
//! `c = alpha q1^2 + beta' q1 + ..`, `b = -2 alpha q1 q2 - beta q1 - beta' q2 + ..`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gaussian::{rat, Rational};
use crate::linalg;
use crate::models;
use crate::normalizer::normalize;
use crate::param::ParamScalar;
use crate::poly::{Basis, Monomial, PhasePolynomial};

/// Exact basis of the solution space of `(alpha, beta, beta', gamma, gamma')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BdicWitness {
    pub basis: Vec<[Rational; 5]>,
}

impl BdicWitness {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_nontrivial(&self) -> bool {
        !self.basis.is_empty()
    }
}

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
    /// Symbolic inputs whose residuals do not vanish identically.
    Symbolic,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Satisfied => "SATISFIED",
            Verdict::Violated => "VIOLATED",
            Verdict::Symbolic => "SYMBOLIC",
        }
    }
}

fn check_potential(v: &PhasePolynomial) -> Result<PhasePolynomial> {
    if v.n() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: v.n() });
    }
    let v = v.to_real();
    if v.terms().any(|(m, _)| m.exponents()[2] > 0 || m.exponents()[3] > 0) {
        return Err(Error::MomentumDependence);
    }
    Ok(v)
}

/// The left side of the general condition for the given constants
/// `[alpha, beta, beta', gamma, gamma']`.
pub fn bdic_expression(v: &PhasePolynomial, c: &[ParamScalar; 5]) -> Result<PhasePolynomial> {
    let v = check_potential(v)?;
    let q = |j| PhasePolynomial::var(Basis::Real, 2, j);
    let k = |x: &ParamScalar| PhasePolynomial::constant(Basis::Real, 2, x.clone());
    let int = |x: i64| ParamScalar::int(x);
    let [alpha, beta, beta_p, gamma, gamma_p] = c;
    let (q1, q2) = (q(0), q(1));
    let q1q2 = q1.mul(&q2)?;
    let v1 = v.partial(0)?;
    let v2 = v.partial(1)?;
    let v11 = v1.partial(0)?;
    let v12 = v1.partial(1)?;
    let v22 = v2.partial(1)?;

    let a = &(&(&(-&q1q2.scale(&alpha.scale_rational(&rat(2, 1)))) - &q2.scale(beta_p)) - &q1.scale(beta))
        + &k(gamma);
    let b = &(&(&(&q2.mul(&q2)?.scale(alpha) - &q1.mul(&q1)?.scale(alpha)) + &q2.scale(beta))
        - &q1.scale(beta_p))
        + &k(gamma_p);
    let c1 = &q2.scale(&(alpha * &int(6))) + &k(&(beta * &int(3)));
    let c2 = &q1.scale(&(alpha * &int(6))) + &k(&(beta_p * &int(3)));

    let mut out = (&v22 - &v11).mul(&a)?;
    out.add_assign_ref(&v12.mul(&b)?.scale(&int(2)));
    out.add_assign_ref(&v1.mul(&c1)?);
    out.sub_assign_ref(&v2.mul(&c2)?);
    Ok(out)
}

/// Solution space of the general condition for a potential with numeric
/// coefficients, by exact coefficient extraction.
pub fn bdic_general(v: &PhasePolynomial) -> Result<BdicWitness> {
    let v = check_potential(v)?;
    if !v.is_numeric() {
        return Err(Error::SymbolicParameters);
    }
    let unit = |i: usize| -> [ParamScalar; 5] {
        std::array::from_fn(|j| if i == j { ParamScalar::one() } else { ParamScalar::zero() })
    };
    let columns: Vec<PhasePolynomial> =
        (0..5).map(|i| bdic_expression(&v, &unit(i))).collect::<Result<_>>()?;
    let mut monomials: Vec<&Monomial> = columns.iter().flat_map(|c| c.terms().map(|(m, _)| m)).collect();
    monomials.sort();
    monomials.dedup();
    let mut rows = Vec::new();
    for m in monomials {
        let coeffs: Vec<_> = columns
            .iter()
            .map(|c| c.coefficient(m).as_constant().unwrap_or_default())
            .collect();
        rows.push(coeffs.iter().map(|g| g.re.clone()).collect::<Vec<_>>());
        if coeffs.iter().any(|g| !g.im.is_zero()) {
            rows.push(coeffs.iter().map(|g| g.im.clone()).collect());
        }
    }
    let basis = linalg::nullspace(&rows, 5)
        .into_iter()
        .map(|v| <[Rational; 5]>::try_from(v).expect("five unknowns"))
        .collect();
    Ok(BdicWitness { basis })
}

/// Whether `x` is identically zero; `None` when symbolic and nonzero.
fn decide_zero(x: &ParamScalar) -> Option<bool> {
    if x.is_zero() {
        Some(true)
    } else if x.is_numeric() {
        Some(false)
    } else {
        None
    }
}

/// Conjunction of exact-zero tests; `None` when undecidable.
fn all_zero(xs: &[ParamScalar]) -> Option<bool> {
    let mut undecided = false;
    for x in xs {
        match decide_zero(x) {
            Some(false) => return Some(false),
            None => undecided = true,
            Some(true) => {}
        }
    }
    if undecided {
        None
    } else {
        Some(true)
    }
}

fn verdict(branches: &[Option<bool>]) -> Verdict {
    if branches.contains(&Some(true)) {
        Verdict::Satisfied
    } else if branches.iter().all(|b| *b == Some(false)) {
        Verdict::Violated
    } else {
        Verdict::Symbolic
    }
}

/// Cubic-potential conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhocpReport {
    /// `3(f1 f3 + f2 f4) - (f2^2 + f3^2)`.
    pub residual: ParamScalar,
    /// `f1 = 2 f3, f2 = f4 = 0`; `None` if undecidable for symbolic input.
    pub branch_b: Option<bool>,
    /// `f4 = 2 f2, f1 = f3 = 0`.
    pub branch_c: Option<bool>,
    pub verdict: Verdict,
}

/// `3(f1 f3 + f2 f4) - (f2^2 + f3^2)`.
pub fn phocp_polynomial(f: &[ParamScalar; 4]) -> ParamScalar {
    let [f1, f2, f3, f4] = f;
    &(&(f1 * f3) + &(f2 * f4)).scale_rational(&rat(3, 1)) - &(&(f2 * f2) + &(f3 * f3))
}

pub fn bdic_phocp(f: &[ParamScalar; 4]) -> PhocpReport {
    let [f1, f2, f3, f4] = f;
    let two = rat(2, 1);
    let residual = phocp_polynomial(f);
    let branch_b = all_zero(&[f1 - &f3.scale_rational(&two), f2.clone(), f4.clone()]);
    let branch_c = all_zero(&[f4 - &f2.scale_rational(&two), f1.clone(), f3.clone()]);
    let verdict = verdict(&[decide_zero(&residual), branch_b, branch_c]);
    PhocpReport { residual, branch_b, branch_c, verdict }
}

/// Quartic-potential conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhoqpReport {
    /// The three polynomials that must vanish together.
    pub residuals: [ParamScalar; 3],
    /// `g3 = 2 g1 = 2 g5, g2 = g4 = 0`.
    pub branch_a: Option<bool>,
    pub verdict: Verdict,
}

/// `9g2^2 + 4g3^2 - 24g1g3 - 9g2g4`, `9g4^2 + 4g3^2 - 24g3g5 - 9g2g4`,
/// `(g2 + g4)g3 - 6(g1g4 + g2g5)`.
pub fn phoqp_polynomials(g: &[ParamScalar; 5]) -> [ParamScalar; 3] {
    let [g1, g2, g3, g4, g5] = g;
    let c = |x: i64| rat(x, 1);
    let g2g4 = g2 * g4;
    let g3sq = (g3 * g3).scale_rational(&c(4));
    let r1 = &(&(&(g2 * g2).scale_rational(&c(9)) + &g3sq) - &(g1 * g3).scale_rational(&c(24)))
        - &g2g4.scale_rational(&c(9));
    let r2 = &(&(&(g4 * g4).scale_rational(&c(9)) + &g3sq) - &(g3 * g5).scale_rational(&c(24)))
        - &g2g4.scale_rational(&c(9));
    let r3 = &(&(g2 + g4) * g3) - &(&(g1 * g4) + &(g2 * g5)).scale_rational(&c(6));
    [r1, r2, r3]
}

pub fn bdic_phoqp(g: &[ParamScalar; 5]) -> PhoqpReport {
    let [g1, g2, g3, g4, g5] = g;
    let two = rat(2, 1);
    let residuals = phoqp_polynomials(g);
    let branch_a = all_zero(&[
        g3 - &g1.scale_rational(&two),
        g3 - &g5.scale_rational(&two),
        g2.clone(),
        g4.clone(),
    ]);
    let verdict = verdict(&[all_zero(&residuals), branch_a]);
    PhoqpReport { residuals, branch_a, verdict }
}

/// Quartic coefficients of the oscillator sharing its normal form with the
/// cubic one:
/// `g1 = -5/18 (9f1^2 + f2^2)`, `g2 = -10/9 (3f1 + f3) f2`,
/// `g3 = -5/3 (f2^2 + f3^2)`, `g4 = -10/9 (3f4 + f2) f3`,
/// `g5 = -5/18 (9f4^2 + f3^2)`.
pub fn map_g_from_f(f: &[ParamScalar; 4]) -> [ParamScalar; 5] {
    let [f1, f2, f3, f4] = f;
    let r = |a, b| rat(a, b);
    let nine_sq = |x: &ParamScalar| (x * x).scale_rational(&r(9, 1));
    [
        (&nine_sq(f1) + &(f2 * f2)).scale_rational(&r(-5, 18)),
        (&(&f1.scale_rational(&r(3, 1)) + f3) * f2).scale_rational(&r(-10, 9)),
        (&(f2 * f2) + &(f3 * f3)).scale_rational(&r(-5, 3)),
        (&(&f4.scale_rational(&r(3, 1)) + f2) * f3).scale_rational(&r(-10, 9)),
        (&nine_sq(f4) + &(f3 * f3)).scale_rational(&r(-5, 18)),
    ]
}

fn to_scalars<const N: usize>(x: &[Rational; N]) -> [ParamScalar; N] {
    std::array::from_fn(|i| ParamScalar::rational(x[i].clone()))
}

/// Normalizes the cubic oscillator for `f` and the quartic one for
/// `map_g_from_f(f)` through degree 4 and returns the first degree where the
/// normal forms differ, if any.
pub fn normal_form_mismatch(f: &[Rational; 4]) -> Result<Option<usize>> {
    let f = to_scalars(f);
    let nu = models::unit_frequencies();
    let cubic = models::oscillator(&models::cubic_potential(&f), 4)?;
    let quartic = models::oscillator(&models::quartic_potential(&map_g_from_f(&f)), 4)?;
    let a = normalize(&cubic, &nu, 4)?.normal_form;
    let b = normalize(&quartic, &nu, 4)?.normal_form;
    Ok((3..=4).find(|&k| a.piece(k) != b.piece(k)))
}

/// For `f` satisfying the cubic condition, true iff the cubic oscillator and
/// the quartic oscillator with `g = map_g_from_f(f)` share their normal form
/// through degree 4.
pub fn verify_shared_normal_form(f: &[Rational; 4]) -> Result<bool> {
    if !phocp_polynomial(&to_scalars(f)).is_zero() {
        return Err(Error::Precondition("f does not satisfy the cubic condition".into()));
    }
    Ok(normal_form_mismatch(f)?.is_none())
}
