//! Birkhoff-Gustavson normalization: given `K`, find the normal form `G` and
//! the second-type generating function `W` with
//! `G(q + dW/deta, eta) = K(q, eta + dW/dq)` through the truncation degree.
//!
//! Degree by degree, the residual of that relation with the pieces found so
//! far has the form `G_k + D W_k`; its kernel part is `G_k` and the inverse
//! of `D` on its image part is `W_k`.

use num_traits::Zero;

use crate::calculus::{grad_eta, grad_q, shift};
use crate::canonical::{self, FrequencyVector};
use crate::error::{Error, Result};
use crate::poly::{Basis, PhasePolynomial};
use crate::series::{GeneratingFunction, GeneratingKind, GradedSeries};
use crate::text;

/// Result of [`normalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub normal_form: GradedSeries,
    pub generating: GeneratingFunction,
}

pub(crate) fn check_setup(s: &GradedSeries, nu: &FrequencyVector, rho: usize) -> Result<()> {
    if rho < 3 {
        return Err(Error::DegreeTooLow(rho));
    }
    if s.n() != nu.n() {
        return Err(Error::ArityMismatch { expected: nu.n(), found: s.n() });
    }
    match s.quadratic() {
        Some(q) if q == nu => Ok(()),
        Some(q) => Err(Error::QuadraticMismatch(format!("series has frequencies {q}, expected {nu}"))),
        None => Err(Error::QuadraticMismatch("series has no quadratic part".into())),
    }
}

/// `k`-th piece of `F(q + dP/deta, eta) - E(q, eta + dP/dq)`, where `E` and
/// `F` are given through degree `k - 1` (plus `E_k` if included) and `P` is a
/// generating perturbation.
pub(crate) fn relation_residual(
    shifted_positions: &PhasePolynomial,
    shifted_momenta: &PhasePolynomial,
    perturbation: &PhasePolynomial,
    k: usize,
) -> Result<PhasePolynomial> {
    let a = shift(shifted_positions, &grad_eta(perturbation)?, &[], k)?;
    let b = shift(shifted_momenta, &[], &grad_q(perturbation)?, k)?;
    Ok((&a - &b).homogeneous_part(k))
}

/// Normal form of `k` through degree `rho`, with its generating function.
/// Outputs are in the basis of `k`.
pub fn normalize(k: &GradedSeries, nu: &FrequencyVector, rho: usize) -> Result<Normalization> {
    check_setup(k, nu, rho)?;
    let n = k.n();
    let kc = k.to_basis(Basis::Complex);
    let mut g = GradedSeries::new(Basis::Complex, n, Some(nu.clone()), rho);
    let mut w = GeneratingFunction::new(GeneratingKind::SecondType, Basis::Complex, n, rho);
    for deg in 3..=rho {
        // K(q, eta + dW/dq) - G(q + dW/deta, eta) at degree deg
        let r = -&relation_residual(&g.head(deg - 1), &kc.head(deg), &w.perturbation(), deg)?;
        let ker = r.filter_terms(|m| nu.weight(m).is_zero());
        let img = &r - &ker;
        g.set_piece(deg, ker)?;
        w.set_piece(deg, canonical::invert_d_on_image(&img, nu)?)?;
    }
    Ok(Normalization {
        normal_form: g.to_basis(k.basis()),
        generating: w.to_basis(k.basis()),
    })
}

/// First piece with a component outside the kernel of `D`, as
/// `(degree, offending monomial)`.
pub fn normal_form_violation(g: &GradedSeries, nu: &FrequencyVector) -> Option<(usize, String)> {
    for (k, p) in g.pieces() {
        let img = canonical::image_part(p, nu);
        let first = img.terms().next().map(|(m, _)| m.clone());
        if let Some(m) = first {
            return Some((k, text::format_monomial(&m, img.basis(), img.n())));
        }
    }
    None
}

/// True iff every piece of `g` is annihilated by `D`.
pub fn check_normal_form(g: &GradedSeries, nu: &FrequencyVector) -> bool {
    g.pieces()
        .all(|(_, p)| canonical::apply_d(p, nu).map(|d| d.is_zero()).unwrap_or(false))
}

/// `G(q + dW/deta, eta) - K(q, eta + dW/dq)` through degree `rho`.
pub fn defining_residual(
    k: &GradedSeries,
    g: &GradedSeries,
    w: &GeneratingFunction,
    rho: usize,
) -> Result<PhasePolynomial> {
    if w.kind() != GeneratingKind::SecondType {
        return Err(Error::WrongKind("normalization uses a second-type generating function".into()));
    }
    let basis = k.basis();
    let wp = w.to_basis(basis).truncate(rho).perturbation();
    let gp = g.to_basis(basis).truncate(rho).to_polynomial();
    let kp = k.truncate(rho).to_polynomial();
    let a = shift(&gp, &grad_eta(&wp)?, &[], rho)?;
    let b = shift(&kp, &[], &grad_q(&wp)?, rho)?;
    Ok(&a - &b)
}

/// True iff the normalization relation between `k`, `g` and `w` holds
/// identically through degree `rho`.
pub fn verify_defining_equation(
    k: &GradedSeries,
    g: &GradedSeries,
    w: &GeneratingFunction,
    rho: usize,
) -> bool {
    defining_residual(k, g, w, rho).map(|r| r.is_zero()).unwrap_or(false)
}
