//! Derivatives, shifts and Poisson brackets with respect to the physical
//! coordinates `(q, eta)`, valid in either basis.
//!
//! In the complex basis `d/dq_j = d/dz_j + d/dzb_j` and
//! `d/deta_j = i (d/dz_j - d/dzb_j)`.

use crate::error::Result;
use crate::gaussian::GaussianRational;
use crate::param::ParamScalar;
use crate::poly::{Basis, PhasePolynomial};

fn i_scalar() -> ParamScalar {
    ParamScalar::constant(GaussianRational::i())
}

/// `dp/dq_j` (0-based `j`).
pub fn d_dq(p: &PhasePolynomial, j: usize) -> Result<PhasePolynomial> {
    let n = p.n();
    match p.basis() {
        Basis::Real => p.partial(j),
        Basis::Complex => Ok(&p.partial(j)? + &p.partial(n + j)?),
    }
}

/// `dp/deta_j` (0-based `j`).
pub fn d_deta(p: &PhasePolynomial, j: usize) -> Result<PhasePolynomial> {
    let n = p.n();
    match p.basis() {
        Basis::Real => p.partial(n + j),
        Basis::Complex => Ok((&p.partial(j)? - &p.partial(n + j)?).scale(&i_scalar())),
    }
}

pub fn grad_q(p: &PhasePolynomial) -> Result<Vec<PhasePolynomial>> {
    (0..p.n()).map(|j| d_dq(p, j)).collect()
}

pub fn grad_eta(p: &PhasePolynomial) -> Result<Vec<PhasePolynomial>> {
    (0..p.n()).map(|j| d_deta(p, j)).collect()
}

/// The variable slot images realizing `q -> q + dq`, `eta -> eta + deta`.
/// Empty slices mean no shift.
pub fn shift_images(
    basis: Basis,
    n: usize,
    dq: &[PhasePolynomial],
    deta: &[PhasePolynomial],
) -> Vec<PhasePolynomial> {
    let zero = PhasePolynomial::zero(basis, n);
    let get = |v: &[PhasePolynomial], j: usize| v.get(j).cloned().unwrap_or_else(|| zero.clone());
    let mut images: Vec<PhasePolynomial> =
        (0..2 * n).map(|v| PhasePolynomial::var(basis, n, v)).collect();
    for j in 0..n {
        let (a, b) = (get(dq, j), get(deta, j));
        match basis {
            Basis::Real => {
                images[j].add_assign_ref(&a);
                images[n + j].add_assign_ref(&b);
            }
            Basis::Complex => {
                let ib = b.scale(&i_scalar());
                images[j].add_assign_ref(&(&a + &ib));
                images[n + j].add_assign_ref(&(&a - &ib));
            }
        }
    }
    images
}

/// `p(q + dq, eta + deta)` truncated at total degree `rho`.
pub fn shift(
    p: &PhasePolynomial,
    dq: &[PhasePolynomial],
    deta: &[PhasePolynomial],
    rho: usize,
) -> Result<PhasePolynomial> {
    p.substitute_truncated(&shift_images(p.basis(), p.n(), dq, deta), rho)
}

/// Canonical bracket `{a, b} = sum_j da/dq_j db/deta_j - da/deta_j db/dq_j`.
pub fn poisson_bracket(a: &PhasePolynomial, b: &PhasePolynomial) -> Result<PhasePolynomial> {
    a.check_compatible(b)?;
    let mut out = PhasePolynomial::zero(a.basis(), a.n());
    for j in 0..a.n() {
        out.add_assign_ref(&d_dq(a, j)?.mul(&d_deta(b, j)?)?);
        out.sub_assign_ref(&d_deta(a, j)?.mul(&d_dq(b, j)?)?);
    }
    Ok(out)
}
