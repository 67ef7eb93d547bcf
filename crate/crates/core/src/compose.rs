//! Composition of canonical transformations given by third-type generating
//! functions `f(u, v) = -sum_j u_j v_j - S(u, v)` (new positions `u`, old
//! momenta `v`), with
//!
//! `u_old = u_new + dS/dv(u_new, v_old)`, `v_new = v_old + dS/du(u_new, v_old)`.
//!
//! Implicit relations are solved by graded fixed-point iteration: every pass
//! fixes at least one more degree, so the iteration is exact once stable.

use crate::calculus::{grad_eta, grad_q, poisson_bracket};
use crate::error::{Error, Result};
use crate::poly::{Basis, PhasePolynomial};
use crate::series::{GeneratingFunction, GeneratingKind, GradedSeries};

fn check_third(f: &GeneratingFunction) -> Result<()> {
    if f.kind() != GeneratingKind::ThirdType {
        return Err(Error::WrongKind(format!(
            "expected a third-type generating function, found {}-type",
            f.kind().name()
        )));
    }
    Ok(())
}

fn vars(n: usize, range: std::ops::Range<usize>) -> Vec<PhasePolynomial> {
    range.map(|v| PhasePolynomial::var(Basis::Real, n, v)).collect()
}

fn eval_all(ps: &[PhasePolynomial], images: &[PhasePolynomial], rho: usize) -> Result<Vec<PhasePolynomial>> {
    ps.iter().map(|p| p.substitute_truncated(images, rho)).collect()
}

fn concat(a: &[PhasePolynomial], b: &[PhasePolynomial]) -> Vec<PhasePolynomial> {
    a.iter().chain(b).cloned().collect()
}

fn dot(a: &[PhasePolynomial], b: &[PhasePolynomial], rho: usize) -> Result<PhasePolynomial> {
    let mut out = PhasePolynomial::zero(a[0].basis(), a[0].n());
    for (x, y) in a.iter().zip(b) {
        out.add_assign_ref(&x.mul_truncated(y, rho)?);
    }
    Ok(out)
}

/// Generating function of `sigma_2 o sigma_1`, where `f1` generates
/// `sigma_1` and `f2` generates `sigma_2`:
///
/// `f12(u2, v0) = sum_j ut_j vt_j + f1(ut, v0) + f2(u2, vt)` with
/// `ut = -df2/dv(u2, vt)` and `vt = -df1/du(ut, v0)`.
pub fn compose_pair(
    f1: &GeneratingFunction,
    f2: &GeneratingFunction,
    rho: usize,
) -> Result<GeneratingFunction> {
    check_third(f1)?;
    check_third(f2)?;
    if f1.n() != f2.n() {
        return Err(Error::ArityMismatch { expected: f1.n(), found: f2.n() });
    }
    let n = f1.n();
    let s1 = f1.to_basis(Basis::Real).truncate(rho).perturbation();
    let s2 = f2.to_basis(Basis::Real).truncate(rho).perturbation();
    let u2 = vars(n, 0..n);
    let v0 = vars(n, n..2 * n);
    let ds2_dv = grad_eta(&s2)?;
    let ds1_du = grad_q(&s1)?;
    let mut ut = u2.clone();
    let mut vt = v0.clone();
    for _ in 0..=rho {
        let new_ut: Vec<PhasePolynomial> = eval_all(&ds2_dv, &concat(&u2, &vt), rho)?
            .iter()
            .zip(&u2)
            .map(|(d, u)| u + d)
            .collect();
        let new_vt: Vec<PhasePolynomial> = eval_all(&ds1_du, &concat(&new_ut, &v0), rho)?
            .iter()
            .zip(&v0)
            .map(|(d, v)| v + d)
            .collect();
        let stable = new_ut == ut && new_vt == vt;
        ut = new_ut;
        vt = new_vt;
        if stable {
            break;
        }
    }
    let full1 = f1.to_basis(Basis::Real).truncate(rho).full();
    let full2 = f2.to_basis(Basis::Real).truncate(rho).full();
    let mut f12 = dot(&ut, &vt, rho)?;
    f12.add_assign_ref(&full1.substitute_truncated(&concat(&ut, &v0), rho)?);
    f12.add_assign_ref(&full2.substitute_truncated(&concat(&u2, &vt), rho)?);
    // f12 = -sum u2 v0 - S12
    let pieces = -&(&f12 + &dot(&u2, &v0, rho)?);
    debug_assert!(pieces.truncate(2).is_zero());
    let mut out = GeneratingFunction::new(GeneratingKind::ThirdType, Basis::Real, n, rho);
    for k in 3..=rho {
        out.set_piece(k, pieces.homogeneous_part(k))?;
    }
    Ok(out.to_basis(f1.basis()))
}

/// Generating function of `tau_rho o ... o tau_3`, where `tau_h` is
/// generated by `-sum_j q_j eta_j - S_h` and `pieces[i]` is `S_{i+3}`.
pub fn compose_chain(pieces: &[PhasePolynomial], rho: usize) -> Result<GeneratingFunction> {
    let first = pieces
        .first()
        .ok_or_else(|| Error::Precondition("empty chain".into()))?;
    if pieces.len() + 2 > rho {
        return Err(Error::Precondition(format!(
            "{} pieces do not fit below degree {rho}",
            pieces.len()
        )));
    }
    let (basis, n) = (first.basis(), first.n());
    let stage = |h: usize, p: &PhasePolynomial| -> Result<GeneratingFunction> {
        p.check_compatible(first)?;
        p.check_homogeneous(h)?;
        let mut g = GeneratingFunction::new(GeneratingKind::ThirdType, basis, n, rho);
        g.set_piece(h, p.clone())?;
        Ok(g)
    };
    let mut acc = stage(3, first)?;
    for (i, p) in pieces.iter().enumerate().skip(1) {
        acc = compose_pair(&acc, &stage(i + 3, p)?, rho)?;
    }
    Ok(acc)
}

/// Old coordinates `(q, eta)` of the transformation generated by `s`, as
/// series in the new coordinates, truncated at `rho`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationMap {
    pub old_q: Vec<PhasePolynomial>,
    pub old_eta: Vec<PhasePolynomial>,
}

/// Solves `eta = y - dS/dq(xi, eta)` and `q = xi + dS/deta(xi, eta)` for the
/// old coordinates in terms of the new `(xi, y)`, in the real basis.
pub fn transformation_map(s: &GeneratingFunction, rho: usize) -> Result<TransformationMap> {
    check_third(s)?;
    let n = s.n();
    let sp = s.to_basis(Basis::Real).truncate(rho).perturbation();
    let xi = vars(n, 0..n);
    let y = vars(n, n..2 * n);
    let ds_dq = grad_q(&sp)?;
    let ds_deta = grad_eta(&sp)?;
    let mut eta = y.clone();
    for _ in 0..=rho {
        let next: Vec<PhasePolynomial> = eval_all(&ds_dq, &concat(&xi, &eta), rho)?
            .iter()
            .zip(&y)
            .map(|(d, yj)| yj - d)
            .collect();
        let stable = next == eta;
        eta = next;
        if stable {
            break;
        }
    }
    let old_q = eval_all(&ds_deta, &concat(&xi, &eta), rho)?
        .iter()
        .zip(&xi)
        .map(|(d, x)| x + d)
        .collect();
    Ok(TransformationMap { old_q, old_eta: eta })
}

impl TransformationMap {
    /// True iff all canonical brackets among the old coordinates, computed
    /// in the new ones, equal `{q_a, eta_b} = delta_ab` (others zero)
    /// through total degree `degree`.
    pub fn is_symplectic_through(&self, degree: usize) -> Result<bool> {
        let n = self.old_q.len();
        let comps = concat(&self.old_q, &self.old_eta);
        let one = PhasePolynomial::constant(Basis::Real, n, crate::param::ParamScalar::one());
        let zero = PhasePolynomial::zero(Basis::Real, n);
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let br = poisson_bracket(&comps[a], &comps[b])?.truncate(degree);
                let expected = if a < n && b == a + n { &one } else { &zero };
                if br != *expected {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The Hamiltonian in the new coordinates: `H'(xi, y) = H(q, eta)` where the
/// old `(q, eta)` come from [`transformation_map`]. Equivalently,
/// `H'(q, eta + dS/dq) = H(q + dS/deta, eta)`.
pub fn transform_hamiltonian(h: &GradedSeries, s: &GeneratingFunction, rho: usize) -> Result<GradedSeries> {
    check_third(s)?;
    if h.n() != s.n() {
        return Err(Error::ArityMismatch { expected: h.n(), found: s.n() });
    }
    let nu = h
        .quadratic()
        .ok_or_else(|| Error::QuadraticMismatch("series has no quadratic part".into()))?
        .clone();
    let map = transformation_map(s, rho)?;
    let hp = h.to_basis(Basis::Real).truncate(rho).to_polynomial();
    let out = hp.substitute_truncated(&concat(&map.old_q, &map.old_eta), rho)?;
    GradedSeries::from_polynomial(&out.to_basis(h.basis()), &nu, rho)
}
