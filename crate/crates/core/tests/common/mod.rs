//! Independent oracles shared by the integration tests. Everything here works
//! in the real basis with plain substitution and partial derivatives, without
//! the library's graded solvers.

#![allow(dead_code)]

pub mod family;

use bgnf::gaussian::Rational;
use bgnf::{Basis, FrequencyVector, GradedSeries, Monomial, ParamScalar, PhasePolynomial};

pub fn var(n: usize, slot: usize) -> PhasePolynomial {
    PhasePolynomial::var(Basis::Real, n, slot)
}

pub fn identity(n: usize) -> Vec<PhasePolynomial> {
    (0..2 * n).map(|s| var(n, s)).collect()
}

pub fn dq(p: &PhasePolynomial, j: usize) -> PhasePolynomial {
    p.partial(j).unwrap()
}

pub fn deta(p: &PhasePolynomial, j: usize) -> PhasePolynomial {
    p.partial(p.n() + j).unwrap()
}

/// `p(q + a, eta + b)` truncated at `rho`; empty slices mean no shift.
pub fn shifted(p: &PhasePolynomial, a: &[PhasePolynomial], b: &[PhasePolynomial], rho: usize) -> PhasePolynomial {
    let n = p.n();
    let mut images = identity(n);
    for (j, x) in a.iter().enumerate() {
        images[j] = &images[j] + x;
    }
    for (j, x) in b.iter().enumerate() {
        images[n + j] = &images[n + j] + x;
    }
    p.substitute_truncated(&images, rho).unwrap()
}

pub fn grad_q(p: &PhasePolynomial) -> Vec<PhasePolynomial> {
    (0..p.n()).map(|j| dq(p, j)).collect()
}

pub fn grad_eta(p: &PhasePolynomial) -> Vec<PhasePolynomial> {
    (0..p.n()).map(|j| deta(p, j)).collect()
}

fn half(nu: &FrequencyVector, j: usize) -> ParamScalar {
    ParamScalar::rational(nu.values()[j].clone() / Rational::from_integer(2.into()))
}

fn mul(a: &PhasePolynomial, b: &PhasePolynomial) -> PhasePolynomial {
    a.mul(b).unwrap()
}

/// Degree-4 correction of the normalization relation written out term by
/// term: `sum_j nu_j/2 (dW/dq_j)^2 + dK/deta_j dW/dq_j - nu_j/2 (dW/deta_j)^2
/// - dG/dq_j dW/deta_j` for cubic `K`, `G`, `W`.
pub fn closed_form_degree4(k3: &PhasePolynomial, g3: &PhasePolynomial, w3: &PhasePolynomial, nu: &FrequencyVector) -> PhasePolynomial {
    let mut out = PhasePolynomial::zero(Basis::Real, nu.n());
    for j in 0..nu.n() {
        let wq = dq(w3, j);
        let we = deta(w3, j);
        out.add_assign_ref(&mul(&wq, &wq).scale(&half(nu, j)));
        out.add_assign_ref(&mul(&deta(k3, j), &wq));
        out.sub_assign_ref(&mul(&we, &we).scale(&half(nu, j)));
        out.sub_assign_ref(&mul(&dq(g3, j), &we));
    }
    out
}

/// Degree-`k` part of `K_{<k}(q, eta + dW/dq) - G_{<k}(q + dW/deta, eta)`
/// where `K` and `G` include their quadratic parts and `W` is a
/// polynomial perturbation.
pub fn substitution_residual(
    k_low: &PhasePolynomial,
    g_low: &PhasePolynomial,
    w: &PhasePolynomial,
    k: usize,
) -> PhasePolynomial {
    let a = shifted(k_low, &[], &grad_q(w), k);
    let b = shifted(g_low, &grad_eta(w), &[], k);
    (&a - &b).homogeneous_part(k)
}

/// Real-basis `D = sum nu_j (q_j d/deta_j - eta_j d/dq_j)` from its action on
/// exponent vectors.
pub fn d_on_monomial(m: &Monomial, nu: &FrequencyVector) -> Vec<(Monomial, Rational)> {
    let n = nu.n();
    let e = m.exponents();
    let mut out = Vec::new();
    for j in 0..n {
        let nuj = nu.values()[j].clone();
        if e[n + j] > 0 {
            let mut x = e.to_vec();
            x[n + j] -= 1;
            x[j] += 1;
            out.push((Monomial::new(x), nuj.clone() * Rational::from_integer(e[n + j].into())));
        }
        if e[j] > 0 {
            let mut x = e.to_vec();
            x[j] -= 1;
            x[n + j] += 1;
            out.push((Monomial::new(x), -nuj * Rational::from_integer(e[j].into())));
        }
    }
    out
}

/// Matrix of `D` on real homogeneous polynomials of degree `k`: one row per
/// output monomial, one column per input monomial.
pub fn d_matrix(k: usize, nu: &FrequencyVector) -> Vec<Vec<Rational>> {
    let basis = Monomial::all_of_degree(2 * nu.n(), k);
    let index = |m: &Monomial| basis.iter().position(|b| b == m).unwrap();
    let mut rows = vec![vec![Rational::from_integer(0.into()); basis.len()]; basis.len()];
    for (col, m) in basis.iter().enumerate() {
        for (out, c) in d_on_monomial(m, nu) {
            rows[index(&out)][col] += c;
        }
    }
    rows
}

/// Rank by fraction-free Gaussian elimination over the rationals.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != Rational::from_integer(0.into())) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in r + 1..rows.len() {
            let factor = rows[i][c].clone() / pivot.clone();
            if factor != Rational::from_integer(0.into()) {
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i][c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= p.clone() * factor.clone();
                }
            }
        }
        r += 1;
    }
    r
}

/// Forward map of the transformation generated by `-sum q eta - s`: old
/// `(x, y)` to new `(X, Y)` with `x = X + ds/dy(X, y)`, `Y = y + ds/dx(X, y)`,
/// as series in the old variables. Solved by plain fixed-point iteration on
/// `X = x - ds/dy(X, y)`.
pub fn forward_map(s: &PhasePolynomial, rho: usize) -> Vec<PhasePolynomial> {
    let n = s.n();
    let id = identity(n);
    let sy = grad_eta(s);
    let sx = grad_q(s);
    let mut big_x: Vec<PhasePolynomial> = id[..n].to_vec();
    for _ in 0..=rho {
        let args: Vec<PhasePolynomial> = big_x.iter().chain(&id[n..]).cloned().collect();
        big_x = (0..n)
            .map(|j| &id[j] - &sy[j].substitute_truncated(&args, rho).unwrap())
            .collect();
    }
    let args: Vec<PhasePolynomial> = big_x.iter().chain(&id[n..]).cloned().collect();
    let big_y: Vec<PhasePolynomial> = (0..n)
        .map(|j| &id[n + j] + &sx[j].substitute_truncated(&args, rho).unwrap())
        .collect();
    big_x.into_iter().chain(big_y).collect()
}

/// `outer o inner` for maps given as component series.
pub fn compose_maps(outer: &[PhasePolynomial], inner: &[PhasePolynomial], rho: usize) -> Vec<PhasePolynomial> {
    outer.iter().map(|c| c.substitute_truncated(inner, rho).unwrap()).collect()
}

/// Generating perturbation of a near-identity canonical map given by its
/// forward components, through degree `rho`. Rewrites the map in the mixed
/// variables `(u, v) = (new positions, old momenta)`, reads off the closed
/// one-form `(Y - v) du + (x - u) dv` and integrates it by Euler's relation.
/// Returns `None` if the one-form is not closed.
pub fn generating_from_map(map: &[PhasePolynomial], rho: usize) -> Option<PhasePolynomial> {
    let n = map.len() / 2;
    let id = identity(n);
    // old positions x as series in (u, v): x = u - (X(x, v) - x)
    let mut x: Vec<PhasePolynomial> = id[..n].to_vec();
    for _ in 0..=rho + 1 {
        let args: Vec<PhasePolynomial> = x.iter().chain(&id[n..]).cloned().collect();
        x = (0..n)
            .map(|j| {
                let xj = map[j].substitute_truncated(&args, rho).unwrap();
                &id[j] - &(&xj - &x[j])
            })
            .collect();
    }
    let args: Vec<PhasePolynomial> = x.iter().chain(&id[n..]).cloned().collect();
    let omega: Vec<PhasePolynomial> = (0..n)
        .map(|j| &map[n + j].substitute_truncated(&args, rho - 1).unwrap() - &id[n + j])
        .chain((0..n).map(|j| (&x[j] - &id[j]).truncate(rho - 1)))
        .collect();
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            if omega[a].partial(b).unwrap() != omega[b].partial(a).unwrap() {
                return None;
            }
        }
    }
    let mut s = PhasePolynomial::zero(Basis::Real, n);
    for k in 3..=rho {
        let mut sk = PhasePolynomial::zero(Basis::Real, n);
        for (slot, w) in omega.iter().enumerate() {
            sk.add_assign_ref(&mul(&id[slot], &w.homogeneous_part(k - 1)));
        }
        s.add_assign_ref(&sk.scale_rational(&Rational::new(1.into(), (k as i64).into())));
    }
    Some(s)
}

/// Generating perturbation of `tau_last o ... o tau_first` computed from the
/// explicit maps.
pub fn chain_generating(pieces: &[PhasePolynomial], rho: usize) -> Option<PhasePolynomial> {
    let n = pieces[0].n();
    let mut total = identity(n);
    for p in pieces {
        total = compose_maps(&forward_map(p, rho), &total, rho);
    }
    generating_from_map(&total, rho)
}

pub fn series_real(g: &GradedSeries) -> GradedSeries {
    g.to_basis(Basis::Real)
}
