//! Acceptance run: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Runs without the libtest harness so the lines are always shown.
//!
//! The composition criterion asks `compose_chain` to return its input pieces
//! unchanged. That is false from degree 5 on: the composite of `S_3` and
//! `S_4` carries the cross term `dS_4/deta . dS_3/dq`, and the explicit-map
//! oracle agrees with `compose_chain`. The line is reported as FAIL, and the
//! run only errors if the failure is not exactly that defect.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use bgnf::bdic::{map_g_from_f, phocp_polynomial, phoqp_polynomials, verify_shared_normal_form};
use bgnf::canonical::{apply_d, image_part, kernel_basis};
use bgnf::compose::{compose_chain, transformation_map};
use bgnf::models::{oscillator, symbolic_f};
use bgnf::normalizer::{normalize, verify_defining_equation};
use bgnf::restorer::{compute_theta, fresh_parameter_count, restore_direct, restore_staged, verify_inverse_equation};
use bgnf::text::{parse_polynomial, ParseOptions};
use bgnf::{rat, Basis, FrequencyVector, Fuzzer, GradedSeries, Rational, RestoreChoices};
use common::family::*;
use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit() -> FrequencyVector {
    FrequencyVector::from_ints(&[1, 1]).unwrap()
}

fn golden_normal_form() -> Outcome {
    let g = cubic_normal_form();
    let diff = differences(&g.to_polynomial(), &complex(NORMAL_FORM));
    ensure(diff.is_empty(), || diff.join("; "))?;
    let terms = g.to_polynomial().len();
    Ok(format!("{terms} terms match"))
}

fn golden_inverse_family() -> Outcome {
    let h = restored_family().hamiltonian.to_basis(Basis::Complex);
    let names = |k: usize, prefix: char| -> BTreeSet<String> {
        h.piece(k)
            .terms()
            .flat_map(|(_, c)| c.symbols())
            .map(|s| s.name().to_string())
            .filter(|s| s.starts_with(prefix) && !s.ends_with('c'))
            .collect()
    };
    let (a, c) = (names(3, 'a'), names(4, 'c'));
    ensure(a.len() == 10 && c.len() == 13, || format!("{} + {} fresh parameters", a.len(), c.len()))?;
    ensure(fresh_parameter_count(3, &unit()) == 10 && fresh_parameter_count(4, &unit()) == 13, || {
        "fresh parameter count".into()
    })?;
    let cubic = differences(&h.piece(3), &complex(CUBIC_FAMILY));
    ensure(cubic.is_empty(), || cubic.join("; "))?;
    let h4 = h.piece(4);
    let free = differences(&select(&h4, |m| has_prefix(m, 'c')), &complex(QUARTIC_FAMILY));
    ensure(free.is_empty(), || free.join("; "))?;
    let normal = select(&h4, |m| !has_prefix(m, 'c') && !has_prefix(m, 'a'));
    let normal = differences(&normal, &cubic_normal_form().piece(4));
    ensure(normal.is_empty(), || normal.join("; "))?;
    let cross = differences(&select(&h4, |m| has_prefix(m, 'a')), &complex(CROSS_TERMS));
    ensure(cross.is_empty(), || cross.join("; "))?;
    Ok("10 + 13 parameters, all a-quadratic blocks match".into())
}

fn henon_heiles() -> Outcome {
    let h = restored_family().hamiltonian.substitute_params(&henon_heiles_values());
    let v = parse_polynomial("q1^2*q2 + mu*q2^3", &ParseOptions::with_n(2)).unwrap();
    let expected = oscillator(&v, 4).map_err(|e| e.to_string())?;
    ensure(h.to_basis(Basis::Real) == expected, || "specialized family differs".into())?;
    Ok("specialization gives the potential q1^2 q2 + mu q2^3".into())
}

fn bdic_bridge() -> Outcome {
    let f = symbolic_f();
    let divisor = phocp_polynomial(&f);
    for p in phoqp_polynomials(&map_g_from_f(&f)) {
        let (_, remainder) = p.div_rem(&divisor).ok_or("division failed")?;
        ensure(remainder.is_zero(), || "nonzero remainder".into())?;
    }
    let mut fz = Fuzzer::new(400);
    for _ in 0..20 {
        let (f1, f2, f3) = (fz.rational(), fz.rational(), fz.rational());
        let f4 = (f2.clone() * f2.clone() + f3.clone() * f3.clone() - rat(3, 1) * f1.clone() * f3.clone())
            / (rat(3, 1) * f2.clone());
        let f: [Rational; 4] = [f1, f2, f3, f4];
        ensure(verify_shared_normal_form(&f).map_err(|e| e.to_string())?, || format!("f = {f:?}"))?;
    }
    Ok("3 divisions exact, 20 shared normal forms".into())
}

fn roundtrip() -> Outcome {
    let nu = unit();
    for case in 0..100u64 {
        let rho = 4 + (case % 3) as usize;
        let k = Fuzzer::new(500 + case).hamiltonian(&nu, rho);
        let err = |e: bgnf::Error| format!("case {case}: {e}");
        let first = normalize(&k, &nu, rho).map_err(err)?;
        let h = restore_direct(&first.normal_form, &nu, rho, &RestoreChoices::zero()).map_err(err)?;
        let second = normalize(&h.hamiltonian, &nu, rho).map_err(err)?;
        ensure(verify_defining_equation(&k, &first.normal_form, &first.generating, rho), || {
            format!("case {case}: first leg")
        })?;
        ensure(verify_inverse_equation(&h.hamiltonian, &first.normal_form, &h.generating, rho), || {
            format!("case {case}: restoration")
        })?;
        ensure(verify_defining_equation(&h.hamiltonian, &second.normal_form, &second.generating, rho), || {
            format!("case {case}: second leg")
        })?;
        ensure(second.normal_form == first.normal_form, || format!("case {case}: normal forms differ"))?;
    }
    Ok("100 cases".into())
}

fn staged_equals_direct() -> Outcome {
    let nu = unit();
    for case in 0..100u64 {
        let rho = 3 + (case % 4) as usize;
        let mut fz = Fuzzer::new(600 + case);
        fz.density = 0.3;
        let g = fz.normal_form(&nu, rho);
        let choices = fz.choices(&nu, rho);
        let err = |e: bgnf::Error| format!("case {case}: {e}");
        let direct = restore_direct(&g, &nu, rho, &choices).map_err(err)?;
        let staged = restore_staged(&g, &nu, rho, &choices).map_err(err)?;
        ensure(staged.hamiltonian == direct.hamiltonian, || format!("case {case}, rho {rho}"))?;
    }
    Ok("100 cases, nu = (1,1), rho 3..6".into())
}

fn closed_forms() -> Outcome {
    let freqs = [unit(), FrequencyVector::from_ints(&[1, 2]).unwrap()];
    let mut fz = Fuzzer::new(700);
    for case in 0..50 {
        let nu = &freqs[case % 2];
        let k = fz.hamiltonian(nu, 4);
        let out = normalize(&k, nu, 4).map_err(|e| e.to_string())?;
        let (g, w) = (series_real(&out.normal_form), out.generating.to_basis(Basis::Real));
        let phi = closed_form_degree4(&k.piece(3), &g.piece(3), &w.piece(3), nu);
        let lhs = &g.piece(4) + &apply_d(&w.piece(4), nu).unwrap();
        ensure(phi == substitution_residual(&k.head(3), &g.head(3), &w.piece(3), 4), || format!("Phi case {case}"))?;
        ensure(lhs == &k.piece(4) + &phi, || format!("Phi relation case {case}"))?;

        let g = fz.normal_form(nu, 4);
        let choices = fz.choices(nu, 4);
        let out = restore_direct(&g, nu, 4, &choices).map_err(|e| e.to_string())?;
        let (h, s) = (series_real(&out.hamiltonian), out.generating.to_basis(Basis::Real));
        let psi = closed_form_degree4(&h.piece(3), &g.piece(3), &s.piece(3), nu);
        let lhs = &h.piece(4) - &apply_d(&s.piece(4), nu).unwrap();
        ensure(psi == substitution_residual(&h.head(3), &g.head(3), &s.piece(3), 4), || format!("Psi case {case}"))?;
        ensure(lhs == &g.piece(4) - &psi, || format!("Psi relation case {case}"))?;
    }
    let mut checks = 0;
    for nu in &freqs {
        for r in 3..=4 {
            let prev = fz.hamiltonian(nu, 6);
            let s_r = image_part(&fz.real_polynomial(2, r).to_complex(), nu).to_real();
            let mut cur = GradedSeries::new(Basis::Real, 2, Some(nu.clone()), 6);
            for k in 3..r {
                cur.set_piece(k, prev.piece(k)).unwrap();
            }
            cur.set_piece(r, &prev.piece(r) + &apply_d(&s_r, nu).unwrap()).unwrap();
            for k in r + 1..=6 {
                let oracle = -&substitution_residual(&cur.head(k - 1), &prev.head(k - 1), &s_r, k);
                let theta = compute_theta(r, k, &s_r, &prev, &cur).map_err(|e| e.to_string())?;
                ensure(theta == oracle, || format!("Theta r={r} k={k} nu={nu}"))?;
                cur.set_piece(k, &prev.piece(k) + &theta).unwrap();
                checks += 1;
            }
        }
    }
    Ok(format!("50 + 50 degree-4 corrections, {checks} stage corrections"))
}

fn kernel_structure() -> Outcome {
    for nu in [[1, 1], [1, 2], [2, 3]] {
        let nu = FrequencyVector::from_ints(&nu).unwrap();
        for k in 0..=6 {
            let m = d_matrix(k, &nu);
            let nullity = m.len() - rank(m);
            let dim = kernel_basis(k, 2, &nu).len();
            ensure(dim == nullity, || format!("nu={nu} k={k}: {dim} vs {nullity}"))?;
            if nu == unit() && k % 2 == 1 {
                ensure(dim == 0, || format!("odd degree {k} has kernel"))?;
            }
        }
    }
    Ok("3 frequency vectors, degrees 0..6".into())
}

/// Returns the outcome line and whether any failure is the expected
/// cross-term defect only.
fn composition() -> (Outcome, bool) {
    let mut fz = Fuzzer::new(900);
    fz.density = 0.3;
    let mut altered = 0;
    let mut predicted = true;
    for case in 0..50 {
        let rho = 3 + case % 4;
        let pieces = fz.chain(2, rho);
        let composed = match compose_chain(&pieces, rho) {
            Ok(c) => c,
            Err(e) => return (Err(e.to_string()), false),
        };
        let symplectic = transformation_map(&composed, rho).and_then(|m| m.is_symplectic_through(rho - 1));
        if !matches!(symplectic, Ok(true)) {
            return (Err(format!("chain {case} not symplectic through degree {}", rho - 1)), false);
        }
        let exact = (3..=rho).all(|k| composed.piece(k) == pieces[k - 3]);
        if !exact {
            altered += 1;
            let low_ok = (3..=rho.min(4)).all(|k| composed.piece(k) == pieces[k - 3]);
            let oracle_ok = chain_generating(&pieces, rho).as_ref() == Some(&composed.perturbation());
            predicted &= low_ok && oracle_ok && rho >= 5;
        }
    }
    if altered == 0 {
        (Ok("50 chains reproduce their pieces; symplectic".into()), true)
    } else {
        let msg = format!(
            "{altered}/50 chains gain cross terms from degree 5 (matching explicit map composition); symplectic through rho-1 in all 50"
        );
        (Err(msg), predicted)
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden normal form", golden_normal_form),
        ("golden inverse family", golden_inverse_family),
        ("Henon-Heiles specialization", henon_heiles),
        ("integrability bridge", bdic_bridge),
        ("normalize-restore roundtrip", roundtrip),
        ("staged equals direct", staged_equals_direct),
        ("closed-form corrections", closed_forms),
        ("kernel structure", kernel_structure),
    ];
    let mut unexpected = Vec::new();
    let report = |i: usize, name: &str, outcome: &Outcome, start: Instant| {
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {i} {name} ({detail}) [{ms} ms]"),
            Err(detail) => println!("FAIL {i} {name} ({detail}) [{ms} ms]"),
        }
    };
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        report(i + 1, name, &outcome, start);
        if outcome.is_err() {
            unexpected.push(i + 1);
        }
    }
    let start = Instant::now();
    let (outcome, predicted) = composition();
    report(9, "composition expansion", &outcome, start);
    if outcome.is_err() && !predicted {
        unexpected.push(9);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
