//! Seeded normalize -> restore -> normalize cycles. Case `i` uses the
//! Hamiltonian drawn from seed `seed + i`, so any case can be rerun alone.

use std::time::Instant;

use serde_json::json;

use bgnf::normalizer::{normalize, verify_defining_equation};
use bgnf::restorer::{restore_direct, verify_inverse_equation};
use bgnf::text::{parse_polynomial, ParseOptions};
use bgnf::{FrequencyVector, Fuzzer, GradedSeries, RestoreChoices};

use crate::commands::parse_nu;
use crate::report::{CmdResult, Failure, Outcome, BAD_INPUT, PROPERTY_FAILURE};
use crate::RoundtripArgs;

/// Runs one cycle; `Err` describes the first relation that fails.
fn check(k: &GradedSeries, nu: &FrequencyVector, rho: usize, fault: bool) -> Result<(), String> {
    let first = normalize(k, nu, rho).map_err(|e| format!("normalize: {e}"))?;
    if !verify_defining_equation(k, &first.normal_form, &first.generating, rho) {
        return Err("normalization relation fails".into());
    }
    let mut restored =
        restore_direct(&first.normal_form, nu, rho, &RestoreChoices::zero()).map_err(|e| format!("restore: {e}"))?;
    if fault {
        let h = &mut restored.hamiltonian;
        let extra = parse_polynomial("q1^3", &ParseOptions::with_n(nu.n())).expect("fixed expression");
        let corrupted = &h.piece(3) + &extra.to_basis(h.basis());
        h.set_piece(3, corrupted).expect("cubic piece");
    }
    if !verify_inverse_equation(&restored.hamiltonian, &first.normal_form, &restored.generating, rho) {
        return Err("restoration relation fails".into());
    }
    let second = normalize(&restored.hamiltonian, nu, rho).map_err(|e| format!("second normalize: {e}"))?;
    if !verify_defining_equation(&restored.hamiltonian, &second.normal_form, &second.generating, rho) {
        return Err("second normalization relation fails".into());
    }
    if let Some(d) = (3..=rho).find(|&d| second.normal_form.piece(d) != first.normal_form.piece(d)) {
        return Err(format!("normal forms differ at degree {d}"));
    }
    Ok(())
}

/// Greedily drops terms of degree 3 and up, or failing that sets their
/// coefficient to 1, as long as the case keeps failing.
fn minimize(k: &GradedSeries, nu: &FrequencyVector, rho: usize, fault: bool) -> GradedSeries {
    let fails = |s: &GradedSeries| check(s, nu, rho, fault).is_err();
    let mut best = k.clone();
    loop {
        let mut changed = false;
        for d in 3..=rho {
            let piece = best.piece(d);
            for (m, c) in piece.terms().map(|(m, c)| (m.clone(), c.clone())).collect::<Vec<_>>() {
                let mut trial = best.clone();
                let mut p = trial.piece(d);
                p.add_term(m.clone(), &-&c);
                trial.set_piece(d, p).expect("same degree");
                if fails(&trial) {
                    best = trial;
                    changed = true;
                    continue;
                }
                if !c.is_one() {
                    let mut trial = best.clone();
                    let mut p = trial.piece(d);
                    p.add_term(m.clone(), &(&bgnf::ParamScalar::one() - &c));
                    trial.set_piece(d, p).expect("same degree");
                    if fails(&trial) {
                        best = trial;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return best;
        }
    }
}

pub fn run(a: &RoundtripArgs) -> CmdResult {
    let nu = parse_nu(&a.nu)?;
    if a.degree < 3 {
        return Err(Failure::new(BAD_INPUT, format!("--degree must be at least 3, got {}", a.degree)));
    }
    let mut text = String::new();
    let mut cases = Vec::new();
    let mut first_failure = None;
    for i in 0..a.cases {
        let seed = a.seed.wrapping_add(i as u64);
        let k = Fuzzer::new(seed).hamiltonian(&nu, a.degree);
        let start = Instant::now();
        let result = check(&k, &nu, a.degree, a.inject_fault);
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        match &result {
            Ok(()) => text.push_str(&format!("case {i} seed {seed}: ok ({ms:.1} ms)\n")),
            Err(reason) => {
                text.push_str(&format!("case {i} seed {seed}: FAIL {reason} ({ms:.1} ms)\n"));
                first_failure.get_or_insert((i, k));
            }
        }
        cases.push(json!({
            "case": i,
            "seed": seed,
            "ok": result.is_ok(),
            "reason": result.err(),
            "timing_ms": ms,
        }));
    }
    let mut outcome = Outcome::ok("PASS", json!(cases), String::new());
    if let Some((i, k)) = first_failure {
        let small = minimize(&k, &nu, a.degree, a.inject_fault);
        let reason = check(&small, &nu, a.degree, a.inject_fault).err().unwrap_or_default();
        text.push_str(&format!("minimized counterexample from case {i} ({reason}):\n"));
        outcome.verdict = "FAIL".into();
        outcome.code = PROPERTY_FAILURE;
        outcome.output = Some(small.to_text());
        outcome.error = Some(format!("case {i}: {reason}"));
    }
    outcome.text = text;
    Ok(outcome)
}
