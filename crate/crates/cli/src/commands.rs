//! The `normalize`, `restore` and `bdic` subcommands.

use std::path::PathBuf;

use serde_json::json;

use bgnf::bdic::{bdic_general, bdic_phocp, bdic_phoqp, map_g_from_f};
use bgnf::compose::compose_chain;
use bgnf::models::{cubic_potential, quartic_potential};
use bgnf::normalizer::{defining_residual, normalize as normalize_series};
use bgnf::restorer::{inverse_residual, restore_direct, restore_staged};
use bgnf::series::parse_series;
use bgnf::text::{format_polynomial, format_scalar, parse_polynomial, parse_scalar, ParseOptions};
use bgnf::{
    Basis, FrequencyVector, GradedSeries, ImageChoice, ParamScalar, PhasePolynomial, RestoreChoices, SeriesOptions,
    Verdict,
};

use crate::report::{in_file, read_file, write_file, CmdResult, Failure, Outcome, BAD_INPUT, PROPERTY_FAILURE};
use crate::{BdicArgs, BdicType, NormalizeArgs, RestoreArgs, VarsArg};

pub fn parse_nu(src: &str) -> Result<FrequencyVector, Failure> {
    FrequencyVector::parse(src).map_err(|e| Failure::new(BAD_INPUT, format!("--nu: {e}")))
}

fn read_series(path: &std::path::Path, nu: &FrequencyVector, vars: VarsArg) -> Result<GradedSeries, Failure> {
    let opts = SeriesOptions { nu: Some(nu.clone()), n: Some(nu.n()), qp_alias: vars == VarsArg::Qp };
    parse_series(&read_file(path)?, &opts).map_err(in_file(path))
}

/// Writes `text` to `path`, or keeps it as the command's main output.
fn deliver(outcome: &mut Outcome, path: &Option<PathBuf>, text: String) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, &text),
        None => {
            outcome.output = Some(text);
            Ok(())
        }
    }
}

pub fn normalize(a: &NormalizeArgs) -> CmdResult {
    let nu = parse_nu(&a.nu)?;
    let k = read_series(&a.input, &nu, a.vars)?;
    let out = normalize_series(&k, &nu, a.degree)?;
    let residual = defining_residual(&k, &out.normal_form, &out.generating, a.degree)?;
    let basis = a.basis.map(Basis::from).unwrap_or(k.basis());
    let verdict = if residual.is_zero() { "OK" } else { "FAIL" };
    let mut outcome = Outcome::ok(verdict, json!({ "defining_equation": format_polynomial(&residual, " ") }), String::new());
    if !residual.is_zero() {
        outcome.code = PROPERTY_FAILURE;
    }
    if let Some(path) = &a.emit_generating {
        write_file(path, &out.generating.to_basis(basis).to_text())?;
    }
    deliver(&mut outcome, &a.output, out.normal_form.to_basis(basis).to_text())?;
    Ok(outcome)
}

/// `zero`, `fresh:a,c,...` or a choices file.
fn parse_choices(spec: &str, rho: usize, n: usize, vars: VarsArg) -> Result<RestoreChoices, Failure> {
    if spec == "zero" {
        return Ok(RestoreChoices::zero());
    }
    if let Some(list) = spec.strip_prefix("fresh:") {
        let prefixes: Vec<&str> = list.split(',').map(str::trim).collect();
        if prefixes.iter().any(|p| p.is_empty() || !p.chars().all(|c| c.is_ascii_alphabetic() || c == '_')) {
            return Err(Failure::new(BAD_INPUT, format!("--choices: invalid prefix list '{list}'")));
        }
        let mut choices = RestoreChoices::zero();
        for k in 3..=rho {
            let p = prefixes.get(k - 3).or(prefixes.last()).expect("nonempty");
            choices.set(k, ImageChoice::Fresh(p.to_string()));
        }
        return Ok(choices);
    }
    let path = PathBuf::from(spec);
    let opts = ParseOptions { n: Some(n), qp_alias: vars == VarsArg::Qp, ..ParseOptions::default() };
    RestoreChoices::parse(&read_file(&path)?, &opts).map_err(in_file(&path))
}

fn first_difference(a: &GradedSeries, b: &GradedSeries, rho: usize) -> Option<usize> {
    (3..=rho).find(|&k| a.piece(k) != b.piece(k))
}

pub fn restore(a: &RestoreArgs) -> CmdResult {
    let nu = parse_nu(&a.nu)?;
    let rho = a.degree;
    let g = read_series(&a.input, &nu, a.vars)?;
    let choices = parse_choices(&a.choices, rho, nu.n(), a.vars)?;
    let basis = a.basis.map(Basis::from).unwrap_or(g.basis());

    // the staged transformation is generated by the composite of its stages
    let (h, s, mismatch) = if a.staged {
        let staged = restore_staged(&g, &nu, rho, &choices)?;
        let s = compose_chain(&staged.stage_generators, rho)?;
        (staged.hamiltonian, s, None)
    } else {
        let direct = restore_direct(&g, &nu, rho, &choices)?;
        let mut mismatch = None;
        if a.both {
            let staged = restore_staged(&g, &nu, rho, &choices)?;
            mismatch = first_difference(&staged.hamiltonian, &direct.hamiltonian, rho);
        }
        (direct.hamiltonian, direct.generating, mismatch)
    };

    let residual = inverse_residual(&h, &g, &s, rho)?;
    let mut residuals = json!({ "inverse_relation": format_polynomial(&residual, " ") });
    if a.both {
        residuals["staged_vs_direct_first_difference"] = json!(mismatch);
    }
    let (verdict, problem) = match (residual.is_zero(), mismatch) {
        (true, None) => ("OK", None),
        (false, _) => ("FAIL", Some("inverse relation does not hold".to_string())),
        (true, Some(k)) => ("MISMATCH", Some(format!("staged and direct results differ at degree {k}"))),
    };
    let mut outcome = Outcome::ok(verdict, residuals, String::new());
    if problem.is_some() {
        outcome.code = PROPERTY_FAILURE;
        outcome.error = problem;
    }
    if let Some(path) = &a.emit_generating {
        write_file(path, &s.to_basis(basis).to_text())?;
    }
    deliver(&mut outcome, &a.output, h.to_basis(basis).to_text())?;
    Ok(outcome)
}

fn coefficients<const N: usize>(flag: &str, src: &str) -> Result<[ParamScalar; N], Failure> {
    let items: Vec<&str> = src.split(',').collect();
    if items.len() != N {
        return Err(Failure::new(BAD_INPUT, format!("--{flag}: expected {N} coefficients, found {}", items.len())));
    }
    let mut out = Vec::with_capacity(N);
    for (i, item) in items.iter().enumerate() {
        let c = parse_scalar(item.trim())
            .map_err(|e| Failure::new(BAD_INPUT, format!("--{flag}: coefficient {}: {e}", i + 1)))?;
        out.push(c);
    }
    Ok(out.try_into().expect("length checked"))
}

fn need<'a>(value: &'a Option<String>, flag: &str, kind: &str) -> Result<&'a str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| Failure::new(BAD_INPUT, format!("--type {kind} needs --{flag}")))
}

fn branch(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "holds",
        Some(false) => "fails",
        None => "undecided",
    }
}

fn harmonic() -> PhasePolynomial {
    parse_polynomial("1/2*(q1^2 + q2^2)", &ParseOptions::with_n(2)).expect("fixed expression")
}

pub fn bdic(a: &BdicArgs) -> CmdResult {
    match a.kind {
        BdicType::Phocp => {
            let f = coefficients::<4>("f", need(&a.f, "f", "phocp")?)?;
            let r = bdic_phocp(&f);
            let residual = format_scalar(&r.residual);
            let text = format!(
                "residual: {residual}\nbranch f1 = 2 f3, f2 = f4 = 0: {}\nbranch f4 = 2 f2, f1 = f3 = 0: {}\nverdict: {}\n",
                branch(r.branch_b),
                branch(r.branch_c),
                r.verdict.name()
            );
            Ok(Outcome::ok(r.verdict.name(), json!([residual]), text))
        }
        BdicType::Phoqp => {
            let g = match (&a.g, &a.f) {
                (Some(g), _) => coefficients::<5>("g", g)?,
                (None, Some(f)) => map_g_from_f(&coefficients::<4>("f", f)?),
                (None, None) => return Err(Failure::new(BAD_INPUT, "--type phoqp needs --g or --f")),
            };
            let r = bdic_phoqp(&g);
            let residuals: Vec<String> = r.residuals.iter().map(format_scalar).collect();
            let mut text = String::new();
            for (i, x) in residuals.iter().enumerate() {
                text.push_str(&format!("residual {}: {x}\n", i + 1));
            }
            text.push_str(&format!(
                "branch g3 = 2 g1 = 2 g5, g2 = g4 = 0: {}\nverdict: {}\n",
                branch(r.branch_a),
                r.verdict.name()
            ));
            Ok(Outcome::ok(r.verdict.name(), json!(residuals), text))
        }
        BdicType::General => {
            let v = match (&a.potential, &a.f, &a.g) {
                (Some(path), _, _) => {
                    let opts = ParseOptions { n: Some(2), default_basis: Some(Basis::Real), ..ParseOptions::default() };
                    parse_polynomial(&read_file(path)?, &opts).map_err(in_file(path))?
                }
                (None, Some(f), _) => &harmonic() + &cubic_potential(&coefficients::<4>("f", f)?),
                (None, None, Some(g)) => &harmonic() + &quartic_potential(&coefficients::<5>("g", g)?),
                _ => return Err(Failure::new(BAD_INPUT, "--type general needs --potential, --f or --g")),
            };
            let w = bdic_general(&v)?;
            let verdict = if w.is_nontrivial() { Verdict::Satisfied } else { Verdict::Violated };
            let vectors: Vec<Vec<String>> =
                w.basis.iter().map(|c| c.iter().map(ToString::to_string).collect()).collect();
            let mut text = format!("witness dimension: {}\n", w.dimension());
            for c in &vectors {
                text.push_str(&format!("(alpha, beta, beta', gamma, gamma') = ({})\n", c.join(", ")));
            }
            text.push_str(&format!("verdict: {}\n", verdict.name()));
            Ok(Outcome::ok(verdict.name(), json!({ "dimension": w.dimension(), "witness": vectors }), text))
        }
    }
}
