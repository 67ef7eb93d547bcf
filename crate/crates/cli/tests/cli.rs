//! End-to-end runs of the `bgnf` binary: exit codes, golden files, JSON
//! reports and the fuzz loop.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bgnf::normalizer::normalize;
use bgnf::series::{parse_generating, parse_series};
use bgnf::text::{format_polynomial, parse_polynomial, ParseOptions};
use bgnf::{Basis, FrequencyVector, Fuzzer, ImageChoice, RestoreChoices, SeriesOptions};

const NORMAL_FORM_TRANSCRIPTION: &str = include_str!("../../core/tests/data/cubic_normal_form.txt");
const CROSS_TERMS_TRANSCRIPTION: &str = include_str!("../../core/tests/data/restored_quartic_cross_terms.txt");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn bgnf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgnf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn unit() -> FrequencyVector {
    FrequencyVector::from_ints(&[1, 1]).unwrap()
}

fn series_opts(nu: &FrequencyVector) -> SeriesOptions {
    SeriesOptions { nu: Some(nu.clone()), n: Some(nu.n()), qp_alias: false }
}

fn normalize_cubic(extra: &[&str]) -> Output {
    normalize_cubic_with("1,1", extra)
}

fn normalize_cubic_with(nu: &str, extra: &[&str]) -> Output {
    let input = data("cubic_oscillator.txt");
    let mut args = vec!["normalize", "--input", path_str(&input), "--degree", "4", "--nu", nu];
    args.extend_from_slice(extra);
    bgnf(&args)
}

#[test]
fn normalize_cubic_oscillator_matches_golden_file() {
    let out = normalize_cubic(&["--basis", "complex"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let golden = std::fs::read_to_string(data("cubic_normal_form.gold")).unwrap();
    assert_eq!(stdout(&out), golden);
    // the golden file says the same as the transcribed closed form
    let parsed = parse_series(&golden, &series_opts(&unit())).unwrap();
    let expected = parse_polynomial(NORMAL_FORM_TRANSCRIPTION, &ParseOptions::with_n(2)).unwrap();
    assert_eq!(parsed.to_polynomial(), expected);
}

#[test]
fn written_files_reparse_to_computed_values() {
    let dir = tempfile::tempdir().unwrap();
    let (g_path, w_path) = (dir.path().join("g.txt"), dir.path().join("w.txt"));
    let out = normalize_cubic(&["--output", path_str(&g_path), "--emit-generating", path_str(&w_path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let src = std::fs::read_to_string(data("cubic_oscillator.txt")).unwrap();
    let k = parse_series(&src, &series_opts(&unit())).unwrap();
    let expected = normalize(&k, &unit(), 4).unwrap();
    let g = parse_series(&std::fs::read_to_string(&g_path).unwrap(), &series_opts(&unit())).unwrap();
    assert_eq!(g, expected.normal_form);
    let w = parse_generating(&std::fs::read_to_string(&w_path).unwrap(), &series_opts(&unit())).unwrap();
    assert_eq!(w, expected.generating);
}

#[test]
fn output_is_deterministic() {
    assert_eq!(normalize_cubic(&[]).stdout, normalize_cubic(&[]).stdout);
}

#[test]
fn quadratic_only_input_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("k.txt");
    std::fs::write(&input, "# basis real\n# quadratic 1,1\n").unwrap();
    let out = bgnf(&["normalize", "--input", path_str(&input), "--degree", "4", "--nu", "1,1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "# basis real\n# n 2\n# truncation 4\n# quadratic 1,1\n");
}

#[test]
fn momentum_names_accepted_under_qp_alias() {
    let dir = tempfile::tempdir().unwrap();
    let with_p = dir.path().join("p.txt");
    let with_eta = dir.path().join("eta.txt");
    std::fs::write(&with_p, "# quadratic 1,1\n# degree 3\nq1^2*p1 + 2*q2*p1*p2\n").unwrap();
    std::fs::write(&with_eta, "# quadratic 1,1\n# degree 3\nq1^2*eta1 + 2*q2*eta1*eta2\n").unwrap();
    let run = |p: &Path, extra: &[&str]| {
        let mut args = vec!["normalize", "--input", path_str(p), "--degree", "4", "--nu", "1,1"];
        args.extend_from_slice(extra);
        bgnf(&args)
    };
    let aliased = run(&with_p, &["--vars", "qp"]);
    assert_eq!(code(&aliased), 0, "{}", stderr(&aliased));
    assert_eq!(aliased.stdout, run(&with_eta, &[]).stdout);
    // without the alias p1 is a parameter, so the section is not cubic
    assert_eq!(code(&run(&with_p, &[])), 2);
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "# quadratic 1,1\n# degree 3\nq1^3 + 2**q2^3\n").unwrap();
    let out = bgnf(&["normalize", "--input", path_str(&input), "--degree", "4", "--nu", "1,1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3, column"), "{}", stderr(&out));
}

#[test]
fn quadratic_mismatch_exits_3() {
    let out = normalize_cubic_with("1,2", &[]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

fn restore_golden(choices: &str, extra: &[&str]) -> Output {
    let input = data("cubic_normal_form.gold");
    let mut args = vec!["restore", "--input", path_str(&input), "--degree", "4", "--nu", "1,1", "--choices", choices];
    args.extend_from_slice(extra);
    bgnf(&args)
}

#[test]
fn restore_fresh_family_matches_golden_file() {
    let golden = std::fs::read_to_string(data("cubic_family.gold")).unwrap();
    let from_file = restore_golden(path_str(&data("fresh_a_c.choices")), &[]);
    assert_eq!(code(&from_file), 0, "{}", stderr(&from_file));
    assert_eq!(stdout(&from_file), golden);
    assert_eq!(stdout(&restore_golden("fresh:a,c", &[])), golden);

    let h = parse_series(&golden, &series_opts(&unit())).unwrap();
    let fresh: std::collections::BTreeSet<String> = h
        .to_polynomial()
        .terms()
        .flat_map(|(_, c)| c.symbols())
        .map(|s| s.name().to_string())
        .filter(|s| (s.starts_with('a') || s.starts_with('c')) && !s.ends_with('c'))
        .collect();
    assert_eq!(fresh.len(), 23);
    // the a-quadratic part of the quartic piece is the transcribed one
    let h4 = h.piece(4);
    let cross = h4.map_coefficients(|c| {
        let mut out = bgnf::ParamScalar::zero();
        for (m, x) in c.terms() {
            if m.powers().iter().filter(|(s, _)| s.name().starts_with('a')).map(|(_, e)| *e).sum::<u32>() == 2 {
                out.add_term(m.clone(), x);
            }
        }
        out
    });
    let expected = parse_polynomial(CROSS_TERMS_TRANSCRIPTION, &ParseOptions::with_n(2)).unwrap();
    assert_eq!(cross, expected);
}

#[test]
fn staged_restore_of_golden_family_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let s_path = dir.path().join("s.txt");
    let direct = restore_golden("fresh:a,c", &[]);
    let staged = restore_golden("fresh:a,c", &["--staged", "--emit-generating", path_str(&s_path)]);
    assert_eq!(code(&staged), 0, "{}", stderr(&staged));
    assert_eq!(staged.stdout, direct.stdout);
    let s = std::fs::read_to_string(&s_path).unwrap();
    assert!(s.starts_with("# generating third\n"));
    assert_eq!(code(&restore_golden("fresh:a,c", &["--both"])), 0);
}

#[test]
fn zero_choices_keep_the_cubic_piece() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    std::fs::write(&input, "# quadratic 1,2\n# degree 3\n2*z1^2*zb2 + 2*zb1^2*z2\n").unwrap();
    let out = bgnf(&["restore", "--input", path_str(&input), "--degree", "4", "--nu", "1,2", "--basis", "complex"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let nu = FrequencyVector::from_ints(&[1, 2]).unwrap();
    let h = parse_series(&stdout(&out), &series_opts(&nu)).unwrap();
    let g3 = parse_polynomial("2*z1^2*zb2 + 2*zb1^2*z2", &ParseOptions::with_n(2)).unwrap();
    assert_eq!(h.piece(3), g3);
}

#[test]
fn input_outside_normal_form_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    std::fs::write(&input, "# quadratic 1,1\n# degree 3\nz1^2*zb1 + z1*zb1^2\n").unwrap();
    let out = bgnf(&["restore", "--input", path_str(&input), "--degree", "4", "--nu", "1,1"]);
    assert_eq!(code(&out), 4);
    let err = stderr(&out);
    assert!(err.contains("degree 3") && err.contains("z1^2*zb1"), "{err}");
}

#[test]
fn malformed_choices_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let choices = dir.path().join("c.txt");
    std::fs::write(&choices, "degree 3: zero\ndegree 4: sometimes\n").unwrap();
    let out = restore_golden(path_str(&choices), &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

fn choices_file(choices: &RestoreChoices, rho: usize) -> String {
    let mut s = String::new();
    for k in 3..=rho {
        match choices.get(k) {
            ImageChoice::Zero => s.push_str(&format!("degree {k}: zero\n")),
            ImageChoice::Fresh(p) => s.push_str(&format!("degree {k}: fresh {p}\n")),
            ImageChoice::Explicit(p) => s.push_str(&format!("degree {k}: explicit {}\n", format_polynomial(p, " "))),
        }
    }
    s
}

/// Writes a fuzzed normal form and choices and runs `restore --both`.
fn restore_both(dir: &Path, seed: u64, nu: &FrequencyVector, rho: usize) -> Output {
    let mut fz = Fuzzer::new(seed);
    fz.density = 0.3;
    let g = fz.normal_form(nu, rho);
    let choices = fz.choices(nu, rho);
    let (g_path, c_path) = (dir.join(format!("g{seed}.txt")), dir.join(format!("c{seed}.txt")));
    std::fs::write(&g_path, g.to_text()).unwrap();
    std::fs::write(&c_path, choices_file(&choices, rho)).unwrap();
    let (rho, nu) = (rho.to_string(), nu.to_string());
    bgnf(&["restore", "--input", path_str(&g_path), "--degree", &rho, "--nu", &nu, "--choices", path_str(&c_path), "--both"])
}

#[test]
fn both_modes_agree_on_fuzzed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100 {
        let rho = 3 + (seed % 4) as usize;
        let out = restore_both(dir.path(), 1000 + seed, &unit(), rho);
        assert_eq!(code(&out), 0, "seed {seed}: {}", stderr(&out));
    }
}

#[test]
fn both_modes_report_resonant_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let nu = FrequencyVector::from_ints(&[1, 2]).unwrap();
    let codes: Vec<Output> = (0..4).map(|seed| restore_both(dir.path(), seed, &nu, 6)).collect();
    let mismatches: Vec<&Output> = codes.iter().filter(|o| code(o) == 1).collect();
    assert!(!mismatches.is_empty());
    for o in mismatches {
        assert!(stderr(o).contains("differ at degree 6"), "{}", stderr(o));
    }
}

#[test]
fn bdic_examples() {
    let out = bgnf(&["bdic", "--type", "phocp", "--f", "0,1,0,1/3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with("verdict: SATISFIED\n"));
    let out = bgnf(&["bdic", "--type", "phocp", "--f", "1,1,1,1"]);
    assert!(stdout(&out).contains("residual: 4\n") && stdout(&out).ends_with("verdict: VIOLATED\n"));
    let out = bgnf(&["bdic", "--type", "phoqp", "--g", "0,0,0,0,0"]);
    assert!(stdout(&out).ends_with("verdict: SATISFIED\n"));
    let out = bgnf(&["bdic", "--type", "phocp", "--f", "f1,f2,f3,f4"]);
    assert!(stdout(&out).ends_with("verdict: SYMBOLIC\n"));

    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.txt");
    std::fs::write(&v, "1/2*(q1^2 + q2^2)\n").unwrap();
    let out = bgnf(&["bdic", "--type", "general", "--potential", path_str(&v)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("witness dimension: 3\n"));
    // Henon-Heiles is integrable only at the special ratio
    let out = bgnf(&["bdic", "--type", "general", "--f", "0,1,0,1/3"]);
    assert!(stdout(&out).ends_with("verdict: SATISFIED\n"));
    let out = bgnf(&["bdic", "--type", "general", "--f", "0,1,0,1"]);
    assert!(stdout(&out).ends_with("verdict: VIOLATED\n"));
}

#[test]
fn bdic_malformed_coefficients_exit_2() {
    assert_eq!(code(&bgnf(&["bdic", "--type", "phocp", "--f", "1,2,3"])), 2);
    assert_eq!(code(&bgnf(&["bdic", "--type", "phocp", "--f", "1,2,3,/"])), 2);
    assert_eq!(code(&bgnf(&["bdic", "--type", "phoqp"])), 2);
}

#[test]
fn json_report_has_the_fixed_fields() {
    for args in [
        vec!["--json", "bdic", "--type", "phocp", "--f", "0,1,0,1/3"],
        vec!["roundtrip", "--json", "--seed", "3", "--cases", "2", "--degree", "4"],
    ] {
        let out = bgnf(&args);
        assert_eq!(code(&out), 0);
        let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
        for key in ["command", "inputs", "verdict", "residuals", "timing_ms"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
    let out = bgnf(&["--json", "bdic", "--type", "phocp", "--f", "0,1,0,1/3"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["command"], "bdic");
    assert_eq!(v["verdict"], "SATISFIED");
    assert_eq!(v["residuals"], serde_json::json!(["0"]));
    let out = normalize_cubic_with("1,2", &["--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["verdict"], "ERROR");
    assert_eq!(code(&out), 3);
}

#[test]
fn roundtrip_passes_and_lists_cases() {
    let out = bgnf(&["roundtrip", "--seed", "1", "--cases", "10", "--degree", "4", "--nu", "1,1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.contains(": ok (") && l.ends_with(" ms)")));
}

#[test]
fn roundtrip_with_no_cases_is_empty() {
    let out = bgnf(&["roundtrip", "--seed", "1", "--cases", "0", "--degree", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
}

#[test]
fn roundtrip_reports_injected_fault_with_counterexample() {
    let out = bgnf(&["roundtrip", "--seed", "1", "--cases", "3", "--degree", "5", "--inject-fault"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("minimized counterexample from case 0"), "{text}");
    // everything above the oscillator is removed by the minimizer
    let tail = &text[text.find("# basis").unwrap()..];
    let k = parse_series(tail, &series_opts(&unit())).unwrap();
    assert_eq!(k.to_polynomial(), unit().quadratic(Basis::Real));
}
