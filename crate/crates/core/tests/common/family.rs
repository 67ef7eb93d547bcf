//! The cubic oscillator family: transcribed closed forms and the restored
//! Hamiltonians they are compared against.

use std::collections::BTreeMap;

use bgnf::models::{cubic_potential, oscillator, symbolic_f, unit_frequencies};
use bgnf::normalizer::normalize;
use bgnf::restorer::restore_direct;
use bgnf::text::{format_monomial, format_scalar, parse_polynomial, ParseOptions};
use bgnf::{rat, Basis, ImageChoice, ParamScalar, PhasePolynomial, RestoreChoices, Symbol};

pub const NORMAL_FORM: &str = include_str!("../data/cubic_normal_form.txt");
pub const CROSS_TERMS: &str = include_str!("../data/restored_quartic_cross_terms.txt");

pub const CUBIC_FAMILY: &str = "a1*z1^3 + a2*z1^2*z2 + a3*z1*z2^2 + a4*z2^3 + a5*z1^2*zb1 + a6*z1^2*zb2
  + a7*z1*z2*zb1 + a8*z1*z2*zb2 + a9*z2^2*zb1 + a10*z2^2*zb2
  + a1c*zb1^3 + a2c*zb1^2*zb2 + a3c*zb1*zb2^2 + a4c*zb2^3 + a5c*z1*zb1^2 + a6c*z2*zb1^2
  + a7c*z1*zb1*zb2 + a8c*z2*zb1*zb2 + a9c*z1*zb2^2 + a10c*z2*zb2^2";

pub const QUARTIC_FAMILY: &str = "c1*z1^4 + c2*z1^3*z2 + c3*z1^2*z2^2 + c4*z1*z2^3 + c5*z2^4
  + c6*z1^3*zb1 + c7*z1^3*zb2 + c8*z1^2*z2*zb1 + c9*z1^2*z2*zb2 + c10*z1*z2^2*zb1
  + c11*z1*z2^2*zb2 + c12*z2^3*zb1 + c13*z2^3*zb2
  + c1c*zb1^4 + c2c*zb1^3*zb2 + c3c*zb1^2*zb2^2 + c4c*zb1*zb2^3 + c5c*zb2^4
  + c6c*z1*zb1^3 + c7c*z2*zb1^3 + c8c*z1*zb1^2*zb2 + c9c*z2*zb1^2*zb2 + c10c*z1*zb1*zb2^2
  + c11c*z2*zb1*zb2^2 + c12c*z1*zb2^3 + c13c*z2*zb2^3";

pub fn complex(src: &str) -> PhasePolynomial {
    parse_polynomial(src, &ParseOptions::with_n(2)).unwrap()
}

/// Term-by-term differences `(monomial, computed, expected)`.
pub fn differences(computed: &PhasePolynomial, expected: &PhasePolynomial) -> Vec<String> {
    let diff = computed - expected;
    diff.terms()
        .map(|(m, _)| {
            format!(
                "{}: computed {}, expected {}",
                format_monomial(m, Basis::Complex, 2),
                format_scalar(&computed.coefficient(m)),
                format_scalar(&expected.coefficient(m))
            )
        })
        .collect()
}

pub fn cubic_normal_form() -> bgnf::GradedSeries {
    let k = oscillator(&cubic_potential(&symbolic_f()), 4).unwrap();
    normalize(&k, &unit_frequencies(), 4).unwrap().normal_form.to_basis(Basis::Complex)
}

/// The restored family with fresh parameters `a` at degree 3 and `c` at 4.
pub fn restored_family() -> bgnf::Restoration {
    let g = bgnf::GradedSeries::from_polynomial(&complex(NORMAL_FORM), &unit_frequencies(), 4).unwrap();
    let choices = RestoreChoices::zero()
        .with(3, ImageChoice::Fresh("a".into()))
        .with(4, ImageChoice::Fresh("c".into()));
    restore_direct(&g, &unit_frequencies(), 4, &choices).unwrap()
}

pub fn has_prefix(m: &bgnf::ParamMonomial, prefix: char) -> bool {
    m.powers().iter().any(|(s, _)| s.name().starts_with(prefix))
}

/// Terms of `p` whose parameter monomials satisfy `keep`.
pub fn select(p: &PhasePolynomial, keep: impl Fn(&bgnf::ParamMonomial) -> bool) -> PhasePolynomial {
    p.map_coefficients(|c| {
        let mut out = ParamScalar::zero();
        for (m, x) in c.terms() {
            if keep(m) {
                out.add_term(m.clone(), x);
            }
        }
        out
    })
}

pub fn henon_heiles_values() -> BTreeMap<Symbol, ParamScalar> {
    let mu = ParamScalar::real_symbol("mu");
    let mut v = BTreeMap::new();
    let mut put = |name: &str, x: ParamScalar| {
        let s = Symbol::complex(name);
        v.insert(s.conjugate(), x.conjugate());
        v.insert(s, x);
    };
    for (i, x) in [
        ParamScalar::zero(),
        ParamScalar::rational(rat(1, 8)),
        ParamScalar::zero(),
        mu.scale_rational(&rat(1, 8)),
        ParamScalar::zero(),
        ParamScalar::rational(rat(1, 8)),
        ParamScalar::rational(rat(1, 4)),
        ParamScalar::zero(),
        ParamScalar::zero(),
        mu.scale_rational(&rat(3, 8)),
    ]
    .into_iter()
    .enumerate()
    {
        put(&format!("a{}", i + 1), x);
    }
    for l in 1..=13 {
        put(&format!("c{l}"), ParamScalar::zero());
    }
    for (name, x) in [("f1", ParamScalar::zero()), ("f2", ParamScalar::one()), ("f3", ParamScalar::zero()), ("f4", mu)] {
        v.insert(Symbol::real(name), x);
    }
    v
}
