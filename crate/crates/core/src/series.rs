//! Truncated graded series (Hamiltonians, normal forms) and generating
//! functions, with their file format.
//!
//! Files are the polynomial grammar split into sections:
//!
//! ```text
//! # basis complex
//! # n 2
//! # truncation 4
//! # quadratic 1,1
//! # degree 3
//! + a1*z1^3
//! # degree 4
//! - 15/16*f1^2*z1^2*zb1^2
//! ```
//!
//! `# quadratic` marks the implied harmonic part with the listed
//! frequencies; generating functions carry `# generating second|third`
//! instead. A file without `# degree` headers is read as one expression and
//! split by degree.

use std::collections::{BTreeMap, BTreeSet};

use crate::canonical::FrequencyVector;
use crate::error::{Error, Result};
use crate::param::{ParamScalar, Symbol};
use crate::poly::{Basis, PhasePolynomial};
use crate::text::{self, ParseOptions};

/// Quadratic part plus homogeneous pieces of degree `3..=truncation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    basis: Basis,
    n: usize,
    quadratic: Option<FrequencyVector>,
    pieces: BTreeMap<usize, PhasePolynomial>,
    truncation: usize,
}

fn check_piece(basis: Basis, n: usize, truncation: usize, k: usize, p: &PhasePolynomial) -> Result<()> {
    if p.n() != n {
        return Err(Error::ArityMismatch { expected: n, found: p.n() });
    }
    if p.basis() != basis {
        return Err(Error::BasisMismatch { left: basis.name(), right: p.basis().name() });
    }
    if k < 3 || k > truncation {
        return Err(Error::Precondition(format!(
            "piece degree {k} outside 3..={truncation}"
        )));
    }
    p.check_homogeneous(k)
}

impl GradedSeries {
    pub fn new(basis: Basis, n: usize, quadratic: Option<FrequencyVector>, truncation: usize) -> Self {
        if let Some(nu) = &quadratic {
            assert_eq!(nu.n(), n, "frequency count");
        }
        Self { basis, n, quadratic, pieces: BTreeMap::new(), truncation }
    }

    /// Splits a full polynomial into the harmonic part for `nu` and pieces of
    /// degree `3..=truncation`; higher terms are discarded.
    pub fn from_polynomial(p: &PhasePolynomial, nu: &FrequencyVector, truncation: usize) -> Result<Self> {
        if p.n() != nu.n() {
            return Err(Error::ArityMismatch { expected: nu.n(), found: p.n() });
        }
        if let Some(d) = p.min_degree().filter(|&d| d < 2) {
            return Err(Error::QuadraticMismatch(format!("found a term of degree {d}")));
        }
        if p.homogeneous_part(2) != nu.quadratic(p.basis()) {
            return Err(Error::QuadraticMismatch(format!(
                "expected {}, found {}",
                nu.quadratic(p.basis()),
                p.homogeneous_part(2)
            )));
        }
        let mut s = Self::new(p.basis(), p.n(), Some(nu.clone()), truncation);
        for k in 3..=truncation {
            s.set_piece(k, p.homogeneous_part(k))?;
        }
        Ok(s)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quadratic(&self) -> Option<&FrequencyVector> {
        self.quadratic.as_ref()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Piece of degree `k`; zero when absent. Degree 2 is the harmonic part.
    pub fn piece(&self, k: usize) -> PhasePolynomial {
        if k == 2 {
            if let Some(nu) = &self.quadratic {
                return nu.quadratic(self.basis);
            }
        }
        self.pieces
            .get(&k)
            .cloned()
            .unwrap_or_else(|| PhasePolynomial::zero(self.basis, self.n))
    }

    /// Nonzero stored pieces in ascending degree.
    pub fn pieces(&self) -> impl Iterator<Item = (usize, &PhasePolynomial)> {
        self.pieces.iter().map(|(k, p)| (*k, p))
    }

    pub fn set_piece(&mut self, k: usize, p: PhasePolynomial) -> Result<()> {
        check_piece(self.basis, self.n, self.truncation, k, &p)?;
        if p.is_zero() {
            self.pieces.remove(&k);
        } else {
            self.pieces.insert(k, p);
        }
        Ok(())
    }

    /// Harmonic part plus all pieces of degree at most `k`.
    pub fn head(&self, k: usize) -> PhasePolynomial {
        let mut out = match &self.quadratic {
            Some(nu) if k >= 2 => nu.quadratic(self.basis),
            _ => PhasePolynomial::zero(self.basis, self.n),
        };
        for (_, p) in self.pieces.range(..=k) {
            out.add_assign_ref(p);
        }
        out
    }

    pub fn to_polynomial(&self) -> PhasePolynomial {
        self.head(self.truncation)
    }

    pub fn to_basis(&self, basis: Basis) -> Self {
        Self {
            basis,
            n: self.n,
            quadratic: self.quadratic.clone(),
            pieces: self.pieces.iter().map(|(k, p)| (*k, p.to_basis(basis))).collect(),
            truncation: self.truncation,
        }
    }

    pub fn truncate(&self, rho: usize) -> Self {
        let mut out = self.clone();
        out.pieces.retain(|k, _| *k <= rho);
        out.truncation = rho;
        out
    }

    pub fn substitute_params(&self, values: &BTreeMap<Symbol, ParamScalar>) -> Self {
        let mut out = self.clone();
        out.pieces = self
            .pieces
            .iter()
            .map(|(k, p)| (*k, p.substitute_params(values)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        out
    }

    pub fn is_numeric(&self) -> bool {
        self.pieces.values().all(PhasePolynomial::is_numeric)
    }

    pub fn to_text(&self) -> String {
        let mut s = header(self.basis, self.n, self.truncation);
        if let Some(nu) = &self.quadratic {
            s.push_str(&format!("# quadratic {nu}\n"));
        }
        push_pieces(&mut s, &self.pieces);
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratingKind {
    /// `sum_j q_j eta_j + W`, a function of old positions and new momenta.
    SecondType,
    /// `-sum_j q_j eta_j - S`, a function of new positions and old momenta.
    ThirdType,
}

impl GeneratingKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratingKind::SecondType => "second",
            GeneratingKind::ThirdType => "third",
        }
    }
}

/// A generating function near the identity. Only the pieces of degree
/// `3..=truncation` are stored; the identity part is implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingFunction {
    kind: GeneratingKind,
    basis: Basis,
    n: usize,
    pieces: BTreeMap<usize, PhasePolynomial>,
    truncation: usize,
}

impl GeneratingFunction {
    pub fn new(kind: GeneratingKind, basis: Basis, n: usize, truncation: usize) -> Self {
        Self { kind, basis, n, pieces: BTreeMap::new(), truncation }
    }

    pub fn kind(&self) -> GeneratingKind {
        self.kind
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn piece(&self, k: usize) -> PhasePolynomial {
        self.pieces
            .get(&k)
            .cloned()
            .unwrap_or_else(|| PhasePolynomial::zero(self.basis, self.n))
    }

    pub fn pieces(&self) -> impl Iterator<Item = (usize, &PhasePolynomial)> {
        self.pieces.iter().map(|(k, p)| (*k, p))
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn set_piece(&mut self, k: usize, p: PhasePolynomial) -> Result<()> {
        check_piece(self.basis, self.n, self.truncation, k, &p)?;
        if p.is_zero() {
            self.pieces.remove(&k);
        } else {
            self.pieces.insert(k, p);
        }
        Ok(())
    }

    /// Sum of the stored pieces of degree below `k`.
    pub fn sum_below(&self, k: usize) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero(self.basis, self.n);
        for (_, p) in self.pieces.range(..k) {
            out.add_assign_ref(p);
        }
        out
    }

    /// Sum of all stored pieces, without the identity part.
    pub fn perturbation(&self) -> PhasePolynomial {
        self.sum_below(usize::MAX)
    }

    /// The complete function including `+-sum_j q_j eta_j`.
    pub fn full(&self) -> PhasePolynomial {
        let n = self.n;
        let mut id = PhasePolynomial::zero(Basis::Real, n);
        for j in 0..n {
            let qj = PhasePolynomial::var(Basis::Real, n, j);
            let ej = PhasePolynomial::var(Basis::Real, n, n + j);
            id.add_assign_ref(&qj.mul(&ej).expect("same ring"));
        }
        let id = id.to_basis(self.basis);
        match self.kind {
            GeneratingKind::SecondType => &id + &self.perturbation(),
            GeneratingKind::ThirdType => -&(&id + &self.perturbation()),
        }
    }

    pub fn to_basis(&self, basis: Basis) -> Self {
        Self {
            kind: self.kind,
            basis,
            n: self.n,
            pieces: self.pieces.iter().map(|(k, p)| (*k, p.to_basis(basis))).collect(),
            truncation: self.truncation,
        }
    }

    pub fn truncate(&self, rho: usize) -> Self {
        let mut out = self.clone();
        out.pieces.retain(|k, _| *k <= rho);
        out.truncation = rho;
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# generating {}\n", self.kind.name());
        s.push_str(&header(self.basis, self.n, self.truncation));
        push_pieces(&mut s, &self.pieces);
        s
    }
}

fn header(basis: Basis, n: usize, truncation: usize) -> String {
    format!("# basis {}\n# n {n}\n# truncation {truncation}\n", basis.name())
}

fn push_pieces(s: &mut String, pieces: &BTreeMap<usize, PhasePolynomial>) {
    for (k, p) in pieces {
        s.push_str(&format!("# degree {k}\n"));
        s.push_str(&text::format_polynomial_lines(p));
    }
}

/// Options for reading series files.
#[derive(Clone, Debug, Default)]
pub struct SeriesOptions {
    /// Expected frequencies; a `# quadratic` marker or degree-2 part must match.
    pub nu: Option<FrequencyVector>,
    /// Degrees of freedom when the file does not say.
    pub n: Option<usize>,
    pub qp_alias: bool,
}

struct Section {
    first_line: usize,
    body: String,
}

struct RawFile {
    basis: Option<Basis>,
    n: Option<usize>,
    truncation: Option<usize>,
    quadratic: Option<FrequencyVector>,
    generating: Option<GeneratingKind>,
    preamble: Section,
    sections: Vec<(usize, Section)>,
    complex_names: BTreeSet<String>,
}

fn header_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column: 1, message: message.into() }
}

fn read_raw(src: &str) -> Result<RawFile> {
    let mut raw = RawFile {
        basis: None,
        n: None,
        truncation: None,
        quadratic: None,
        generating: None,
        preamble: Section { first_line: 1, body: String::new() },
        sections: Vec::new(),
        complex_names: text::complex_names_in(src),
    };
    for (idx, line) in src.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim_start();
        let current = match raw.sections.last_mut() {
            Some((_, s)) => s,
            None => &mut raw.preamble,
        };
        if !trimmed.starts_with('#') {
            current.body.push_str(line);
            current.body.push('\n');
            continue;
        }
        current.body.push('\n');
        let words: Vec<&str> = trimmed[1..].split_whitespace().collect();
        let value = words.get(1).copied();
        let need = |what: &str| value.ok_or_else(|| header_error(lineno, format!("missing {what}")));
        let number = |what: &str| -> Result<usize> {
            need(what)?
                .parse()
                .map_err(|_| header_error(lineno, format!("invalid {what}")))
        };
        match words.first().copied() {
            Some("basis") => {
                raw.basis = Some(match need("basis")? {
                    "real" => Basis::Real,
                    "complex" => Basis::Complex,
                    other => return Err(header_error(lineno, format!("unknown basis '{other}'"))),
                })
            }
            Some("n") => raw.n = Some(number("degrees of freedom")?),
            Some("truncation") => raw.truncation = Some(number("truncation")?),
            Some("quadratic") => {
                let v = words[1..].join("");
                raw.quadratic = Some(
                    FrequencyVector::parse(&v)
                        .map_err(|e| header_error(lineno, format!("invalid frequencies: {e}")))?,
                );
            }
            Some("generating") => {
                raw.generating = Some(match need("kind")? {
                    "second" => GeneratingKind::SecondType,
                    "third" => GeneratingKind::ThirdType,
                    other => return Err(header_error(lineno, format!("unknown kind '{other}'"))),
                })
            }
            Some("degree") => {
                let k = number("degree")?;
                if raw.sections.iter().any(|(d, _)| *d == k) {
                    return Err(header_error(lineno, format!("duplicate degree {k}")));
                }
                raw.sections.push((k, Section { first_line: lineno + 1, body: String::new() }));
            }
            _ => {}
        }
    }
    if !raw.sections.is_empty() && !raw.preamble.body.trim().is_empty() {
        let line = raw
            .preamble
            .body
            .lines()
            .position(|l| !l.trim().is_empty())
            .map_or(1, |p| p + 1);
        return Err(header_error(line, "expression outside of a degree section"));
    }
    Ok(raw)
}

impl RawFile {
    fn parse_section(&self, s: &Section, n: Option<usize>, qp_alias: bool) -> Result<PhasePolynomial> {
        if s.body.trim().is_empty() {
            return Ok(PhasePolynomial::zero(self.basis.unwrap_or(Basis::Real), n.unwrap_or(1)));
        }
        let opts = ParseOptions {
            n,
            default_basis: self.basis,
            qp_alias,
            first_line: s.first_line,
        };
        let p = text::parse_polynomial_in(&s.body, &opts, &self.complex_names)?;
        if let Some(b) = self.basis {
            if p.basis() != b && !p.is_zero() {
                return Err(header_error(
                    s.first_line,
                    format!("{} variables in a {} basis file", p.basis().name(), b.name()),
                ));
            }
        }
        Ok(p.to_basis(self.basis.unwrap_or(p.basis())))
    }

    /// All sections parsed into one polynomial, checking homogeneity.
    fn combined(&self, n: Option<usize>, qp_alias: bool) -> Result<PhasePolynomial> {
        if self.sections.is_empty() {
            return self.parse_section(&self.preamble, n, qp_alias);
        }
        let n = n.or_else(|| {
            // infer from the widest section
            self.sections
                .iter()
                .filter_map(|(_, s)| self.parse_section(s, None, qp_alias).ok())
                .map(|p| p.n())
                .max()
        });
        let mut out: Option<PhasePolynomial> = None;
        for (k, s) in &self.sections {
            let p = self.parse_section(s, n, qp_alias)?;
            if let Some(bad) = p.terms().map(|(m, _)| m.degree()).find(|d| d != k) {
                return Err(header_error(
                    s.first_line,
                    format!("term of degree {bad} in the degree {k} section"),
                ));
            }
            out = Some(match out {
                None => p,
                Some(acc) => acc.try_add(&p)?,
            });
        }
        Ok(out.expect("at least one section"))
    }
}

/// Reads a Hamiltonian or normal-form file.
pub fn parse_series(src: &str, opts: &SeriesOptions) -> Result<GradedSeries> {
    let raw = read_raw(src)?;
    if raw.generating.is_some() {
        return Err(Error::WrongKind("expected a series, found a generating function".into()));
    }
    let n = raw.n.or(opts.n).or(opts.nu.as_ref().map(FrequencyVector::n));
    let p = raw.combined(n, opts.qp_alias)?;
    let n = n.unwrap_or(p.n());
    let nu = match (&raw.quadratic, &opts.nu) {
        (Some(file_nu), Some(nu)) if file_nu != nu => {
            return Err(Error::QuadraticMismatch(format!(
                "file declares frequencies {file_nu}, expected {nu}"
            )))
        }
        (Some(file_nu), _) => file_nu.clone(),
        (None, Some(nu)) => nu.clone(),
        (None, None) => {
            return Err(Error::QuadraticMismatch("no frequencies given".into()));
        }
    };
    if nu.n() != n {
        return Err(Error::QuadraticMismatch(format!(
            "{} frequencies for {n} degrees of freedom",
            nu.n()
        )));
    }
    let mut full = p;
    if raw.quadratic.is_some() {
        if !full.homogeneous_part(2).is_zero() {
            return Err(Error::QuadraticMismatch(
                "explicit degree 2 terms next to a quadratic marker".into(),
            ));
        }
        full.add_assign_ref(&nu.quadratic(full.basis()));
    }
    let truncation = raw
        .truncation
        .unwrap_or_else(|| full.degree().unwrap_or(2).max(2));
    if let Some(d) = full.degree().filter(|&d| d > truncation) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("degree {d} exceeds the declared truncation {truncation}"),
        });
    }
    GradedSeries::from_polynomial(&full, &nu, truncation)
}

/// Reads a generating-function file.
pub fn parse_generating(src: &str, opts: &SeriesOptions) -> Result<GeneratingFunction> {
    let raw = read_raw(src)?;
    let kind = raw
        .generating
        .ok_or_else(|| Error::WrongKind("missing '# generating' header".into()))?;
    let n = raw.n.or(opts.n).or(opts.nu.as_ref().map(FrequencyVector::n));
    let p = raw.combined(n, opts.qp_alias)?;
    let truncation = raw.truncation.unwrap_or_else(|| p.degree().unwrap_or(3).max(3));
    let mut g = GeneratingFunction::new(kind, p.basis(), n.unwrap_or(p.n()), truncation);
    if let Some(d) = p.min_degree().filter(|&d| d < 3) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("generating function pieces start at degree 3, found degree {d}"),
        });
    }
    for k in 3..=p.degree().unwrap_or(2) {
        g.set_piece(k, p.homogeneous_part(k))?;
    }
    Ok(g)
}
