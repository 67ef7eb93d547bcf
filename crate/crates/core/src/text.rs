//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('+' | '-') factor | atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Identifiers: `q1..qn`, `eta1..etan` (or `p1..pn` with the `qp` alias) in
//! the real basis, `z1..zn`, `zb1..zbn` in the complex basis, `i` for the
//! imaginary unit, anything else is a parameter. A parameter `a7c` is the
//! conjugate of `a7`, and `a7` is complex when `a7c` occurs in the same
//! document. Division is only by nonzero numeric constants. `#` starts a
//! comment running to the end of the line.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianRational, Rational};
use crate::param::{ParamScalar, Symbol};
use crate::poly::{Basis, Monomial, PhasePolynomial};

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Degrees of freedom; inferred from the largest variable index if unset.
    pub n: Option<usize>,
    /// Basis to use when the text mentions no phase variable.
    pub default_basis: Option<Basis>,
    /// Accept `p_j` as a name for `eta_j`.
    pub qp_alias: bool,
    /// Line number of the first line of the source, for error messages.
    pub first_line: usize,
}

impl ParseOptions {
    pub fn with_n(n: usize) -> Self {
        Self { n: Some(n), ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse { line: pos.line, column: pos.column, message: message.into() }
}

fn tokenize(src: &str, first_line: usize) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k];
            let pos = Pos { line: first_line + li, column: k + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                k += 1;
                continue;
            }
            let single = match c {
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '/' => Some(Tok::Slash),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                _ => None,
            };
            if let Some(t) = single {
                out.push((t, pos));
                k += 1;
            } else if c.is_ascii_digit() {
                let start = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let s: String = chars[start..k].iter().collect();
                out.push((Tok::Num(s.parse().expect("digits")), pos));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = k;
                while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                out.push((Tok::Ident(chars[start..k].iter().collect()), pos));
            } else {
                return Err(err(pos, format!("unexpected character '{c}'")));
            }
        }
    }
    Ok(out)
}

#[derive(Debug)]
enum Expr {
    Num(BigInt),
    Ident(String, Pos),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?), pos);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                return Ok(Expr::Neg(Box::new(self.factor()?)));
            }
            Some(Tok::Plus) => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Num(e)) => {
                    let e: u32 = e.try_into().map_err(|_| err(pos, "exponent too large"))?;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => return Err(err(pos, "expected a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Ident(s)) => Ok(Expr::Ident(s, pos)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(err(close, "expected ')'")),
                }
            }
            Some(t) => Err(err(pos, format!("unexpected token {t:?}"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

enum Ident {
    Imag,
    Phase(Basis, bool, usize),
    Param(Symbol),
}

fn phase_index(s: &str, prefix: &str) -> Option<usize> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) || rest.starts_with('0') {
        return None;
    }
    rest.parse().ok()
}

fn classify(s: &str, qp_alias: bool, complex: &BTreeSet<String>, pos: Pos) -> Result<Ident> {
    if s == "i" {
        return Ok(Ident::Imag);
    }
    if let Some(j) = phase_index(s, "q") {
        return Ok(Ident::Phase(Basis::Real, false, j));
    }
    if let Some(j) = phase_index(s, "eta") {
        return Ok(Ident::Phase(Basis::Real, true, j));
    }
    if let Some(j) = phase_index(s, "p") {
        if !qp_alias {
            return Err(err(pos, format!("'{s}' needs the qp variable alias; use eta{j}")));
        }
        return Ok(Ident::Phase(Basis::Real, true, j));
    }
    if let Some(j) = phase_index(s, "zb") {
        return Ok(Ident::Phase(Basis::Complex, true, j));
    }
    if let Some(j) = phase_index(s, "z") {
        return Ok(Ident::Phase(Basis::Complex, false, j));
    }
    if let Some(base) = Symbol::conjugate_base(s) {
        return Ok(Ident::Param(Symbol::complex(base).conjugate()));
    }
    if complex.contains(s) {
        Ok(Ident::Param(Symbol::complex(s)))
    } else {
        Ok(Ident::Param(Symbol::real(s)))
    }
}

struct Env {
    basis: Basis,
    n: usize,
    qp_alias: bool,
    complex: BTreeSet<String>,
}

impl Env {
    fn eval(&self, e: &Expr) -> Result<PhasePolynomial> {
        let (b, n) = (self.basis, self.n);
        Ok(match e {
            Expr::Num(v) => PhasePolynomial::constant(
                b,
                n,
                ParamScalar::rational(Rational::from_integer(v.clone())),
            ),
            Expr::Ident(s, pos) => match classify(s, self.qp_alias, &self.complex, *pos)? {
                Ident::Imag => PhasePolynomial::constant(b, n, GaussianRational::i().into()),
                Ident::Phase(_, momentum, j) => {
                    PhasePolynomial::var(b, n, if momentum { n + j - 1 } else { j - 1 })
                }
                Ident::Param(sym) => PhasePolynomial::constant(b, n, ParamScalar::symbol(sym)),
            },
            Expr::Add(x, y) => &self.eval(x)? + &self.eval(y)?,
            Expr::Sub(x, y) => &self.eval(x)? - &self.eval(y)?,
            Expr::Neg(x) => -&self.eval(x)?,
            Expr::Mul(x, y) => self.eval(x)?.mul(&self.eval(y)?)?,
            Expr::Div(x, y, pos) => {
                let den = self.eval(y)?;
                let c = match den.terms().next() {
                    None => return Err(err(*pos, "division by zero")),
                    Some((m, c)) if den.len() == 1 && m.degree() == 0 => c.as_constant(),
                    _ => None,
                };
                let inv = c
                    .and_then(|c| c.inv())
                    .ok_or_else(|| err(*pos, "division is only allowed by numeric constants"))?;
                self.eval(x)?.scale_gaussian(&inv)
            }
            Expr::Pow(x, k) => {
                let base = self.eval(x)?;
                let rho = base.degree().unwrap_or(0) * (*k as usize);
                base.pow_truncated(*k, rho)?
            }
        })
    }
}

fn collect_idents(e: &Expr, out: &mut Vec<(String, Pos)>) {
    match e {
        Expr::Num(_) => {}
        Expr::Ident(s, p) => out.push((s.clone(), *p)),
        Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y, _) => {
            collect_idents(x, out);
            collect_idents(y, out);
        }
        Expr::Neg(x) | Expr::Pow(x, _) => collect_idents(x, out),
    }
}

fn parse_ast(src: &str, first_line: usize) -> Result<Expr> {
    let toks = tokenize(src, first_line)?;
    let end = Pos { line: first_line + src.lines().count().max(1) - 1, column: 1 };
    let mut p = Parser { toks, at: 0, end };
    if p.peek().is_none() {
        return Err(err(end, "empty expression"));
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(err(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Names `X` for which the conjugate `Xc` appears somewhere in `src`.
pub fn complex_names_in(src: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for line in src.lines() {
        let line = line.split('#').next().unwrap_or("");
        for word in line.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
            if let Some(base) = Symbol::conjugate_base(word) {
                out.insert(base.to_string());
            }
        }
    }
    out
}

/// Parses a polynomial; see the module docs for the grammar.
pub fn parse_polynomial(src: &str, opts: &ParseOptions) -> Result<PhasePolynomial> {
    parse_polynomial_in(src, opts, &complex_names_in(src))
}

/// Like [`parse_polynomial`] with an explicit set of complex parameter names,
/// for sources split out of a larger document.
pub fn parse_polynomial_in(
    src: &str,
    opts: &ParseOptions,
    complex: &BTreeSet<String>,
) -> Result<PhasePolynomial> {
    let first_line = opts.first_line.max(1);
    let ast = parse_ast(src, first_line)?;
    let mut idents = Vec::new();
    collect_idents(&ast, &mut idents);
    let mut basis: Option<(Basis, Pos)> = None;
    let mut max_index = 0;
    for (s, pos) in &idents {
        if let Ident::Phase(b, _, j) = classify(s, opts.qp_alias, complex, *pos)? {
            match basis {
                Some((b0, _)) if b0 != b => {
                    return Err(err(*pos, "real and complex phase variables cannot be mixed"))
                }
                _ => basis = Some((b, *pos)),
            }
            max_index = max_index.max(j);
            if let Some(n) = opts.n {
                if j > n {
                    return Err(err(*pos, format!("variable '{s}' exceeds {n} degrees of freedom")));
                }
            }
        }
    }
    let env = Env {
        basis: basis.map(|b| b.0).or(opts.default_basis).unwrap_or(Basis::Real),
        n: opts.n.unwrap_or(max_index.max(1)),
        qp_alias: opts.qp_alias,
        complex: complex.clone(),
    };
    env.eval(&ast)
}

/// Parses an expression free of phase variables, e.g. a coefficient `3*(a-b)`.
pub fn parse_scalar(src: &str) -> Result<ParamScalar> {
    let p = parse_polynomial(src, &ParseOptions::with_n(1))?;
    let c = p.coefficient(&Monomial::one(2));
    if p.len() > 1 || (p.len() == 1 && c.is_zero()) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "expected an expression without phase variables".into(),
        });
    }
    Ok(c)
}

fn rational_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Signed chunks `(negative, body)` in canonical order.
fn chunks(p: &PhasePolynomial) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    for (m, c) in p.terms() {
        let vars: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| {
                let name = p.basis().var_name(v, p.n());
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        for (pm, g) in c.terms() {
            for (part, imag) in [(&g.re, false), (&g.im, true)] {
                if part.is_zero() {
                    continue;
                }
                let mut factors = Vec::new();
                let mag = part.abs();
                let others = imag || !pm.is_one() || !vars.is_empty();
                if !mag.is_one() || !others {
                    factors.push(rational_text(&mag));
                }
                if imag {
                    factors.push("i".to_string());
                }
                if !pm.is_one() {
                    factors.push(pm.to_string());
                }
                factors.extend(vars.iter().cloned());
                out.push((part.is_negative(), factors.join("*")));
            }
        }
    }
    out
}

/// Canonical one-line rendering; `sep` goes between chunks.
pub fn format_polynomial(p: &PhasePolynomial, sep: &str) -> String {
    let cs = chunks(p);
    if cs.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, (neg, body)) in cs.iter().enumerate() {
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => {
                s.push_str(sep);
                s.push_str("- ");
            }
            (_, false) => {
                s.push_str(sep);
                s.push_str("+ ");
            }
        }
        s.push_str(body);
    }
    s
}

/// One chunk per line, each prefixed by its sign; used in files.
pub fn format_polynomial_lines(p: &PhasePolynomial) -> String {
    let cs = chunks(p);
    if cs.is_empty() {
        return "0\n".to_string();
    }
    cs.iter()
        .map(|(neg, body)| format!("{} {body}\n", if *neg { "-" } else { "+" }))
        .collect()
}

/// Renders a scalar in the same grammar.
pub fn format_scalar(c: &ParamScalar) -> String {
    format_polynomial(&PhasePolynomial::constant(Basis::Real, 1, c.clone()), " ")
}

/// Renders a monomial such as `z1^2*zb2`.
pub fn format_monomial(m: &Monomial, basis: Basis, n: usize) -> String {
    let p = PhasePolynomial::monomial(basis, n, m.clone(), ParamScalar::one());
    format_polynomial(&p, " ")
}
