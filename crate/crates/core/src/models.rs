//! Two-degree-of-freedom oscillators with homogeneous polynomial potentials,
//! `1/2 sum_j (p_j^2 + q_j^2) + V(q)`.

use crate::canonical::FrequencyVector;
use crate::error::Result;
use crate::param::{ParamScalar, Symbol};
use crate::poly::{Basis, Monomial, PhasePolynomial};
use crate::series::GradedSeries;

/// Frequencies `(1, 1)` of the oscillators in this module.
pub fn unit_frequencies() -> FrequencyVector {
    FrequencyVector::from_ints(&[1, 1]).expect("nonzero")
}

/// `c_0 q1^d + c_1 q1^(d-1) q2 + ... + c_d q2^d` in the real basis.
pub fn binary_form(coefficients: &[ParamScalar]) -> PhasePolynomial {
    let d = coefficients.len() - 1;
    PhasePolynomial::from_terms(
        Basis::Real,
        2,
        coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| (Monomial::new(vec![(d - j) as u16, j as u16, 0, 0]), c.clone())),
    )
}

/// Cubic potential `f1 q1^3 + f2 q1^2 q2 + f3 q1 q2^2 + f4 q2^3`.
pub fn cubic_potential(f: &[ParamScalar; 4]) -> PhasePolynomial {
    binary_form(f)
}

/// Quartic potential `g1 q1^4 + g2 q1^3 q2 + g3 q1^2 q2^2 + g4 q1 q2^3 + g5 q2^4`.
pub fn quartic_potential(g: &[ParamScalar; 5]) -> PhasePolynomial {
    binary_form(g)
}

/// The oscillator with a homogeneous potential of degree at least 3, as a
/// series truncated at `rho`.
pub fn oscillator(potential: &PhasePolynomial, rho: usize) -> Result<GradedSeries> {
    let nu = unit_frequencies();
    let full = &nu.quadratic(Basis::Real) + potential;
    GradedSeries::from_polynomial(&full, &nu, rho)
}

/// `f1..f4` as real symbols.
pub fn symbolic_f() -> [ParamScalar; 4] {
    ["f1", "f2", "f3", "f4"].map(|s| ParamScalar::symbol(Symbol::real(s)))
}

/// `g1..g5` as real symbols.
pub fn symbolic_g() -> [ParamScalar; 5] {
    ["g1", "g2", "g3", "g4", "g5"].map(|s| ParamScalar::symbol(Symbol::real(s)))
}
