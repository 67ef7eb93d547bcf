//! Seeded random inputs for property checks: Hamiltonians, normal forms,
//! image choices and generator chains with small rational coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{self, FrequencyVector};
use crate::gaussian::{rat, Rational};
use crate::param::ParamScalar;
use crate::poly::{Basis, Monomial, PhasePolynomial};
use crate::restorer::{ImageChoice, RestoreChoices};
use crate::series::GradedSeries;

/// Deterministic generator; the same seed always yields the same sequence.
pub struct Fuzzer {
    rng: ChaCha8Rng,
    /// Probability of keeping each monomial.
    pub density: f64,
}

impl Fuzzer {
    pub fn new(seed: u64) -> Self {
        Fuzzer { rng: ChaCha8Rng::seed_from_u64(seed), density: 0.5 }
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    /// Nonzero rational `a/b` with `|a| <= 5`, `1 <= b <= 4`.
    pub fn rational(&mut self) -> Rational {
        let mut a = 0;
        while a == 0 {
            a = self.rng.gen_range(-5..=5);
        }
        rat(a, self.rng.gen_range(1..=4))
    }

    /// Random homogeneous polynomial of degree `k` in the real basis.
    pub fn real_polynomial(&mut self, n: usize, k: usize) -> PhasePolynomial {
        let mut p = PhasePolynomial::zero(Basis::Real, n);
        for m in Monomial::all_of_degree(2 * n, k) {
            if self.rng.gen_bool(self.density) {
                p.add_term(m, &ParamScalar::rational(self.rational()));
            }
        }
        p
    }

    /// `H_2 + H_3 + ... + H_rho` with random real pieces, in the real basis.
    pub fn hamiltonian(&mut self, nu: &FrequencyVector, rho: usize) -> GradedSeries {
        let mut h = GradedSeries::new(Basis::Real, nu.n(), Some(nu.clone()), rho);
        for k in 3..=rho {
            let p = self.real_polynomial(nu.n(), k);
            h.set_piece(k, p).expect("homogeneous");
        }
        h
    }

    /// Real series whose pieces lie in the kernel of `D`.
    pub fn normal_form(&mut self, nu: &FrequencyVector, rho: usize) -> GradedSeries {
        let mut g = GradedSeries::new(Basis::Real, nu.n(), Some(nu.clone()), rho);
        for k in 3..=rho {
            let p = self.real_polynomial(nu.n(), k).to_complex();
            let ker = canonical::kernel_part(&p, nu).to_real();
            g.set_piece(k, ker).expect("homogeneous");
        }
        g
    }

    /// Per degree, either zero or an explicit real image polynomial.
    pub fn choices(&mut self, nu: &FrequencyVector, rho: usize) -> RestoreChoices {
        let mut c = RestoreChoices::zero();
        for k in 3..=rho {
            if self.rng.gen_bool(0.75) {
                let p = self.real_polynomial(nu.n(), k).to_complex();
                let img = canonical::image_part(&p, nu).to_real();
                c.set(k, ImageChoice::Explicit(img));
            }
        }
        c
    }

    /// Homogeneous real pieces of degrees `3..=rho`.
    pub fn chain(&mut self, n: usize, rho: usize) -> Vec<PhasePolynomial> {
        (3..=rho).map(|k| self.real_polynomial(n, k)).collect()
    }
}
