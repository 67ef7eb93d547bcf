//! Exact Birkhoff-Gustavson normalization of polynomial Hamiltonians near an
//! elliptic equilibrium, its inverse (restoring Hamiltonians from a normal
//! form), composition of generating functions, and Bertrand-Darboux
//! integrability checks.

pub mod bdic;
pub mod calculus;
pub mod canonical;
pub mod compose;
pub mod error;
pub mod fuzz;
pub mod gaussian;
pub mod linalg;
pub mod models;
pub mod normalizer;
pub mod param;
pub mod poly;
pub mod restorer;
pub mod series;
pub mod text;

pub use error::{Error, Result};
pub use gaussian::{rat, GaussianRational, Rational};
pub use param::{ParamMonomial, ParamScalar, Symbol, SymbolKind};
pub use poly::{Basis, Monomial, PhasePolynomial};
pub use canonical::{Decomposition, FrequencyVector};
pub use series::{GeneratingFunction, GeneratingKind, GradedSeries, SeriesOptions};
pub use normalizer::Normalization;
pub use restorer::{ImageChoice, Restoration, RestoreChoices, StagedRestoration};
pub use bdic::{BdicWitness, PhocpReport, PhoqpReport, Verdict};
pub use fuzz::Fuzzer;
