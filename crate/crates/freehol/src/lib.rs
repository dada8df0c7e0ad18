//! Free holomorphic functions on the noncommutative operator unit ball.
//!
//! A free power series `F = Σ_α A_(α) ⊗ Z_α` is indexed by words `α` in the
//! free semigroup on `n` generators. This crate implements the desk-scale
//! numerics for such series:
//!
//! - [`words`]: free-semigroup combinatorics (enumeration, insertion and
//!   deletion maps, multi-indices);
//! - [`series`]: the coefficient algebra — sums, Cauchy products,
//!   homogeneous block norms, Hadamard radius estimation, dilation, Gleason
//!   decomposition, symmetrization;
//! - [`fock`]: the truncated full Fock space `F²(Hₙ)` with left/right
//!   creation operators and boundary operators `F(rS₁,…,rSₙ)`;
//! - [`calculus`]: functional calculus at tuples of matrices, joint spectral
//!   radius, `H^∞`/`H^p` norms and the metric `ρ`, unitary ball automorphisms;
//! - [`derivations`]: Hausdorff free partial derivations, with two
//!   independent implementations cross-validating each other;
//! - [`transforms`]: Cauchy and Poisson kernels/transforms, pluriharmonic
//!   functions, Herglotz-positivity and boundary-continuity checks;
//! - [`harness`]: seeded random instance generators, verification suites,
//!   and CSV report emission.
//!
//! Everything is finite and explicit: operators live on a truncation of the
//! Fock space and every identity is tested together with its exact
//! truncation defect. Randomness is reproducible — ChaCha12 streams keyed by
//! a config seed and an instance counter (see [`harness`]).

pub mod calculus;
pub mod derivations;
pub mod error;
pub mod fock;
pub mod harness;
mod linalg;
pub mod series;
pub mod transforms;
pub mod words;

pub use calculus::OperatorTuple;
pub use error::{Error, Result};
pub use fock::{FockOperator, TruncatedFock};
pub use harness::{SeriesProfile, SuiteConfig, VerdictRow};
pub use series::{FreeSeries, TailDescriptor};
pub use transforms::{CauchyKernel, PluriharmonicFunction, PoissonKernel};
pub use words::{MultiIndex, Word};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for coefficients, tuples, and Fock operators.
pub type CMatrix = nalgebra::DMatrix<C64>;
