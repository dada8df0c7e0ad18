//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong constructing or combining the crate's values.
#[derive(Debug, Error)]
pub enum Error {
    /// A letter outside `1..=n` was used to build a word or series.
    #[error("letter {letter} outside alphabet 1..={n}")]
    LetterOutOfRange { letter: usize, n: usize },

    /// Insertion position outside `0..=|w|`.
    #[error("insertion position {m} outside 0..={len}")]
    PositionOutOfRange { m: usize, len: usize },

    /// A homogeneous block (or Fock level set) would exceed the enumeration cap.
    #[error("enumeration of {count} words exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    /// Exact factorials are only kept for |p| ≤ 20 (u128-exact territory).
    #[error("multi-index weight {total} exceeds the exact-factorial guard of {max}")]
    FactorialGuard { total: usize, max: usize },

    /// Two series (or a series and a tuple/space) disagree on n, q, or d.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Gleason decomposition requires all coefficients below the split degree to vanish.
    #[error("nonzero coefficient of degree {degree} < split degree {m}")]
    LowOrderNonzero { degree: usize, m: usize },

    /// Window `[k0, k1]` passed to the radius estimator is empty or exceeds stored degrees.
    #[error("invalid degree window [{k0}, {k1}] for stored degree {d}")]
    BadWindow { k0: usize, k1: usize, d: usize },

    /// The matrix supposed to be unitary is not (within 1e-10).
    #[error("matrix is not unitary: ‖U*U − I‖ = {defect:.3e}")]
    NotUnitary { defect: f64 },

    /// Poisson kernels need row contractions: I − Σ TᵢTᵢ* must be PSD.
    #[error("tuple is not a row contraction: min eigenvalue of I − ΣTT* is {min_eig:.3e}")]
    NotRowContraction { min_eig: f64 },

    /// Pluriharmonic conjugates need a real value at the origin.
    #[error("constant term is not real: imaginary part {im:.3e}")]
    NonRealConstant { im: f64 },

    /// H^p norms need an integrable radial majorant.
    #[error("radial maximal function diverges at r→1 (tail ratio {t}) — no integrable majorant")]
    DivergentIntegrand { t: f64 },

    /// Verification config asked for a suite the registry does not know.
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),

    /// Config sizes exceed the default caps and `unsafe_sizes` was not set.
    #[error("size {name} = {value} exceeds cap {cap} (set unsafe_sizes to override)")]
    SizeCap {
        name: &'static str,
        value: usize,
        cap: usize,
    },

    /// Malformed input file (series, tuple, or config).
    #[error("invalid {kind} file: {msg}")]
    InvalidFile { kind: &'static str, msg: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Underlying JSON failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
