//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by matrix construction, protocol runs, and compilation.
///
/// Numeric payloads are stored as `f64` regardless of the working scalar so
/// the messages render uniformly.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands act on different dimensions.
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    /// The dimension is outside what an operation supports.
    #[error("dimension {got} unsupported: expected {expected}")]
    DimUnsupported { got: usize, expected: &'static str },

    /// A matrix failed the unitarity check at construction.
    #[error("matrix is not unitary: max |U\u{2020}U - I| entry {dev:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { dev: f64, tol: f64 },

    /// A matrix entry is NaN or infinite.
    #[error("matrix entries must be finite")]
    NotFinite,

    /// A determinant check failed; the offending global phase is reported.
    #[error("determinant is exp(i*{det_phase:.6}) rather than 1: a global phase of {global_phase:.6} rad is present; divide it out first")]
    NonUnitDeterminant { det_phase: f64, global_phase: f64 },

    /// A scalar parameter is outside its valid range.
    #[error("parameter {name} = {value:.6e} outside valid range {range}")]
    ParamRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// Malformed JSON or a structurally invalid payload.
    #[error("parse error at byte {offset} (line {line}, column {column}): {msg}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        msg: String,
    },

    /// A file carried an unsupported format version.
    #[error("format version {found} unsupported (expected {expected})")]
    FormatVersion { found: u64, expected: u64 },

    /// Net construction exhausted its word-length budget above the target
    /// covering radius. Carries the measured estimate per completed length:
    /// `(word length, entry count, covering-radius estimate)`.
    #[error("net cannot certify covering radius {target:.3e}: best estimate {best:.3e} at word length {len}")]
    NetTargetUnreachable {
        target: f64,
        best: f64,
        len: usize,
        curve: Vec<(usize, usize, f64)>,
    },

    /// The available net is too coarse for the requested construction.
    #[error("net too coarse: construction needs a point within {required:.3e} of the target, nearest entry is {got:.3e} away")]
    NetTooCoarse { required: f64, got: f64 },

    /// The gate set cannot express every Weyl operator as an exact word.
    #[error("gate set has no exact words for the Weyl operators of dimension {dim}")]
    WeylUnavailable { dim: usize },

    /// Group closure grew past its cap while indexing exact gate words.
    #[error("phase-gate group exceeded {cap} elements while indexing exact words")]
    PhaseGroupTooLarge { cap: usize },

    /// A net is empty or otherwise unusable for queries.
    #[error("net has no entries")]
    EmptyNet,

    /// The compiler failed to reach the accuracy target at every tried depth.
    /// `levels[n]` is the measured error at recursion depth `n`.
    #[error("compilation did not reach {eps:.3e}: best error {best:.3e}; per-depth errors {levels:?}")]
    SkConvergence {
        eps: f64,
        best: f64,
        levels: Vec<f64>,
    },

    /// An iterative eigensolve did not converge.
    #[error("eigensolver failed to converge")]
    EigFailure,

    /// Materializing a pulse sequence would exceed the pulse-count budget.
    #[error("flattening would produce 2^{log2_pulses:.1} pulses, over the budget of 2^{log2_budget:.1}")]
    FlattenBudget { log2_pulses: f64, log2_budget: f64 },

    /// Serialization requires a normalized sequence (no trailing pulse).
    #[error("sequence carries a trailing pulse; call normalize before serializing")]
    TrailingPulse,

    /// A word containing target slots was evaluated without a target.
    #[error("word contains target slots; a target matrix is required to evaluate it")]
    TargetSlot,

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
