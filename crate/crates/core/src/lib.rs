//! Refocusing of unknown unitary evolutions by universal pulse sequences.
//!
//! An unknown unitary `U` acting on a `d`-dimensional system can be driven back
//! to the identity by interleaving it with control pulses that do not depend on
//! `U`: a product `R1·U·R2·U···Rn·U` that lands within a target distance of 𝟙.
//! This crate implements the machinery end to end:
//!
//! * [`mat`], [`eig`], [`rng`], [`haar`] — small dense complex matrices, the
//!   operator and Hilbert-Schmidt distances, deterministic seedable sampling of
//!   Haar unitaries and sphere directions.
//! * [`su2`] — the one-qubit analysis in quaternion coordinates: the
//!   contraction map `f`, random axis conjugation `g`, the shrinking and
//!   jumping regions, and the round-count formulas.
//! * [`weyl`] — the d-dimensional generalization over Weyl operators
//!   `σ_a = Z^{a1} X^{a2}`, its contraction constants, and cost formulas.
//! * [`protocol`] — the probabilistic refocusing protocols (oblivious and
//!   monitored) producing verifiable traces.
//! * [`seq`] — flattening composite protocols into the pulse-sequence form,
//!   normalization, verification, and the JSON wire format.
//! * [`skc`] — gate compilation: ε-nets over a gate set, approximate inversion
//!   of an operator without access to its inverse, and a Solovay-Kitaev
//!   compiler whose output uses no inverse gates.
//!
//! All numerics are generic over the scalar type through [`Scalar`]; concrete
//! `f64` aliases are exported at the crate root.

pub mod error;
pub mod scalar;

pub mod eig;
pub mod haar;
pub mod mat;
pub mod rng;
pub mod wire;

pub mod protocol;
pub mod seq;
pub mod skc;
pub mod su2;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::{sc, Scalar, Tolerances};

pub use mat::{CMat, UnitaryMatrix};
pub use rng::RngStream;

/// Concrete `f64` matrix.
pub type CMat64 = CMat<f64>;
/// Concrete `f64` unitary.
pub type Unitary64 = UnitaryMatrix<f64>;
/// Concrete `f64` quaternion coordinates of an SU(2) element.
pub type Su2Params64 = su2::Su2Params<f64>;
/// Concrete `f64` pulse sequence.
pub type PulseSequence64 = seq::PulseSequence<f64>;
/// Concrete `f64` protocol trace.
pub type ProtocolTrace64 = protocol::ProtocolTrace<f64>;
/// Concrete `f64` gate word.
pub type GateWord64 = skc::GateWord<f64>;
/// Concrete `f64` ε-net.
pub type EpsilonNet64 = skc::EpsilonNet<f64>;
