//! Pulse sequences: the flattened, U-independent form of a protocol run.
//!
//! A sequence is a list of pulses `R1..Rn` standing for the product
//! `R1·U·R2·U···Rn·U`, optionally followed by a trailing constant `T` that
//! conjugation bookkeeping has not yet absorbed. The pulses never depend on
//! the unknown `U`; only the final measured distance does. Normalizing folds
//! `T` into the first pulse (conjugating the whole word by `T`, which
//! preserves every distance to 𝟙); only normalized sequences serialize.

use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{hs_norm_dist, op_norm_dist, CMat, UnitaryMatrix};
use crate::protocol::{ProtocolKind, ProtocolTrace};
use crate::scalar::{sc, Scalar};
use crate::wire;

/// Which distance a sequence's guarantee is stated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    /// Hilbert-Schmidt distance (qubit analysis, dimension 2 only).
    #[serde(rename = "hs")]
    Hs,
    /// Operator-norm distance (any dimension).
    #[serde(rename = "operator")]
    Operator,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Hs => write!(f, "hs"),
            NormKind::Operator => write!(f, "operator"),
        }
    }
}

/// Hard cap on materialized pulse counts: `2^22` pulses.
pub const FLATTEN_LOG2_BUDGET: f64 = 22.0;

/// A pulse sequence; see the module docs for the word convention.
///
/// Pulse matrices are stored in one flat buffer (`uses_of_u` blocks of
/// `dim²` entries), which keeps million-pulse sequences compact.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence<T> {
    dim: usize,
    norm: NormKind,
    data: Vec<Complex<T>>,
    trailing: Option<CMat<T>>,
}

impl<T: Scalar> PulseSequence<T> {
    pub(crate) fn from_parts(
        dim: usize,
        norm: NormKind,
        data: Vec<Complex<T>>,
        trailing: Option<CMat<T>>,
    ) -> Self {
        debug_assert!(!data.is_empty() && data.len() % (dim * dim) == 0);
        PulseSequence {
            dim,
            norm,
            data,
            trailing,
        }
    }

    /// The one-pulse sequence `[𝟙]`, standing for `U` itself.
    pub fn single_identity(dim: usize, norm: NormKind) -> Self {
        let id = CMat::<T>::identity(dim);
        PulseSequence {
            dim,
            norm,
            data: id.entries().to_vec(),
            trailing: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    /// Number of pulses, which equals the number of uses of `U`.
    pub fn uses_of_u(&self) -> usize {
        self.data.len() / (self.dim * self.dim)
    }

    /// Copy of pulse `i`.
    pub fn pulse(&self, i: usize) -> CMat<T> {
        let dd = self.dim * self.dim;
        CMat::from_flat(self.dim, self.data[i * dd..(i + 1) * dd].to_vec())
            .expect("block is dim² entries")
    }

    /// Trailing constant, if the sequence has not been normalized.
    pub fn trailing(&self) -> Option<&CMat<T>> {
        self.trailing.as_ref()
    }

    pub fn is_normalized(&self) -> bool {
        self.trailing.is_none()
    }

    /// Bitwise pulse-list equality with another sequence.
    pub fn same_pulses(&self, other: &PulseSequence<T>) -> bool {
        self.dim == other.dim && self.data == other.data
    }
}

fn mul_into_block<T: Scalar>(dim: usize, a: &CMat<T>, block: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let av = a.at(r, k);
            for c in 0..dim {
                let t = av * block[k * dim + c];
                out[r * dim + c] += t;
            }
        }
    }
    out
}

fn matmul_flat<T: Scalar>(
    dim: usize,
    a: &[Complex<T>],
    b: &[Complex<T>],
    out: &mut [Complex<T>],
) {
    for v in out.iter_mut() {
        *v = Complex::zero();
    }
    for r in 0..dim {
        for k in 0..dim {
            let av = a[r * dim + k];
            if av.re.is_zero() && av.im.is_zero() {
                continue;
            }
            for c in 0..dim {
                let t = av * b[k * dim + c];
                out[r * dim + c] += t;
            }
        }
    }
}

/// Incremental word construction shared by the protocols and the compiler.
///
/// Starts as the seed word `[𝟙]` with trailing `𝟙` (the word for `U`), and
/// supports the two moves every construction reduces to: conjugating the
/// current word by a constant, and substituting the word into a fixed
/// `∏_b (C_b · P)`-shaped product.
#[derive(Clone, Debug)]
pub(crate) struct WordBuilder<T> {
    dim: usize,
    data: Vec<Complex<T>>,
    trailing: CMat<T>,
    log2_budget: f64,
}

impl<T: Scalar> WordBuilder<T> {
    pub fn new(dim: usize) -> Self {
        let id = CMat::<T>::identity(dim);
        WordBuilder {
            dim,
            data: id.entries().to_vec(),
            trailing: id,
            log2_budget: FLATTEN_LOG2_BUDGET,
        }
    }

    #[cfg(test)]
    pub fn set_log2_budget(&mut self, b: f64) {
        self.log2_budget = b;
    }

    pub fn n_pulses(&self) -> usize {
        self.data.len() / (self.dim * self.dim)
    }

    /// Conjugate the word by `P`: the product becomes `P·(word)·P†`.
    pub fn conjugate(&mut self, p: &CMat<T>) {
        let dd = self.dim * self.dim;
        let head = mul_into_block(self.dim, p, &self.data[..dd]);
        self.data[..dd].copy_from_slice(&head);
        self.trailing = self.trailing.matmul(&p.dagger());
    }

    /// Substitute the word `P` into `prefix·P·sep[0]·P·sep[1]···P·suffix`.
    ///
    /// Between-block constants merge with the following block's first pulse
    /// together with the current trailing constant, so the result is again in
    /// word form with a single trailing constant `T·suffix`.
    pub fn expand(&mut self, prefix: &CMat<T>, seps: &[CMat<T>], suffix: &CMat<T>) -> Result<()> {
        let dd = self.dim * self.dim;
        let blocks = seps.len() + 1;
        let new_count = self.n_pulses() as f64 * blocks as f64;
        if new_count.log2() > self.log2_budget {
            return Err(Error::FlattenBudget {
                log2_pulses: new_count.log2(),
                log2_budget: self.log2_budget,
            });
        }
        let first: Vec<Complex<T>> = self.data[..dd].to_vec();
        let mut new_data = Vec::with_capacity(self.data.len() * blocks);
        for b in 0..blocks {
            let lead = if b == 0 {
                prefix.clone()
            } else {
                self.trailing.matmul(&seps[b - 1])
            };
            new_data.extend_from_slice(&mul_into_block(self.dim, &lead, &first));
            new_data.extend_from_slice(&self.data[dd..]);
        }
        self.data = new_data;
        self.trailing = self.trailing.matmul(suffix);
        Ok(())
    }

    /// Apply the qubit pulse map in word form:
    /// `f(P) = (−X)·P·Z·P·X·P·Z·P`, an identity valid for any 2×2 `P`.
    pub fn expand_f_qubit(&mut self) -> Result<()> {
        let x = crate::su2::pauli_x::<T>();
        let z = crate::su2::pauli_z::<T>();
        let minus_x = x.mat().scale(Complex::new(-T::one(), T::zero()));
        let seps = [z.mat().clone(), x.mat().clone(), z.mat().clone()];
        self.expand(&minus_x, &seps, &CMat::identity(2))
    }

    /// Apply the d-dimensional pulse map in word form:
    /// `f(P) = ∏_a σ_a P σ_a†` over the canonical index order.
    pub fn expand_f_weyl(&mut self) -> Result<()> {
        let d = self.dim;
        let sigmas: Vec<CMat<T>> = crate::weyl::all_indices(d)?
            .iter()
            .map(|idx| crate::weyl::sigma::<T>(idx).map(|s| s.mat().clone()))
            .collect::<Result<_>>()?;
        let prefix = sigmas[0].clone();
        let seps: Vec<CMat<T>> = (0..sigmas.len() - 1)
            .map(|j| sigmas[j].dagger().matmul(&sigmas[j + 1]))
            .collect();
        let suffix = sigmas[sigmas.len() - 1].dagger();
        self.expand(&prefix, &seps, &suffix)
    }

    /// Finish as a raw sequence with the trailing constant still flagged.
    pub fn into_sequence(self, norm: NormKind) -> PulseSequence<T> {
        PulseSequence::from_parts(self.dim, norm, self.data, Some(self.trailing))
    }
}

/// Rebuild the pulse sequence of a protocol run from its recorded rounds.
///
/// The construction uses only the recorded pulses, never `U`'s entries; `U`
/// fixes the dimension and is what [`verify`] multiplies back in. The result
/// has its trailing constant flagged (for qubit runs it is exactly 𝟙);
/// [`normalize`] absorbs it. Errors if materializing would exceed the
/// `2^22`-pulse budget or the dimensions disagree.
pub fn flatten<T: Scalar>(
    trace: &ProtocolTrace<T>,
    u: &UnitaryMatrix<T>,
) -> Result<PulseSequence<T>> {
    if trace.dim != u.dim() {
        return Err(Error::DimMismatch(trace.dim, u.dim()));
    }
    let mut b = WordBuilder::<T>::new(trace.dim);
    for round in &trace.rounds {
        b.conjugate(round.pulse.mat());
        match trace.kind {
            ProtocolKind::Qubit => b.expand_f_qubit()?,
            ProtocolKind::Weyl => b.expand_f_weyl()?,
        }
    }
    Ok(b.into_sequence(trace.norm))
}

/// Fold a flagged trailing constant into the first pulse.
///
/// The trailing constant satisfies `word = Q·T` with `Q` the pure pulse part;
/// replacing `R1` by `T·R1` realizes `T·Q`, the conjugation of the word by
/// `T`, which has the same distance to 𝟙. Already normalized input is
/// returned unchanged.
pub fn normalize<T: Scalar>(seq: &PulseSequence<T>) -> Result<PulseSequence<T>> {
    let t = match &seq.trailing {
        None => return Ok(seq.clone()),
        Some(t) => t,
    };
    let dd = seq.dim * seq.dim;
    let mut data = seq.data.clone();
    let head = mul_into_block(seq.dim, t, &data[..dd]);
    data[..dd].copy_from_slice(&head);
    Ok(PulseSequence {
        dim: seq.dim,
        norm: seq.norm,
        data,
        trailing: None,
    })
}

/// Multiply the word out against a concrete `U`.
pub fn reconstruct<T: Scalar>(
    seq: &PulseSequence<T>,
    u: &UnitaryMatrix<T>,
) -> Result<CMat<T>> {
    if seq.dim != u.dim() {
        return Err(Error::DimMismatch(seq.dim, u.dim()));
    }
    let d = seq.dim;
    let dd = d * d;
    let mut acc = CMat::<T>::identity(d).entries().to_vec();
    let mut tmp = vec![Complex::zero(); dd];
    let uflat = u.mat().entries();
    for i in 0..seq.uses_of_u() {
        matmul_flat(d, &acc, &seq.data[i * dd..(i + 1) * dd], &mut tmp);
        matmul_flat(d, &tmp, uflat, &mut acc);
    }
    if let Some(t) = &seq.trailing {
        matmul_flat(d, &acc.clone(), t.entries(), &mut acc);
    }
    CMat::from_flat(d, acc)
}

/// Distance of the realized product from 𝟙, in the sequence's norm.
pub fn verify<T: Scalar>(seq: &PulseSequence<T>, u: &UnitaryMatrix<T>) -> Result<T> {
    let prod = reconstruct(seq, u)?;
    let id = CMat::identity(seq.dim);
    match seq.norm {
        NormKind::Hs => hs_norm_dist(&prod, &id),
        NormKind::Operator => op_norm_dist(&prod, &id),
    }
}

#[derive(Deserialize)]
pub(crate) struct SeqWire {
    format_version: u64,
    dim: usize,
    norm: String,
    #[serde(rename = "uses_of_U")]
    uses_of_u: usize,
    pulses: Vec<wire::WireMatrix>,
}

/// Serialize a normalized sequence to its JSON wire form.
///
/// Errors with [`Error::TrailingPulse`] if the sequence still carries a
/// trailing constant: the wire format has no field for it, and silently
/// dropping it would change the realized product.
pub fn serialize<T: Scalar>(seq: &PulseSequence<T>) -> Result<String> {
    if !seq.is_normalized() {
        return Err(Error::TrailingPulse);
    }
    let mut buf = String::with_capacity(seq.data.len() * 26 + 128);
    buf.push_str(&format!(
        "{{\"format_version\":{},\"dim\":{},\"norm\":\"{}\",\"uses_of_U\":{},\"pulses\":[",
        wire::FORMAT_VERSION,
        seq.dim,
        seq.norm,
        seq.uses_of_u()
    ));
    for i in 0..seq.uses_of_u() {
        if i > 0 {
            buf.push(',');
        }
        buf.push('{');
        wire::push_matrix_fields(&mut buf, &seq.pulse(i));
        buf.push('}');
    }
    buf.push_str("]}\n");
    Ok(buf)
}

/// Parse a sequence from its JSON wire form, validating shape, version, the
/// pulse count, and unitarity of every pulse.
pub fn deserialize<T: Scalar>(text: &str) -> Result<PulseSequence<T>> {
    let w: SeqWire = wire::parse_json(text)?;
    from_wire(w)
}

pub(crate) fn from_wire<T: Scalar>(w: SeqWire) -> Result<PulseSequence<T>> {
    if w.format_version != wire::FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: w.format_version,
            expected: wire::FORMAT_VERSION,
        });
    }
    let norm = match w.norm.as_str() {
        "hs" => NormKind::Hs,
        "operator" => NormKind::Operator,
        other => {
            return Err(Error::Parse {
                offset: 0,
                line: 0,
                column: 0,
                msg: format!("unknown norm kind {other:?}"),
            })
        }
    };
    if norm == NormKind::Hs && w.dim != 2 {
        return Err(Error::DimUnsupported {
            got: w.dim,
            expected: "2 for hs-norm sequences",
        });
    }
    if w.pulses.len() != w.uses_of_u || w.pulses.is_empty() {
        return Err(Error::Parse {
            offset: 0,
            line: 0,
            column: 0,
            msg: format!(
                "uses_of_U = {} but {} pulses present",
                w.uses_of_u,
                w.pulses.len()
            ),
        });
    }
    let dim = w.dim;
    let mut data = Vec::with_capacity(w.pulses.len() * dim * dim);
    for p in w.pulses {
        if p.dim != dim {
            return Err(Error::DimMismatch(dim, p.dim));
        }
        let m = p.into_mat::<T>()?;
        let um = UnitaryMatrix::new(m)?;
        data.extend_from_slice(um.mat().entries());
    }
    Ok(PulseSequence {
        dim,
        norm,
        data,
        trailing: None,
    })
}

/// Write a normalized sequence to a file.
pub fn save<T: Scalar>(path: &Path, seq: &PulseSequence<T>) -> Result<()> {
    wire::write_atomic(path, serialize(seq)?.as_bytes())
}

/// Read a sequence from a file.
pub fn load<T: Scalar>(path: &Path) -> Result<PulseSequence<T>> {
    deserialize(&fs::read_to_string(path)?)
}
