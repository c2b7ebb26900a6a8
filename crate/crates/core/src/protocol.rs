//! The refocusing protocols: drive an unknown special unitary toward 𝟙 by
//! conjugate-and-contract rounds, recording everything needed to replay the
//! run as a U-independent pulse sequence.
//!
//! One round conjugates the current operator by a pulse (random, or 𝟙 once
//! progress is deterministic) and applies the contraction map. Oblivious runs
//! execute a precomputed number of rounds with no measurements; monitored
//! runs measure the distance to 𝟙 after every round and stop early.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{hs_norm_dist, op_norm_dist, CMat, UnitaryMatrix};
use crate::rng::RngStream;
use crate::scalar::{sc, Scalar, Tolerances};
use crate::seq::{self, NormKind, PulseSequence, WordBuilder};
use crate::su2;
use crate::weyl;
use crate::wire;

/// Whether a run may measure distances while it executes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolMode {
    /// Fixed round count chosen in advance; no measurements during the run.
    Oblivious,
    /// Distance to 𝟙 is measured each round; the run stops once below target.
    Monitored,
}

/// Which contraction map a trace was produced by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Pauli-conjugation product, dimension 2, Hilbert-Schmidt norm.
    Qubit,
    /// Weyl-conjugation product, any supported dimension, operator norm.
    Weyl,
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Final distance is at or below the configured epsilon.
    Converged,
    /// The round limit was exhausted first.
    RoundLimitReached,
}

/// One recorded round.
#[derive(Clone, Debug)]
pub struct TraceRound<T> {
    /// Distance to 𝟙 before the round.
    pub eps_before: T,
    /// Distance to 𝟙 after the round.
    pub eps_after: T,
    /// The conjugating pulse (𝟙 for deterministic contraction rounds).
    pub pulse: UnitaryMatrix<T>,
    /// Whether the conjugated operator landed in the jumping region.
    pub jumped: bool,
}

/// Full record of a protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolTrace<T> {
    pub dim: usize,
    pub kind: ProtocolKind,
    pub norm: NormKind,
    pub rounds: Vec<TraceRound<T>>,
    /// The operator after the last round.
    pub final_op: UnitaryMatrix<T>,
    /// Distance of `final_op` to 𝟙 in `norm`.
    pub final_eps: T,
    pub outcome: Outcome,
    /// The replayable pulse sequence, normalized; `None` when materializing
    /// it would exceed the `2^22`-pulse budget.
    pub sequence: Option<PulseSequence<T>>,
}

impl<T: Scalar> ProtocolTrace<T> {
    /// log2 of the number of uses of `U` the flattened run makes, whether or
    /// not the sequence was materialized.
    pub fn log2_uses(&self) -> T {
        let d = self.dim as f64;
        sc::<T>(self.rounds.len() as f64 * 2.0 * d.log2())
    }
}

/// Configuration for qubit runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QubitProtocolConfig<T> {
    /// Target Hilbert-Schmidt distance, in `(0, 1/4)`.
    pub epsilon: T,
    /// Tolerated failure probability for oblivious runs, in `(0, 1)`.
    pub eta: T,
    pub mode: ProtocolMode,
    pub seed: RngStream,
}

/// Configuration for d-dimensional runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuditProtocolConfig<T> {
    /// Target operator-norm distance, in `(0, 1/(2α))` for the dimension's α.
    pub epsilon: T,
    /// Tolerated failure probability for oblivious runs, in `(0, 1)`.
    pub eta: T,
    pub mode: ProtocolMode,
    pub seed: RngStream,
    /// Monitored-mode limit on total rounds.
    pub round_cap: usize,
    /// Oblivious runs whose use count exceeds `2^max_log2_uses` are refused.
    pub max_log2_uses: f64,
    /// Test hook: a fixed conjugation to use for the first random round in
    /// place of a Haar draw.
    #[serde(skip)]
    pub conjugation_override: Option<UnitaryMatrix<T>>,
}

impl<T: Scalar> QuditProtocolConfig<T> {
    pub fn new(epsilon: T, eta: T, mode: ProtocolMode, seed: RngStream) -> Self {
        QuditProtocolConfig {
            epsilon,
            eta,
            mode,
            seed,
            round_cap: 64,
            max_log2_uses: 24.0,
            conjugation_override: None,
        }
    }
}

/// Cost analysis attached to a refused oblivious run.
#[derive(Clone, Debug)]
pub struct CostReport<T> {
    pub dim: usize,
    /// Predicted round count (real-valued; it can exceed integer range).
    pub k: T,
    /// log2 of the implied number of uses of `U`.
    pub log2_uses: T,
    /// Jump-probability lower bound used in the prediction.
    pub p_bound: T,
    /// Whether the prediction failed to give any finite round count.
    pub unbounded: bool,
    /// The configured budget the prediction exceeded.
    pub budget_log2_uses: f64,
}

/// Result of a d-dimensional run: either a completed trace or a refusal with
/// the cost analysis that triggered it.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum QuditRun<T> {
    Completed(ProtocolTrace<T>),
    Refused(CostReport<T>),
}

fn check_unit_interval<T: Scalar>(name: &'static str, v: T, hi: f64, range: &'static str) -> Result<()> {
    let vf = v.to_f64().unwrap_or(f64::NAN);
    if !(vf > 0.0 && vf < hi) {
        return Err(Error::ParamRange {
            name,
            value: vf,
            range,
        });
    }
    Ok(())
}

fn hs_to_identity<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<T> {
    hs_norm_dist(u.mat(), &CMat::identity(2))
}

fn op_to_identity<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<T> {
    op_norm_dist(u.mat(), &CMat::identity(u.dim()))
}

/// Internal cap on random rounds in monitored qubit runs. The jump chance
/// per random round is bounded away from zero, so reaching this cap has
/// vanishing probability; it exists to make the loop finite unconditionally.
const QUBIT_RANDOM_CAP: usize = 256;

/// Deterministic contraction budget for monitored qubit runs: one round to
/// jump into the shrinking region plus enough doublings to pass `eps`.
fn qubit_deterministic_budget(eps: f64) -> usize {
    let inner = (1.0 / (8.0f64.sqrt() * eps)).log2();
    let m = (inner.log2() + 1.0).ceil().max(0.0) as usize;
    1 + m
}

struct SequenceTracker<T> {
    builder: Option<WordBuilder<T>>,
}

impl<T: Scalar> SequenceTracker<T> {
    fn new(dim: usize) -> Self {
        SequenceTracker {
            builder: Some(WordBuilder::new(dim)),
        }
    }

    fn round(&mut self, pulse: &UnitaryMatrix<T>, kind: ProtocolKind) {
        if let Some(b) = self.builder.as_mut() {
            b.conjugate(pulse.mat());
            let r = match kind {
                ProtocolKind::Qubit => b.expand_f_qubit(),
                ProtocolKind::Weyl => b.expand_f_weyl(),
            };
            if r.is_err() {
                // Over the materialization budget: drop the partial word and
                // record the run without a sequence.
                self.builder = None;
            }
        }
    }

    fn finish(self, norm: NormKind) -> Option<PulseSequence<T>> {
        self.builder
            .map(|b| seq::normalize(&b.into_sequence(norm)).expect("normalize is total"))
    }
}

/// Run the qubit protocol on `u`.
///
/// `u` must be 2×2 special unitary (a global phase is reported as an error,
/// not silently stripped). Oblivious mode runs exactly the predicted round
/// count; monitored mode measures after each round and stops at the target.
pub fn refocus_qubit<T: Scalar>(
    u: &UnitaryMatrix<T>,
    cfg: &QubitProtocolConfig<T>,
) -> Result<ProtocolTrace<T>> {
    let tol = Tolerances::<T>::default();
    su2::su2_decompose(u, &tol)?;
    check_unit_interval("epsilon", cfg.epsilon, 0.25, "(0, 1/4)")?;
    check_unit_interval("eta", cfg.eta, 1.0, "(0, 1)")?;

    let mut rng = cfg.seed.clone();
    let mut u_cur = u.clone();
    let mut rounds: Vec<TraceRound<T>> = Vec::new();
    let mut tracker = SequenceTracker::new(2);
    let id2 = UnitaryMatrix::<T>::identity(2);

    let outcome = match cfg.mode {
        ProtocolMode::Oblivious => {
            let k = su2::qubit_k(cfg.epsilon, cfg.eta)? as usize;
            for _ in 0..k {
                let eps_before = hs_to_identity(&u_cur)?;
                let (w, r) = su2::g_qubit(&u_cur, &mut rng)?;
                let jumped = su2::in_jumping_region(&w)?;
                let u_next = su2::f_qubit(&w)?;
                let eps_after = hs_to_identity(&u_next)?;
                tracker.round(&r, ProtocolKind::Qubit);
                rounds.push(TraceRound {
                    eps_before,
                    eps_after,
                    pulse: r,
                    jumped,
                });
                u_cur = u_next;
            }
            if hs_to_identity(&u_cur)? <= cfg.epsilon {
                Outcome::Converged
            } else {
                Outcome::RoundLimitReached
            }
        }
        ProtocolMode::Monitored => {
            let mut det_left = qubit_deterministic_budget(cfg.epsilon.to_f64().unwrap());
            let mut random_left = QUBIT_RANDOM_CAP;
            loop {
                let eps_before = hs_to_identity(&u_cur)?;
                if eps_before <= cfg.epsilon {
                    break Outcome::Converged;
                }
                if su2::in_jumping_region(&u_cur)? {
                    if det_left == 0 {
                        break Outcome::RoundLimitReached;
                    }
                    det_left -= 1;
                    let u_next = su2::f_qubit(&u_cur)?;
                    let eps_after = hs_to_identity(&u_next)?;
                    tracker.round(&id2, ProtocolKind::Qubit);
                    rounds.push(TraceRound {
                        eps_before,
                        eps_after,
                        pulse: id2.clone(),
                        jumped: true,
                    });
                    u_cur = u_next;
                } else {
                    if random_left == 0 {
                        break Outcome::RoundLimitReached;
                    }
                    random_left -= 1;
                    let (w, r) = su2::g_qubit(&u_cur, &mut rng)?;
                    let jumped = su2::in_jumping_region(&w)?;
                    let u_next = su2::f_qubit(&w)?;
                    let eps_after = hs_to_identity(&u_next)?;
                    tracker.round(&r, ProtocolKind::Qubit);
                    rounds.push(TraceRound {
                        eps_before,
                        eps_after,
                        pulse: r,
                        jumped,
                    });
                    u_cur = u_next;
                }
            }
        }
    };

    let final_eps = hs_to_identity(&u_cur)?;
    Ok(ProtocolTrace {
        dim: 2,
        kind: ProtocolKind::Qubit,
        norm: NormKind::Hs,
        rounds,
        final_op: u_cur,
        final_eps,
        outcome,
        sequence: tracker.finish(NormKind::Hs),
    })
}

fn conjugate<T: Scalar>(v: &UnitaryMatrix<T>, u: &UnitaryMatrix<T>) -> UnitaryMatrix<T> {
    UnitaryMatrix::assume_unitary(v.mat().matmul(u.mat()).matmul(&v.mat().dagger()))
}

fn check_special<T: Scalar>(u: &UnitaryMatrix<T>, tol: &Tolerances<T>) -> Result<()> {
    let det = u.mat().det();
    let dev = (det - num_complex::Complex::new(T::one(), T::zero())).norm();
    if dev > tol.det_one {
        return Err(Error::NonUnitDeterminant {
            det_phase: det.arg().to_f64().unwrap_or(f64::NAN),
            global_phase: (det.arg().to_f64().unwrap_or(f64::NAN)) / u.dim() as f64,
        });
    }
    Ok(())
}

/// Run the d-dimensional protocol on `u`.
///
/// `u` must be special unitary of dimension 2..=8. Oblivious runs are first
/// costed; if the predicted use count exceeds the configured budget the run
/// is refused with the analysis instead of executed.
pub fn refocus_qudit<T: Scalar>(
    u: &UnitaryMatrix<T>,
    cfg: &QuditProtocolConfig<T>,
) -> Result<QuditRun<T>> {
    let d = u.dim();
    let consts = weyl::qudit_constants::<T>(d)?;
    let tol = Tolerances::<T>::default();
    check_special(u, &tol)?;
    let eps_hi = 1.0 / (2.0 * consts.alpha.to_f64().unwrap());
    check_unit_interval("epsilon", cfg.epsilon, eps_hi, "(0, 1/(2 alpha))")?;
    check_unit_interval("eta", cfg.eta, 1.0, "(0, 1)")?;
    if cfg.round_cap == 0 {
        return Err(Error::ParamRange {
            name: "round_cap",
            value: 0.0,
            range: ">= 1",
        });
    }

    let mut rng = cfg.seed.clone();
    let mut u_cur = u.clone();
    let mut rounds: Vec<TraceRound<T>> = Vec::new();
    let mut tracker = SequenceTracker::new(d);
    let id = UnitaryMatrix::<T>::identity(d);
    let mut override_pulse = cfg.conjugation_override.clone();

    let outcome = match cfg.mode {
        ProtocolMode::Oblivious => {
            let cost = weyl::qudit_k(d, cfg.epsilon, cfg.eta)?;
            let log2_uses = cost.log2_uses.to_f64().unwrap_or(f64::INFINITY);
            if cost.unbounded || log2_uses > cfg.max_log2_uses {
                return Ok(QuditRun::Refused(CostReport {
                    dim: d,
                    k: cost.k,
                    log2_uses: cost.log2_uses,
                    p_bound: cost.p,
                    unbounded: cost.unbounded,
                    budget_log2_uses: cfg.max_log2_uses,
                }));
            }
            let k = cost.k.to_f64().unwrap() as usize;
            for round_idx in 0..k {
                let eps_before = op_to_identity(&u_cur)?;
                let (w, v) = next_conjugation(&u_cur, &mut rng, round_idx, &mut override_pulse)?;
                let u_next = weyl::f_qudit(&w)?;
                let jumped = weyl::in_shrinking_region_d(&u_next)?;
                let eps_after = op_to_identity(&u_next)?;
                tracker.round(&v, ProtocolKind::Weyl);
                rounds.push(TraceRound {
                    eps_before,
                    eps_after,
                    pulse: v,
                    jumped,
                });
                u_cur = u_next;
            }
            if op_to_identity(&u_cur)? <= cfg.epsilon {
                Outcome::Converged
            } else {
                Outcome::RoundLimitReached
            }
        }
        ProtocolMode::Monitored => {
            let mut outcome = Outcome::RoundLimitReached;
            for round_idx in 0..cfg.round_cap {
                let eps_before = op_to_identity(&u_cur)?;
                if eps_before <= cfg.epsilon {
                    outcome = Outcome::Converged;
                    break;
                }
                let (w, v, deterministic) = if weyl::in_shrinking_region_d(&u_cur)? {
                    (u_cur.clone(), id.clone(), true)
                } else {
                    let (w, v) =
                        next_conjugation(&u_cur, &mut rng, round_idx, &mut override_pulse)?;
                    (w, v, false)
                };
                let u_next = weyl::f_qudit(&w)?;
                let jumped = deterministic || weyl::in_shrinking_region_d(&u_next)?;
                let eps_after = op_to_identity(&u_next)?;
                tracker.round(&v, ProtocolKind::Weyl);
                rounds.push(TraceRound {
                    eps_before,
                    eps_after,
                    pulse: v,
                    jumped,
                });
                u_cur = u_next;
            }
            if outcome == Outcome::RoundLimitReached && op_to_identity(&u_cur)? <= cfg.epsilon {
                outcome = Outcome::Converged;
            }
            outcome
        }
    };

    let final_eps = op_to_identity(&u_cur)?;
    Ok(QuditRun::Completed(ProtocolTrace {
        dim: d,
        kind: ProtocolKind::Weyl,
        norm: NormKind::Operator,
        rounds,
        final_op: u_cur,
        final_eps,
        outcome,
        sequence: tracker.finish(NormKind::Operator),
    }))
}

fn next_conjugation<T: Scalar>(
    u_cur: &UnitaryMatrix<T>,
    rng: &mut RngStream,
    round_idx: usize,
    override_pulse: &mut Option<UnitaryMatrix<T>>,
) -> Result<(UnitaryMatrix<T>, UnitaryMatrix<T>)> {
    match (round_idx, override_pulse.take()) {
        (0, Some(v)) => {
            if v.dim() != u_cur.dim() {
                return Err(Error::DimMismatch(u_cur.dim(), v.dim()));
            }
            Ok((conjugate(&v, u_cur), v))
        }
        _ => weyl::g_qudit(u_cur, rng),
    }
}

fn push_round_fields<T: Scalar>(buf: &mut String, r: &TraceRound<T>) {
    buf.push_str("{\"eps_before\":");
    buf.push_str(&wire::fmt_real(r.eps_before));
    buf.push_str(",\"eps_after\":");
    buf.push_str(&wire::fmt_real(r.eps_after));
    buf.push_str(",\"pulse\":{");
    wire::push_matrix_fields(buf, r.pulse.mat());
    buf.push_str("},\"jumped\":");
    buf.push_str(if r.jumped { "true" } else { "false" });
    buf.push('}');
}

/// Serialize a trace to its JSON wire form.
pub fn trace_to_json<T: Scalar>(trace: &ProtocolTrace<T>) -> Result<String> {
    let mut buf = String::with_capacity(4096);
    buf.push_str(&format!("{{\"dim\":{},\"rounds\":[", trace.dim));
    for (i, r) in trace.rounds.iter().enumerate() {
        if i > 0 {
            buf.push(',');
        }
        push_round_fields(&mut buf, r);
    }
    buf.push_str("],\"final_eps\":");
    buf.push_str(&wire::fmt_real(trace.final_eps));
    buf.push_str(",\"sequence\":");
    match &trace.sequence {
        Some(s) => {
            let text = seq::serialize(s)?;
            buf.push_str(text.trim_end());
        }
        None => buf.push_str("null"),
    }
    buf.push_str("}\n");
    Ok(buf)
}

#[derive(Deserialize)]
struct RoundWire {
    eps_before: f64,
    eps_after: f64,
    pulse: wire::WireMatrix,
    jumped: bool,
}

#[derive(Deserialize)]
struct TraceWire {
    dim: usize,
    rounds: Vec<RoundWire>,
    final_eps: f64,
    sequence: Option<seq::SeqWire>,
}

/// A trace parsed back from the wire. Only the serialized fields are
/// recoverable; the final operator and outcome are not part of the format.
#[derive(Clone, Debug)]
pub struct ParsedTrace<T> {
    pub dim: usize,
    pub rounds: Vec<TraceRound<T>>,
    pub final_eps: T,
    pub sequence: Option<PulseSequence<T>>,
}

/// Parse a trace from its JSON wire form.
pub fn trace_from_json<T: Scalar>(text: &str) -> Result<ParsedTrace<T>> {
    let w: TraceWire = wire::parse_json(text)?;
    let mut rounds = Vec::with_capacity(w.rounds.len());
    for r in w.rounds {
        if r.pulse.dim != w.dim {
            return Err(Error::DimMismatch(w.dim, r.pulse.dim));
        }
        rounds.push(TraceRound {
            eps_before: sc::<T>(r.eps_before),
            eps_after: sc::<T>(r.eps_after),
            pulse: UnitaryMatrix::new(r.pulse.into_mat::<T>()?)?,
            jumped: r.jumped,
        });
    }
    let sequence = match w.sequence {
        Some(sw) => Some(seq::from_wire::<T>(sw)?),
        None => None,
    };
    if let Some(s) = &sequence {
        if s.dim() != w.dim {
            return Err(Error::DimMismatch(w.dim, s.dim()));
        }
    }
    Ok(ParsedTrace {
        dim: w.dim,
        rounds,
        final_eps: sc::<T>(w.final_eps),
        sequence,
    })
}
