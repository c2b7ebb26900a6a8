//! Finite gate sets and symbolic gate words.
//!
//! A word is a list of symbols multiplied left to right. `Gate(i)` is the
//! i-th gate of a set, `Dag(i)` its adjoint, and `Target` a slot for a
//! matrix supplied at evaluation time (used by inverse constructions, which
//! may consume an operator they cannot invert). Compilation flows that
//! promise inverse-free output must end with neither `Dag` nor `Target`
//! symbols in their words.

use num_complex::Complex;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mat::{CMat, UnitaryMatrix};
use crate::scalar::{sc, Scalar};
use crate::skc::pauligroup::{self, PhaseLexicon};
use crate::weyl;
use crate::wire;

/// One symbol of a gate word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// The i-th gate of the set.
    Gate(u16),
    /// The adjoint of the i-th gate.
    Dag(u16),
    /// A slot for the evaluation-time target matrix.
    Target,
}

/// A word together with its evaluated matrix (targets excluded: words with
/// `Target` slots have no fixed matrix and are carried as bare symbol lists).
#[derive(Clone, Debug)]
pub struct GateWord<T> {
    pub symbols: Vec<Symbol>,
    pub matrix: CMat<T>,
}

/// Reverse a word and flip every `Gate` to `Dag` and back, producing the
/// word of the adjoint product.
///
/// Panics on `Target`: the adjoint of an unevaluated slot does not exist in
/// an inverse-free setting, and asking for it is a construction bug.
pub fn dagger_word(symbols: &[Symbol]) -> Vec<Symbol> {
    symbols
        .iter()
        .rev()
        .map(|s| match s {
            Symbol::Gate(i) => Symbol::Dag(*i),
            Symbol::Dag(i) => Symbol::Gate(*i),
            Symbol::Target => panic!("cannot form the adjoint of a target slot"),
        })
        .collect()
}

/// Number of `Dag` symbols in a word.
pub fn count_dags(symbols: &[Symbol]) -> usize {
    symbols
        .iter()
        .filter(|s| matches!(s, Symbol::Dag(_)))
        .count()
}

/// Number of `Target` slots in a word.
pub fn count_targets(symbols: &[Symbol]) -> usize {
    symbols
        .iter()
        .filter(|s| matches!(s, Symbol::Target))
        .count()
}

/// A named finite set of unitary gates on a fixed dimension.
///
/// Construction indexes the subgroup generated by the set's generalized
/// permutation gates (every row and column holding a single unit-modulus
/// entry), which yields exact shortest words for sign- and phase-decorated
/// constants when they are reachable at all.
#[derive(Clone, Debug)]
pub struct GateSet<T> {
    dim: usize,
    names: Vec<String>,
    gates: Vec<UnitaryMatrix<T>>,
    lexicon: PhaseLexicon<T>,
    has_weyl: bool,
}

impl<T: Scalar> GateSet<T> {
    pub fn new(dim: usize, names: Vec<String>, gates: Vec<UnitaryMatrix<T>>) -> Result<Self> {
        if gates.is_empty() || gates.len() > u16::MAX as usize {
            return Err(Error::ParamRange {
                name: "gates",
                value: gates.len() as f64,
                range: "1..=65535",
            });
        }
        if names.len() != gates.len() {
            return Err(Error::DimMismatch(names.len(), gates.len()));
        }
        for g in &gates {
            if g.dim() != dim {
                return Err(Error::DimMismatch(dim, g.dim()));
            }
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(Error::ParamRange {
                    name: "names",
                    value: i as f64,
                    range: "unique, non-empty",
                });
            }
        }
        let gens: Vec<(u16, CMat<T>)> = gates
            .iter()
            .enumerate()
            .filter(|(_, g)| pauligroup::is_generalized_permutation(g.mat()))
            .map(|(i, g)| (i as u16, g.mat().clone()))
            .collect();
        let lexicon = pauligroup::build_lexicon(dim, &gens, pauligroup::GROUP_CAP)?;
        let has_weyl = match weyl::all_indices(dim) {
            Ok(idxs) => idxs.iter().all(|idx| match weyl::sigma::<T>(idx) {
                Ok(s) => lexicon.lookup(s.mat()).is_some(),
                Err(_) => false,
            }),
            Err(_) => false,
        };
        Ok(GateSet {
            dim,
            names,
            gates,
            lexicon,
            has_weyl,
        })
    }

    /// The standard qubit set {H, T, X, Y, Z} with the textbook matrices.
    ///
    /// Determinants are not 1 (the Paulis and H have determinant -1, T has
    /// determinant `e^{i pi/4}`), so words fall into eight determinant
    /// classes. Every gate has finite order, which makes each gate's exact
    /// inverse a short positive word: `T^{-1} = T^3 Z` up to ordering, and
    /// the others are their own inverses.
    pub fn std2() -> Self {
        let s = sc::<T>(std::f64::consts::FRAC_1_SQRT_2);
        let c8 = sc::<T>(std::f64::consts::FRAC_PI_4.cos());
        let s8 = sc::<T>(std::f64::consts::FRAC_PI_4.sin());
        let zero = Complex::<T>::zero();
        let one = Complex::new(T::one(), T::zero());
        let h = CMat::from_flat(
            2,
            vec![
                Complex::new(s, T::zero()),
                Complex::new(s, T::zero()),
                Complex::new(s, T::zero()),
                Complex::new(-s, T::zero()),
            ],
        )
        .unwrap();
        let t = CMat::from_flat(2, vec![one, zero, zero, Complex::new(c8, s8)]).unwrap();
        let x = CMat::from_flat(2, vec![zero, one, one, zero]).unwrap();
        let y = CMat::from_flat(
            2,
            vec![
                zero,
                Complex::new(T::zero(), -T::one()),
                Complex::new(T::zero(), T::one()),
                zero,
            ],
        )
        .unwrap();
        let z = CMat::from_flat(2, vec![one, zero, zero, -one]).unwrap();
        let names = ["h", "t", "x", "y", "z"].map(String::from).to_vec();
        let gates = [h, t, x, y, z]
            .map(|m| UnitaryMatrix::new(m).expect("hard-coded gate is unitary"))
            .to_vec();
        GateSet::new(2, names, gates).expect("std2 construction is valid")
    }

    /// The bare Weyl pair {x, z} for dimension `d`: the cyclic shift and the
    /// clock. Generates the d-dimensional Weyl system exactly.
    pub fn weyl_only(dim: usize) -> Result<Self> {
        let x = weyl::weyl_x::<T>(dim)?;
        let z = weyl::weyl_z::<T>(dim)?;
        let names = ["x", "z"].map(String::from).to_vec();
        GateSet::new(dim, names, vec![x, z])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn name(&self, i: u16) -> &str {
        &self.names[i as usize]
    }

    pub fn gate(&self, i: u16) -> &UnitaryMatrix<T> {
        &self.gates[i as usize]
    }

    /// Whether every Weyl operator of this dimension has an exact word.
    pub fn has_weyl(&self) -> bool {
        self.has_weyl
    }

    /// Exact shortest word for a constant matrix, when the constant lies in
    /// the subgroup generated by the set's generalized permutation gates.
    pub fn word_for_constant(&self, m: &CMat<T>) -> Option<Vec<Symbol>> {
        self.lexicon.lookup(m).map(|w| w.to_vec())
    }

    /// Stable content hash of the gate set (dimension, names, entries).
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.dim.to_le_bytes());
        for (n, g) in self.names.iter().zip(&self.gates) {
            hasher.update(n.as_bytes());
            hasher.update([0u8]);
            for e in g.mat().entries() {
                hasher.update(wire::fmt_real(e.re).as_bytes());
                hasher.update(wire::fmt_real(e.im).as_bytes());
            }
        }
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn apply_flat<T: Scalar>(dim: usize, acc: &mut Vec<Complex<T>>, tmp: &mut Vec<Complex<T>>, m: &CMat<T>) {
    for v in tmp.iter_mut() {
        *v = Complex::zero();
    }
    for r in 0..dim {
        for k in 0..dim {
            let av = acc[r * dim + k];
            if av.re.is_zero() && av.im.is_zero() {
                continue;
            }
            for c in 0..dim {
                let t = av * m.at(k, c);
                tmp[r * dim + c] += t;
            }
        }
    }
    std::mem::swap(acc, tmp);
}

/// Evaluate a word against a gate set; `target` fills `Target` slots.
///
/// Returns [`Error::TargetSlot`] if the word has slots and no target was
/// supplied.
pub fn eval_symbols<T: Scalar>(
    symbols: &[Symbol],
    gs: &GateSet<T>,
    target: Option<&UnitaryMatrix<T>>,
) -> Result<CMat<T>> {
    let d = gs.dim();
    if let Some(u) = target {
        if u.dim() != d {
            return Err(Error::DimMismatch(d, u.dim()));
        }
    }
    let mut acc = CMat::<T>::identity(d).entries().to_vec();
    let mut tmp = vec![Complex::zero(); d * d];
    let mut dag_cache: Vec<Option<CMat<T>>> = vec![None; gs.len()];
    for s in symbols {
        match s {
            Symbol::Gate(i) => apply_flat(d, &mut acc, &mut tmp, gs.gate(*i).mat()),
            Symbol::Dag(i) => {
                let idx = *i as usize;
                if dag_cache[idx].is_none() {
                    dag_cache[idx] = Some(gs.gate(*i).mat().dagger());
                }
                apply_flat(d, &mut acc, &mut tmp, dag_cache[idx].as_ref().unwrap());
            }
            Symbol::Target => match target {
                Some(u) => apply_flat(d, &mut acc, &mut tmp, u.mat()),
                None => return Err(Error::TargetSlot),
            },
        }
    }
    CMat::from_flat(d, acc)
}
