//! Refocusing analysis in dimension d through Weyl operators.
//!
//! The Weyl (generalized Pauli) family `σ_(a1,a2) = Z^{a1} X^{a2}` indexed by
//! `(a1, a2) ∈ Z_d × Z_d` plays the role the Pauli triple plays for qubits:
//! averaging a matrix over conjugation by all d² of them projects onto the
//! identity component, so the pulse map `f(U) = ∏_a σ_a U σ_a†` contracts a
//! near-identity `U` quadratically toward 𝟙. The constants are dimension
//! dependent and collected in [`QuditConstants`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::haar::haar_unitary;
use crate::mat::{op_norm_dist, CMat, UnitaryMatrix, MAX_DIM};
use crate::rng::RngStream;
use crate::scalar::{sc, Scalar};

fn check_dim(d: usize) -> Result<()> {
    if d < 2 || d > MAX_DIM {
        return Err(Error::DimUnsupported {
            got: d,
            expected: "2 through 8",
        });
    }
    Ok(())
}

/// Index `(a1, a2)` of a Weyl operator in dimension `dim`.
///
/// The canonical order is ascending `dim·a1 + a2`, used wherever products
/// over the whole family appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeylIndex {
    pub dim: usize,
    pub a1: usize,
    pub a2: usize,
}

impl WeylIndex {
    pub fn new(dim: usize, a1: usize, a2: usize) -> Result<Self> {
        check_dim(dim)?;
        if a1 >= dim || a2 >= dim {
            return Err(Error::ParamRange {
                name: "weyl index",
                value: (dim * a1 + a2) as f64,
                range: "a1, a2 < dim",
            });
        }
        Ok(WeylIndex { dim, a1, a2 })
    }

    /// Position in the canonical order.
    pub fn linear(&self) -> usize {
        self.dim * self.a1 + self.a2
    }
}

/// All d² Weyl indices in canonical order.
pub fn all_indices(dim: usize) -> Result<Vec<WeylIndex>> {
    check_dim(dim)?;
    let mut v = Vec::with_capacity(dim * dim);
    for a1 in 0..dim {
        for a2 in 0..dim {
            v.push(WeylIndex { dim, a1, a2 });
        }
    }
    Ok(v)
}

/// Cyclic shift `X|x⟩ = |x+1 mod d⟩`.
pub fn weyl_x<T: Scalar>(d: usize) -> Result<UnitaryMatrix<T>> {
    check_dim(d)?;
    let m = CMat::from_fn(d, |r, c| {
        if r == (c + 1) % d {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    Ok(UnitaryMatrix::assume_unitary(m))
}

/// Phase ramp `Z|x⟩ = ω^x |x⟩` with `ω = e^{2πi/d}`.
pub fn weyl_z<T: Scalar>(d: usize) -> Result<UnitaryMatrix<T>> {
    check_dim(d)?;
    let m = CMat::from_fn(d, |r, c| {
        if r == c {
            root_of_unity::<T>(d, r)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    Ok(UnitaryMatrix::assume_unitary(m))
}

/// `ω^k` for `ω = e^{2πi/d}`, with the exponent reduced mod d first.
fn root_of_unity<T: Scalar>(d: usize, k: usize) -> Complex<T> {
    let kk = k % d;
    let theta = sc::<T>(2.0) * T::PI() * T::from_usize(kk).unwrap() / T::from_usize(d).unwrap();
    Complex::from_polar(T::one(), theta)
}

/// The Weyl operator `σ_(a1,a2) = Z^{a1} X^{a2}`.
///
/// Built entrywise: the only nonzero entry of column `c` sits at row
/// `(c + a2) mod d` with value `ω^{a1·row}`.
pub fn sigma<T: Scalar>(idx: &WeylIndex) -> Result<UnitaryMatrix<T>> {
    let d = idx.dim;
    check_dim(d)?;
    let m = CMat::from_fn(d, |r, c| {
        if r == (c + idx.a2) % d {
            root_of_unity::<T>(d, idx.a1 * r)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    Ok(UnitaryMatrix::assume_unitary(m))
}

/// Dimension-dependent constants of the contraction analysis.
#[derive(Clone, Copy, Debug)]
pub struct QuditConstants<T> {
    pub dim: usize,
    /// Coarse contraction constant `2^(d²+1)`.
    pub alpha: T,
    /// Sharper constant `2^(d²) + d²(4e−9) − 1`.
    pub alpha_tight: T,
    /// Near-diagonal certificate radius `1/(2·alpha·d²)`.
    pub delta: T,
    /// Lower bound `(delta/10)^(d²−1)` on the per-round jump probability.
    /// Underflows to zero for d ≥ 6; see `p_bound_log10`.
    pub p_bound: T,
    /// `log10` of `p_bound`, computed in log space so it stays finite.
    pub p_bound_log10: T,
}

/// Compute the constants for a dimension.
pub fn qudit_constants<T: Scalar>(d: usize) -> Result<QuditConstants<T>> {
    check_dim(d)?;
    let d2 = (d * d) as f64;
    let alpha = 2f64.powf(d2 + 1.0);
    let alpha_tight = 2f64.powf(d2) + d2 * (4.0 * std::f64::consts::E - 9.0) - 1.0;
    let delta = 1.0 / (2.0 * alpha * d2);
    let p_bound_log10 = (d2 - 1.0) * (delta / 10.0).log10();
    let p_bound = 10f64.powf(p_bound_log10);
    Ok(QuditConstants {
        dim: d,
        alpha: sc(alpha),
        alpha_tight: sc(alpha_tight),
        delta: sc(delta),
        p_bound: sc(p_bound),
        p_bound_log10: sc(p_bound_log10),
    })
}

/// The d-dimensional pulse map `f(U) = ∏_a σ_a U σ_a†`, factors in canonical
/// index order with the smallest index leftmost.
pub fn f_qudit<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<UnitaryMatrix<T>> {
    let d = u.dim();
    check_dim(d)?;
    let mut acc: Option<CMat<T>> = None;
    for idx in all_indices(d)? {
        let s = sigma::<T>(&idx)?;
        let term = s.mat().matmul(u.mat()).matmul(&s.mat().dagger());
        acc = Some(match acc {
            None => term,
            Some(prev) => prev.matmul(&term),
        });
    }
    UnitaryMatrix::new(acc.expect("d ≥ 2 gives at least one factor"))
}

/// Is `‖U − 𝟙‖ ≤ 1/(2·alpha)`?
///
/// Inside this region each `f` application contracts the operator distance
/// quadratically (`ε ↦ alpha_tight·ε²` at worst).
pub fn in_shrinking_region_d<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<bool> {
    let k = qudit_constants::<T>(u.dim())?;
    let dist = op_norm_dist(u.mat(), &CMat::identity(u.dim()))?;
    Ok(dist <= T::one() / (sc::<T>(2.0) * k.alpha))
}

/// Does a single `f` send `U` into the shrinking region? Evaluated directly
/// on the image, which makes the predicate exact by construction.
pub fn in_jumping_region_d<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<bool> {
    in_shrinking_region_d(&f_qudit(u)?)
}

/// Does `U` sit within `delta` (operator norm) of the diagonal of its own
/// diagonal phases?
///
/// The certificate compares against `diag(U_jj / |U_jj|)`; a vanishing
/// diagonal entry means no such phase exists and the answer is `false`.
pub fn near_diagonal<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<bool> {
    let d = u.dim();
    let k = qudit_constants::<T>(d)?;
    let mut phases = CMat::<T>::zeros(d);
    for j in 0..d {
        let z = u.at(j, j);
        let n = z.norm();
        if n < sc(1e-12) {
            return Ok(false);
        }
        *phases.at_mut(j, j) = z / Complex::new(n, T::zero());
    }
    let dist = op_norm_dist(u.mat(), &phases)?;
    Ok(dist <= k.delta)
}

/// Measure both sides of the Lipschitz property of `f`:
/// returns `(‖f(U) − f(V)‖, d²·‖U − V‖)`. The first never exceeds the
/// second: `f` is a product of d² isometrically conjugated copies.
pub fn hybrid_bound_check<T: Scalar>(
    u: &UnitaryMatrix<T>,
    v: &UnitaryMatrix<T>,
) -> Result<(T, T)> {
    if u.dim() != v.dim() {
        return Err(Error::DimMismatch(u.dim(), v.dim()));
    }
    let fu = f_qudit(u)?;
    let fv = f_qudit(v)?;
    let lhs = op_norm_dist(fu.mat(), fv.mat())?;
    let rhs = T::from_usize(u.dim() * u.dim()).unwrap() * op_norm_dist(u.mat(), v.mat())?;
    Ok((lhs, rhs))
}

/// Conjugate `U` by a Haar-random special unitary: returns `(V U V†, V)`.
///
/// The conjugation preserves the spectrum, hence the operator distance to 𝟙;
/// it re-randomizes the eigenbasis.
pub fn g_qudit<T: Scalar>(
    u: &UnitaryMatrix<T>,
    rng: &mut RngStream,
) -> Result<(UnitaryMatrix<T>, UnitaryMatrix<T>)> {
    let v = haar_unitary::<T>(u.dim(), rng)?;
    let w = UnitaryMatrix::new(v.mat().matmul(u.mat()).matmul(&v.mat().dagger()))?;
    Ok((w, v))
}

/// Round count and pulse cost of the oblivious d-dimensional protocol.
#[derive(Clone, Copy, Debug)]
pub struct QuditCost<T> {
    /// Required `(g, f)` rounds; integer-valued but kept as a float because
    /// realistic values overflow any machine integer.
    pub k: T,
    /// `log₂` of the total number of uses of `U`, i.e. `log₂(d^{2k})`.
    pub log2_uses: T,
    /// Jump-probability lower bound used for `k`.
    pub p: T,
    /// Set when `k` is not even representable as a finite float (the
    /// probability bound underflowed to zero).
    pub unbounded: bool,
}

/// Rounds for the oblivious protocol in dimension d to reach operator
/// distance `ε` with failure probability at most `η`, using the worst-case
/// jump-probability bound for that dimension.
///
/// `k = ⌈ln(1/η)/(−ln(1−p)) + log₂log₂(1/(alpha·ε))⌉`. For d ≥ 3 the first
/// term is astronomically large; callers are expected to inspect
/// [`QuditCost::log2_uses`] before attempting anything oblivious.
pub fn qudit_k<T: Scalar>(d: usize, epsilon: T, eta: T) -> Result<QuditCost<T>> {
    let k = qudit_constants::<T>(d)?;
    qudit_k_with_p(d, epsilon, eta, k.p_bound)
}

/// [`qudit_k`] with an explicit per-round jump probability `p`.
///
/// As `p → 1` only the doubly-logarithmic contraction term survives.
pub fn qudit_k_with_p<T: Scalar>(d: usize, epsilon: T, eta: T, p: T) -> Result<QuditCost<T>> {
    let consts = qudit_constants::<T>(d)?;
    let eps_max = T::one() / (sc::<T>(2.0) * consts.alpha);
    if !(epsilon > T::zero() && epsilon < eps_max) {
        return Err(Error::ParamRange {
            name: "epsilon",
            value: epsilon.to_f64().unwrap_or(f64::NAN),
            range: "(0, 1/(2·alpha))",
        });
    }
    if !(eta > T::zero() && eta < T::one()) {
        return Err(Error::ParamRange {
            name: "eta",
            value: eta.to_f64().unwrap_or(f64::NAN),
            range: "(0, 1)",
        });
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::ParamRange {
            name: "p",
            value: p.to_f64().unwrap_or(f64::NAN),
            range: "[0, 1]",
        });
    }
    let pf = p.to_f64().unwrap();
    let eps = epsilon.to_f64().unwrap();
    let et = eta.to_f64().unwrap();
    let alpha = consts.alpha.to_f64().unwrap();

    // ln(1−p) through ln_1p keeps precision for tiny p; p = 0 drives the
    // term to +∞, which the unbounded flag reports honestly.
    let denom = -(-pf).ln_1p();
    let term1 = (1.0 / et).ln() / denom;
    let term2 = (1.0 / (alpha * eps)).log2().log2();
    let kf = (term1 + term2).ceil().max(1.0);
    let log2_uses = kf * 2.0 * (d as f64).log2();
    Ok(QuditCost {
        k: sc(kf),
        log2_uses: sc(log2_uses),
        p,
        unbounded: !kf.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ident(d: usize) -> CMat<f64> {
        CMat::identity(d)
    }

    fn mat_pow(m: &CMat<f64>, k: usize) -> CMat<f64> {
        let mut acc = ident(m.dim());
        for _ in 0..k {
            acc = acc.matmul(m);
        }
        acc
    }

    fn scale_to_det_one(u: &UnitaryMatrix<f64>) -> UnitaryMatrix<f64> {
        let d = u.dim();
        let det = u.mat().det();
        let root = Complex64::from_polar(1.0, det.arg() / d as f64);
        UnitaryMatrix::new(u.mat().scale(root.conj())).unwrap()
    }

    #[test]
    fn x_and_z_oracles_d3() {
        let x = weyl_x::<f64>(3).unwrap();
        // X sends e0 -> e1: column 0 has its 1 in row 1.
        assert_eq!(x.at(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(x.at(0, 2), Complex64::new(1.0, 0.0));
        let z = weyl_z::<f64>(3).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((z.at(1, 1) - w).norm() < 1e-15);
        assert!((z.at(2, 2) - w * w).norm() < 1e-15);
    }

    #[test]
    fn x_z_order_d() {
        for d in 2..=6 {
            let x = weyl_x::<f64>(d).unwrap();
            let z = weyl_z::<f64>(d).unwrap();
            assert!(mat_pow(x.mat(), d).max_abs_diff(&ident(d)).unwrap() < 1e-13);
            assert!(mat_pow(z.mat(), d).max_abs_diff(&ident(d)).unwrap() < 1e-13);
        }
    }

    #[test]
    fn commutation_z_x_is_omega_x_z() {
        for d in 2..=5 {
            let x = weyl_x::<f64>(d).unwrap();
            let z = weyl_z::<f64>(d).unwrap();
            let zx = z.mat().matmul(x.mat());
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
            let wxz = x.mat().matmul(z.mat()).scale(w);
            assert!(zx.max_abs_diff(&wxz).unwrap() < 1e-14, "d = {d}");
        }
    }

    #[test]
    fn sigma_matches_explicit_powers() {
        for d in 2..=4 {
            let x = weyl_x::<f64>(d).unwrap();
            let z = weyl_z::<f64>(d).unwrap();
            for idx in all_indices(d).unwrap() {
                let direct = sigma::<f64>(&idx).unwrap();
                let explicit = mat_pow(z.mat(), idx.a1).matmul(&mat_pow(x.mat(), idx.a2));
                assert!(
                    direct.mat().max_abs_diff(&explicit).unwrap() < 1e-13,
                    "d={d} idx=({},{})",
                    idx.a1,
                    idx.a2
                );
            }
        }
    }

    #[test]
    fn canonical_order_is_row_major() {
        let idx = all_indices(2).unwrap();
        let pairs: Vec<(usize, usize)> = idx.iter().map(|i| (i.a1, i.a2)).collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        for (n, i) in idx.iter().enumerate() {
            assert_eq!(i.linear(), n);
        }
        // First element is the identity.
        let s0 = sigma::<f64>(&idx[0]).unwrap();
        assert!(s0.mat().max_abs_diff(&ident(2)).unwrap() < 1e-15);
    }

    #[test]
    fn sigma_orthogonality() {
        // tr(σ_a† σ_b) = d·δ_ab.
        for d in 2..=4 {
            let idxs = all_indices(d).unwrap();
            for a in &idxs {
                let sa = sigma::<f64>(a).unwrap();
                for b in &idxs {
                    let sb = sigma::<f64>(b).unwrap();
                    let tr = sa.mat().dagger().matmul(sb.mat()).trace();
                    let expect = if a == b { d as f64 } else { 0.0 };
                    assert!(
                        (tr - Complex64::new(expect, 0.0)).norm() < 1e-12,
                        "d={d} a={:?} b={:?} tr={tr}",
                        (a.a1, a.a2),
                        (b.a1, b.a2)
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_conjugation_phase() {
        // σ_a σ_b σ_a† = ω^(a1·b2 − a2·b1) σ_b.
        let d = 3;
        let idxs = all_indices(d).unwrap();
        for a in &idxs {
            let sa = sigma::<f64>(a).unwrap();
            for b in &idxs {
                let sb = sigma::<f64>(b).unwrap();
                let conj = sa.mat().matmul(sb.mat()).matmul(&sa.mat().dagger());
                let e = (a.a1 * b.a2 + d * d + (d - 1) * a.a2 * b.a1) % d;
                let phase = Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * e as f64 / d as f64,
                );
                assert!(
                    conj.max_abs_diff(&sb.mat().scale(phase)).unwrap() < 1e-12,
                    "a={:?} b={:?}",
                    (a.a1, a.a2),
                    (b.a1, b.a2)
                );
            }
        }
    }

    #[test]
    fn sigma_twirl_projects_to_trace() {
        // Σ_a σ_a M σ_a† = d·tr(M)·𝟙 for any M.
        let mut rng = RngStream::new(200);
        for d in 2..=3 {
            let m = CMat::from_fn(d, |_, _| {
                Complex64::new(rng.next_standard_normal(), rng.next_standard_normal())
            });
            let mut acc = CMat::<f64>::zeros(d);
            for idx in all_indices(d).unwrap() {
                let s = sigma::<f64>(&idx).unwrap();
                acc = acc
                    .add(&s.mat().matmul(&m).matmul(&s.mat().dagger()))
                    .unwrap();
            }
            let expect = ident(d).scale(m.trace() * Complex64::new(d as f64, 0.0));
            assert!(acc.max_abs_diff(&expect).unwrap() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn constants_pinned_d3() {
        let k = qudit_constants::<f64>(3).unwrap();
        assert_eq!(k.alpha, 1024.0);
        assert!((k.alpha_tight - 527.8581458245256).abs() < 1e-10);
        assert!((k.delta - 1.0 / 18432.0).abs() < 1e-18);
        let expect_p = (1.0 / 184320.0f64).powi(8);
        assert!((k.p_bound - expect_p).abs() < expect_p * 1e-10);
    }

    #[test]
    fn constants_relations_all_dims() {
        for d in 2..=8 {
            let k = qudit_constants::<f64>(d).unwrap();
            assert!(k.alpha_tight < k.alpha, "d={d}");
            let d2 = (d * d) as f64;
            assert!((k.delta - 1.0 / (2.0 * k.alpha * d2)).abs() < 1e-18 * k.delta.max(1e-300));
            assert!(k.p_bound >= 0.0 && k.p_bound < 1.0);
            if k.p_bound > 0.0 {
                assert!((k.p_bound.log10() - k.p_bound_log10).abs() < 1e-8);
            }
        }
        // Underflow regime: the bound itself hits zero but its log stays finite.
        let k6 = qudit_constants::<f64>(6).unwrap();
        assert_eq!(k6.p_bound, 0.0);
        assert!(k6.p_bound_log10.is_finite() && k6.p_bound_log10 < -400.0);
    }

    #[test]
    fn f_fixes_special_diagonals() {
        let mut rng = RngStream::new(201);
        for d in 2..=4 {
            for _ in 0..20 {
                let raw = crate::haar::random_diagonal_unitary::<f64>(d, &mut rng).unwrap();
                let u = scale_to_det_one(&raw);
                let fu = f_qudit(&u).unwrap();
                let dist = op_norm_dist(fu.mat(), &ident(d)).unwrap();
                assert!(dist < 1e-10, "d={d} dist={dist}");
            }
        }
    }

    #[test]
    fn f_qubit_relation_with_weyl_order() {
        // In d = 2 the qubit map equals the σ-conjugation product taken in
        // the order (0,1), (1,1), (1,0), (0,0) exactly, phases included;
        // the canonical ascending order gives a genuinely different matrix.
        let mut rng = RngStream::new(202);
        let u = crate::haar::haar_unitary::<f64>(2, &mut rng).unwrap();
        let order = [(0usize, 1usize), (1, 1), (1, 0), (0, 0)];
        let mut acc: Option<CMat<f64>> = None;
        for (a1, a2) in order {
            let s = sigma::<f64>(&WeylIndex::new(2, a1, a2).unwrap()).unwrap();
            let term = s.mat().matmul(u.mat()).matmul(&s.mat().dagger());
            acc = Some(match acc {
                None => term,
                Some(p) => p.matmul(&term),
            });
        }
        let via_weyl = acc.unwrap();
        let via_qubit = crate::su2::f_qubit(&u).unwrap();
        assert!(via_weyl.max_abs_diff(via_qubit.mat()).unwrap() < 1e-12);

        let canonical = f_qudit(&u).unwrap();
        assert!(
            canonical.mat().max_abs_diff(via_qubit.mat()).unwrap() > 1e-3,
            "canonical order should differ for this draw"
        );
    }

    #[test]
    fn contraction_single_step_bound() {
        let mut rng = RngStream::new(203);
        for d in 2..=3 {
            let k = qudit_constants::<f64>(d).unwrap();
            let r_max = 1.0 / (2.0 * k.alpha);
            for _ in 0..50 {
                let u = crate::haar::random_su_within::<f64>(d, r_max, &mut rng).unwrap();
                let eps0 = op_norm_dist(u.mat(), &ident(d)).unwrap();
                let fu = f_qudit(&u).unwrap();
                let eps1 = op_norm_dist(fu.mat(), &ident(d)).unwrap();
                assert!(
                    eps1 <= k.alpha_tight * eps0 * eps0 + 1e-13,
                    "d={d} eps0={eps0} eps1={eps1}"
                );
            }
        }
    }

    #[test]
    fn hybrid_bound_holds() {
        let mut rng = RngStream::new(204);
        for d in 2..=3 {
            for _ in 0..200 {
                let u = haar_unitary::<f64>(d, &mut rng).unwrap();
                let v = haar_unitary::<f64>(d, &mut rng).unwrap();
                let (lhs, rhs) = hybrid_bound_check(&u, &v).unwrap();
                assert!(lhs <= rhs + 1e-12, "d={d} lhs={lhs} rhs={rhs}");
            }
        }
    }

    #[test]
    fn near_diagonal_cases() {
        let d = 3;
        let k = qudit_constants::<f64>(d).unwrap();
        let mut rng = RngStream::new(205);
        // A diagonal unitary perturbed by δ/2 passes.
        let diag = crate::haar::random_diagonal_unitary::<f64>(d, &mut rng).unwrap();
        assert!(near_diagonal(&diag).unwrap());
        let bump = crate::haar::random_su_at_distance::<f64>(d, k.delta / 2.0, &mut rng).unwrap();
        let pert = UnitaryMatrix::new(bump.mat().matmul(diag.mat())).unwrap();
        assert!(near_diagonal(&pert).unwrap());
        // The shift X is maximally off-diagonal and fails.
        let x = weyl_x::<f64>(d).unwrap();
        assert!(!near_diagonal(&x).unwrap());
    }

    #[test]
    fn g_qudit_preserves_distance() {
        let mut rng = RngStream::new(206);
        for d in 2..=3 {
            for _ in 0..100 {
                let u = crate::haar::random_su_within::<f64>(d, 0.5, &mut rng).unwrap();
                let before = op_norm_dist(u.mat(), &ident(d)).unwrap();
                let (w, v) = g_qudit(&u, &mut rng).unwrap();
                let after = op_norm_dist(w.mat(), &ident(d)).unwrap();
                assert!((before - after).abs() < 1e-11);
                let rebuilt = v.mat().matmul(u.mat()).matmul(&v.mat().dagger());
                assert!(rebuilt.max_abs_diff(w.mat()).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn qudit_cost_examples() {
        // d = 2: the worst-case bound makes even the qubit case astronomical.
        let c = qudit_k::<f64>(2, 1e-4, 0.1).unwrap();
        assert!(!c.unbounded);
        assert!(c.k > 1e10, "k = {}", c.k);
        assert!((c.log2_uses - 2.0 * c.k).abs() < 1.0);
        // d = 6: p underflows, k becomes infinite, flagged unbounded.
        let c6 = qudit_k::<f64>(6, 1e-30, 0.1).unwrap();
        assert!(c6.unbounded);
        // p → 1 keeps only the contraction term.
        let k3 = qudit_constants::<f64>(3).unwrap();
        let eps = 1e-7f64;
        let cp = qudit_k_with_p::<f64>(3, eps, 0.5, 1.0).unwrap();
        let expect = (1.0 / (k3.alpha * eps)).log2().log2().ceil();
        assert_eq!(cp.k, expect.max(1.0));
    }

    #[test]
    fn qudit_cost_param_checks() {
        assert!(qudit_k::<f64>(3, 0.0, 0.1).is_err());
        assert!(qudit_k::<f64>(3, 1e-3, 0.1).is_err(), "epsilon above 1/(2α)");
        assert!(qudit_k::<f64>(3, 1e-7, 1.0).is_err());
        assert!(qudit_k_with_p::<f64>(3, 1e-7, 0.1, 1.5).is_err());
    }
}
