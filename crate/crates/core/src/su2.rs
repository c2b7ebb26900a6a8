//! One-qubit refocusing analysis in quaternion coordinates.
//!
//! An SU(2) element is written `U = a𝟙 + i(bX + cY + dZ)` with a unit real
//! 4-vector `(a,b,c,d)`. The pulse map `f(U) = (XUX)(YUY)(ZUZ)U` contracts
//! the Hilbert-Schmidt distance to the identity quadratically: after one
//! application the distance is exactly `√8·|b·d|`. Conjugating by a random
//! Pauli-axis reflection (`g`) re-randomizes `(b,d)` without changing the
//! distance, and with probability bounded away from zero lands `U` where one
//! `f` already contracts; iterating `g` then `f` drives any unknown `U` to 𝟙.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::haar::random_unit_vector3;
use crate::mat::{hs_norm_dist, CMat, UnitaryMatrix};
use crate::rng::RngStream;
use crate::scalar::{sc, Scalar, Tolerances};

/// Quaternion coordinates of an SU(2) element.
#[derive(Clone, Copy, Debug)]
pub struct Su2Params<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> Su2Params<T> {
    /// Validate unit norm (within 1e-10) and build.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let n = a * a + b * b + c * c + d * d;
        if (n - T::one()).abs() > sc(1e-10) {
            return Err(Error::ParamRange {
                name: "quaternion norm",
                value: n.to_f64().unwrap_or(f64::NAN),
                range: "1 within 1e-10",
            });
        }
        Ok(Su2Params { a, b, c, d })
    }

    /// Reconstruct the matrix `a𝟙 + i(bX + cY + dZ)`.
    pub fn to_matrix(&self) -> Result<UnitaryMatrix<T>> {
        let m = CMat::from_flat(
            2,
            vec![
                Complex::new(self.a, self.d),
                Complex::new(self.c, self.b),
                Complex::new(-self.c, self.b),
                Complex::new(self.a, -self.d),
            ],
        )?;
        UnitaryMatrix::new(m)
    }

    /// Hilbert-Schmidt distance to 𝟙 in closed form: `√(1−a)`.
    ///
    /// Useful as a cross-check; the protocol itself measures distances from
    /// the difference matrix, which has a far lower floating-point floor.
    pub fn hs_dist_to_identity(&self) -> T {
        (T::one() - self.a).max(T::zero()).sqrt()
    }
}

/// Pauli X.
pub fn pauli_x<T: Scalar>() -> UnitaryMatrix<T> {
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    UnitaryMatrix::assume_unitary(CMat::from_flat(2, vec![z, one, one, z]).unwrap())
}

/// Pauli Y.
pub fn pauli_y<T: Scalar>() -> UnitaryMatrix<T> {
    let z = Complex::new(T::zero(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    UnitaryMatrix::assume_unitary(CMat::from_flat(2, vec![z, -i, i, z]).unwrap())
}

/// Pauli Z.
pub fn pauli_z<T: Scalar>() -> UnitaryMatrix<T> {
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    UnitaryMatrix::assume_unitary(CMat::from_flat(2, vec![one, z, z, -one]).unwrap())
}

fn require_qubit<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<()> {
    if u.dim() != 2 {
        return Err(Error::DimUnsupported {
            got: u.dim(),
            expected: "2",
        });
    }
    Ok(())
}

/// Extract quaternion coordinates from an SU(2) matrix.
///
/// Errors if the determinant is not 1: a unitary with `det = e^{2iφ}` carries
/// a global phase `φ` that the quaternion form cannot represent, and the
/// error names it.
pub fn su2_decompose<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<Su2Params<T>> {
    require_qubit(u)?;
    let det = u.mat().det();
    let tol = Tolerances::<T>::default();
    if (det - Complex::new(T::one(), T::zero())).norm() > tol.det_one {
        let phase = det.arg();
        return Err(Error::NonUnitDeterminant {
            det_phase: phase.to_f64().unwrap_or(f64::NAN),
            global_phase: (phase / sc(2.0)).to_f64().unwrap_or(f64::NAN),
        });
    }
    let half = sc::<T>(0.5);
    let u00 = u.at(0, 0);
    let u01 = u.at(0, 1);
    let u10 = u.at(1, 0);
    let u11 = u.at(1, 1);
    Ok(Su2Params {
        a: (u00.re + u11.re) * half,
        b: (u01.im + u10.im) * half,
        c: (u01.re - u10.re) * half,
        d: (u00.im - u11.im) * half,
    })
}

/// The qubit pulse map `f(U) = (XUX)(YUY)(ZUZ)U`.
///
/// One evaluation uses `U` four times with fixed pulses in between. On the
/// quaternion side it sends the distance `ε = √(1−a)` to exactly `√8·|b·d|`;
/// since `|b·d| ≤ (1−a²)/2 ≤ ε²`, one application inside the shrinking
/// region contracts `ε` to at most `√8·ε²`.
pub fn f_qubit<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<UnitaryMatrix<T>> {
    require_qubit(u)?;
    let x = pauli_x::<T>();
    let y = pauli_y::<T>();
    let z = pauli_z::<T>();
    let m = u.mat();
    let xux = x.mat().matmul(m).matmul(x.mat());
    let yuy = y.mat().matmul(m).matmul(y.mat());
    let zuz = z.mat().matmul(m).matmul(z.mat());
    UnitaryMatrix::new(xux.matmul(&yuy).matmul(&zuz).matmul(m))
}

/// Exact Hilbert-Schmidt distance of `f(U)` from 𝟙, from `U`'s coordinates.
pub fn epsilon_after_f<T: Scalar>(p: &Su2Params<T>) -> T {
    sc::<T>(8.0).sqrt() * (p.b * p.d).abs()
}

/// Half-width of the jumping region: `1/√128`.
pub fn jump_threshold<T: Scalar>() -> T {
    T::one() / sc::<T>(128.0).sqrt()
}

/// Is `U` within Hilbert-Schmidt distance 1/4 of the identity?
///
/// Inside this region each `f` application at least squares the distance
/// (up to the √8 factor), so convergence is doubly exponential.
pub fn in_shrinking_region<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<bool> {
    require_qubit(u)?;
    let d = hs_norm_dist(u.mat(), &CMat::identity(2))?;
    Ok(d <= sc(0.25))
}

/// Is `|b·d| ≤ 1/√128`, i.e. does a single `f` land `U` in the shrinking
/// region regardless of where `U` started?
pub fn in_jumping_region<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<bool> {
    let p = su2_decompose(u)?;
    Ok((p.b * p.d).abs() <= jump_threshold())
}

/// Conjugate `U` by a reflection about the given Bloch axis.
///
/// `R = r·σ` is Hermitian with `R² = 𝟙`, so the conjugation is `R U R` and
/// preserves both the distance to 𝟙 and the quaternion scalar `a`; only the
/// axis part `(b,c,d)` is rotated.
pub fn g_qubit_with_axis<T: Scalar>(
    u: &UnitaryMatrix<T>,
    axis: [T; 3],
) -> Result<(UnitaryMatrix<T>, UnitaryMatrix<T>)> {
    require_qubit(u)?;
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (n - T::one()).abs() > sc(1e-10) {
        return Err(Error::ParamRange {
            name: "axis norm",
            value: n.to_f64().unwrap_or(f64::NAN),
            range: "1 within 1e-10",
        });
    }
    let r = CMat::from_flat(
        2,
        vec![
            Complex::new(axis[2], T::zero()),
            Complex::new(axis[0], -axis[1]),
            Complex::new(axis[0], axis[1]),
            Complex::new(-axis[2], T::zero()),
        ],
    )?;
    let r = UnitaryMatrix::new(r)?;
    let w = UnitaryMatrix::new(r.mat().matmul(u.mat()).matmul(r.mat()))?;
    Ok((w, r))
}

/// Conjugate `U` by a uniformly random Bloch-axis reflection.
///
/// Returns `(R U R, R)`.
pub fn g_qubit<T: Scalar>(
    u: &UnitaryMatrix<T>,
    rng: &mut RngStream,
) -> Result<(UnitaryMatrix<T>, UnitaryMatrix<T>)> {
    let axis = random_unit_vector3(rng);
    g_qubit_with_axis(u, axis)
}

/// Monte-Carlo estimate of the probability that a uniformly random axis
/// reflection lands a worst-case qubit in the jumping region.
///
/// In axis coordinates the statistic is `|r1·r3| ≤ threshold`; the default
/// threshold is 1/√128. Returns `(estimate, 99%-CI half-width)`.
pub fn jump_probability_mc<T: Scalar>(samples: usize, rng: &mut RngStream) -> Result<(T, T)> {
    jump_probability_mc_threshold(samples, jump_threshold(), rng)
}

/// [`jump_probability_mc`] with an explicit threshold.
///
/// `threshold = 0` gives probability 0; any threshold ≥ 1/2 gives 1 because
/// `|r1·r3| ≤ (r1² + r3²)/2 ≤ 1/2` always.
pub fn jump_probability_mc_threshold<T: Scalar>(
    samples: usize,
    threshold: T,
    rng: &mut RngStream,
) -> Result<(T, T)> {
    if samples == 0 {
        return Err(Error::ParamRange {
            name: "samples",
            value: 0.0,
            range: "≥ 1",
        });
    }
    if threshold < T::zero() {
        return Err(Error::ParamRange {
            name: "threshold",
            value: threshold.to_f64().unwrap_or(f64::NAN),
            range: "≥ 0",
        });
    }
    let mut hits = 0usize;
    for _ in 0..samples {
        let v = random_unit_vector3::<T>(rng);
        if (v[0] * v[2]).abs() <= threshold {
            hits += 1;
        }
    }
    let n = T::from_usize(samples).unwrap();
    let p = T::from_usize(hits).unwrap() / n;
    // 99% normal-approximation interval.
    let z: T = sc(2.5758293035489004);
    let half = z * (p * (T::one() - p) / n).sqrt();
    Ok((p, half))
}

/// Rounds of `(g, f)` sufficient for the oblivious qubit protocol to reach
/// distance `ε` with failure probability at most `η`.
///
/// The smallest integer `k` with
/// `k ≥ log₂(1/η)/log₂(4/3) + log₂log₂(1/(√8·ε)) + 1`.
pub fn qubit_k<T: Scalar>(epsilon: T, eta: T) -> Result<u32> {
    if !(epsilon > T::zero() && epsilon < sc(0.25)) {
        return Err(Error::ParamRange {
            name: "epsilon",
            value: epsilon.to_f64().unwrap_or(f64::NAN),
            range: "(0, 0.25)",
        });
    }
    if !(eta > T::zero() && eta < T::one()) {
        return Err(Error::ParamRange {
            name: "eta",
            value: eta.to_f64().unwrap_or(f64::NAN),
            range: "(0, 1)",
        });
    }
    let eps = epsilon.to_f64().unwrap();
    let et = eta.to_f64().unwrap();
    let inner = (1.0 / (8.0f64.sqrt() * eps)).log2();
    let expr = (1.0 / et).log2() / (4.0f64 / 3.0).log2() + inner.log2() + 1.0;
    Ok(expr.ceil().max(1.0) as u32)
}

/// Upper bound on the total pulse count of the oblivious protocol:
/// `(16/η⁵)·log₂²(1/(√8·ε))`.
pub fn qubit_pulse_bound<T: Scalar>(epsilon: T, eta: T) -> Result<T> {
    let _ = qubit_k(epsilon, eta)?;
    let l = (T::one() / (sc::<T>(8.0).sqrt() * epsilon)).log2();
    Ok(sc::<T>(16.0) / eta.powi(5) * l * l)
}

/// Haar-random SU(2) element conditioned to lie in the shrinking region.
///
/// The scalar part has density proportional to `√(1−a²)` on `[15/16, 1]`
/// (the Haar marginal restricted to the cap); the axis part is uniform on
/// the sphere. Sampled by rejection against the flat envelope.
pub fn haar_in_shrinking_region<T: Scalar>(rng: &mut RngStream) -> Result<UnitaryMatrix<T>> {
    let lo: T = sc(15.0 / 16.0);
    let env = (T::one() - lo * lo).sqrt();
    let a = loop {
        let cand = T::one() - rng.next_uniform::<T>() / sc(16.0);
        let accept = (T::one() - cand * cand).max(T::zero()).sqrt() / env;
        if rng.next_uniform::<T>() < accept {
            break cand;
        }
    };
    let scale = (T::one() - a * a).max(T::zero()).sqrt();
    let dir = random_unit_vector3::<T>(rng);
    Su2Params {
        a,
        b: scale * dir[0],
        c: scale * dir[1],
        d: scale * dir[2],
    }
    .to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::op_norm_dist;

    fn ident() -> CMat<f64> {
        CMat::identity(2)
    }

    #[test]
    fn pauli_relations() {
        let x = pauli_x::<f64>();
        let y = pauli_y::<f64>();
        let z = pauli_z::<f64>();
        // X² = Y² = Z² = 𝟙, XY = iZ.
        assert!(x.mat().matmul(x.mat()).max_abs_diff(&ident()).unwrap() < 1e-15);
        assert!(y.mat().matmul(y.mat()).max_abs_diff(&ident()).unwrap() < 1e-15);
        assert!(z.mat().matmul(z.mat()).max_abs_diff(&ident()).unwrap() < 1e-15);
        let xy = x.mat().matmul(y.mat());
        let iz = z.mat().scale(Complex::new(0.0, 1.0));
        assert!(xy.max_abs_diff(&iz).unwrap() < 1e-15);
    }

    #[test]
    fn decompose_oracle_x_rotation() {
        // U = cos θ 𝟙 + i sin θ X.
        let th = 0.4f64;
        let m = CMat::from_flat(
            2,
            vec![
                Complex::new(th.cos(), 0.0),
                Complex::new(0.0, th.sin()),
                Complex::new(0.0, th.sin()),
                Complex::new(th.cos(), 0.0),
            ],
        )
        .unwrap();
        let p = su2_decompose(&UnitaryMatrix::new(m).unwrap()).unwrap();
        assert!((p.a - th.cos()).abs() < 1e-14);
        assert!((p.b - th.sin()).abs() < 1e-14);
        assert!(p.c.abs() < 1e-14);
        assert!(p.d.abs() < 1e-14);
    }

    #[test]
    fn decompose_rejects_global_phase() {
        let phi = 0.3f64;
        let m = ident().scale(Complex::from_polar(1.0, phi));
        let u = UnitaryMatrix::new(m).unwrap();
        match su2_decompose(&u) {
            Err(Error::NonUnitDeterminant { global_phase, .. }) => {
                assert!((global_phase - phi).abs() < 1e-10);
            }
            other => panic!("expected phase error, got {other:?}"),
        }
    }

    #[test]
    fn decompose_roundtrips_on_haar() {
        let mut rng = RngStream::new(101);
        for _ in 0..200 {
            let u = crate::haar::haar_unitary::<f64>(2, &mut rng).unwrap();
            let p = su2_decompose(&u).unwrap();
            let back = p.to_matrix().unwrap();
            assert!(back.mat().max_abs_diff(u.mat()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn hs_closed_form_matches_difference_matrix() {
        let mut rng = RngStream::new(102);
        for _ in 0..500 {
            let u = crate::haar::haar_unitary::<f64>(2, &mut rng).unwrap();
            let p = su2_decompose(&u).unwrap();
            let direct = hs_norm_dist(u.mat(), &ident()).unwrap();
            assert!((direct - p.hs_dist_to_identity()).abs() < 1e-7);
        }
    }

    #[test]
    fn f_contraction_formula_exact() {
        let mut rng = RngStream::new(103);
        for _ in 0..1000 {
            let u = crate::haar::haar_unitary::<f64>(2, &mut rng).unwrap();
            let p = su2_decompose(&u).unwrap();
            let fu = f_qubit(&u).unwrap();
            let measured = hs_norm_dist(fu.mat(), &ident()).unwrap();
            let predicted = epsilon_after_f(&p);
            assert!(
                (measured - predicted).abs() < 1e-12,
                "measured {measured} predicted {predicted}"
            );
        }
    }

    #[test]
    fn f_fixed_point() {
        // U* = (1−i)/2 · [[1, i], [−1, i]] satisfies f(U*) = U*.
        let s = Complex::new(0.5, -0.5);
        let m = CMat::from_flat(
            2,
            vec![
                s,
                s * Complex::new(0.0, 1.0),
                -s,
                s * Complex::new(0.0, 1.0),
            ],
        )
        .unwrap();
        let u = UnitaryMatrix::new(m).unwrap();
        let fu = f_qubit(&u).unwrap();
        assert!(hs_norm_dist(fu.mat(), u.mat()).unwrap() < 1e-10);
    }

    #[test]
    fn f_two_cycle() {
        let s = Complex::new(0.5, -0.5);
        let i = Complex::new(0.0, 1.0);
        let a = UnitaryMatrix::new(
            CMat::from_flat(2, vec![s * i, s * i, -s, s]).unwrap(),
        )
        .unwrap();
        let b = UnitaryMatrix::new(
            CMat::from_flat(2, vec![s, -s, s * i, s * i]).unwrap(),
        )
        .unwrap();
        let fa = f_qubit(&a).unwrap();
        let fb = f_qubit(&b).unwrap();
        assert!(hs_norm_dist(fa.mat(), b.mat()).unwrap() < 1e-10);
        assert!(hs_norm_dist(fb.mat(), a.mat()).unwrap() < 1e-10);
    }

    #[test]
    fn g_preserves_distance_and_scalar() {
        let mut rng = RngStream::new(104);
        for _ in 0..300 {
            let u = crate::haar::haar_unitary::<f64>(2, &mut rng).unwrap();
            let before = hs_norm_dist(u.mat(), &ident()).unwrap();
            let pa = su2_decompose(&u).unwrap();
            let (w, r) = g_qubit(&u, &mut rng).unwrap();
            let after = hs_norm_dist(w.mat(), &ident()).unwrap();
            let pw = su2_decompose(&w).unwrap();
            assert!((before - after).abs() < 1e-12);
            assert!((pa.a - pw.a).abs() < 1e-12);
            // R is Hermitian with det −1.
            assert!(r.mat().max_abs_diff(&r.mat().dagger()).unwrap() < 1e-12);
            assert!((r.mat().det() + Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn g_same_axis_is_involution() {
        let mut rng = RngStream::new(105);
        let u = crate::haar::haar_unitary::<f64>(2, &mut rng).unwrap();
        let axis = random_unit_vector3::<f64>(&mut rng);
        let (w, _) = g_qubit_with_axis(&u, axis).unwrap();
        let (back, _) = g_qubit_with_axis(&w, axis).unwrap();
        assert!(back.mat().max_abs_diff(u.mat()).unwrap() < 1e-12);
    }

    #[test]
    fn shrinking_implies_jumping() {
        let mut rng = RngStream::new(106);
        for _ in 0..500 {
            let u = haar_in_shrinking_region::<f64>(&mut rng).unwrap();
            assert!(in_shrinking_region(&u).unwrap());
            assert!(in_jumping_region(&u).unwrap());
        }
    }

    #[test]
    fn jumping_grid_lands_in_shrinking_after_f() {
        // Sweep quaternions on an (a, axis) grid; where |b·d| ≤ 1/√128, the
        // image under f must lie in the shrinking region.
        let n = 20;
        let mut checked = 0;
        for ia in 0..n {
            let theta = std::f64::consts::PI * (ia as f64 + 0.5) / n as f64;
            let (a, s) = (theta.cos(), theta.sin());
            for ib in 0..n {
                let phi = std::f64::consts::PI * (ib as f64 + 0.5) / n as f64;
                for ic in 0..n {
                    let psi = 2.0 * std::f64::consts::PI * ic as f64 / n as f64;
                    let b = s * phi.sin() * psi.cos();
                    let c = s * phi.sin() * psi.sin();
                    let d = s * phi.cos();
                    if (b * d).abs() > jump_threshold::<f64>() {
                        continue;
                    }
                    let u = Su2Params { a, b, c, d }.to_matrix().unwrap();
                    let fu = f_qubit(&u).unwrap();
                    assert!(in_shrinking_region(&fu).unwrap());
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000, "grid produced only {checked} jumping points");
    }

    #[test]
    fn jump_probability_thresholds() {
        let mut rng = RngStream::new(107);
        let (p0, _) = jump_probability_mc_threshold::<f64>(10_000, 0.0, &mut rng).unwrap();
        assert_eq!(p0, 0.0);
        let (p1, _) = jump_probability_mc_threshold::<f64>(10_000, 0.5, &mut rng).unwrap();
        assert_eq!(p1, 1.0);
    }

    /// Frozen quadrature value of P[|r1·r3| ≤ 1/√128] over the uniform
    /// sphere: 0.2710624604785646.
    #[test]
    fn jump_probability_matches_quadrature() {
        let mut rng = RngStream::new(108);
        let (p, ci) = jump_probability_mc::<f64>(100_000, &mut rng).unwrap();
        assert!(
            (p - 0.2710624604785646).abs() < 0.006,
            "estimate {p} ± {ci}"
        );
        assert!(ci < 0.005);
    }

    #[test]
    fn qubit_k_oracles() {
        assert_eq!(qubit_k(1e-6f64, 0.1).unwrap(), 14);
        assert_eq!(qubit_k(1e-4f64, 0.25).unwrap(), 10);
    }

    #[test]
    fn qubit_k_rejects_bad_params() {
        assert!(qubit_k(0.0f64, 0.1).is_err());
        assert!(qubit_k(0.25f64, 0.1).is_err());
        assert!(qubit_k(1e-4f64, 0.0).is_err());
        assert!(qubit_k(1e-4f64, 1.0).is_err());
    }

    #[test]
    fn pulse_bound_dominates_4_pow_k() {
        // At (1e-6, 0.1): k = 14 and 4^14 = 268435456 ≤ (16/η⁵)·log₂²(1/(√8ε)).
        let bound = qubit_pulse_bound(1e-6f64, 0.1).unwrap();
        assert!(4.0f64.powi(14) <= bound, "4^14 vs bound {bound}");
    }

    #[test]
    fn shrinking_sampler_marginal() {
        let mut rng = RngStream::new(109);
        for _ in 0..500 {
            let u = haar_in_shrinking_region::<f64>(&mut rng).unwrap();
            let p = su2_decompose(&u).unwrap();
            assert!(p.a >= 15.0 / 16.0 - 1e-12);
            assert!(hs_norm_dist(u.mat(), &ident()).unwrap() <= 0.25 + 1e-12);
        }
    }

    #[test]
    fn op_and_hs_agree_on_scale() {
        // Sanity link between the two metrics on a rotation.
        let th = 0.2f64;
        let m = CMat::from_flat(
            2,
            vec![
                Complex::from_polar(1.0, th),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::from_polar(1.0, -th),
            ],
        )
        .unwrap();
        let op = op_norm_dist(&m, &ident()).unwrap();
        let hs = hs_norm_dist(&m, &ident()).unwrap();
        // diag phases ±θ: op = 2 sin(θ/2), hs = √2 sin(θ/2)·√... = op/√2.
        assert!((op - 2.0 * (th / 2.0).sin()).abs() < 1e-13);
        assert!((hs - op / 2.0f64.sqrt()).abs() < 1e-13);
    }
}
