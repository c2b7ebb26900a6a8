//! Random sampling: Haar unitaries, sphere directions, and controlled
//! near-identity ensembles used to exercise the contraction analysis.

use num_complex::Complex;

use crate::eig;
use crate::error::{Error, Result};
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

/// Haar-random element of SU(d).
///
/// A complex Ginibre matrix is QR-factorized, the triangular factor's
/// diagonal phases are absorbed into Q (making the distribution Haar on
/// U(d)), and the principal d-th root of the determinant is divided out.
/// The result's determinant then sits within 1e-10 of 1.
pub fn haar_unitary<T: Scalar>(d: usize, rng: &mut RngStream) -> Result<UnitaryMatrix<T>> {
    check_dim(d)?;
    let g = CMat::from_fn(d, |_, _| {
        Complex::new(rng.next_standard_normal(), rng.next_standard_normal())
    });
    let (q, r) = eig::householder_qr(&g);
    // Q <- Q · diag(phase(R_jj)) keeps QR's triangular diagonal real positive,
    // which removes the phase bias of raw Householder QR.
    let mut u = CMat::<T>::zeros(d);
    for c in 0..d {
        let rd = r.at(c, c);
        let n = rd.norm();
        let phase = if n.is_zero() {
            Complex::new(T::one(), T::zero())
        } else {
            rd / Complex::new(n, T::zero())
        };
        for row in 0..d {
            *u.at_mut(row, c) = q.at(row, c) * phase;
        }
    }
    // Divide out det^{1/d} (principal root) to land in SU(d).
    let det = u.det();
    let root = Complex::from_polar(T::one(), det.arg() / T::from_usize(d).unwrap());
    let su = u.scale(root.conj());
    UnitaryMatrix::new(su)
}

/// Uniform direction on the unit 2-sphere.
pub fn random_unit_vector3<T: Scalar>(rng: &mut RngStream) -> [T; 3] {
    loop {
        let v: [T; 3] = [
            rng.next_standard_normal(),
            rng.next_standard_normal(),
            rng.next_standard_normal(),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > sc(1e-6) {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Random element of SU(d) at an exactly controlled operator distance from 𝟙.
///
/// Draws a traceless GUE direction `H`, normalizes `‖H‖ = 1`, and returns
/// `exp(i t H)` with `t` chosen so the operator distance to the identity is
/// exactly `dist` (the distance is `2 sin(t/2)` when `t ≤ π`).
pub fn random_su_at_distance<T: Scalar>(
    d: usize,
    dist: T,
    rng: &mut RngStream,
) -> Result<UnitaryMatrix<T>> {
    check_dim(d)?;
    if dist < T::zero() || dist >= sc(2.0) {
        return Err(Error::ParamRange {
            name: "dist",
            value: dist.to_f64().unwrap_or(f64::NAN),
            range: "[0, 2)",
        });
    }
    let h = random_traceless_gue_unit(d, rng)?;
    let t = sc::<T>(2.0) * (dist * sc(0.5)).asin();
    eig::exp_i_hermitian(&h, t)
}

/// Random element of SU(d) with operator distance from 𝟙 uniformly drawn
/// from `[0, max_dist]` in the radial GUE-direction sense.
pub fn random_su_within<T: Scalar>(
    d: usize,
    max_dist: T,
    rng: &mut RngStream,
) -> Result<UnitaryMatrix<T>> {
    let u: T = rng.next_uniform();
    random_su_at_distance(d, max_dist * u, rng)
}

/// Traceless GUE matrix scaled to unit operator norm.
fn random_traceless_gue_unit<T: Scalar>(d: usize, rng: &mut RngStream) -> Result<CMat<T>> {
    loop {
        let raw = CMat::from_fn(d, |_, _| {
            Complex::new(rng.next_standard_normal(), rng.next_standard_normal())
        });
        let herm = raw.add(&raw.dagger())?.scale(Complex::new(sc(0.5), T::zero()));
        let tr = herm.trace().re / T::from_usize(d).unwrap();
        let mut h = herm;
        for j in 0..d {
            let v = h.at(j, j) - Complex::new(tr, T::zero());
            *h.at_mut(j, j) = Complex::new(v.re, T::zero());
        }
        let norm = eig::op_norm(&h)?;
        if norm > sc(1e-8) {
            return Ok(h.scale(Complex::new(T::one() / norm, T::zero())));
        }
    }
}

/// Random diagonal unitary with independent uniform phases.
pub fn random_diagonal_unitary<T: Scalar>(d: usize, rng: &mut RngStream) -> Result<UnitaryMatrix<T>> {
    check_dim(d)?;
    let mut m = CMat::<T>::zeros(d);
    for j in 0..d {
        let theta: T = rng.next_uniform::<T>() * sc(2.0) * T::PI();
        *m.at_mut(j, j) = Complex::from_polar(T::one(), theta);
    }
    UnitaryMatrix::new(m)
}
