//! Dense eigensolvers for the small matrices this crate works with.
//!
//! A cyclic complex Jacobi iteration handles Hermitian matrices; unitary
//! matrices are diagonalized through a Hermitian pencil built from their real
//! and imaginary parts. Both are exact-arithmetic-free but converge to machine
//! precision in a handful of sweeps at dimensions up to 8.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mat::{CMat, UnitaryMatrix};
use crate::scalar::{sc, Scalar};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns `(values, vectors)` with eigenvalues ascending and the matching
/// eigenvectors as the columns of a unitary matrix. The input is read as its
/// Hermitian part; anti-Hermitian drift of roundoff size is tolerated.
pub fn hermitian_eig<T: Scalar>(h: &CMat<T>) -> Result<(Vec<T>, CMat<T>)> {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = CMat::<T>::identity(n);
    if n <= 1 {
        let vals = (0..n).map(|j| a.at(j, j).re).collect();
        return Ok((vals, v));
    }

    let scale = a.fro_norm();
    if scale.is_zero() {
        return Ok((vec![T::zero(); n], v));
    }
    let stop = scale * T::epsilon() * sc(4.0);

    for _sweep in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.at(p, q).norm_sqr());
            }
        }
        if off.sqrt() <= stop {
            let mut idx: Vec<usize> = (0..n).collect();
            let vals: Vec<T> = (0..n).map(|j| a.at(j, j).re).collect();
            idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite eigenvalues"));
            let sorted_vals = idx.iter().map(|&i| vals[i]).collect();
            let sorted_vecs = CMat::from_fn(n, |r, c| v.at(r, idx[c]));
            return Ok((sorted_vals, sorted_vecs));
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let b = a.at(p, q);
                let babs = b.norm();
                if babs <= stop * sc(1e-3) {
                    continue;
                }
                // Phase factor turning the pivot block real symmetric, then a
                // classic real Jacobi rotation on it.
                let phase_conj = b.conj() / Complex::new(babs, T::zero());
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                let tau = (aqq - app) / (babs * sc(2.0));
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                let g00 = Complex::new(c, T::zero());
                let g01 = Complex::new(s, T::zero());
                let g10 = -phase_conj * s;
                let g11 = phase_conj * c;

                // A <- G† A G on rows/columns p, q.
                for j in 0..n {
                    let arp = a.at(p, j);
                    let arq = a.at(q, j);
                    *a.at_mut(p, j) = g00.conj() * arp + g10.conj() * arq;
                    *a.at_mut(q, j) = g01.conj() * arp + g11.conj() * arq;
                }
                for i in 0..n {
                    let acp = a.at(i, p);
                    let acq = a.at(i, q);
                    *a.at_mut(i, p) = acp * g00 + acq * g10;
                    *a.at_mut(i, q) = acp * g01 + acq * g11;
                }
                for i in 0..n {
                    let vcp = v.at(i, p);
                    let vcq = v.at(i, q);
                    *v.at_mut(i, p) = vcp * g00 + vcq * g10;
                    *v.at_mut(i, q) = vcp * g01 + vcq * g11;
                }
            }
        }
    }
    Err(Error::EigFailure)
}

/// Operator norm (largest singular value).
pub fn op_norm<T: Scalar>(a: &CMat<T>) -> Result<T> {
    let gram = a.dagger().mul(a)?;
    let (vals, _) = hermitian_eig(&gram)?;
    let top = vals.last().copied().unwrap_or_else(T::zero);
    Ok(top.max(T::zero()).sqrt())
}

/// Householder QR factorization `A = Q R` with `Q` unitary and `R` upper
/// triangular.
pub fn householder_qr<T: Scalar>(a: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let n = a.dim();
    let mut r = a.clone();
    let mut q = CMat::<T>::identity(n);

    for k in 0..n {
        // Build the reflector v for column k below the diagonal.
        let mut norm_sq = T::zero();
        for i in k..n {
            norm_sq = norm_sq + r.at(i, k).norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm.is_zero() {
            continue;
        }
        let x0 = r.at(k, k);
        let phase = if x0.norm().is_zero() {
            Complex::one()
        } else {
            x0 / Complex::new(x0.norm(), T::zero())
        };
        let alpha = -phase * norm;

        let mut v: Vec<Complex<T>> = (k..n).map(|i| r.at(i, k)).collect();
        v[0] -= alpha;
        let vnorm = v
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt();
        if vnorm <= norm * T::epsilon() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / Complex::new(vnorm, T::zero());
        }

        // R <- (I - 2vv†) R on the trailing block.
        for col in k..n {
            let mut dot = Complex::<T>::zero();
            for i in k..n {
                dot += v[i - k].conj() * r.at(i, col);
            }
            let dot2 = dot * sc::<T>(2.0);
            for i in k..n {
                let upd = v[i - k] * dot2;
                *r.at_mut(i, col) -= upd;
            }
        }
        // Q <- Q (I - 2vv†).
        for row in 0..n {
            let mut dot = Complex::<T>::zero();
            for i in k..n {
                dot += q.at(row, i) * v[i - k];
            }
            let dot2 = dot * sc::<T>(2.0);
            for i in k..n {
                let upd = dot2 * v[i - k].conj();
                *q.at_mut(row, i) -= upd;
            }
        }
    }
    (q, r)
}

/// Pencil coefficients tried in turn when diagonalizing a unitary; distinct
/// irrational values so eigenvalue collisions in the combined Hermitian
/// matrix cannot persist across retries.
const PENCIL_GAMMAS: [f64; 3] = [0.739_085_133_215_160_7, 0.414_213_562_373_095_1, 1.259_921_049_894_873_2];

/// Eigendecomposition of a unitary matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with unit-modulus eigenvalues sorted
/// by principal argument and eigenvectors as matching columns. Works through
/// the Hermitian pencil `(U+U†)/2 + γ(U−U†)/(2i)`, retrying a different γ if
/// a degeneracy in the pencil spoils the first attempt.
pub fn unitary_eig<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<(Vec<Complex<T>>, CMat<T>)> {
    let n = u.dim();
    let m = u.mat();
    let md = m.dagger();
    let half = Complex::new(sc::<T>(0.5), T::zero());
    let neg_half_i = Complex::new(T::zero(), sc::<T>(-0.5));
    let h1 = m.add(&md)?.scale(half);
    let h2 = m.sub(&md)?.scale(neg_half_i);

    let tol = sc::<T>(1e-8) * T::from_usize(n).unwrap();
    for gamma in PENCIL_GAMMAS {
        let pencil = h1.add(&h2.scale(Complex::new(sc(gamma), T::zero())))?;
        let (_, vecs) = hermitian_eig(&pencil)?;
        // Rayleigh quotients recover the unitary's eigenvalues; residuals
        // certify that the pencil actually split the eigenspaces.
        let mut lambdas = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let col: Vec<Complex<T>> = (0..n).map(|i| vecs.at(i, j)).collect();
            let mut uv = vec![Complex::<T>::zero(); n];
            for r in 0..n {
                for k in 0..n {
                    uv[r] += m.at(r, k) * col[k];
                }
            }
            let mut lam = Complex::<T>::zero();
            for r in 0..n {
                lam += col[r].conj() * uv[r];
            }
            let mut resid = T::zero();
            for r in 0..n {
                resid = resid.max((uv[r] - lam * col[r]).norm_sqr());
            }
            if resid.sqrt() > tol {
                ok = false;
                break;
            }
            lambdas.push(lam);
        }
        if !ok {
            continue;
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| {
            let ai = lambdas[i].arg();
            let aj = lambdas[j].arg();
            ai.partial_cmp(&aj).expect("finite eigenphases")
        });
        let vals = idx.iter().map(|&i| lambdas[i]).collect();
        let sorted_vecs = CMat::from_fn(n, |r, c| vecs.at(r, idx[c]));
        return Ok((vals, sorted_vecs));
    }
    Err(Error::EigFailure)
}

/// Norm of the principal logarithm of a unitary: `max_j |arg λ_j|`.
pub fn principal_log_norm<T: Scalar>(u: &UnitaryMatrix<T>) -> Result<T> {
    let (vals, _) = unitary_eig(u)?;
    Ok(vals
        .iter()
        .fold(T::zero(), |m, lam| m.max(lam.arg().abs())))
}

/// `exp(i t H)` for Hermitian `H`, through its eigendecomposition.
pub fn exp_i_hermitian<T: Scalar>(h: &CMat<T>, t: T) -> Result<UnitaryMatrix<T>> {
    let n = h.dim();
    let (vals, vecs) = hermitian_eig(h)?;
    let mut out = CMat::<T>::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let mut z = Complex::<T>::zero();
            for j in 0..n {
                let phase = Complex::from_polar(T::one(), t * vals[j]);
                z += vecs.at(r, j) * phase * vecs.at(c, j).conj();
            }
            *out.at_mut(r, c) = z;
        }
    }
    UnitaryMatrix::new(out)
}
