//! Dense complex matrices and the two distances used throughout.
//!
//! Everything here targets small dimensions (2 through 8): storage is a plain
//! row-major `Vec`, products are cubic, and determinants use partial-pivot LU.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::eig;
use crate::error::{Error, Result};
use crate::scalar::{sc, Scalar, Tolerances};

/// Largest dimension the crate supports.
pub const MAX_DIM: usize = 8;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMat<T> {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m.data[j * dim + j] = Complex::one();
        }
        m
    }

    /// Build from a function of the (row, column) index.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        CMat { dim, data }
    }

    /// Build from a flat row-major entry list. Errors unless the length is a
    /// perfect square matching a supported dimension.
    pub fn from_flat(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimMismatch(dim * dim, data.len()));
        }
        Ok(CMat { dim, data })
    }

    /// Matrix dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry accessor.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim + c]
    }

    /// Mutable entry accessor.
    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Complex<T> {
        &mut self.data[r * self.dim + c]
    }

    /// Flat row-major view of the entries.
    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    /// All entries finite?
    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMat<T> {
        CMat::from_fn(self.dim, |r, c| self.at(c, r).conj())
    }

    /// Matrix product; errors on a dimension mismatch.
    pub fn mul(&self, rhs: &CMat<T>) -> Result<CMat<T>> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch(self.dim, rhs.dim));
        }
        Ok(self.matmul(rhs))
    }

    /// Matrix product with dimensions already known to agree.
    #[inline]
    pub(crate) fn matmul(&self, rhs: &CMat<T>) -> CMat<T> {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let t = a * rhs.data[k * n + c];
                    out.data[r * n + c] += t;
                }
            }
        }
        out
    }

    /// Entrywise difference; errors on a dimension mismatch.
    pub fn sub(&self, rhs: &CMat<T>) -> Result<CMat<T>> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch(self.dim, rhs.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CMat {
            dim: self.dim,
            data,
        })
    }

    /// Entrywise sum; errors on a dimension mismatch.
    pub fn add(&self, rhs: &CMat<T>) -> Result<CMat<T>> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch(self.dim, rhs.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CMat {
            dim: self.dim,
            data,
        })
    }

    /// Multiply every entry by a complex scalar.
    pub fn scale(&self, s: Complex<T>) -> CMat<T> {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Trace.
    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::zero();
        for j in 0..self.dim {
            t += self.data[j * self.dim + j];
        }
        t
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, z| m.max(z.norm_sqr()))
            .sqrt()
    }

    /// Largest entrywise difference magnitude against another matrix.
    pub fn max_abs_diff(&self, rhs: &CMat<T>) -> Result<T> {
        Ok(self.sub(rhs)?.max_abs())
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    /// Determinant by partial-pivot LU.
    pub fn det(&self) -> Complex<T> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = Complex::one();
        for col in 0..n {
            let mut p = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in (col + 1)..n {
                let v = a[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best.is_zero() {
                return Complex::zero();
            }
            if p != col {
                for c in 0..n {
                    a.swap(col * n + c, p * n + c);
                }
                det = -det;
            }
            let piv = a[col * n + col];
            det = det * piv;
            for r in (col + 1)..n {
                let f = a[r * n + col] / piv;
                for c in (col + 1)..n {
                    let t = a[col * n + c] * f;
                    a[r * n + c] -= t;
                }
            }
        }
        det
    }

    /// Max deviation of `M†M` from the identity, entrywise.
    pub fn unitarity_deviation(&self) -> T {
        let gram = self.dagger().matmul(self);
        let mut dev = T::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut z = gram.at(r, c);
                if r == c {
                    z -= Complex::one();
                }
                dev = dev.max(z.norm_sqr());
            }
        }
        dev.sqrt()
    }
}

/// Unitary matrix: a [`CMat`] whose construction verified `U†U ≈ 𝟙`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix<T> {
    mat: CMat<T>,
}

impl<T: Scalar> UnitaryMatrix<T> {
    /// Validate and wrap a matrix, using default tolerances.
    ///
    /// The allowed per-entry deviation of `U†U` from 𝟙 scales linearly with
    /// the dimension.
    pub fn new(mat: CMat<T>) -> Result<Self> {
        Self::new_with(mat, &Tolerances::default())
    }

    /// Validate and wrap a matrix with explicit tolerances.
    pub fn new_with(mat: CMat<T>, tol: &Tolerances<T>) -> Result<Self> {
        if mat.dim() < 1 || mat.dim() > MAX_DIM {
            return Err(Error::DimUnsupported {
                got: mat.dim(),
                expected: "1 through 8",
            });
        }
        if !mat.is_finite() {
            return Err(Error::NotFinite);
        }
        let dev = mat.unitarity_deviation();
        let allowed = tol.unitarity * T::from_usize(mat.dim()).unwrap();
        if dev > allowed {
            return Err(Error::NotUnitary {
                dev: dev.to_f64().unwrap_or(f64::NAN),
                tol: allowed.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(UnitaryMatrix { mat })
    }

    /// Wrap without re-checking.
    ///
    /// For internal hot paths where the result is a short product of already
    /// verified unitaries; the accumulated drift there stays orders of
    /// magnitude below the construction tolerance.
    #[inline]
    pub fn assume_unitary(mat: CMat<T>) -> Self {
        UnitaryMatrix { mat }
    }

    /// Identity of the given dimension.
    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix {
            mat: CMat::identity(dim),
        }
    }

    /// Underlying matrix.
    #[inline]
    pub fn mat(&self) -> &CMat<T> {
        &self.mat
    }

    /// Matrix dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Entry accessor.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex<T> {
        self.mat.at(r, c)
    }

    /// Conjugate transpose (again unitary, no recheck needed).
    pub fn dagger(&self) -> UnitaryMatrix<T> {
        UnitaryMatrix {
            mat: self.mat.dagger(),
        }
    }

    /// Checked product: dimensions must agree and the result must itself pass
    /// the unitarity check.
    pub fn multiply(&self, rhs: &UnitaryMatrix<T>) -> Result<UnitaryMatrix<T>> {
        let prod = self.mat.mul(&rhs.mat)?;
        UnitaryMatrix::new(prod)
    }

    /// Max deviation of `U†U` from 𝟙; stays small under repeated products.
    pub fn unitarity_deviation(&self) -> T {
        self.mat.unitarity_deviation()
    }
}

/// Hilbert-Schmidt distance `½·√tr((A−B)†(A−B))`, the natural metric for the
/// one-qubit analysis. Defined for dimension 2 only; errors otherwise.
///
/// Computed from the entrywise difference, so its floor is set by entry
/// roundoff (~1e-15) rather than by cancellation in any closed form.
pub fn hs_norm_dist<T: Scalar>(a: &CMat<T>, b: &CMat<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    if a.dim() != 2 {
        return Err(Error::DimUnsupported {
            got: a.dim(),
            expected: "2",
        });
    }
    Ok(a.sub(b)?.fro_norm() * sc(0.5))
}

/// Operator-norm distance `‖A−B‖`, the metric for general dimension.
///
/// Computed by a full Hermitian eigendecomposition of `(A−B)†(A−B)`; the
/// distance is the square root of its largest eigenvalue.
pub fn op_norm_dist<T: Scalar>(a: &CMat<T>, b: &CMat<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let d = a.sub(b)?;
    let gram = d.dagger().matmul(&d);
    let (vals, _) = eig::hermitian_eig(&gram)?;
    let top = vals.last().copied().unwrap_or_else(T::zero);
    Ok(top.max(T::zero()).sqrt())
}
