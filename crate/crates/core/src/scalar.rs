//! Scalar abstraction and shared tolerances.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the whole crate is generic over.
///
/// `f32` and `f64` both implement it; everything downstream (matrices,
/// protocols, compilation) is written against this bound so a build can pick
/// its precision once.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` literal into the working scalar.
///
/// Intended for constants; panics only if the target type cannot represent
/// ordinary finite values, which no `Scalar` implementor does.
#[inline]
pub fn sc<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("finite constant must convert")
}

/// Central numeric tolerances.
///
/// Defaults are 1e-12 absolute, clamped from below by a small multiple of the
/// scalar's machine epsilon so the same code remains usable at `f32`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances<T> {
    /// General-purpose absolute comparison tolerance.
    pub default_abs: T,
    /// Per-entry unitarity deviation allowed at construction, scaled by the
    /// dimension at the point of use.
    pub unitarity: T,
    /// Allowed deviation of |det - 1| for special-unitary checks.
    pub det_one: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        let floor = T::epsilon() * sc(32.0);
        Tolerances {
            default_abs: sc::<T>(1e-12).max(floor),
            unitarity: sc::<T>(1e-12).max(floor),
            det_one: sc::<T>(1e-10).max(floor),
        }
    }
}
