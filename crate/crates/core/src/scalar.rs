//! Scalar abstraction shared by all real-valued decision code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the rankers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in tests (1e-12 and
/// friends) are only meaningful for `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion from a count.
    #[inline]
    fn count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sum with a fixed left-to-right association, so that identical inputs give
/// bit-identical results regardless of caller.
#[inline]
pub(crate) fn ordered_sum<T: Scalar, I: IntoIterator<Item = T>>(it: I) -> T {
    it.into_iter().fold(T::zero(), |acc, x| acc + x)
}
