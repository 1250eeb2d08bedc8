//! Scalar abstraction for the whole crate.
//!
//! Everything numerical is generic over [`Real`] so the solver stack can be
//! instantiated with `f32` or `f64` (the crate root exports `f64` aliases,
//! which is what the CLI uses). The trait is deliberately small: floating
//! point semantics from `num_traits::Float`, conversions, and a literal
//! helper for writing constants in generic code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the solver stack.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    ///
    /// Panics only if the conversion is unrepresentable, which cannot happen
    /// for finite literals with the provided impls (`f32` saturates through
    /// `from_f64`'s rounding, which is acceptable for literals).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in this scalar type")
    }

    /// Converts `Self` to `f64` (used at reporting boundaries).
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {}
impl Real for f32 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert_eq!(1.5f64.to_f64_lossy(), 1.5);
    }

    fn generic_sum<R: Real>() -> R {
        [R::lit(0.5), R::lit(1.25)].into_iter().sum()
    }

    #[test]
    fn generic_code_compiles_for_both_widths() {
        assert_eq!(generic_sum::<f64>(), 1.75);
        assert_eq!(generic_sum::<f32>(), 1.75f32);
    }
}
