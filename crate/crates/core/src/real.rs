//! Scalar abstraction: all core math is generic over the floating-point type.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::RngCore;

/// Floating-point scalar: f32 or f64.
///
/// The uniform draws below consume exactly one `u64` from the stream per
/// call, which keeps rng consumption replayable and type-independent.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Conversion from an f64 constant or parameter.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 value representable in scalar type")
    }

    /// Conversion from a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Uniform draw in (0, 1]; one `u64` consumed.
    fn unit_open<G: RngCore + ?Sized>(rng: &mut G) -> Self {
        Self::of(((rng.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0))
    }

    /// Uniform draw in [0, 1); one `u64` consumed.
    fn unit_half_open<G: RngCore + ?Sized>(rng: &mut G) -> Self {
        Self::of((rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
