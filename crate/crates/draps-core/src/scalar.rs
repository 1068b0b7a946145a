//! Scalar abstraction for the numeric core.
//!
//! All vector math (normalization, means, utilization ratios, the
//! exhaustive placement oracle) is generic over the floating-point type
//! so it runs identically on `f32` and `f64`. The simulator itself is
//! instantiated with `f64` via the [`crate::Resources`] alias.

use std::fmt::{Debug, Display};

/// Floating-point scalar usable by the vector and metrics math.
///
/// This is a blanket alias over the num-traits hierarchy: `Float` gives
/// arithmetic and comparisons, `FromPrimitive` lets us divide by sample
/// counts, and `NumCast` (implied by `Float`) converts to `f64` for
/// reporting.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + Default + 'static
{
}

impl<T> Scalar for T where
    T: num_traits::Float + num_traits::FromPrimitive + Debug + Display + Default + 'static
{
}
