//! Scalar abstraction shared by every grid and statistic in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Floating-point sample type of a grid: `f32` or `f64`.
///
/// Parsing and display go through `FromStr`/`Display`, so values written
/// with `{}` re-read bit-exactly.
pub trait Scalar:
    Float + FromPrimitive + FromStr + Display + Debug + Default + Sum + Send + Sync + 'static
{
    /// Lossless for counts below 2^24 (f32) / 2^53 (f64).
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
