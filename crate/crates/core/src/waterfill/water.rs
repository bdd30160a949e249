use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Arithmetic the water-filling engine runs over.
///
/// Implemented for `f64` (the fast path) and `BigRational` (exact, for
/// validating the float path on small graphs).
pub trait Water: Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_count(n: u64) -> Self;
    fn as_f64(&self) -> f64;

    /// Strictly greater than zero. `Signed::is_positive` on floats only
    /// looks at the sign bit and accepts `0.0`.
    fn above_zero(&self) -> bool {
        *self > Self::zero()
    }
}

impl Water for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Water for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_u64(n).expect("integers are representable")
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

pub(crate) fn min_of<W: Water>(a: &W, b: &W) -> W {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}
