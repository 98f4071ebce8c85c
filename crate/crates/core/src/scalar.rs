use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point scalar usable for probability weights (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + NumCast + Sum + Debug + Display + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits the scalar type")
    }

    /// Normalization tolerance: 1e-9, widened to the type's own precision.
    fn tol() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(64.0))
    }

    /// `-p log2 p` with the convention `0 log 0 = 0`.
    fn plogp(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            -self * self.log2()
        }
    }
}

impl<T> Real for T where T: Float + FromPrimitive + NumCast + Sum + Debug + Display + Send + Sync + 'static {}

/// Binary entropy in bits.
pub fn h2<T: Real>(p: T) -> T {
    p.plogp() + (T::one() - p).plogp()
}

/// Binary convolution `a(1-b) + (1-a)b`.
pub fn bconv<T: Real>(a: T, b: T) -> T {
    a * (T::one() - b) + (T::one() - a) * b
}
