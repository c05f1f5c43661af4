//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in the target scalar")
}

#[inline]
pub(crate) fn from_usize<T: Real>(k: usize) -> T {
    T::from_usize(k).expect("usize representable in the target scalar")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Chebyshev-Lobatto points mapped onto `[lo, hi]`, in increasing order.
///
/// Grids of `2^k + 1` points are nested: every point of the `N + 1` grid
/// appears bitwise in the `2N + 1` grid.
pub fn chebyshev_lobatto<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![(lo + hi) / lit(2.0)];
    }
    let mid = (lo + hi) / lit(2.0);
    let half = (hi - lo) / lit(2.0);
    let last = count - 1;
    (0..count)
        .map(|k| {
            // k = 0 maps to lo
            let angle = T::PI() * from_usize::<T>(last - k) / from_usize::<T>(last);
            if k == 0 {
                lo
            } else if k == last {
                hi
            } else {
                mid + half * angle.cos()
            }
        })
        .collect()
}

/// Pairwise-free compensated summation in a fixed order.
pub(crate) fn kahan_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}
