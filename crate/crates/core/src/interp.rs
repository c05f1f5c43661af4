//! Shape-preserving cubic Hermite interpolation.
//!
//! Node slopes come from five-point Lagrange differentiation (fourth order on
//! smooth data) and are then limited with Hyman's filter wherever the data
//! are monotone across the five-point stencil, so monotone stretches never
//! overshoot. Slopes next to local extrema of the data are left unlimited
//! to keep the interpolant accurate there.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    ds: Vec<T>,
    floor: Option<T>,
}

fn lagrange_slope<T: Real>(xs: &[T], ys: &[T], i: usize) -> T {
    let n = xs.len();
    let width = n.min(5);
    let start = i.saturating_sub(width / 2).min(n - width);
    let idx: Vec<usize> = (start..start + width).collect();
    let xi = xs[i];
    let mut slope = T::zero();
    for &j in &idx {
        let w = if j == i {
            idx.iter().filter(|&&k| k != i).map(|&k| (xi - xs[k]).recip()).sum::<T>()
        } else {
            let mut w = (xs[j] - xi).recip();
            for &k in &idx {
                if k != i && k != j {
                    w = w * (xi - xs[k]) / (xs[j] - xs[k]);
                }
            }
            w
        };
        slope = slope + w * ys[j];
    }
    slope
}

impl<T: Real> MonotoneCubic<T> {
    /// Builds the interpolant; `xs` must be strictly increasing and every
    /// value finite.
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::Parameter(format!(
                "interpolation needs matching non-empty abscissae and values (got {} and {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("interpolation abscissae must be strictly increasing".into()));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("interpolation data must be finite".into()));
        }
        let n = xs.len();
        let mut ds = vec![T::zero(); n];
        if n >= 2 {
            let secants: Vec<T> =
                (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
            let three = lit::<T>(3.0);
            for i in 0..n {
                let mut d = if n == 2 { secants[0] } else { lagrange_slope(&xs, &ys, i) };
                let left = if i > 0 { Some(secants[i - 1]) } else { None };
                let right = if i + 1 < n { Some(secants[i]) } else { None };
                // data turning within the five-point stencil: keep the
                // high-order slope so extrema are not flattened
                let lo = i.saturating_sub(2);
                let hi = (i + 2).min(n - 1);
                let turning = secants[lo..hi].windows(2).any(|w| w[0] * w[1] <= T::zero());
                let limit = match (left, right) {
                    _ if turning => None,
                    (Some(l), Some(r)) if l * r > T::zero() => Some((l.signum(), three * l.abs().min(r.abs()))),
                    (Some(_), Some(_)) => None,
                    (Some(s), None) | (None, Some(s)) => Some((s.signum(), three * s.abs())),
                    (None, None) => None,
                };
                if let Some((sign, bound)) = limit {
                    if d * sign < T::zero() || bound == T::zero() {
                        d = T::zero();
                    } else if d.abs() > bound {
                        d = sign * bound;
                    }
                }
                ds[i] = d;
            }
        }
        Ok(Self { xs, ys, ds, floor: None })
    }

    /// Clamps every evaluation from below at the smallest sampled value.
    pub fn with_sample_floor(mut self) -> Self {
        self.floor = self.ys.iter().copied().reduce(T::min);
        self
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    /// Evaluates the interpolant; outside the sampled range the end values
    /// are held constant.
    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        let v = if n == 1 || x <= self.xs[0] {
            self.ys[0]
        } else if x >= self.xs[n - 1] {
            self.ys[n - 1]
        } else {
            let i = self.xs.partition_point(|&xi| xi <= x) - 1;
            let h = self.xs[i + 1] - self.xs[i];
            let t = (x - self.xs[i]) / h;
            let t2 = t * t;
            let t3 = t2 * t;
            let two = lit::<T>(2.0);
            let three = lit::<T>(3.0);
            let h00 = two * t3 - three * t2 + T::one();
            let h10 = t3 - two * t2 + t;
            let h01 = three * t2 - two * t3;
            let h11 = t3 - t2;
            h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
        };
        match self.floor {
            Some(f) => v.max(f),
            None => v,
        }
    }
}
