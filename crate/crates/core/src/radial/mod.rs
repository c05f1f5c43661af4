//! Radial functions on `R^n`: profiles, `L_p` norms, the radial Laplacian,
//! the multipliers `V` and `W`, and a radial Poisson solver.

mod catalog;
mod norm;
mod ops;
mod poisson;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::scalar::{lit, Real};
use crate::spectral::Spectrum;

pub use catalog::{
    ball_indicator, extremal_family, gaussian, gaussian_lp_norm, gaussian_mixture, power_truncated, smoothstep5,
    ProfileSpec,
};
pub use norm::{lp_norm, ORIGIN_CUTOFF};
pub use ops::{apply_v, apply_w, radial_laplacian};
pub use poisson::radial_poisson_solve;

/// A real function of the radius.
pub type RadialFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Large-`r` behaviour of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum TailClass<T> {
    /// Bounded by `C exp(-rate r^2)`.
    Gaussian { rate: T },
    /// `|f(r)| ~ C r^{-exponent}`.
    Power { exponent: T },
    /// `f(r) = 0` for `r > radius`.
    Compact { radius: T },
}

impl<T: Real> TailClass<T> {
    /// Tail of `r^{-shift} f`.
    pub fn shifted(self, shift: T) -> Self {
        match self {
            TailClass::Power { exponent } => TailClass::Power { exponent: exponent + shift },
            other => other,
        }
    }

    /// Tail of a sum of two profiles.
    pub fn combine(self, other: Self) -> Self {
        use TailClass::*;
        match (self, other) {
            (Power { exponent: a }, Power { exponent: b }) => Power { exponent: a.min(b) },
            (Power { exponent }, _) | (_, Power { exponent }) => Power { exponent },
            (Gaussian { rate: a }, Gaussian { rate: b }) => Gaussian { rate: a.min(b) },
            (Gaussian { rate }, Compact { .. }) | (Compact { .. }, Gaussian { rate }) => Gaussian { rate },
            (Compact { radius: a }, Compact { radius: b }) => Compact { radius: a.max(b) },
        }
    }
}

/// A radial profile `r -> f(r)` on `(0, inf)` in dimension `n`.
#[derive(Clone)]
pub struct RadialProfile<T> {
    n: usize,
    value: RadialFn<T>,
    d1: Option<RadialFn<T>>,
    d2: Option<RadialFn<T>>,
    origin_exponent: T,
    tail: TailClass<T>,
    breakpoints: Vec<T>,
    finite_differences: bool,
    spectrum: Option<Arc<Spectrum<T>>>,
    label: String,
}

impl<T: Real> fmt::Debug for RadialProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("origin_exponent", &self.origin_exponent)
            .field("tail", &self.tail)
            .field("analytic_derivatives", &self.has_derivatives())
            .finish()
    }
}

impl<T: Real> RadialProfile<T> {
    /// A profile with declared origin exponent and tail class; the
    /// declaration is checked against the values at a few probe radii.
    pub fn new<F>(n: usize, value: F, origin_exponent: T, tail: TailClass<T>) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let p = Self::raw(n, Arc::new(value), origin_exponent, tail)?;
        p.check_metadata()?;
        Ok(p)
    }

    pub(crate) fn raw(n: usize, value: RadialFn<T>, origin_exponent: T, tail: TailClass<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension n = {n} must be >= 2")));
        }
        if !origin_exponent.is_finite() {
            return Err(Error::Parameter("origin exponent must be finite".into()));
        }
        match tail {
            TailClass::Gaussian { rate } if !(rate > T::zero()) => {
                return Err(Error::Parameter(format!("gaussian tail rate {rate} must be > 0")))
            }
            TailClass::Compact { radius } if !(radius > T::zero()) => {
                return Err(Error::Parameter(format!("support radius {radius} must be > 0")))
            }
            TailClass::Power { exponent } if !exponent.is_finite() => {
                return Err(Error::Parameter("tail exponent must be finite".into()))
            }
            _ => {}
        }
        Ok(Self {
            n,
            value,
            d1: None,
            d2: None,
            origin_exponent,
            tail,
            breakpoints: Vec::new(),
            finite_differences: false,
            spectrum: None,
            label: String::from("custom"),
        })
    }

    /// Attaches analytic first and second radial derivatives.
    pub fn with_derivatives<D1, D2>(mut self, d1: D1, d2: D2) -> Self
    where
        D1: Fn(T) -> T + Send + Sync + 'static,
        D2: Fn(T) -> T + Send + Sync + 'static,
    {
        self.d1 = Some(Arc::new(d1));
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub(crate) fn with_derivative_fns(mut self, d1: Option<RadialFn<T>>, d2: Option<RadialFn<T>>) -> Self {
        self.d1 = d1;
        self.d2 = d2;
        self
    }

    /// Radii where the profile or its derivatives may be non-smooth.
    pub fn with_breakpoints(mut self, mut points: Vec<T>) -> Self {
        points.retain(|r| *r > T::zero() && r.is_finite());
        points.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        points.dedup();
        self.breakpoints = points;
        self
    }

    /// Allows derivatives by finite differences when none are attached.
    pub fn with_finite_differences(mut self, allowed: bool) -> Self {
        self.finite_differences = allowed;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn with_spectrum(mut self, spectrum: Option<Arc<Spectrum<T>>>) -> Self {
        self.spectrum = spectrum;
        self
    }

    /// Profile interpolated from samples `(r_k, f(r_k))` with shape-preserving
    /// cubics in `ln r`. Below the first radius the profile continues as
    /// `f(r_0) (r/r_0)^{origin_exponent}`; above the last one it is zero for
    /// gaussian or compact tails and continues as a power law otherwise.
    pub fn from_samples(
        n: usize,
        radii: Vec<T>,
        values: Vec<T>,
        origin_exponent: T,
        tail: TailClass<T>,
    ) -> Result<Self> {
        if radii.len() < 2 || radii[0] <= T::zero() {
            return Err(Error::Parameter("sampled profiles need at least two positive radii".into()));
        }
        let logs: Vec<T> = radii.iter().map(|r| r.ln()).collect();
        let table = MonotoneCubic::new(logs, values.clone())?;
        let (r0, f0) = (radii[0], values[0]);
        let (r1, f1) = (*radii.last().unwrap(), *values.last().unwrap());
        let value = move |r: T| -> T {
            if r < r0 {
                if origin_exponent == T::zero() {
                    f0
                } else {
                    f0 * (r / r0).powf(origin_exponent)
                }
            } else if r > r1 {
                match tail {
                    TailClass::Power { exponent } => f1 * (r / r1).powf(-exponent),
                    _ => T::zero(),
                }
            } else {
                table.eval(r.ln())
            }
        };
        Ok(Self::raw(n, Arc::new(value), origin_exponent, tail)?
            .with_breakpoints(radii)
            .with_finite_differences(true)
            .with_label("sampled"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin_exponent(&self) -> T {
        self.origin_exponent
    }

    pub fn tail(&self) -> TailClass<T> {
        self.tail
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_derivatives(&self) -> bool {
        self.d1.is_some() && self.d2.is_some()
    }

    pub fn allows_finite_differences(&self) -> bool {
        self.finite_differences
    }

    pub fn spectrum(&self) -> Option<&Arc<Spectrum<T>>> {
        self.spectrum.as_ref()
    }

    pub(crate) fn value_fn(&self) -> &RadialFn<T> {
        &self.value
    }

    pub fn eval(&self, r: T) -> T {
        (self.value)(r)
    }

    /// First radial derivative, analytic when attached.
    pub fn derivative1(&self, r: T) -> Result<T> {
        match &self.d1 {
            Some(d) => Ok(d(r)),
            None if self.finite_differences => Ok(ops::fd_derivatives(&self.value, r).0),
            None => Err(self.smoothness_error()),
        }
    }

    /// Second radial derivative, analytic when attached.
    pub fn derivative2(&self, r: T) -> Result<T> {
        match &self.d2 {
            Some(d) => Ok(d(r)),
            None if self.finite_differences => Ok(ops::fd_derivatives(&self.value, r).1),
            None => Err(self.smoothness_error()),
        }
    }

    fn smoothness_error(&self) -> Error {
        Error::Smoothness(format!(
            "profile `{}` has no analytic derivatives and finite differences are not enabled",
            self.label
        ))
    }

    /// Largest radius where the profile changes character (support edge,
    /// last breakpoint), at least 1.
    pub fn outer_scale(&self) -> T {
        let mut s = T::one();
        if let Some(&b) = self.breakpoints.last() {
            s = s.max(b);
        }
        if let TailClass::Compact { radius } = self.tail {
            s = s.max(radius);
        }
        s
    }

    /// `c f`.
    pub fn scaled(&self, c: T) -> Self {
        let v = Arc::clone(&self.value);
        let d1 = self.d1.clone().map(|d| Arc::new(move |r: T| c * d(r)) as RadialFn<T>);
        let d2 = self.d2.clone().map(|d| Arc::new(move |r: T| c * d(r)) as RadialFn<T>);
        let spectrum = self.spectrum.as_ref().map(|s| Arc::new(s.scaled(c)));
        Self {
            value: Arc::new(move |r: T| c * v(r)),
            d1,
            d2,
            spectrum,
            label: format!("{c}*{}", self.label),
            ..self.clone()
        }
    }

    /// `f + g` in the same dimension.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Parameter(format!(
                "cannot add profiles in dimensions {} and {}",
                self.n, other.n
            )));
        }
        let (f, g) = (Arc::clone(&self.value), Arc::clone(&other.value));
        let pair = |a: &Option<RadialFn<T>>, b: &Option<RadialFn<T>>| -> Option<RadialFn<T>> {
            match (a, b) {
                (Some(a), Some(b)) => {
                    let (a, b) = (Arc::clone(a), Arc::clone(b));
                    Some(Arc::new(move |r: T| a(r) + b(r)))
                }
                _ => None,
            }
        };
        let mut bps = self.breakpoints.clone();
        bps.extend_from_slice(&other.breakpoints);
        Ok(Self {
            n: self.n,
            value: Arc::new(move |r: T| f(r) + g(r)),
            d1: pair(&self.d1, &other.d1),
            d2: pair(&self.d2, &other.d2),
            origin_exponent: self.origin_exponent.min(other.origin_exponent),
            tail: self.tail.combine(other.tail),
            breakpoints: Vec::new(),
            finite_differences: self.finite_differences && other.finite_differences,
            spectrum: None,
            label: format!("{}+{}", self.label, other.label),
        }
        .with_breakpoints(bps))
    }

    /// Checks the declared origin exponent and tail class against the
    /// profile at probe radii, to within a factor of two.
    pub fn check_metadata(&self) -> Result<()> {
        let two: T = lit(2.0);
        let within = |ratio: T, expected: T| {
            let q = ratio / expected;
            q >= T::one() / two && q <= two
        };
        let r_a = lit::<T>(1e-9).min(self.breakpoints.first().copied().unwrap_or(T::one()) * lit(1e-3));
        let (fa, fb) = (self.eval(r_a).abs(), self.eval(r_a * two).abs());
        if !fa.is_finite() || !fb.is_finite() {
            return Err(Error::Parameter(format!(
                "profile `{}` is not finite near the origin (r = {r_a})",
                self.label
            )));
        }
        if fa > T::zero() && fb > T::zero() && !within(fb / fa, two.powf(self.origin_exponent)) {
            return Err(Error::Parameter(format!(
                "profile `{}` does not behave like r^{} near the origin (f(2r)/f(r) = {} at r = {r_a})",
                self.label,
                self.origin_exponent,
                fb / fa
            )));
        }
        let big = self.outer_scale() * lit(1e6);
        match self.tail {
            TailClass::Power { exponent } => {
                let (fa, fb) = (self.eval(big).abs(), self.eval(big * two).abs());
                if fa > T::zero() && fb > T::zero() && !within(fb / fa, two.powf(-exponent)) {
                    return Err(Error::Parameter(format!(
                        "profile `{}` does not decay like r^-{exponent} (f(2r)/f(r) = {} at r = {big})",
                        self.label,
                        fb / fa
                    )));
                }
            }
            TailClass::Compact { radius } => {
                for k in [1.5, 3.0] {
                    let r = radius * lit(k);
                    if self.eval(r) != T::zero() {
                        return Err(Error::Parameter(format!(
                            "profile `{}` is nonzero at r = {r}, outside its declared support radius {radius}",
                            self.label
                        )));
                    }
                }
            }
            TailClass::Gaussian { .. } => {
                let v = self.eval(big);
                if !v.is_finite() || v.abs() > fa.max(fb).max(T::one()) {
                    return Err(Error::Parameter(format!(
                        "profile `{}` does not decay at r = {big} despite a gaussian tail",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }
}
