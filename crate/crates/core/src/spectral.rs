//! Radial Fourier (Hankel) transforms and the fractional Laplacian.
//!
//! Convention: the unitary transform `F(xi) = (2 pi)^{-n/2} int f(x) e^{-i x.xi} dx`,
//! which for radial `f` reads
//! `F(rho) = int_0^inf f(r) (r rho)^{-nu} J_nu(r rho) r^{n-1} dr`, `nu = (n-2)/2`,
//! and is its own inverse. The multiplier `|xi|^beta` does not depend on
//! the normalization, but intermediate transforms do.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate, QuadratureSpec};
use crate::radial::{RadialProfile, TailClass};
use crate::scalar::{kahan_sum, lit, Real};
use crate::special_fn::{bessel_zeros, ln_gamma, EvalPolicy, ScaledBessel};

/// Fourier normalization tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Unitary,
}

/// Default sample count of tabulated transforms and outputs.
pub const SAMPLE_COUNT: usize = 513;
/// Default sampling range `[1e-4, 50]`.
pub const SAMPLE_RANGE: (f64, f64) = (1e-4, 50.0);

const GL_ORDER: usize = 20;
const FIRST_NODE: f64 = 1e-8;
const GRADED_END: f64 = 0.1;
const STOP_FRACTION: f64 = 1e-14;
const ACCEPT_FRACTION: f64 = 1e-6;
const NOISE_FRACTION: f64 = 1e-13;
const PROBES: usize = 12;
const ROUND_TRIP_TOL: f64 = 1e-4;

/// Settings of radial transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelSpec<T> {
    pub quadrature: QuadratureSpec<T>,
    /// Frequencies where `radial_fourier` samples the transform.
    pub rho_grid: Vec<T>,
    /// Radii where fractional-Laplacian outputs are tabulated.
    pub output_radii: Vec<T>,
    pub convention: Convention,
    /// Largest number of uniform frequency panels before giving up.
    pub max_panels: usize,
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last: T = lit((count - 1) as f64);
    (0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == count - 1 {
                hi
            } else {
                (a + (b - a) * lit::<T>(k as f64) / last).exp()
            }
        })
        .collect()
}

impl<T: Real> Default for HankelSpec<T> {
    fn default() -> Self {
        let grid = log_grid(lit(SAMPLE_RANGE.0), lit(SAMPLE_RANGE.1), SAMPLE_COUNT);
        Self {
            quadrature: QuadratureSpec::default(),
            rho_grid: grid.clone(),
            output_radii: grid,
            convention: Convention::Unitary,
            max_panels: 800,
        }
    }
}

impl<T: Real> HankelSpec<T> {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        for (name, grid) in [("rho_grid", &self.rho_grid), ("output_radii", &self.output_radii)] {
            if grid.len() < 2 {
                return Err(Error::Parameter(format!("{name} needs at least two points")));
            }
            if !(grid[0] > T::zero()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Parameter(format!("{name} must be positive and strictly increasing")));
            }
        }
        if self.max_panels == 0 {
            return Err(Error::Parameter("max_panels must be >= 1".into()));
        }
        Ok(())
    }
}

/// Forward transform of one profile, with the Bessel zeros cached.
struct Forward<'a, T> {
    f: &'a RadialProfile<T>,
    bessel: ScaledBessel<T>,
    /// zeros of `J_nu` up to `rho_max * reach`
    zeros: Vec<T>,
    reach: T,
    abs_tol: T,
    q: &'a QuadratureSpec<T>,
}

fn bessel_for<T: Real>(n: usize) -> Result<ScaledBessel<T>> {
    ScaledBessel::new(lit((n as f64 - 2.0) / 2.0), EvalPolicy::default())
}

/// Radius beyond which the profile's contribution to transforms is
/// negligible.
fn reach<T: Real>(f: &RadialProfile<T>) -> Result<T> {
    match f.tail() {
        TailClass::Compact { radius } => Ok(radius),
        TailClass::Gaussian { rate } => Ok((lit::<T>(42.0) / rate).sqrt().max(f.outer_scale())),
        TailClass::Power { exponent } => Err(Error::NonConvergence(format!(
            "profile `{}` decays like r^-{exponent}; transforms are supported for gaussian or compact tails",
            f.label()
        ))),
    }
}

impl<'a, T: Real> Forward<'a, T> {
    fn new(f: &'a RadialProfile<T>, rho_max: T, q: &'a QuadratureSpec<T>) -> Result<Self> {
        let n = f.n();
        let nt: T = lit(n as f64);
        if !(f.origin_exponent() + nt > T::zero()) {
            return Err(Error::Divergence(format!(
                "profile `{}` is not integrable at the origin",
                f.label()
            )));
        }
        let bessel = bessel_for(n)?;
        let reach = reach(f)?;
        let zeros = bessel_zeros(bessel.order(), rho_max * reach);
        let e = nt - T::one();
        let mass = integrate(
            |r: T| f.eval(r).abs() * r.powf(e),
            T::zero(),
            reach,
            f.breakpoints(),
            q.rel_tol.max(lit(1e-10)),
            T::min_positive_value(),
            q.max_subdivisions,
        )?;
        let abs_tol = (mass.value * lit(1e-15)).max(T::min_positive_value());
        Ok(Self { f, bessel, zeros, reach, abs_tol, q })
    }

    fn at(&self, rho: T) -> Result<T> {
        let e: T = lit((self.f.n() - 1) as f64);
        let h = |r: T| self.f.eval(r) * self.bessel.eval(r * rho) * r.powf(e);
        let mut cuts: Vec<T> = self.f.breakpoints().iter().copied().filter(|&b| b < self.reach).collect();
        if rho > T::zero() {
            cuts.extend(self.zeros.iter().map(|&z| z / rho).take_while(|&r| r < self.reach));
        }
        if T::one() < self.reach {
            cuts.push(T::one());
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        cuts.dedup();
        let mut edges = vec![T::zero()];
        edges.extend(cuts);
        edges.push(self.reach);
        let mut parts = Vec::with_capacity(edges.len());
        for w in edges.windows(2) {
            let est = integrate(&h, w[0], w[1], &[], self.q.rel_tol, self.abs_tol, self.q.max_subdivisions)?;
            parts.push(est.value);
        }
        parts.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal));
        Ok(kahan_sum(parts))
    }
}

/// The unitary transform at one frequency.
pub fn radial_fourier_at<T: Real>(f: &RadialProfile<T>, rho: T, q: &QuadratureSpec<T>) -> Result<T> {
    if !(rho >= T::zero()) || !rho.is_finite() {
        return Err(Error::Domain(format!("frequency rho = {rho} must be finite and >= 0")));
    }
    Forward::new(f, rho, q)?.at(rho)
}

/// The transform of `f` sampled on `spec.rho_grid`.
pub fn radial_fourier<T: Real>(f: &RadialProfile<T>, spec: &HankelSpec<T>) -> Result<RadialProfile<T>> {
    spec.validate()?;
    let rho_max = *spec.rho_grid.last().unwrap();
    let fw = Forward::new(f, rho_max, &spec.quadrature)?;
    let values: Vec<T> = spec.rho_grid.par_iter().map(|&rho| fw.at(rho)).collect::<Result<_>>()?;
    let n = f.n();
    let tail = match f.tail() {
        TailClass::Gaussian { rate } => TailClass::Gaussian { rate: (lit::<T>(4.0) * rate).recip() },
        // a jump across a sphere decays like rho^{-(n+1)/2}; smoother
        // profiles decay faster
        _ => TailClass::Power { exponent: lit::<T>((n as f64 + 1.0) / 2.0) },
    };
    Ok(RadialProfile::from_samples(n, spec.rho_grid.clone(), values, T::zero(), tail)?
        .with_label(format!("fourier({})", f.label())))
}

/// Tabulated transform `G(rho) = scale * rho^exponent * F(rho)` on composite
/// Gauss-Legendre panels, ready for inverse transforms at any radius.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    n: usize,
    nodes: Arc<Vec<T>>,
    weights: Arc<Vec<T>>,
    base: Arc<Vec<T>>,
    base_origin: T,
    exponent: T,
    scale: T,
    bessel: ScaledBessel<T>,
}

impl<T: Real> Spectrum<T> {
    /// Tabulates the transform of `f`, extending the frequency range until
    /// the panels' contribution to `int |rho^exponent F| rho^{n-1}` is
    /// negligible.
    pub fn build(f: &RadialProfile<T>, exponent: T, spec: &HankelSpec<T>) -> Result<Self> {
        spec.validate()?;
        let n = f.n();
        let nt: T = lit(n as f64);
        let r_max = *spec.output_radii.last().unwrap();
        let width = lit::<T>(0.25).min(lit::<T>(6.0) / r_max);
        let cap_rho = lit::<T>(GRADED_END) + width * lit(spec.max_panels as f64);
        let fw = Forward::new(f, cap_rho, &spec.quadrature)?;
        let (gx, gw) = gauss_legendre::<T>(GL_ORDER);
        let panel = |a: T, b: T| -> (Vec<T>, Vec<T>) {
            let (mid, half) = ((a + b) / lit(2.0), (b - a) / lit(2.0));
            (gx.iter().map(|&x| mid + half * x).collect(), gw.iter().map(|&w| w * half).collect())
        };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut a: T = lit(FIRST_NODE);
        while a < lit(GRADED_END) {
            let b = a * lit(10.0);
            let (x, w) = panel(a, b);
            nodes.extend(x);
            weights.extend(w);
            a = b;
        }
        let mut base: Vec<T> = nodes.par_iter().map(|&rho| fw.at(rho)).collect::<Result<_>>()?;
        let e1 = nt - T::one() + exponent;
        let weight_of = |x: &[T], w: &[T], v: &[T]| -> T {
            kahan_sum(x.iter().zip(w).zip(v).map(|((&x, &w), &v)| w * (v * x.powf(e1)).abs()))
        };
        let mut total = weight_of(&nodes, &weights, &base);
        let mut peak = base.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let mut quiet = 0;
        let mut last_share = T::one();
        let mut a: T = lit(GRADED_END);
        for _ in 0..spec.max_panels {
            let (x, w) = panel(a, a + width);
            let v: Vec<T> = x.par_iter().map(|&rho| fw.at(rho)).collect::<Result<_>>()?;
            let contrib = weight_of(&x, &w, &v);
            total = total + contrib;
            nodes.extend(x);
            weights.extend(w);
            base.extend(v);
            a = a + width;
            last_share = if total > T::zero() { contrib / total } else { T::zero() };
            let panel_max = base[base.len() - GL_ORDER..].iter().fold(T::zero(), |m, v| m.max(v.abs()));
            peak = peak.max(panel_max);
            // below the roundoff floor of the forward transform further
            // panels only add noise
            let floor = (peak * lit(NOISE_FRACTION)).max(fw.abs_tol * fw.bessel.at_origin() * lit(100.0));
            if last_share <= lit(STOP_FRACTION) || panel_max <= floor {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if quiet < 3 {
            if last_share > lit(ACCEPT_FRACTION) {
                return Err(Error::NonConvergence(format!(
                    "transform of `{}` has not decayed by rho = {a} (last panel carries {last_share} of the mass); \
                     the multiplier rho^{exponent} is outside the validated class",
                    f.label()
                )));
            }
            log::warn!(
                "transform of `{}` truncated at rho = {a} with last-panel share {last_share}",
                f.label()
            );
        }
        let base_origin = fw.at(T::zero())?;
        Ok(Self {
            n,
            nodes: Arc::new(nodes),
            weights: Arc::new(weights),
            base: Arc::new(base),
            base_origin,
            exponent: T::zero(),
            scale: T::one(),
            bessel: fw.bessel,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Accumulated multiplier power.
    pub fn exponent(&self) -> T {
        self.exponent
    }

    pub fn rho_max(&self) -> T {
        *self.nodes.last().unwrap()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `c G`.
    pub fn scaled(&self, c: T) -> Self {
        Self { scale: self.scale * c, ..self.clone() }
    }

    /// `rho^e G`.
    pub fn with_multiplier_power(&self, e: T) -> Self {
        Self { exponent: self.exponent + e, ..self.clone() }
    }

    /// Inverse transform at radius `r`.
    pub fn inverse(&self, r: T) -> Result<T> {
        let nt: T = lit(self.n as f64);
        let rate = nt + self.exponent;
        if !(rate > T::zero()) {
            return Err(Error::Divergence(format!(
                "rho^{} G(rho) rho^(n-1) is not integrable at rho = 0",
                self.exponent
            )));
        }
        let rho0: T = lit(FIRST_NODE);
        let origin = self.base_origin * self.bessel.at_origin() * rho0.powf(rate) / rate;
        let e1 = rate - T::one();
        let body = kahan_sum(
            self.nodes
                .iter()
                .zip(self.weights.iter())
                .zip(self.base.iter())
                .map(|((&x, &w), &v)| w * v * x.powf(e1) * self.bessel.eval(r * x)),
        );
        Ok(self.scale * (origin + body))
    }
}

fn spectrum_of<T: Real>(f: &RadialProfile<T>, exponent: T, spec: &HankelSpec<T>) -> Result<Spectrum<T>> {
    match f.spectrum() {
        Some(s) if s.n() == f.n() => Ok(s.with_multiplier_power(exponent)),
        _ => Ok(Spectrum::build(f, exponent, spec)?.with_multiplier_power(exponent)),
    }
}

fn sampled_from_spectrum<T: Real>(
    n: usize,
    spectrum: Spectrum<T>,
    tail: TailClass<T>,
    spec: &HankelSpec<T>,
    label: String,
) -> Result<RadialProfile<T>> {
    let values: Vec<T> = spec.output_radii.par_iter().map(|&r| spectrum.inverse(r)).collect::<Result<_>>()?;
    Ok(RadialProfile::from_samples(n, spec.output_radii.clone(), values, T::zero(), tail)?
        .with_spectrum(Some(Arc::new(spectrum)))
        .with_label(label))
}

fn is_even_integer<T: Real>(x: T) -> bool {
    let half = x / lit(2.0);
    half == half.round()
}

/// Large-`r` expansion of the Riesz potential of a radial source,
/// `I_beta g(r) = sum_k A_k r^{-lambda - 2k}`, `lambda = n - beta`.
///
/// The spherical mean of `|x - y|^{-lambda}` over `|y| = s < r` is
/// `r^{-lambda} 2F1(lambda/2, lambda/2 - n/2 + 1; n/2; s^2/r^2)`, so
/// `A_k = c (lambda/2)_k (lambda/2 - n/2 + 1)_k / ((n/2)_k k!) m_{2k}` with
/// the radial moments `m_{2k} = int g(|y|) |y|^{2k} dy` and the Riesz
/// constant `c = Gamma(lambda/2) / (2^beta pi^{n/2} Gamma(beta/2))`.
struct FarField<T> {
    lambda: T,
    start: T,
    coef: Vec<T>,
}

impl<T: Real> FarField<T> {
    const MAX_TERMS: usize = 60;

    /// `None` when the source reaches too far out for the expansion to be
    /// useful inside the sampled range.
    fn build(g: &RadialProfile<T>, beta: T, spec: &HankelSpec<T>) -> Result<Option<Self>> {
        let last = match spec.output_radii.last() {
            Some(&r) => r,
            None => return Ok(None),
        };
        let start = match g.tail() {
            TailClass::Compact { radius } => radius * lit(3.0),
            // e^{-200} of the source lies beyond this radius
            TailClass::Gaussian { rate } => (lit::<T>(200.0) / rate).sqrt().max(g.outer_scale() * lit(3.0)),
            TailClass::Power { .. } => return Ok(None),
        };
        if start > last {
            return Ok(None);
        }
        let n = g.n();
        let nt: T = lit(n as f64);
        let two: T = lit(2.0);
        let lambda = nt - beta;
        let pol = EvalPolicy::default();
        let pi = T::PI();
        let c = (ln_gamma(lambda / two)?.0 - ln_gamma(beta / two)?.0).exp() / (two.powf(beta) * pi.powf(nt / two));
        let sphere = two * pi.powf(nt / two) / crate::special_fn::gamma(nt / two, &pol)?;
        let (ha, hb, hc) = (lambda / two, lambda / two - nt / two + T::one(), nt / two);
        let value = Arc::clone(g.value_fn());
        let bps: Vec<T> = g.breakpoints().iter().copied().filter(|&b| b > T::zero() && b < start).collect();
        let q = &spec.quadrature;
        let mut coef = Vec::new();
        let mut poch = T::one();
        let mut peak = T::zero();
        let mut previous = T::zero();
        for k in 0..Self::MAX_TERMS {
            if k > 0 {
                let km = lit::<T>((k - 1) as f64);
                poch = poch * (ha + km) * (hb + km) / ((hc + km) * (km + T::one()));
            }
            if poch == T::zero() {
                break;
            }
            let e: T = lit((2 * k + n - 1) as f64);
            let v = Arc::clone(&value);
            let moment = integrate(move |s: T| v(s) * s.powf(e), T::zero(), start, &bps, q.rel_tol, T::min_positive_value(), q.max_subdivisions)?
                .value
                * sphere;
            let a = c * poch * moment;
            let size = (a * start.powf(-lit::<T>((2 * k) as f64))).abs();
            // past the largest term, renewed growth means the asymptotic
            // series has started to diverge
            if k >= 2 && previous < peak && size > previous {
                break;
            }
            coef.push(a);
            peak = peak.max(size);
            previous = size;
            if k >= 1 && size <= lit::<T>(1e-18) * peak {
                break;
            }
        }
        Ok(Some(Self { lambda, start, coef }))
    }

    fn eval(&self, r: T) -> T {
        let x = (r * r).recip();
        let mut acc = T::zero();
        for &a in self.coef.iter().rev() {
            acc = acc * x + a;
        }
        acc * r.powf(-self.lambda)
    }
}

/// `(-Delta)^{beta/2} f` as the inverse transform of `rho^beta F(rho)`,
/// tabulated on `spec.output_radii`.
pub fn fractional_laplacian<T: Real>(f: &RadialProfile<T>, beta: T, spec: &HankelSpec<T>) -> Result<RadialProfile<T>> {
    spec.validate()?;
    let n = f.n();
    let nt: T = lit(n as f64);
    if !(beta > T::zero() && beta < nt) {
        return Err(Error::Domain(format!("(-Delta)^(beta/2) needs beta in (0, n) = (0, {n}) (got {beta})")));
    }
    if beta >= nt - T::one() {
        log::warn!("beta = {beta} >= n - 1: the multiplier decays slowly and accuracy may degrade");
    }
    let spectrum = spectrum_of(f, beta, spec)?;
    let total = spectrum.exponent();
    let tail = match f.tail() {
        TailClass::Gaussian { rate } if is_even_integer(total) && total >= T::zero() => TailClass::Gaussian { rate },
        TailClass::Compact { radius } if is_even_integer(total) && total >= T::zero() => TailClass::Compact { radius },
        _ => TailClass::Power { exponent: nt + total },
    };
    sampled_from_spectrum(n, spectrum, tail, spec, format!("(-lap)^({beta}/2)({})", f.label()))
}

/// The Riesz potential `I_beta g`: the inverse transform of
/// `rho^{-beta} G(rho)`, so that `(-Delta)^{beta/2} I_beta g = g`. The
/// round trip is checked at probe radii.
pub fn fractional_seminorm_input<T: Real>(
    g: &RadialProfile<T>,
    beta: T,
    spec: &HankelSpec<T>,
) -> Result<RadialProfile<T>> {
    spec.validate()?;
    let n = g.n();
    let nt: T = lit(n as f64);
    if !(beta > T::zero() && beta < nt) {
        return Err(Error::Domain(format!(
            "the Riesz potential needs beta in (0, n) = (0, {n}) (got {beta})"
        )));
    }
    let spectrum = spectrum_of(g, -beta, spec)?;
    let tail = TailClass::Power { exponent: nt + spectrum.exponent() };
    let label = format!("riesz_{beta}({})", g.label());
    let sampled = sampled_from_spectrum(n, spectrum, tail, spec, label.clone())?;
    let f = match FarField::build(g, beta, spec)? {
        None => sampled,
        Some(far) => {
            let cut = far.start;
            let near = Arc::clone(sampled.value_fn());
            let seam = (near(cut), far.eval(cut));
            if (seam.0 - seam.1).abs() > lit::<T>(1e-6) * seam.1.abs() {
                log::warn!("Riesz far field meets the sampled potential at r = {cut} with values {} and {}", seam.0, seam.1);
            }
            let mut bps: Vec<T> = sampled.breakpoints().iter().copied().filter(|&r| r < cut).collect();
            bps.push(cut);
            let value = move |r: T| if r >= cut { far.eval(r) } else { near(r) };
            RadialProfile::raw(n, Arc::new(value), T::zero(), tail)?
                .with_breakpoints(bps)
                .with_finite_differences(true)
                .with_spectrum(sampled.spectrum().cloned())
                .with_label(label)
        }
    };

    let back = f.spectrum().expect("attached above").with_multiplier_power(beta);
    let lo = spec.output_radii[0].max(lit(1e-3));
    let hi = *spec.output_radii.last().unwrap();
    let hi = match g.tail() {
        TailClass::Gaussian { rate } => hi.min((lit::<T>(4.0) / rate).sqrt()),
        _ => hi.min(g.outer_scale()),
    };
    let probes = log_grid(lo, hi, PROBES);
    let mut scale = T::zero();
    let mut worst = (T::zero(), T::zero());
    let mut rows = Vec::with_capacity(PROBES);
    for &r in &probes {
        let (got, want) = (back.inverse(r)?, g.eval(r));
        scale = scale.max(want.abs());
        rows.push((r, (got - want).abs()));
    }
    for (r, err) in rows {
        if !(err <= worst.1) {
            worst = (r, err);
        }
    }
    if !(worst.1 <= lit::<T>(ROUND_TRIP_TOL) * scale) {
        return Err(Error::Verification(format!(
            "Riesz potential round trip misses g by {} at r = {} (scale {scale})",
            worst.1, worst.0
        )));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{gaussian, lp_norm, radial_laplacian};

    fn half_gaussian(n: usize) -> RadialProfile<f64> {
        gaussian(n, 0.5).unwrap()
    }

    #[test]
    fn self_dual_gaussian() {
        let q = QuadratureSpec::default();
        for n in [2, 3, 4, 5, 7] {
            let f = half_gaussian(n);
            for &rho in &[0.0, 0.01, 0.3, 1.0, 2.7, 5.0, 8.0] {
                let got = radial_fourier_at(&f, rho, &q).unwrap();
                let want = (-rho * rho / 2.0f64).exp();
                assert!((got - want).abs() < 1e-12, "n={n} rho={rho}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn scaled_gaussian() {
        let q = QuadratureSpec::default();
        for &(n, t) in &[(3usize, 2.0f64), (4, 0.2), (6, 1.0)] {
            let f = gaussian(n, t).unwrap();
            for &rho in &[0.1, 1.5, 4.0] {
                let want = (2.0 * t).powf(-(n as f64) / 2.0) * (-rho * rho / (4.0 * t)).exp();
                let got = radial_fourier_at(&f, rho, &q).unwrap();
                assert!((got - want).abs() < 1e-12 * (2.0 * t).powf(-(n as f64) / 2.0), "n={n} t={t} rho={rho}");
            }
        }
    }

    #[test]
    fn sampled_transform_and_plancherel() {
        let spec = HankelSpec::default();
        let q = QuadratureSpec::default();
        let f = gaussian(3, 1.3).unwrap().add(&gaussian(3, 0.4).unwrap().scaled(-0.6)).unwrap();
        let ff = radial_fourier(&f, &spec).unwrap();
        let (a, b): (f64, f64) = (lp_norm(&f, 2.0, &q).unwrap(), lp_norm(&ff, 2.0, &q).unwrap());
        assert!(((a - b) / a).abs() < 1e-6, "{a} vs {b}");
        let zero = gaussian(3, 1.0).unwrap().scaled(0.0);
        assert!(radial_fourier(&zero, &spec).unwrap().eval(0.5) == 0.0);
    }

    #[test]
    fn laplacian_at_beta_two() {
        let spec = HankelSpec::default();
        for n in [3usize, 4, 5] {
            let f = half_gaussian(n);
            let g = fractional_laplacian(&f, 2.0, &spec).unwrap();
            let lap = radial_laplacian(&f).unwrap();
            for &r in &[0.05, 0.5, 1.0, 2.5, 4.0] {
                let want = -lap.eval(r);
                let exact = g.spectrum().unwrap().inverse(r).unwrap();
                assert!((exact - want).abs() < 1e-10, "n={n} r={r}: {exact} vs {want}");
                assert!((g.eval(r) - want).abs() < 1e-7, "n={n} r={r}: {} vs {want}", g.eval(r));
            }
        }
    }

    #[test]
    fn riesz_far_field() {
        // I_2 of the unit ball in R^3 is the Newtonian potential 1/(3r) outside
        let spec = HankelSpec::default();
        let ball = crate::radial::ball_indicator::<f64>(3, 1.0).unwrap();
        let far = FarField::build(&ball, 2.0, &spec).unwrap().unwrap();
        assert_eq!(far.start, 3.0);
        for &r in &[3.5, 10.0, 49.0, 1e3, 1e8] {
            let want = 1.0 / (3.0 * r);
            assert!((far.eval(r) / want - 1.0).abs() < 1e-12, "r={r}: {} vs {want}", far.eval(r));
        }
        // beta = 1 in R^3: the spherical mean of |x - y|^{-2} over |y| = s is
        // ln((r + s)/(r - s)) / (2 r s); integrate over the unit ball
        let far = FarField::build(&ball, 1.0, &spec).unwrap().unwrap();
        let r = 4.0f64;
        let shell = |s: f64| 4.0 * std::f64::consts::PI * s * s * ((r + s) / (r - s)).ln() / (2.0 * r * s);
        let mean = crate::quadrature::integrate(shell, 0.0, 1.0, &[], 1e-13, 0.0, 200).unwrap().value;
        let want = mean / (2.0 * std::f64::consts::PI.powi(2));
        assert!((far.eval(r) / want - 1.0).abs() < 1e-12, "{} vs {want}", far.eval(r));
        // a gaussian source: the expansion continues the sampled potential
        let g = gaussian::<f64>(4, 1.0).unwrap();
        let f = fractional_seminorm_input(&g, 1.0, &spec).unwrap();
        let cut = (200.0f64).sqrt().max(3.0);
        let (below, above) = (f.eval(cut * (1.0 - 1e-9)), f.eval(cut));
        assert!((below / above - 1.0).abs() < 1e-7, "{below} vs {above}");
        let exact = f.spectrum().unwrap().inverse(30.0).unwrap();
        assert!((f.eval(30.0) / exact - 1.0).abs() < 1e-6, "{} vs {exact}", f.eval(30.0));
    }

    #[test]
    fn origin_values() {
        let spec = HankelSpec::default();
        let pol = EvalPolicy::default();
        for n in [3usize, 4, 5] {
            for &beta in &[0.5, 1.0, 1.5] {
                let g = fractional_laplacian(&half_gaussian(n), beta, &spec).unwrap();
                let want = 2f64.powf(beta / 2.0) * crate::special_fn::gamma((n as f64 + beta) / 2.0, &pol).unwrap()
                    / crate::special_fn::gamma(n as f64 / 2.0, &pol).unwrap();
                let got = g.spectrum().unwrap().inverse(0.0).unwrap();
                assert!(((got - want) / want).abs() < 1e-9, "n={n} beta={beta}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn riesz_round_trip_and_composition() {
        let spec = HankelSpec::default();
        let g = half_gaussian(3);
        let f = fractional_seminorm_input(&g, 1.0, &spec).unwrap();
        let back = fractional_laplacian(&f, 1.0, &spec).unwrap();
        for &r in &[0.01, 0.5, 1.0, 2.0] {
            assert!((back.eval(r) - g.eval(r)).abs() < 1e-7);
        }
        let h = half_gaussian(5);
        let twice = fractional_laplacian(&fractional_laplacian(&h, 0.7, &spec).unwrap(), 1.1, &spec).unwrap();
        let once = fractional_laplacian(&h, 1.8, &spec).unwrap();
        for &r in &[0.01, 0.8, 3.0] {
            assert!((twice.eval(r) - once.eval(r)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_beta() {
        let spec = HankelSpec::default();
        let f = half_gaussian(3);
        assert!(matches!(fractional_laplacian(&f, 3.0, &spec), Err(Error::Domain(_))));
        assert!(matches!(fractional_seminorm_input(&f, 0.0, &spec), Err(Error::Domain(_))));
    }
}
