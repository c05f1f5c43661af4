//! Grand Lebesgue Space norms, the weights `psi_V` and `psi_W`, and the
//! verification harness for the GLS forms of the Hardy-Rellich and weighted
//! Sobolev inequalities.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{k_hr, k_s, ConstantKind, HardyRellichQuery, SobolevQuery};
use crate::error::{Error, Result};
use crate::psi::{natural_psi, weighted_psi, Interval, PsiFunction, ENDPOINT_OFFSET, NATURAL_SAMPLES};
use crate::quadrature::QuadratureSpec;
use crate::radial::{apply_v, apply_w, extremal_family, lp_norm, radial_laplacian, RadialProfile};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{fractional_laplacian, fractional_seminorm_input, HankelSpec};

/// Chebyshev grid size of the supremum search.
pub const GRID_POINTS: usize = 129;

/// Settings of the supremum search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupOptions<T> {
    pub grid_points: usize,
    pub refine: bool,
    /// Golden-section stopping width, relative to `p`.
    pub refine_tol: T,
    pub endpoint_offset: T,
}

impl<T: Real> Default for SupOptions<T> {
    fn default() -> Self {
        Self { grid_points: GRID_POINTS, refine: true, refine_tol: lit(1e-9), endpoint_offset: lit(ENDPOINT_OFFSET) }
    }
}

/// `G(psi)` restricted to a working interval.
#[derive(Clone)]
pub struct GlsSpace<T> {
    psi: PsiFunction<T>,
    interval: Interval<T>,
}

impl<T: Real> std::fmt::Debug for GlsSpace<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GlsSpace").field("psi", &self.psi).field("interval", &self.interval).finish()
    }
}

impl<T: Real> GlsSpace<T> {
    pub fn new(psi: PsiFunction<T>, interval: Interval<T>) -> Result<Self> {
        let d = psi.domain();
        if interval.a < d.a || interval.b > d.b {
            return Err(Error::Domain(format!(
                "working interval {interval} is not contained in the psi domain {d}"
            )));
        }
        Ok(Self { psi, interval })
    }

    /// The space over the whole domain of `psi`.
    pub fn over_domain(psi: PsiFunction<T>) -> Self {
        let interval = psi.domain();
        Self { psi, interval }
    }

    pub fn psi(&self) -> &PsiFunction<T> {
        &self.psi
    }

    pub fn interval(&self) -> Interval<T> {
        self.interval
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlsSample<T> {
    pub p: T,
    pub ratio: T,
}

/// `sup_p |f|_p / psi(p)` with the grid it was found on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlsNormResult<T> {
    pub value: T,
    pub argmax_p: T,
    /// Grid samples `(p, |f|_p / psi(p))` in increasing `p`.
    pub samples: Vec<GlsSample<T>>,
    pub refined: bool,
    pub refinement_evaluations: usize,
    pub endpoint_offset: T,
}

/// Thread-safe memo of `p -> |f|_p`, keyed by the bit pattern of `p`.
pub struct PnormCache<'a, T> {
    f: Box<dyn Fn(T) -> Result<T> + Send + Sync + 'a>,
    memo: Mutex<BTreeMap<u64, T>>,
}

impl<'a, T: Real> PnormCache<'a, T> {
    pub fn new(f: impl Fn(T) -> Result<T> + Send + Sync + 'a) -> Self {
        Self { f: Box::new(f), memo: Mutex::new(BTreeMap::new()) }
    }

    /// `|f|_p` of a profile with the given quadrature settings.
    pub fn of_profile(f: &'a RadialProfile<T>, q: &'a QuadratureSpec<T>) -> Self {
        Self::new(move |p| lp_norm(f, p, q))
    }

    pub fn get(&self, p: T) -> Result<T> {
        let key = to_f64(p).to_bits();
        if let Some(v) = self.memo.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(*v);
        }
        let v = (self.f)(p)?;
        self.memo.lock().unwrap_or_else(|e| e.into_inner()).insert(key, v);
        Ok(v)
    }
}

fn ratio_at<T: Real, F>(pnorm: &F, psi: &PsiFunction<T>, p: T) -> Result<T>
where
    F: Fn(T) -> Result<T> + ?Sized,
{
    let w = psi.eval(p)?;
    if w == T::infinity() {
        // C / inf = 0
        return Ok(T::zero());
    }
    let v = pnorm(p)?;
    Ok(v / w)
}

/// `||f||_{G(psi)} = sup_{p in (a,b)} |f|_p / psi(p)` with default settings.
pub fn gls_norm<T: Real, F>(pnorm: &F, space: &GlsSpace<T>) -> Result<GlsNormResult<T>>
where
    F: Fn(T) -> Result<T> + Sync + ?Sized,
{
    gls_norm_with(pnorm, space, &SupOptions::default())
}

/// The GLS norm on a Chebyshev grid of the working interval (kept
/// `endpoint_offset (b - a)` away from its ends), refined by golden-section
/// search around the best grid point.
pub fn gls_norm_with<T: Real, F>(pnorm: &F, space: &GlsSpace<T>, opts: &SupOptions<T>) -> Result<GlsNormResult<T>>
where
    F: Fn(T) -> Result<T> + Sync + ?Sized,
{
    let iv = space.interval;
    let psi = &space.psi;
    if let Some(r) = psi.degenerate_exponent() {
        if !iv.contains(r) {
            return Err(Error::Domain(format!(
                "psi is infinite on the whole working interval {iv} (finite only at p = {r})"
            )));
        }
        let v = pnorm(r)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("|f|_p is infinite at p = {r}, the only exponent where psi is finite")));
        }
        let value = v / psi.eval(r)?;
        return Ok(GlsNormResult {
            value,
            argmax_p: r,
            samples: vec![GlsSample { p: r, ratio: value }],
            refined: false,
            refinement_evaluations: 0,
            endpoint_offset: opts.endpoint_offset,
        });
    }
    if !iv.is_bounded() {
        return Err(Error::Domain(format!(
            "the supremum over {iv} needs a bounded working interval"
        )));
    }
    if opts.grid_points < 2 {
        return Err(Error::Parameter("the supremum grid needs at least two points".into()));
    }
    let d = iv.width() * opts.endpoint_offset;
    let grid = crate::scalar::chebyshev_lobatto(iv.a + d, iv.b - d, opts.grid_points);
    let ratios: Vec<T> = grid.par_iter().map(|&p| ratio_at(pnorm, psi, p)).collect::<Result<_>>()?;
    if ratios.iter().any(|r| r.is_nan()) {
        return Err(Error::NonConvergence("a GLS ratio evaluated to NaN".into()));
    }
    let mut k = 0;
    for (i, &r) in ratios.iter().enumerate() {
        if clearly_above(r, ratios[k]) {
            k = i;
        }
    }
    let samples: Vec<GlsSample<T>> = grid.iter().zip(&ratios).map(|(&p, &ratio)| GlsSample { p, ratio }).collect();
    let (mut best_p, mut best) = (grid[k], ratios[k]);
    let mut evals = 0;
    if opts.refine && best.is_finite() {
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(grid.len() - 1)];
        let (p, v, count) = golden_max(|p| ratio_at(pnorm, psi, p), lo, hi, opts.refine_tol)?;
        evals = count;
        if clearly_above(v, best) {
            best = v;
            best_p = p;
        }
    }
    Ok(GlsNormResult {
        value: best,
        argmax_p: best_p,
        samples,
        refined: opts.refine,
        refinement_evaluations: evals,
        endpoint_offset: opts.endpoint_offset,
    })
}

/// `x > y` beyond rounding noise. Treating near-equal values as ties keeps
/// the search path unchanged when every ratio is multiplied by a constant.
fn clearly_above<T: Real>(x: T, y: T) -> bool {
    x > y + T::epsilon() * lit(64.0) * y.abs()
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`; returns the
/// best point seen.
fn golden_max<T: Real>(f: impl Fn(T) -> Result<T>, lo: T, hi: T, tol: T) -> Result<(T, T, usize)> {
    let inv_phi: T = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut count = 2;
    let (mut best_p, mut best) = if clearly_above(fd, fc) { (d, fd) } else { (c, fc) };
    for _ in 0..100 {
        if (b - a) <= tol * b.abs().max(T::one()) {
            break;
        }
        if !clearly_above(fd, fc) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
            if clearly_above(fc, best) {
                best = fc;
                best_p = c;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
            if clearly_above(fd, best) {
                best = fd;
                best_p = d;
            }
        }
        count += 1;
    }
    Ok((best_p, best, count))
}

fn open_intersection<T: Real>(hi: T, a: T, b: T, what: &str) -> Result<Interval<T>> {
    if !(a >= T::one()) || !(b > a) {
        return Err(Error::Domain(format!("need 1 <= a < b (got a = {a}, b = {b})")));
    }
    let lo = a.max(T::one());
    let up = b.min(hi);
    if !(up > lo) {
        return Err(Error::EmptyInterval(format!(
            "{what} = (1, {hi}) and ({a}, {b}) do not overlap"
        )));
    }
    Ok(Interval { a: lo, b: up })
}

/// `(1, n/2) intersected with (a, b)`.
pub fn interval_hr<T: Real>(n: usize, a: T, b: T) -> Result<Interval<T>> {
    if n < 3 {
        return Err(Error::Domain(format!("the Hardy-Rellich range needs n >= 3 (got n = {n})")));
    }
    open_intersection(lit::<T>(n as f64) / lit(2.0), a, b, "the Hardy-Rellich range")
}

/// `(1, n/beta) intersected with (a, b)`.
pub fn interval_jw<T: Real>(n: usize, beta: T, a: T, b: T) -> Result<Interval<T>> {
    let nt: T = lit(n as f64);
    if n < 2 || !(beta > T::zero() && beta < nt) {
        return Err(Error::Domain(format!("the Sobolev range needs n >= 2 and beta in (0, n) (got n = {n}, beta = {beta})")));
    }
    open_intersection(nt / beta, a, b, "the Sobolev range")
}

/// `psi_V(p) = K_HR(n, p) psi(p)` on the Hardy-Rellich range.
pub fn build_psi_v<T: Real>(n: usize, psi: &PsiFunction<T>) -> Result<PsiFunction<T>> {
    let d = psi.domain();
    let iv = interval_hr(n, d.a, d.b)?;
    Ok(weighted_psi(psi, n, ConstantKind::HardyRellich, iv))
}

/// `psi_W(p) = K_S(n, beta, p) psi(p)` on the Sobolev range.
pub fn build_psi_w<T: Real>(n: usize, beta: T, psi: &PsiFunction<T>) -> Result<PsiFunction<T>> {
    let d = psi.domain();
    let iv = interval_jw(n, beta, d.a, d.b)?;
    Ok(weighted_psi(psi, n, ConstantKind::Sobolev { beta }, iv))
}

/// Which derivative enters a Sobolev-GLS seminorm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "order", rename_all = "snake_case")]
pub enum Order<T> {
    Laplacian,
    Fractional { beta: T },
}

/// `||Delta f||_{G(psi)}` or `||(-Delta)^{beta/2} f||_{G(psi)}`.
pub fn sobolev_gls_seminorm<T: Real>(
    f: &RadialProfile<T>,
    space: &GlsSpace<T>,
    order: Order<T>,
    spec: &HankelSpec<T>,
) -> Result<GlsNormResult<T>> {
    let derived = match order {
        Order::Laplacian => radial_laplacian(f)?,
        Order::Fractional { beta } => fractional_laplacian(f, beta, spec)?,
    };
    let q = &spec.quadrature;
    gls_norm(&|p| lp_norm(&derived, p, q), space)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    HardyRellich,
    WeightedSobolev,
}

/// Per-exponent comparison `lhs_p = |Vf|_p` (or `|Wf|_p`) against
/// `rhs_p = K(p) |Delta f|_p` (or `K(p) |(-Delta)^{beta/2} f|_p`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginSample<T> {
    pub p: T,
    pub lhs_p: T,
    pub rhs_p: T,
    /// `1 - lhs_p / rhs_p`; negative values contradict the inequality.
    pub margin: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport<T> {
    pub theorem: Theorem,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<T>,
    pub interval: [T; 2],
    pub ratio: T,
    pub passed: bool,
    pub tolerance: T,
    pub margin_tolerance: T,
    pub argmax_p: T,
    /// Label of the constant in the weight; the Sobolev weight is written
    /// `K_W` and evaluated as `K_S(n, beta, p)`.
    pub constant: String,
    pub lhs: GlsNormResult<T>,
    pub rhs: GlsNormResult<T>,
    pub samples: Vec<MarginSample<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<MarginSample<T>>,
}

/// Settings of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions<T> {
    /// Allowed excess of the GLS ratio over 1.
    pub tolerance: T,
    /// Allowed excess of `lhs_p / rhs_p` over 1 at any grid exponent.
    pub margin_tolerance: T,
    /// Working sub-interval; defaults to the full admissible range.
    pub interval: Option<Interval<T>>,
    pub sup: SupOptions<T>,
    pub hankel: HankelSpec<T>,
}

impl<T: Real> VerifyOptions<T> {
    pub fn hardy_rellich() -> Self {
        Self {
            tolerance: lit(1e-6),
            margin_tolerance: lit(1e-8),
            interval: None,
            sup: SupOptions::default(),
            hankel: HankelSpec::default(),
        }
    }

    pub fn weighted_sobolev() -> Self {
        Self { tolerance: lit(1e-4), margin_tolerance: lit(1e-4), ..Self::hardy_rellich() }
    }
}

fn working_interval<T: Real>(range: Interval<T>, requested: Option<Interval<T>>) -> Result<Interval<T>> {
    match requested {
        None => Ok(range),
        Some(iv) if iv.a >= range.a && iv.b <= range.b => Ok(iv),
        Some(iv) => Err(Error::Domain(format!("working interval {iv} is not inside the admissible range {range}"))),
    }
}

struct Sides<'a, T> {
    theorem: Theorem,
    n: usize,
    beta: Option<T>,
    constant: String,
    k: Box<dyn Fn(T) -> Result<T> + Sync + 'a>,
}

fn run_check<T: Real>(
    sides: Sides<'_, T>,
    lhs_norm: &PnormCache<'_, T>,
    rhs_norm: &PnormCache<'_, T>,
    psi: &PsiFunction<T>,
    weighted: &PsiFunction<T>,
    interval: Interval<T>,
    opts: &VerifyOptions<T>,
) -> Result<VerificationReport<T>> {
    let lhs_space = GlsSpace::new(weighted.clone(), interval)?;
    let rhs_space = GlsSpace::new(psi.clone(), interval)?;
    let lhs = gls_norm_with(&|p| lhs_norm.get(p), &lhs_space, &opts.sup)?;
    let rhs = gls_norm_with(&|p| rhs_norm.get(p), &rhs_space, &opts.sup)?;
    if !(rhs.value > T::zero()) {
        return Err(Error::Domain("the right-hand Sobolev-GLS seminorm vanishes".into()));
    }
    let ratio = lhs.value / rhs.value;

    let ps: Vec<T> = if psi.degenerate_exponent().is_some() {
        vec![lhs.argmax_p]
    } else {
        lhs.samples.iter().map(|s| s.p).collect()
    };
    let samples: Vec<MarginSample<T>> = ps
        .par_iter()
        .map(|&p| -> Result<MarginSample<T>> {
            let lhs_p = lhs_norm.get(p)?;
            let rhs_p = (sides.k)(p)? * rhs_norm.get(p)?;
            Ok(MarginSample { p, lhs_p, rhs_p, margin: T::one() - lhs_p / rhs_p })
        })
        .collect::<Result<_>>()?;
    let mut violation: Option<MarginSample<T>> = None;
    for s in &samples {
        if s.margin < -opts.margin_tolerance && violation.map_or(true, |v| s.margin < v.margin) {
            violation = Some(*s);
        }
    }
    let passed = ratio <= T::one() + opts.tolerance && violation.is_none();
    Ok(VerificationReport {
        theorem: sides.theorem,
        n: sides.n,
        beta: sides.beta,
        interval: [interval.a, interval.b],
        ratio,
        passed,
        tolerance: opts.tolerance,
        margin_tolerance: opts.margin_tolerance,
        argmax_p: lhs.argmax_p,
        constant: sides.constant,
        lhs,
        rhs,
        samples,
        violation,
    })
}

/// Checks `||V f||_{G(psi_V)} <= ||Delta f||_{G(psi)}` over the
/// Hardy-Rellich range of `psi`'s domain.
pub fn verify_hardy_rellich<T: Real>(
    f: &RadialProfile<T>,
    psi: &PsiFunction<T>,
    opts: &VerifyOptions<T>,
) -> Result<VerificationReport<T>> {
    let n = f.n();
    let psi_v = build_psi_v(n, psi)?;
    let interval = working_interval(psi_v.domain(), opts.interval)?;
    let vf = apply_v(f)?;
    let lap = radial_laplacian(f)?;
    let q = &opts.hankel.quadrature;
    let lhs = PnormCache::of_profile(&vf, q);
    let rhs = PnormCache::of_profile(&lap, q);
    let sides = Sides {
        theorem: Theorem::HardyRellich,
        n,
        beta: None,
        constant: "K_HR".into(),
        k: Box::new(move |p| Ok(k_hr(&HardyRellichQuery::new(n, p)?))),
    };
    run_check(sides, &lhs, &rhs, psi, &psi_v, interval, opts)
}

/// What the weighted Sobolev check receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Given {
    /// the function `f` itself
    F,
    /// `g = (-Delta)^{beta/2} f`; `f` is rebuilt as the Riesz potential of `g`
    G,
}

/// Checks `||W f||_{G(psi_W)} <= ||(-Delta)^{beta/2} f||_{G(psi)}` over the
/// Sobolev range of `psi`'s domain.
pub fn verify_weighted_sobolev<T: Real>(
    input: &RadialProfile<T>,
    beta: T,
    psi: &PsiFunction<T>,
    given: Given,
    opts: &VerifyOptions<T>,
) -> Result<VerificationReport<T>> {
    let n = input.n();
    let psi_w = build_psi_w(n, beta, psi)?;
    let interval = working_interval(psi_w.domain(), opts.interval)?;
    let (f, g) = match given {
        Given::F => (input.clone(), fractional_laplacian(input, beta, &opts.hankel)?),
        Given::G => (fractional_seminorm_input(input, beta, &opts.hankel)?, input.clone()),
    };
    let wf = apply_w(&f, beta)?;
    let q = &opts.hankel.quadrature;
    let lhs = PnormCache::of_profile(&wf, q);
    let rhs = PnormCache::of_profile(&g, q);
    let sides = Sides {
        theorem: Theorem::WeightedSobolev,
        n,
        beta: Some(beta),
        constant: "K_W read as K_S".into(),
        k: Box::new(move |p| k_s(&SobolevQuery::new(n, beta, p)?)),
    };
    run_check(sides, &lhs, &rhs, psi, &psi_w, interval, opts)
}

/// One member of a sharpness sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessPoint<T> {
    pub eps: T,
    pub ratio: T,
    pub argmax_p: T,
    /// `|V f|_{p*} / (K_HR(p*) |Delta f|_{p*})`
    pub ratio_at_p_star: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport<T> {
    pub n: usize,
    pub p_star: T,
    pub smoothing: T,
    pub tolerance: T,
    pub interval: [T; 2],
    pub points: Vec<SharpnessPoint<T>>,
    pub increasing: bool,
}

/// GLS Hardy-Rellich ratios of the truncated extremal profiles
/// `f_eps`, each measured against the natural function of `Delta f_eps` on
/// `(1, n/2)`. The ratios must increase strictly as `eps` decreases and stay
/// below `1 + tolerance`.
pub fn sharpness_probe_hr<T: Real>(
    n: usize,
    p_star: T,
    eps_sequence: &[T],
    smoothing: T,
    opts: &VerifyOptions<T>,
) -> Result<SharpnessReport<T>> {
    if eps_sequence.is_empty() {
        return Err(Error::Parameter("the eps sequence is empty".into()));
    }
    for &e in eps_sequence {
        if !(e > T::zero() && e < lit(0.5)) {
            return Err(Error::Parameter(format!("eps = {e} must lie in (0, 0.5)")));
        }
    }
    if eps_sequence.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Parameter("the eps sequence must be strictly decreasing".into()));
    }
    let domain = interval_hr(n, T::one(), lit::<T>(n as f64) / lit(2.0))?;
    let k_star = k_hr(&HardyRellichQuery::new(n, p_star)?);
    let q = &opts.hankel.quadrature;
    let mut points = Vec::with_capacity(eps_sequence.len());
    for &eps in eps_sequence {
        let f = extremal_family(n, p_star, eps, smoothing)?;
        let lap = radial_laplacian(&f)?;
        let psi = natural_psi(|p| lp_norm(&lap, p, q), domain, NATURAL_SAMPLES)?;
        let report = verify_hardy_rellich(&f, &psi, opts)?;
        let at_star = lp_norm(&apply_v(&f)?, p_star, q)? / (k_star * lp_norm(&lap, p_star, q)?);
        points.push(SharpnessPoint {
            eps,
            ratio: report.ratio,
            argmax_p: report.argmax_p,
            ratio_at_p_star: at_star,
            passed: report.passed,
        });
    }
    let increasing = points.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let bounded = points.iter().all(|pt| pt.ratio <= T::one() + opts.tolerance && pt.ratio_at_p_star <= T::one() + opts.tolerance);
    let report = SharpnessReport {
        n,
        p_star,
        smoothing,
        tolerance: opts.tolerance,
        interval: [domain.a, domain.b],
        points,
        increasing,
    };
    if !increasing || !bounded {
        let listing: Vec<String> =
            report.points.iter().map(|pt| format!("eps {} -> {}", pt.eps, pt.ratio)).collect();
        return Err(Error::Monotonicity(format!(
            "sharpness ratios must increase strictly as eps decreases and stay <= 1 + {}: {}",
            opts.tolerance,
            listing.join(", ")
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::{degenerate_psi_r, make_power_psi, natural_psi_exact, unit_psi, PnormFn};
    use crate::radial::{gaussian, gaussian_lp_norm};
    use std::sync::Arc;

    #[test]
    fn intervals() {
        let iv = interval_hr(6, 1.5, 10.0).unwrap();
        assert_eq!((iv.a, iv.b), (1.5, 3.0));
        let iv = interval_hr(5, 1.0, 2.5).unwrap();
        assert_eq!((iv.a, iv.b), (1.0, 2.5));
        assert!(matches!(interval_hr(4, 2.0, 10.0), Err(Error::EmptyInterval(_))));
        let iv = interval_jw(4, 1.0, 1.0, 4.0).unwrap();
        assert_eq!((iv.a, iv.b), (1.0, 4.0));
        let iv = interval_jw(3, 2.0, 1.2, 10.0).unwrap();
        assert_eq!((iv.a, iv.b), (1.2, 1.5));
        assert!(matches!(interval_jw(3, 2.0, 1.5, 10.0), Err(Error::EmptyInterval(_))));
    }

    #[test]
    fn weighted_psis() {
        let psi = unit_psi(1.0f64, 2.5).unwrap();
        let v = build_psi_v(5, &psi).unwrap();
        assert!((v.eval(2.0).unwrap() - 0.8).abs() < 1e-14);
        let psi3 = make_power_psi(1.0f64, 2.5, 0.0, 0.0).unwrap();
        let three = |p: f64| 3.0 * psi3.eval(p).unwrap();
        assert!((v.eval(2.0).unwrap() * 3.0 - 2.4).abs() < 1e-14 && three(2.0) == 3.0);
        let w = build_psi_w(4, 1.0, &unit_psi(1.0f64, 4.0).unwrap()).unwrap();
        assert!((w.eval(2.0).unwrap() - 1.0).abs() < 1e-12);
        let w2 = build_psi_w(5, 2.0, &psi).unwrap();
        for &p in &[1.1, 1.7, 2.4] {
            assert!((w2.eval(p).unwrap() / v.eval(p).unwrap() - 1.0).abs() < 1e-10);
        }
        let deg = degenerate_psi_r(2.0f64, Interval::new(1.0, 4.0).unwrap()).unwrap();
        let wd = build_psi_w(4, 1.0, &deg).unwrap();
        assert!(wd.eval(2.0).unwrap().is_finite());
        assert_eq!(wd.eval(2.5).unwrap(), f64::INFINITY);
        let blow = make_power_psi(1.0f64, 2.0, 1.0, 1.0).unwrap();
        let v4 = build_psi_v(4, &blow).unwrap();
        for &p in &[1.01f64, 1.5, 1.99] {
            let want = p * p / (8.0 * ((p - 1.0) * (2.0 - p)).powi(2));
            assert!((v4.eval(p).unwrap() / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_recovers_lr() {
        let f = gaussian::<f64>(3, 1.0).unwrap();
        let q = QuadratureSpec::default();
        for &r in &[1.3, 2.0, 3.7] {
            let psi = degenerate_psi_r(r, Interval::new(1.0, 5.0).unwrap()).unwrap();
            let res = gls_norm(&|p| lp_norm(&f, p, &q), &GlsSpace::over_domain(psi)).unwrap();
            assert_eq!(res.value, lp_norm(&f, r, &q).unwrap());
        }
    }

    #[test]
    fn natural_normalization_and_scan() {
        let dom = Interval::new(1.0, 3.0).unwrap();
        let exact: PnormFn<f64> = Arc::new(|p| Ok(gaussian_lp_norm(3, 1.0, p)));
        let psi = natural_psi_exact(exact, dom, NATURAL_SAMPLES).unwrap();
        let res = gls_norm(&|p| Ok(gaussian_lp_norm(3, 1.0, p)), &GlsSpace::over_domain(psi)).unwrap();
        assert_eq!(res.value, 1.0);

        let unit = unit_psi(1.5, 2.5).unwrap();
        let pn = |p: f64| Ok(gaussian_lp_norm(3, 1.0, p) * (1.0 + 0.3 * (-(p - 2.13) * (p - 2.13) * 40.0).exp()));
        let res = gls_norm(&pn, &GlsSpace::over_domain(unit)).unwrap();
        let mut dense: f64 = 0.0;
        for k in 0..10_000 {
            let p = 1.5 + (k as f64 + 0.5) / 10_000.0;
            dense = dense.max(pn(p).unwrap());
        }
        assert!(res.value >= res.samples.iter().map(|s| s.ratio).fold(0.0, f64::max));
        assert!(dense <= res.value * (1.0 + 1e-9), "{dense} vs {}", res.value);
    }

    #[test]
    fn hardy_rellich_gaussian() {
        let f = gaussian::<f64>(5, 1.0).unwrap();
        let q = QuadratureSpec::default();
        let lap = radial_laplacian(&f).unwrap();
        let psi = natural_psi(|p| lp_norm(&lap, p, &q), Interval::new(1.0, 2.5).unwrap(), NATURAL_SAMPLES).unwrap();
        let opts = VerifyOptions::hardy_rellich();
        let rep = verify_hardy_rellich(&f, &psi, &opts).unwrap();
        assert!(rep.passed && rep.ratio <= 1.0, "{}", rep.ratio);
        assert!((rep.rhs.value - 1.0).abs() < 1e-8);
        let rep7 = verify_hardy_rellich(&f.scaled(7.0), &psi, &opts).unwrap();
        assert!((rep7.ratio / rep.ratio - 1.0).abs() < 1e-12, "{} vs {}", rep7.ratio, rep.ratio);
    }

    #[test]
    fn sharpness_sequence() {
        let opts = VerifyOptions::hardy_rellich();
        let rep = sharpness_probe_hr(5, 1.8f64, &[0.1, 0.03, 0.01], 0.25, &opts).unwrap();
        assert!(rep.points.iter().all(|pt| pt.ratio > 0.0 && pt.ratio <= 1.0));
        assert!(rep.increasing);
    }

    #[test]
    fn sharpness_rejects_bad_sequences() {
        let opts = VerifyOptions::hardy_rellich();
        assert!(matches!(sharpness_probe_hr(5, 1.8f64, &[0.6], 0.25, &opts), Err(Error::Parameter(_))));
        assert!(matches!(sharpness_probe_hr(5, 1.8f64, &[0.01, 0.1], 0.25, &opts), Err(Error::Parameter(_))));
    }
}
