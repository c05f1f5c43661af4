//! Generating weights `psi` of Grand Lebesgue Spaces.
//!
//! A `psi` is a positive function on an exponent interval `(a, b)`,
//! `1 <= a < b <= inf`. The space `G(psi)` collects the functions with
//! `sup_p |f|_p / psi(p) < inf`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::ConstantKind;
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::scalar::{chebyshev_lobatto, lit, to_f64, Real};

/// Fraction of the interval width kept clear of each endpoint when sampling.
pub const ENDPOINT_OFFSET: f64 = 1e-6;

/// Default number of Chebyshev samples for tabulated natural functions.
pub const NATURAL_SAMPLES: usize = 257;

/// A map `p -> |g|_p` (or any positive function of the exponent).
pub type PnormFn<T> = Arc<dyn Fn(T) -> Result<T> + Send + Sync>;

/// Open exponent interval `(a, b)` with `1 <= a < b <= inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> Interval<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a >= T::one()) || !a.is_finite() {
            return Err(Error::Domain(format!("exponent interval needs 1 <= a (got a = {a})")));
        }
        if !(b > a) {
            return Err(Error::EmptyInterval(format!("({a}, {b}) is empty")));
        }
        Ok(Self { a, b })
    }

    pub fn is_bounded(&self) -> bool {
        self.b.is_finite()
    }

    /// Open-interval membership.
    pub fn contains(&self, p: T) -> bool {
        p > self.a && p < self.b
    }

    pub fn width(&self) -> T {
        self.b - self.a
    }

    /// Open intersection; errors when it is empty.
    pub fn intersect(&self, other: &Interval<T>) -> Result<Interval<T>> {
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        if !(b > a) {
            return Err(Error::EmptyInterval(format!(
                "({}, {}) and ({}, {}) do not overlap",
                self.a, self.b, other.a, other.b
            )));
        }
        Ok(Interval { a, b })
    }

    /// The closed sampling range `[a + d, b - d]`, `d = ENDPOINT_OFFSET (b - a)`.
    pub fn sampling_range(&self) -> Result<(T, T)> {
        if !self.is_bounded() {
            return Err(Error::Domain(format!(
                "cannot sample the unbounded interval ({}, inf); choose a finite working interval",
                self.a
            )));
        }
        let d = self.width() * lit(ENDPOINT_OFFSET);
        Ok((self.a + d, self.b - d))
    }

    /// `count` Chebyshev-Lobatto points of the sampling range.
    pub fn chebyshev_interior(&self, count: usize) -> Result<Vec<T>> {
        let (lo, hi) = self.sampling_range()?;
        Ok(chebyshev_lobatto(lo, hi, count))
    }
}

impl<T: Real> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_finite() {
            write!(f, "({}, {})", self.a, self.b)
        } else {
            write!(f, "({}, inf)", self.a)
        }
    }
}

/// Tabulated `psi` with an optional exact evaluator.
#[derive(Clone)]
pub struct NaturalTable<T> {
    table: MonotoneCubic<T>,
    exact: Option<PnormFn<T>>,
    members: usize,
}

impl<T: Real> NaturalTable<T> {
    pub fn samples(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.table.xs().iter().copied().zip(self.table.ys().iter().copied())
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Number of functions whose pointwise supremum produced the table.
    pub fn members(&self) -> usize {
        self.members
    }
}

#[derive(Clone)]
pub enum PsiKind<T> {
    /// `(p - a)^{-beta} (b - p)^{-gamma}` on a bounded interval.
    Power { beta: T, gamma: T },
    /// `(p - a)^{-beta}` on `(a, h)` and `p^{|gamma|}` on `[h, inf)`.
    PowerInfinite { beta: T, gamma: T, h: T },
    /// `p -> |g|_p` for one function.
    Natural(NaturalTable<T>),
    /// `p -> sup_t |g_t|_p` for a family.
    FamilyNatural(NaturalTable<T>),
    /// `1` at `p = r`, `+inf` elsewhere.
    DegenerateR { r: T },
    /// `K(n, p) * base(p)` for a sharp constant `K`.
    Weighted { base: Box<PsiFunction<T>>, n: usize, constant: ConstantKind<T> },
}

/// A `psi` function together with its domain.
#[derive(Clone)]
pub struct PsiFunction<T> {
    domain: Interval<T>,
    kind: PsiKind<T>,
}

impl<T: Real> fmt::Debug for PsiFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PsiFunction")
            .field("kind", &self.kind_name())
            .field("domain", &self.domain)
            .finish()
    }
}

/// `(a, b, beta, gamma)` power family on a bounded interval.
pub fn make_power_psi<T: Real>(a: T, b: T, beta: T, gamma: T) -> Result<PsiFunction<T>> {
    let domain = Interval::new(a, b)?;
    if !domain.is_bounded() {
        return Err(Error::Domain("the power family needs a finite upper end b".into()));
    }
    if !(beta >= T::zero() && gamma >= T::zero()) {
        return Err(Error::Domain(format!(
            "power family needs beta >= 0 and gamma >= 0 (got beta = {beta}, gamma = {gamma})"
        )));
    }
    Ok(PsiFunction { domain, kind: PsiKind::Power { beta, gamma } })
}

/// The constant weight `psi = 1` on `(a, b)`.
pub fn unit_psi<T: Real>(a: T, b: T) -> Result<PsiFunction<T>> {
    make_power_psi(a, b, T::zero(), T::zero())
}

/// Root `h > a` of `(h - a)^{-beta} = h^{-gamma}` for `gamma < 0`.
///
/// The left side decreases and the right side increases in `h`, so the root
/// is unique when it exists; it is bracketed and bisected in log form.
pub fn solve_continuity_h<T: Real>(a: T, beta: T, gamma: T) -> Result<T> {
    if !(a >= T::one()) || !(beta >= T::zero()) || !(gamma < T::zero()) {
        return Err(Error::Domain(format!(
            "continuity equation needs a >= 1, beta >= 0, gamma < 0 (got a = {a}, beta = {beta}, gamma = {gamma})"
        )));
    }
    let g = |h: T| -beta * (h - a).ln() + gamma * h.ln();
    let mut lo = a + (a * T::epsilon() * lit(4.0)).max(T::min_positive_value());
    if !(g(lo) > T::zero()) {
        return Err(Error::RootFinding(format!(
            "(h - a)^(-beta) = h^(-gamma) has no root in (a, inf) for a = {a}, beta = {beta}, gamma = {gamma}: \
             the left side does not exceed the right side near h = a"
        )));
    }
    let mut hi = a + T::one();
    let mut expansions = 0;
    while g(hi) > T::zero() {
        lo = hi;
        hi = a + (hi - a) * lit(2.0);
        expansions += 1;
        if expansions > 2000 || !hi.is_finite() {
            return Err(Error::RootFinding(format!(
                "no sign change bracketing the continuity root for a = {a}, beta = {beta}, gamma = {gamma}"
            )));
        }
    }
    for _ in 0..400 {
        let mid = lo + (hi - lo) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = if g(lo).abs() < g(hi).abs() { lo } else { hi };
    let lhs = (h - a).powf(-beta);
    let rhs = h.powf(-gamma);
    if (lhs - rhs).abs() > lit::<T>(1e-12).max(T::epsilon() * lit(64.0)) * rhs {
        return Err(Error::RootFinding(format!(
            "continuity root residual too large at h = {h}: {lhs} vs {rhs}"
        )));
    }
    Ok(h)
}

/// Piecewise power family for `b = inf`, continuous at the root `h`.
pub fn make_power_psi_infinite<T: Real>(a: T, beta: T, gamma: T) -> Result<PsiFunction<T>> {
    let h = solve_continuity_h(a, beta, gamma)?;
    Ok(PsiFunction {
        domain: Interval::new(a, T::infinity())?,
        kind: PsiKind::PowerInfinite { beta, gamma, h },
    })
}

fn sample_positive<T: Real, F>(pnorm: &F, grid: &[T]) -> Result<Vec<T>>
where
    F: Fn(T) -> Result<T> + Sync,
{
    let values: Vec<T> = grid.par_iter().map(|&p| pnorm(p)).collect::<Result<_>>()?;
    for (&p, &v) in grid.iter().zip(&values) {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "natural function value at p = {p} is {v}; it must be finite and positive"
            )));
        }
    }
    Ok(values)
}

/// Natural function of one function, tabulated at `samples` Chebyshev
/// points of the domain and interpolated monotonically between them.
pub fn natural_psi<T: Real, F>(pnorm: F, domain: Interval<T>, samples: usize) -> Result<PsiFunction<T>>
where
    F: Fn(T) -> Result<T> + Sync,
{
    let grid = domain.chebyshev_interior(samples)?;
    let values = sample_positive(&pnorm, &grid)?;
    let table = MonotoneCubic::new(grid, values)?.with_sample_floor();
    Ok(PsiFunction {
        domain,
        kind: PsiKind::Natural(NaturalTable { table, exact: None, members: 1 }),
    })
}

/// Natural function with a closed-form evaluator; the table is kept for
/// serialization and the evaluator answers every query.
pub fn natural_psi_exact<T: Real>(pnorm: PnormFn<T>, domain: Interval<T>, samples: usize) -> Result<PsiFunction<T>> {
    let grid = domain.chebyshev_interior(samples)?;
    let values = sample_positive(&|p| pnorm(p), &grid)?;
    let table = MonotoneCubic::new(grid, values)?.with_sample_floor();
    Ok(PsiFunction {
        domain,
        kind: PsiKind::Natural(NaturalTable { table, exact: Some(pnorm), members: 1 }),
    })
}

/// Natural function from already sampled `(p, |g|_p)` pairs.
pub fn natural_psi_from_samples<T: Real>(samples: Vec<(T, T)>, domain: Interval<T>) -> Result<PsiFunction<T>> {
    for &(p, v) in &samples {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "natural function value at p = {p} is {v}; it must be finite and positive"
            )));
        }
        if !(p >= domain.a && p <= domain.b) {
            return Err(Error::Domain(format!("sample p = {p} lies outside the domain {domain}")));
        }
    }
    let (xs, ys): (Vec<T>, Vec<T>) = samples.into_iter().unzip();
    let table = MonotoneCubic::new(xs, ys)?.with_sample_floor();
    Ok(PsiFunction {
        domain,
        kind: PsiKind::Natural(NaturalTable { table, exact: None, members: 1 }),
    })
}

/// Natural function of a family: the pointwise supremum of the members'
/// `p`-norms. Exact when every member is evaluated exactly.
pub fn family_natural_psi<T: Real>(
    members: Vec<PnormFn<T>>,
    domain: Interval<T>,
    samples: usize,
    exact: bool,
) -> Result<PsiFunction<T>> {
    if members.is_empty() {
        return Err(Error::Parameter("a family natural function needs at least one member".into()));
    }
    let count = members.len();
    let members = Arc::new(members);
    let sup_fn = {
        let members = Arc::clone(&members);
        move |p: T| -> Result<T> {
            let mut best = T::neg_infinity();
            for m in members.iter() {
                let v = m(p)?;
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "family member norm at p = {p} is {v}; the family supremum must be finite"
                    )));
                }
                best = best.max(v);
            }
            Ok(best)
        }
    };
    let grid = domain.chebyshev_interior(samples)?;
    let values = sample_positive(&sup_fn, &grid)?;
    let table = MonotoneCubic::new(grid, values)?.with_sample_floor();
    let exact: Option<PnormFn<T>> = if exact { Some(Arc::new(sup_fn)) } else { None };
    Ok(PsiFunction {
        domain,
        kind: PsiKind::FamilyNatural(NaturalTable { table, exact, members: count }),
    })
}

/// `psi_r`: `1` at `p = r`, `+inf` elsewhere, so that `G(psi_r) = L_r`.
pub fn degenerate_psi_r<T: Real>(r: T, domain: Interval<T>) -> Result<PsiFunction<T>> {
    if !domain.contains(r) {
        return Err(Error::Domain(format!("r = {r} lies outside the domain {domain}")));
    }
    Ok(PsiFunction { domain, kind: PsiKind::DegenerateR { r } })
}

/// `K(n, p) * base(p)` on the intersection of `base`'s domain with the
/// constant's admissible range.
pub(crate) fn weighted_psi<T: Real>(
    base: &PsiFunction<T>,
    n: usize,
    constant: ConstantKind<T>,
    domain: Interval<T>,
) -> PsiFunction<T> {
    PsiFunction { domain, kind: PsiKind::Weighted { base: Box::new(base.clone()), n, constant } }
}

impl<T: Real> PsiFunction<T> {
    pub fn domain(&self) -> Interval<T> {
        self.domain
    }

    pub fn kind(&self) -> &PsiKind<T> {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            PsiKind::Power { .. } => "power",
            PsiKind::PowerInfinite { .. } => "power_infinite",
            PsiKind::Natural(_) => "natural",
            PsiKind::FamilyNatural(_) => "family_natural",
            PsiKind::DegenerateR { .. } => "degenerate_r",
            PsiKind::Weighted { constant: ConstantKind::HardyRellich, .. } => "weighted_hr",
            PsiKind::Weighted { constant: ConstantKind::Sobolev { .. }, .. } => "weighted_s",
        }
    }

    /// The exponent at which a degenerate `psi` is finite, if any.
    pub fn degenerate_exponent(&self) -> Option<T> {
        match &self.kind {
            PsiKind::DegenerateR { r } => Some(*r),
            PsiKind::Weighted { base, .. } => base.degenerate_exponent(),
            _ => None,
        }
    }

    /// The continuity root for the `b = inf` family.
    pub fn crossover(&self) -> Option<T> {
        match self.kind {
            PsiKind::PowerInfinite { h, .. } => Some(h),
            _ => None,
        }
    }

    /// `psi(p)` for `p` in the open domain. Degenerate weights return
    /// `+inf` away from their exponent.
    pub fn eval(&self, p: T) -> Result<T> {
        if !self.domain.contains(p) {
            return Err(Error::Domain(format!(
                "psi evaluated at p = {p} outside its domain {}",
                self.domain
            )));
        }
        match &self.kind {
            PsiKind::Power { beta, gamma } => {
                let left = if *beta == T::zero() { T::one() } else { (p - self.domain.a).powf(-*beta) };
                let right = if *gamma == T::zero() { T::one() } else { (self.domain.b - p).powf(-*gamma) };
                Ok(left * right)
            }
            PsiKind::PowerInfinite { beta, gamma, h } => {
                if p < *h {
                    Ok((p - self.domain.a).powf(-*beta))
                } else {
                    Ok(p.powf(gamma.abs()))
                }
            }
            PsiKind::Natural(t) | PsiKind::FamilyNatural(t) => match &t.exact {
                Some(f) => f(p),
                None => Ok(t.table.eval(p)),
            },
            PsiKind::DegenerateR { r } => Ok(if p == *r { T::one() } else { T::infinity() }),
            PsiKind::Weighted { base, n, constant } => {
                let k = constant.constant(*n, p)?;
                Ok(k * base.eval(p)?)
            }
        }
    }

    /// Serializable description.
    pub fn to_record(&self) -> PsiRecord {
        let d = self.domain;
        let b = if d.b.is_finite() { Some(to_f64(d.b)) } else { None };
        let mut rec = PsiRecord {
            kind: self.kind_name().to_string(),
            a: to_f64(d.a),
            b,
            beta: None,
            gamma: None,
            r: None,
            h: None,
            samples: Vec::new(),
            n: None,
            operator_beta: None,
            base: None,
        };
        match &self.kind {
            PsiKind::Power { beta, gamma } => {
                rec.beta = Some(to_f64(*beta));
                rec.gamma = Some(to_f64(*gamma));
            }
            PsiKind::PowerInfinite { beta, gamma, h } => {
                rec.beta = Some(to_f64(*beta));
                rec.gamma = Some(to_f64(*gamma));
                rec.h = Some(to_f64(*h));
            }
            PsiKind::Natural(t) | PsiKind::FamilyNatural(t) => {
                rec.samples = t.samples().map(|(p, v)| [to_f64(p), to_f64(v)]).collect();
            }
            PsiKind::DegenerateR { r } => rec.r = Some(to_f64(*r)),
            PsiKind::Weighted { base, n, constant } => {
                rec.n = Some(*n);
                if let ConstantKind::Sobolev { beta } = constant {
                    rec.operator_beta = Some(to_f64(*beta));
                }
                rec.base = Some(Box::new(base.to_record()));
            }
        }
        rec
    }

    /// Rebuilds a `psi` from its record. Natural functions come back as
    /// tables (closed-form evaluators are not serializable).
    pub fn from_record(rec: &PsiRecord) -> Result<Self> {
        let t = |x: f64| -> Result<T> {
            T::from_f64(x).ok_or_else(|| Error::Parameter(format!("value {x} not representable")))
        };
        let need = |v: Option<f64>, name: &str| -> Result<T> {
            t(v.ok_or_else(|| Error::Parameter(format!("psi record of kind {} needs `{name}`", rec.kind)))?)
        };
        let a = t(rec.a)?;
        let b = match rec.b {
            Some(b) => t(b)?,
            None => T::infinity(),
        };
        match rec.kind.as_str() {
            "power" => make_power_psi(a, b, need(rec.beta, "beta")?, need(rec.gamma, "gamma")?),
            "power_infinite" => make_power_psi_infinite(a, need(rec.beta, "beta")?, need(rec.gamma, "gamma")?),
            "natural" | "family_natural" => {
                let samples = rec
                    .samples
                    .iter()
                    .map(|s| Ok((t(s[0])?, t(s[1])?)))
                    .collect::<Result<Vec<_>>>()?;
                let mut psi = natural_psi_from_samples(samples, Interval::new(a, b)?)?;
                if rec.kind == "family_natural" {
                    if let PsiKind::Natural(table) = psi.kind {
                        psi.kind = PsiKind::FamilyNatural(table);
                    }
                }
                Ok(psi)
            }
            "degenerate_r" => degenerate_psi_r(need(rec.r, "r")?, Interval::new(a, b)?),
            "weighted_hr" | "weighted_s" => {
                let base_rec = rec
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::Parameter("weighted psi record needs `base`".into()))?;
                let base = PsiFunction::from_record(base_rec)?;
                let n = rec.n.ok_or_else(|| Error::Parameter("weighted psi record needs `n`".into()))?;
                let constant = if rec.kind == "weighted_hr" {
                    ConstantKind::HardyRellich
                } else {
                    ConstantKind::Sobolev { beta: need(rec.operator_beta, "operator_beta")? }
                };
                Ok(weighted_psi(&base, n, constant, Interval::new(a, b)?))
            }
            other => Err(Error::Parameter(format!("unknown psi kind `{other}`"))),
        }
    }
}

/// JSON form `{kind, a, b, beta, gamma, r, h, samples[]}`; `b = null` encodes
/// an infinite upper end. Weighted weights add `n`, `operator_beta`, `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiRecord {
    pub kind: String,
    pub a: f64,
    pub b: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub samples: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator_beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<PsiRecord>>,
}
