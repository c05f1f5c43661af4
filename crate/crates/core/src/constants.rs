//! Sharp constants of the Hardy-Rellich and weighted Sobolev inequalities.
//!
//! * `K_HR(n, p) = p p' / (n (n - 2p))`, `p' = p / (p - 1)`, for `n >= 3`,
//!   `1 < p < n/2`, bounding `| f / |x|^2 |_p <= K_HR | Delta f |_p`.
//! * `K_S(n, beta, p) = 2^{-beta} Gamma(n/(2p) - beta/2) Gamma(n/2 - n/(2p))
//!   / (Gamma((n + beta)/2 - n/(2p)) Gamma(n/(2p)))` for `n >= 2`,
//!   `0 < beta < n`, `1 < p < n/beta`, bounding
//!   `| |x|^{-beta} f |_p <= K_S | (-Delta)^{beta/2} f |_p`.
//!
//! Both blow up like `1 / ((p - 1)(p_max - p))` at the ends of their range;
//! the envelope `K(p) (p - 1)(p_max - p)` stays bounded.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};
use crate::special_fn::{ln_gamma, ln_gamma_stirling};

/// Parameters of the Hardy-Rellich constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyRellichQuery<T> {
    pub n: usize,
    pub p: T,
}

impl<T: Real> HardyRellichQuery<T> {
    pub fn new(n: usize, p: T) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!(
                "Hardy-Rellich constant needs dimension n >= 3 (got n = {n})"
            )));
        }
        let upper = from_usize::<T>(n) / lit(2.0);
        if !(p > T::one() && p < upper) {
            return Err(Error::Domain(format!(
                "p = {p} outside (1, n/2) = (1, {upper}) required by the Hardy-Rellich constant p p'/(n(n - 2p))"
            )));
        }
        Ok(Self { n, p })
    }

    /// Upper end `n/2` of the admissible exponent range.
    pub fn p_max(&self) -> T {
        from_usize::<T>(self.n) / lit(2.0)
    }
}

/// Parameters of the weighted Sobolev constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevQuery<T> {
    pub n: usize,
    pub beta: T,
    pub p: T,
}

impl<T: Real> SobolevQuery<T> {
    pub fn new(n: usize, beta: T, p: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "weighted Sobolev constant needs dimension n >= 2 (got n = {n})"
            )));
        }
        let nf = from_usize::<T>(n);
        if !(beta > T::zero() && beta < nf) {
            return Err(Error::Domain(format!("beta = {beta} outside (0, n) = (0, {n})")));
        }
        let upper = nf / beta;
        if !(p > T::one() && p < upper) {
            return Err(Error::Domain(format!(
                "p = {p} outside (1, n/beta) = (1, {upper}) required by the weighted Sobolev constant"
            )));
        }
        Ok(Self { n, beta, p })
    }

    /// Upper end `n/beta` of the admissible exponent range.
    pub fn p_max(&self) -> T {
        from_usize::<T>(self.n) / self.beta
    }
}

/// `K_HR(n, p) = p p' / (n (n - 2p))`.
pub fn k_hr<T: Real>(q: &HardyRellichQuery<T>) -> T {
    let n = from_usize::<T>(q.n);
    let p = q.p;
    let p_conj = p / (p - T::one());
    p * p_conj / (n * (n - lit::<T>(2.0) * p))
}

fn ln_gamma_checked<T: Real>(x: T, what: &str) -> Result<T> {
    // every Gamma argument is strictly positive inside the open domain
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("{what}: Gamma argument {x} is not positive")));
    }
    Ok(ln_gamma(x)?.0)
}

/// `K_S(n, beta, p)`, evaluated as a sum of log-Gamma values.
pub fn k_s<T: Real>(q: &SobolevQuery<T>) -> Result<T> {
    let n = from_usize::<T>(q.n);
    let two = lit::<T>(2.0);
    let (beta, p) = (q.beta, q.p);
    let a1 = (beta / (two * p)) * (n / beta - p);
    let a2 = n / two - n / (two * p);
    let b1 = (n + beta) / two - n / (two * p);
    let b2 = n / (two * p);
    let ln = -beta * two.ln() + ln_gamma_checked(a1, "K_S")? + ln_gamma_checked(a2, "K_S")?
        - ln_gamma_checked(b1, "K_S")?
        - ln_gamma_checked(b2, "K_S")?;
    Ok(ln.exp())
}

/// The Riesz-potential form of `K_S`: with `lambda = n/p - beta`,
/// `Gamma(lambda/2) Gamma((n - lambda - beta)/2) / (2^beta Gamma((lambda + beta)/2) Gamma((n - lambda)/2))`.
///
/// Evaluated through the Stirling log-Gamma route so it cross-checks both
/// the algebra of [`k_s`] and the Lanczos kernel behind it.
pub fn riesz_reciprocal<T: Real>(q: &SobolevQuery<T>) -> Result<T> {
    let n = from_usize::<T>(q.n);
    let two = lit::<T>(2.0);
    let lambda = n / q.p - q.beta;
    let lg = |x: T| -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::Domain(format!("Riesz quotient: Gamma argument {x} is not positive")));
        }
        Ok(ln_gamma_stirling(x)?.0)
    };
    let num = lg(lambda / two)? + lg((n - lambda - q.beta) / two)?;
    let den = q.beta * two.ln() + lg((lambda + q.beta) / two)? + lg((n - lambda) / two)?;
    Ok((num - den).exp())
}

/// Which end of the admissible exponent range an asymptotic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    /// `p -> 1+`
    Lower,
    /// `p -> p_max-`
    Upper,
}

/// Coefficient `c` with `K_HR(n, p) ~ c / (p - 1)` (lower) or
/// `K_HR(n, p) ~ c / (n/2 - p)` (upper).
pub fn k_hr_asymptotic<T: Real>(n: usize, end: End) -> Result<T> {
    if n < 3 {
        return Err(Error::Domain(format!("Hardy-Rellich asymptotics need n >= 3 (got n = {n})")));
    }
    let nf = from_usize::<T>(n);
    let two = lit::<T>(2.0);
    Ok(match end {
        End::Lower => (nf * (nf - two)).recip(),
        End::Upper => nf / (lit::<T>(4.0) * (nf - two)),
    })
}

/// Coefficient `c` with `K_S ~ c / (p - 1)` (lower) or
/// `K_S ~ c / (n/beta - p)` (upper).
///
/// Lower: `2^{1-beta} Gamma((n-beta)/2) / (n Gamma(beta/2) Gamma(n/2))`.
/// Upper: `2^{-beta} (2n/beta^2) Gamma((n-beta)/2) / (Gamma(beta/2) Gamma(n/2))`,
/// which is the limit of the closed form (at `beta = 2` it reduces to the
/// Hardy-Rellich coefficient `n / (4(n - 2))`).
pub fn k_s_asymptotic<T: Real>(n: usize, beta: T, end: End) -> Result<T> {
    let nf = from_usize::<T>(n);
    if n < 2 || !(beta > T::zero() && beta < nf) {
        return Err(Error::Domain(format!(
            "weighted Sobolev asymptotics need n >= 2 and beta in (0, n) (got n = {n}, beta = {beta})"
        )));
    }
    let two = lit::<T>(2.0);
    let gamma_part = ln_gamma_checked((nf - beta) / two, "K_S asymptotic")?
        - ln_gamma_checked(beta / two, "K_S asymptotic")?
        - ln_gamma_checked(nf / two, "K_S asymptotic")?;
    let g = gamma_part.exp();
    Ok(match end {
        End::Lower => two.powf(T::one() - beta) * g / nf,
        End::Upper => two.powf(-beta) * (two * nf / (beta * beta)) * g,
    })
}

/// Which constant an envelope refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantKind<T> {
    HardyRellich,
    Sobolev { beta: T },
}

impl<T: Real> ConstantKind<T> {
    /// Upper end of the exponent range for dimension `n`.
    pub fn p_max(&self, n: usize) -> T {
        match *self {
            ConstantKind::HardyRellich => from_usize::<T>(n) / lit(2.0),
            ConstantKind::Sobolev { beta } => from_usize::<T>(n) / beta,
        }
    }

    /// The sharp constant itself at `(n, p)`.
    pub fn constant(&self, n: usize, p: T) -> Result<T> {
        match *self {
            ConstantKind::HardyRellich => Ok(k_hr(&HardyRellichQuery::new(n, p)?)),
            ConstantKind::Sobolev { beta } => k_s(&SobolevQuery::new(n, beta, p)?),
        }
    }

    pub fn asymptotic(&self, n: usize, end: End) -> Result<T> {
        match *self {
            ConstantKind::HardyRellich => k_hr_asymptotic(n, end),
            ConstantKind::Sobolev { beta } => k_s_asymptotic(n, beta, end),
        }
    }
}

/// Bounded envelope `K(p) (p - 1) (p_max - p)`.
pub fn envelope<T: Real>(n: usize, p: T, kind: ConstantKind<T>) -> Result<T> {
    let k = kind.constant(n, p)?;
    Ok(k * (p - T::one()) * (kind.p_max(n) - p))
}

/// Limits of the envelope at `p -> 1+` and `p -> p_max-`, both equal to the
/// asymptotic coefficient times `p_max - 1`.
pub fn envelope_endpoint_limits<T: Real>(n: usize, kind: ConstantKind<T>) -> Result<(T, T)> {
    let span = kind.p_max(n) - T::one();
    Ok((kind.asymptotic(n, End::Lower)? * span, kind.asymptotic(n, End::Upper)? * span))
}

/// Empirical inf/sup of the envelope over a uniform interior grid.
///
/// For the Hardy-Rellich constant these estimate `C1(n)`, `C2(n)`; for the
/// weighted Sobolev constant `C3(n, beta)`, `C4(n, beta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeEstimate<T> {
    pub n: usize,
    pub kind: ConstantKind<T>,
    /// Number of grid points; point `k` is `1 + (p_max - 1) (k + 1) / (points + 1)`.
    pub points: usize,
    pub inf: T,
    pub argmin: T,
    pub sup: T,
    pub argmax: T,
    pub lower_limit: T,
    pub upper_limit: T,
}

pub fn envelope_grid<T: Real>(n: usize, kind: ConstantKind<T>, points: usize) -> Result<Vec<(T, T)>> {
    if points == 0 {
        return Err(Error::Parameter("envelope grid needs at least one point".into()));
    }
    let span = kind.p_max(n) - T::one();
    (0..points)
        .map(|k| {
            let p = T::one() + span * from_usize::<T>(k + 1) / from_usize::<T>(points + 1);
            envelope(n, p, kind).map(|e| (p, e))
        })
        .collect()
}

pub fn envelope_bounds<T: Real>(n: usize, kind: ConstantKind<T>, points: usize) -> Result<EnvelopeEstimate<T>> {
    let grid = envelope_grid(n, kind, points)?;
    let (argmin, inf) = grid.iter().copied().fold((T::nan(), T::infinity()), |acc, (p, e)| {
        if e < acc.1 {
            (p, e)
        } else {
            acc
        }
    });
    let (argmax, sup) = grid.iter().copied().fold((T::nan(), T::neg_infinity()), |acc, (p, e)| {
        if e > acc.1 {
            (p, e)
        } else {
            acc
        }
    });
    let (lower_limit, upper_limit) = envelope_endpoint_limits(n, kind)?;
    Ok(EnvelopeEstimate { n, kind, points, inf, argmin, sup, argmax, lower_limit, upper_limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hr(n: usize, p: f64) -> f64 {
        k_hr(&HardyRellichQuery::new(n, p).unwrap())
    }

    fn ks(n: usize, beta: f64, p: f64) -> f64 {
        k_s(&SobolevQuery::new(n, beta, p).unwrap()).unwrap()
    }

    #[test]
    fn hardy_rellich_values() {
        assert!((hr(5, 2.0) - 0.8).abs() < 1e-15);
        assert!((hr(6, 2.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(HardyRellichQuery::new(5, 2.5), Err(Error::Domain(_))));
        assert!(matches!(HardyRellichQuery::new(5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(HardyRellichQuery::new(2, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn sobolev_values() {
        assert!((ks(5, 2.0, 2.0) - 0.8).abs() < 1e-13);
        assert!((ks(4, 1.0, 2.0) - 1.0).abs() < 1e-13);
        let v: f64 = ks(3, 1.0, 1.5);
        let oracle = riesz_reciprocal(&SobolevQuery::new(3, 1.0, 1.5).unwrap()).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!(((v - oracle) / v).abs() < 1e-12);
        assert!(SobolevQuery::new(3, 3.0, 1.2).is_err());
        assert!(SobolevQuery::new(3, 1.0, 3.0).is_err());
        assert!(SobolevQuery::new(1, 0.5, 1.2).is_err());
    }

    #[test]
    fn beta_two_reduces_to_hardy_rellich() {
        for n in 5..=10usize {
            for k in 1..50 {
                let p = 1.0 + (n as f64 / 2.0 - 1.0) * k as f64 / 50.0;
                let r = ks(n, 2.0, p) / hr(n, p);
                assert!((r - 1.0).abs() < 1e-10, "n = {n} p = {p}: {r}");
            }
        }
    }

    #[test]
    fn asymptotic_coefficients() {
        assert!((k_hr_asymptotic::<f64>(5, End::Lower).unwrap() - 1.0 / 15.0).abs() < 1e-16);
        assert!((k_hr_asymptotic::<f64>(3, End::Upper).unwrap() - 0.75).abs() < 1e-16);
        assert!((k_s_asymptotic::<f64>(4, 2.0, End::Lower).unwrap() - 0.125).abs() < 1e-15);
        // (n = 3, beta = 1): 2^{-1} * 6 * Gamma(1) / (Gamma(1/2) Gamma(3/2)) = 6 / pi
        let up = k_s_asymptotic::<f64>(3, 1.0, End::Upper).unwrap();
        assert!((up - 6.0 / std::f64::consts::PI).abs() < 1e-14);
        for n in 3..=10usize {
            let a = k_s_asymptotic::<f64>(n, 2.0, End::Upper).unwrap();
            let b = k_hr_asymptotic::<f64>(n, End::Upper).unwrap();
            assert!(((a - b) / b).abs() < 1e-13);
        }
    }

    #[test]
    fn boundary_probes_match_asymptotics() {
        let d = 1e-4;
        for n in 3..=10usize {
            let c = k_hr_asymptotic::<f64>(n, End::Lower).unwrap();
            assert!((hr(n, 1.0 + d) * d / c - 1.0).abs() < 1e-3);
            let c = k_hr_asymptotic::<f64>(n, End::Upper).unwrap();
            assert!((hr(n, n as f64 / 2.0 - d) * d / c - 1.0).abs() < 1e-3);
        }
        for &(n, beta) in &[(5usize, 1.0f64), (3, 0.5), (4, 2.5), (2, 1.0)] {
            let c = k_s_asymptotic(n, beta, End::Lower).unwrap();
            assert!((ks(n, beta, 1.0 + d) * d / c - 1.0).abs() < 1e-3);
            let c = k_s_asymptotic(n, beta, End::Upper).unwrap();
            assert!((ks(n, beta, n as f64 / beta - d) * d / c - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn envelope_closed_form_and_limits() {
        for k in 1..1000 {
            let p = 1.0 + k as f64 / 1000.0;
            let e = envelope(4, p, ConstantKind::HardyRellich).unwrap();
            assert!((e - p * p / 8.0).abs() < 1e-12);
        }
        let (lo, hi) = envelope_endpoint_limits::<f64>(4, ConstantKind::HardyRellich).unwrap();
        assert!((lo - 0.125).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        let est = envelope_bounds(5, ConstantKind::Sobolev { beta: 1.0f64 }, 200).unwrap();
        assert!(est.inf > 0.0 && est.sup.is_finite() && est.inf <= est.sup);
    }

    #[test]
    fn envelope_bounded_by_endpoint_limits() {
        for n in 3..=10usize {
            for kind in [ConstantKind::HardyRellich, ConstantKind::Sobolev { beta: 1.0 }, ConstantKind::Sobolev { beta: 2.0 }] {
                let (lo, hi) = envelope_endpoint_limits::<f64>(n, kind).unwrap();
                let est = envelope_bounds(n, kind, 1000).unwrap();
                assert!(est.inf >= 0.5 * lo.min(hi), "n = {n} {kind:?}");
                assert!(est.sup <= 2.0 * lo.max(hi), "n = {n} {kind:?}");
            }
        }
    }

    #[test]
    fn single_precision_constants() {
        let v = k_hr(&HardyRellichQuery::new(5, 2.0f32).unwrap());
        assert!((v - 0.8).abs() < 1e-6);
        let v = k_s(&SobolevQuery::new(4, 1.0f32, 2.0).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-5);
    }
}
