use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

use super::{RadialProfile, TailClass};

/// `|exp(-t|x|^2)|_p = (pi / (t p))^{n / (2p)}` in `R^n`.
pub fn gaussian_lp_norm(n: usize, t: f64, p: f64) -> f64 {
    (std::f64::consts::PI / (t * p)).powf(n as f64 / (2.0 * p))
}

/// `exp(-t r^2)` with analytic derivatives.
pub fn gaussian<T: Real>(n: usize, t: T) -> Result<RadialProfile<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::Parameter(format!("gaussian rate t = {t} must be positive and finite")));
    }
    let two: T = lit(2.0);
    Ok(RadialProfile::raw(n, std::sync::Arc::new(move |r: T| (-t * r * r).exp()), T::zero(), TailClass::Gaussian { rate: t })?
        .with_derivatives(move |r: T| -two * t * r * (-t * r * r).exp(), move |r: T| {
            two * t * (two * t * r * r - T::one()) * (-t * r * r).exp()
        })
        .with_label(format!("gaussian({t})")))
}

/// `sum_i c_i exp(-t_i r^2)`.
pub fn gaussian_mixture<T: Real>(n: usize, terms: &[(T, T)]) -> Result<RadialProfile<T>> {
    let mut iter = terms.iter();
    let &(c, t) = iter
        .next()
        .ok_or_else(|| Error::Parameter("a gaussian mixture needs at least one term".into()))?;
    let mut acc = gaussian(n, t)?.scaled(c);
    for &(c, t) in iter {
        acc = acc.add(&gaussian(n, t)?.scaled(c))?;
    }
    Ok(acc)
}

/// Indicator of the ball of radius `radius`. Its derivatives are zero away
/// from the sphere `r = radius`; the distributional part of its Laplacian
/// on that sphere is not represented.
pub fn ball_indicator<T: Real>(n: usize, radius: T) -> Result<RadialProfile<T>> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::Parameter(format!("ball radius {radius} must be positive and finite")));
    }
    Ok(RadialProfile::raw(
        n,
        std::sync::Arc::new(move |r: T| if r <= radius { T::one() } else { T::zero() }),
        T::zero(),
        TailClass::Compact { radius },
    )?
    .with_derivatives(|_| T::zero(), |_| T::zero())
    .with_breakpoints(vec![radius])
    .with_label(format!("ball_indicator({radius})")))
}

/// Quintic smoothstep `10u^3 - 15u^4 + 6u^5` and its first two derivatives,
/// clamped to `[0, 1]`.
pub fn smoothstep5<T: Real>(u: T) -> (T, T, T) {
    if u <= T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    if u >= T::one() {
        return (T::one(), T::zero(), T::zero());
    }
    let (u2, u3) = (u * u, u * u * u);
    let s = u3 * (lit::<T>(10.0) - lit::<T>(15.0) * u + lit::<T>(6.0) * u2);
    let ds = lit::<T>(30.0) * u2 * (u - T::one()) * (u - T::one());
    let d2s = lit::<T>(60.0) * u * (u - T::one()) * (lit::<T>(2.0) * u - T::one());
    (s, ds, d2s)
}

/// `r^sigma` on `[eps (1 + smoothing), 1 - smoothing]`, blended to zero on
/// `[eps, eps (1 + smoothing)]` and `[1 - smoothing, 1]` with the quintic
/// smoothstep, so the profile is `C^2` and vanishes outside `[eps, 1]`.
pub fn power_truncated<T: Real>(n: usize, sigma: T, eps: T, smoothing: T) -> Result<RadialProfile<T>> {
    if !(eps > T::zero() && eps < lit(0.5)) {
        return Err(Error::Parameter(format!("truncation radius eps = {eps} must lie in (0, 0.5)")));
    }
    if !(smoothing > T::zero()) || !sigma.is_finite() {
        return Err(Error::Parameter(format!("smoothing = {smoothing} must be > 0")));
    }
    let inner_end = eps * (T::one() + smoothing);
    let outer_start = T::one() - smoothing;
    if !(inner_end < outer_start) {
        return Err(Error::Parameter(format!(
            "blending zones overlap: eps (1 + smoothing) = {inner_end} >= 1 - smoothing = {outer_start}"
        )));
    }
    let inner_width = eps * smoothing;
    // blend factor and its derivatives in r
    let blend = move |r: T| -> (T, T, T) {
        if r < eps || r > T::one() {
            (T::zero(), T::zero(), T::zero())
        } else if r < inner_end {
            let (s, ds, d2s) = smoothstep5((r - eps) / inner_width);
            (s, ds / inner_width, d2s / (inner_width * inner_width))
        } else if r > outer_start {
            let (s, ds, d2s) = smoothstep5((T::one() - r) / smoothing);
            (s, -ds / smoothing, d2s / (smoothing * smoothing))
        } else {
            (T::one(), T::zero(), T::zero())
        }
    };
    let value = move |r: T| {
        let (b, _, _) = blend(r);
        if b == T::zero() {
            T::zero()
        } else {
            b * r.powf(sigma)
        }
    };
    let d1 = move |r: T| {
        let (b, db, _) = blend(r);
        if b == T::zero() && db == T::zero() {
            return T::zero();
        }
        let p = r.powf(sigma);
        db * p + b * sigma * p / r
    };
    let d2 = move |r: T| {
        let (b, db, d2b) = blend(r);
        if b == T::zero() && db == T::zero() && d2b == T::zero() {
            return T::zero();
        }
        let p = r.powf(sigma);
        let two: T = lit(2.0);
        d2b * p + two * db * sigma * p / r + b * sigma * (sigma - T::one()) * p / (r * r)
    };
    Ok(RadialProfile::raw(n, std::sync::Arc::new(value), T::zero(), TailClass::Compact { radius: T::one() })?
        .with_derivatives(d1, d2)
        .with_breakpoints(vec![eps, inner_end, outer_start, T::one()])
        .with_label(format!("power_trunc({sigma}, {eps}, {smoothing})")))
}

/// Truncated `r^{2 - n/p_star}`, whose `V`-to-Laplacian `L_{p_star}` ratio
/// tends to the sharp constant as `eps -> 0`.
pub fn extremal_family<T: Real>(n: usize, p_star: T, eps: T, smoothing: T) -> Result<RadialProfile<T>> {
    let nt: T = lit(n as f64);
    if n < 3 {
        return Err(Error::Domain(format!("extremal profiles need n >= 3 (got n = {n})")));
    }
    if !(p_star > T::one() && p_star < nt / lit(2.0)) {
        return Err(Error::Domain(format!(
            "p_star = {p_star} must lie in (1, n/2) = (1, {})",
            nt / lit(2.0)
        )));
    }
    let sigma = lit::<T>(2.0) - nt / p_star;
    Ok(power_truncated(n, sigma, eps, smoothing)?.with_label(format!("extremal({p_star}, {eps}, {smoothing})")))
}

fn one() -> f64 {
    1.0
}

fn default_smoothing() -> f64 {
    0.25
}

/// Catalog entry, addressable by name (`gaussian(0.5)`) or as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Gaussian {
        #[serde(default = "one")]
        t: f64,
        #[serde(default = "one")]
        c: f64,
    },
    BallIndicator {
        #[serde(default = "one")]
        radius: f64,
    },
    PowerTrunc {
        sigma: f64,
        eps: f64,
        #[serde(default = "default_smoothing")]
        smoothing: f64,
    },
    Extremal {
        p_star: f64,
        eps: f64,
        #[serde(default = "default_smoothing")]
        smoothing: f64,
    },
    Mixture {
        terms: Vec<ProfileSpec>,
    },
}

impl ProfileSpec {
    pub fn build<T: Real>(&self, n: usize) -> Result<RadialProfile<T>> {
        let t = |x: f64| -> Result<T> {
            T::from_f64(x).ok_or_else(|| Error::Parameter(format!("{x} is not representable")))
        };
        match self {
            ProfileSpec::Gaussian { t: rate, c } => {
                let g = gaussian(n, t(*rate)?)?;
                Ok(if *c == 1.0 { g } else { g.scaled(t(*c)?) })
            }
            ProfileSpec::BallIndicator { radius } => ball_indicator(n, t(*radius)?),
            ProfileSpec::PowerTrunc { sigma, eps, smoothing } => {
                power_truncated(n, t(*sigma)?, t(*eps)?, t(*smoothing)?)
            }
            ProfileSpec::Extremal { p_star, eps, smoothing } => {
                extremal_family(n, t(*p_star)?, t(*eps)?, t(*smoothing)?)
            }
            ProfileSpec::Mixture { terms } => {
                let mut iter = terms.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| Error::Parameter("a mixture needs at least one term".into()))?;
                let mut acc = first.build(n)?;
                for term in iter {
                    acc = acc.add(&term.build(n)?)?;
                }
                Ok(acc.with_label(self.to_string()))
            }
        }
    }

    /// Whether the entry has a closed-form `L_p` norm.
    pub fn closed_form_norm(&self, n: usize, p: f64) -> Option<f64> {
        match self {
            ProfileSpec::Gaussian { t, c } => Some(c.abs() * gaussian_lp_norm(n, *t, p)),
            ProfileSpec::BallIndicator { radius } => {
                let nf = n as f64;
                let vol = std::f64::consts::PI.powf(nf / 2.0) * radius.powf(nf)
                    / crate::special_fn::gamma(nf / 2.0 + 1.0, &Default::default()).ok()?;
                Some(vol.powf(1.0 / p))
            }
            _ => None,
        }
    }
}

impl std::fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileSpec::Gaussian { t, c } if *c == 1.0 => write!(f, "gaussian({t})"),
            ProfileSpec::Gaussian { t, c } => write!(f, "{c}*gaussian({t})"),
            ProfileSpec::BallIndicator { radius } => write!(f, "ball_indicator({radius})"),
            ProfileSpec::PowerTrunc { sigma, eps, smoothing } => write!(f, "power_trunc({sigma}, {eps}, {smoothing})"),
            ProfileSpec::Extremal { p_star, eps, smoothing } => write!(f, "extremal({p_star}, {eps}, {smoothing})"),
            ProfileSpec::Mixture { terms } => {
                let parts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

/// Parses `name` or `name(arg, ...)`.
impl FromStr for ProfileSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parameter(format!("unbalanced parentheses in `{s}`")))?;
                let args = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .map(|a| a.parse::<f64>().map_err(|_| Error::Parameter(format!("`{a}` is not a number in `{s}`"))))
                    .collect::<Result<Vec<f64>>>()?;
                (s[..i].trim(), args)
            }
            None => (s, Vec::new()),
        };
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if args.len() < lo || args.len() > hi {
                Err(Error::Parameter(format!("`{name}` takes {lo}..={hi} arguments, got {}", args.len())))
            } else {
                Ok(())
            }
        };
        let smoothing = |i: usize| args.get(i).copied().unwrap_or(default_smoothing());
        match name {
            "gaussian" => {
                arity(0, 1)?;
                Ok(ProfileSpec::Gaussian { t: args.first().copied().unwrap_or(1.0), c: 1.0 })
            }
            "ball_indicator" | "ball" => {
                arity(0, 1)?;
                Ok(ProfileSpec::BallIndicator { radius: args.first().copied().unwrap_or(1.0) })
            }
            "power_trunc" => {
                arity(2, 3)?;
                Ok(ProfileSpec::PowerTrunc { sigma: args[0], eps: args[1], smoothing: smoothing(2) })
            }
            "extremal" => {
                arity(2, 3)?;
                Ok(ProfileSpec::Extremal { p_star: args[0], eps: args[1], smoothing: smoothing(2) })
            }
            other => Err(Error::Parameter(format!(
                "unknown profile `{other}` (expected gaussian, ball_indicator, power_trunc, extremal)"
            ))),
        }
    }
}
