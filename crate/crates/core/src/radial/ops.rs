use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

use super::{RadialFn, RadialProfile};

/// Centered five-point first and second derivatives with step
/// `max(1e-5, 1e-5 r)`. Points left of the origin are reflected, which is
/// exact for profiles that extend evenly through `r = 0`.
pub(crate) fn fd_derivatives<T: Real>(f: &RadialFn<T>, r: T) -> (T, T) {
    let h = lit::<T>(1e-5).max(lit::<T>(1e-5) * r);
    let at = |x: T| f(x.abs());
    let (m2, m1, c, p1, p2) = (at(r - h - h), at(r - h), f(r), at(r + h), at(r + h + h));
    let twelve: T = lit(12.0);
    let d1 = (m2 - lit::<T>(8.0) * m1 + lit::<T>(8.0) * p1 - p2) / (twelve * h);
    let d2 = (-m2 + lit::<T>(16.0) * m1 - lit::<T>(30.0) * c + lit::<T>(16.0) * p1 - p2) / (twelve * h * h);
    (d1, d2)
}

/// `Delta f = f'' + (n-1) f'/r`, with the limit `n f''(0)` at `r = 0`.
pub fn radial_laplacian<T: Real>(f: &RadialProfile<T>) -> Result<RadialProfile<T>> {
    let n1: T = lit((f.n() - 1) as f64);
    let nt: T = lit(f.n() as f64);
    let value: RadialFn<T> = match (&f.d1, &f.d2) {
        (Some(d1), Some(d2)) => {
            let (d1, d2) = (Arc::clone(d1), Arc::clone(d2));
            Arc::new(move |r: T| if r == T::zero() { nt * d2(r) } else { d2(r) + n1 * d1(r) / r })
        }
        _ if f.finite_differences => {
            let v = Arc::clone(&f.value);
            Arc::new(move |r: T| {
                let (d1, d2) = fd_derivatives(&v, r);
                if r == T::zero() {
                    nt * d2
                } else {
                    d2 + n1 * d1 / r
                }
            })
        }
        _ => {
            return Err(Error::Smoothness(format!(
                "the Laplacian of `{}` needs analytic derivatives or finite differences",
                f.label
            )))
        }
    };
    let oe = if f.origin_exponent == T::zero() { T::zero() } else { f.origin_exponent - lit(2.0) };
    let mut out = RadialProfile::raw(f.n, value, oe, f.tail.shifted(lit(2.0)))?
        .with_breakpoints(f.breakpoints.clone())
        .with_finite_differences(f.finite_differences)
        .with_label(format!("lap({})", f.label));
    out.spectrum = f.spectrum.as_ref().map(|s| Arc::new(s.with_multiplier_power(lit(2.0)).scaled(-T::one())));
    Ok(out)
}

fn weight<T: Real>(r: T, exponent: T) -> T {
    if exponent == lit(2.0) {
        r * r
    } else {
        r.powf(exponent)
    }
}

fn divide_by_power<T: Real>(f: &RadialProfile<T>, exponent: T, label: String) -> Result<RadialProfile<T>> {
    let v = Arc::clone(&f.value);
    let value: RadialFn<T> = Arc::new(move |r: T| v(r) / weight(r, exponent));
    let derivs = match (&f.d1, &f.d2) {
        (Some(d1), Some(d2)) => {
            let (v, d1a, d1b, d2) = (Arc::clone(&f.value), Arc::clone(d1), Arc::clone(d1), Arc::clone(d2));
            let v2 = Arc::clone(&f.value);
            let e = exponent;
            // (r^{-e} f)' = r^{-e} (f' - e f / r)
            let g1: RadialFn<T> = Arc::new(move |r: T| (d1a(r) - e * v(r) / r) / weight(r, e));
            // (r^{-e} f)'' = r^{-e} (f'' - 2 e f'/r + e (e+1) f / r^2)
            let g2: RadialFn<T> = Arc::new(move |r: T| {
                (d2(r) - lit::<T>(2.0) * e * d1b(r) / r + e * (e + T::one()) * v2(r) / (r * r)) / weight(r, e)
            });
            (Some(g1), Some(g2))
        }
        _ => (None, None),
    };
    Ok(RadialProfile::raw(f.n, value, f.origin_exponent - exponent, f.tail.shifted(exponent))?
        .with_derivative_fns(derivs.0, derivs.1)
        .with_breakpoints(f.breakpoints.clone())
        .with_finite_differences(f.finite_differences)
        .with_label(label))
}

/// `V[f](r) = f(r) / r^2`.
pub fn apply_v<T: Real>(f: &RadialProfile<T>) -> Result<RadialProfile<T>> {
    divide_by_power(f, lit(2.0), format!("V({})", f.label))
}

/// `W[f](r) = r^{-beta} f(r)` for `0 < beta < n`.
pub fn apply_w<T: Real>(f: &RadialProfile<T>, beta: T) -> Result<RadialProfile<T>> {
    let nt: T = lit(f.n as f64);
    if !(beta > T::zero() && beta < nt) {
        return Err(Error::Domain(format!("W needs beta in (0, n) = (0, {}) (got beta = {beta})", f.n)));
    }
    divide_by_power(f, beta, format!("W_{beta}({})", f.label))
}

#[cfg(test)]
mod tests {
    use super::super::{ball_indicator, gaussian, lp_norm, TailClass};
    use super::*;
    use crate::quadrature::QuadratureSpec;

    #[test]
    fn gaussian_laplacian() {
        for n in 2..=6 {
            let f = gaussian::<f64>(n, 1.0).unwrap();
            let lap = radial_laplacian(&f).unwrap();
            for &r in &[1e-3, 0.3, 1.0, 2.5] {
                let want = (4.0 * r * r - 2.0 * n as f64) * (-r * r as f64).exp();
                assert!((lap.eval(r) - want).abs() < 1e-13 * want.abs().max(1.0));
            }
            assert_eq!(lap.eval(0.0), -2.0 * n as f64);
        }
    }

    #[test]
    fn finite_difference_laplacian() {
        let f = RadialProfile::new(3, |r: f64| (-r * r).exp(), 0.0, TailClass::Gaussian { rate: 1.0 })
            .unwrap()
            .with_finite_differences(true);
        let lap = radial_laplacian(&f).unwrap();
        for &r in &[1e-6f64, 0.5, 1.7] {
            let want = (4.0 * r * r - 6.0) * (-r * r).exp();
            assert!((lap.eval(r) - want).abs() < 1e-5, "r={r}: {} vs {want}", lap.eval(r));
        }
        let bare = RadialProfile::new(3, |r: f64| (-r * r).exp(), 0.0, TailClass::Gaussian { rate: 1.0 }).unwrap();
        assert!(matches!(radial_laplacian(&bare), Err(Error::Smoothness(_))));
    }

    #[test]
    fn constant_and_linearity() {
        let c = ball_indicator::<f64>(3, 2.0).unwrap();
        let lap = radial_laplacian(&c).unwrap();
        assert_eq!(lap.eval(0.7), 0.0);
        let f = gaussian::<f64>(4, 1.0).unwrap();
        let g = gaussian::<f64>(4, 0.3).unwrap().scaled(-2.5);
        let sum = radial_laplacian(&f.add(&g).unwrap()).unwrap();
        let (lf, lg) = (radial_laplacian(&f).unwrap(), radial_laplacian(&g).unwrap());
        for &r in &[0.01, 0.4, 1.3, 3.0] {
            let s = lf.eval(r) + lg.eval(r);
            assert!((sum.eval(r) - s).abs() <= 1e-14 * s.abs().max(1.0));
        }
    }

    #[test]
    fn multipliers() {
        let f = gaussian::<f64>(3, 1.0).unwrap();
        let v = apply_v(&f).unwrap();
        let w = apply_w(&f, 2.0).unwrap();
        for &r in &[1e-4, 0.2, 1.0, 3.3] {
            assert_eq!(v.eval(r), w.eval(r));
            assert_eq!(v.derivative1(r).unwrap(), w.derivative1(r).unwrap());
        }
        assert_eq!(v.origin_exponent(), -2.0);
        assert!(matches!(apply_w(&f, 3.0), Err(Error::Domain(_))));
        assert!(matches!(apply_w(&f, 0.0), Err(Error::Domain(_))));

        let sq = RadialProfile::new(3, |r: f64| if r <= 1.0 { r * r } else { 0.0 }, 2.0, TailClass::Compact { radius: 1.0 })
            .unwrap();
        assert_eq!(apply_v(&sq).unwrap().eval(0.37), 1.0);

        let ball = ball_indicator::<f64>(3, 1.0).unwrap();
        let wb = apply_w(&ball, 1.0).unwrap();
        let got = lp_norm(&wb, 2.0, &QuadratureSpec::default()).unwrap();
        assert!((got - (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn weighted_derivatives() {
        let f = gaussian::<f64>(3, 1.0).unwrap();
        let w = apply_w(&f, 0.7).unwrap();
        let fd = w.clone().with_derivative_fns(None, None).with_finite_differences(true);
        for &r in &[0.3, 1.1, 2.0] {
            assert!((w.derivative1(r).unwrap() - fd.derivative1(r).unwrap()).abs() < 1e-8);
            assert!((w.derivative2(r).unwrap() - fd.derivative2(r).unwrap()).abs() < 1e-5);
        }
    }
}
