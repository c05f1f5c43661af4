//! Adaptive Gauss-Kronrod (10/21) integration and Gauss-Legendre rules.
//!
//! The adaptive driver bisects the panel with the largest error estimate
//! (global adaptivity, as in QUADPACK's QAG) and sums the final panels left
//! to right, so results do not depend on the order panels were refined in.

use crate::error::{Error, Result};
use crate::scalar::{kahan_sum, lit, Real};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_543_718,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// weights of the embedded 10-point Gauss rule, paired with XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Settings for one adaptive integral over `(0, inf)`-type radial domains.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub max_subdivisions: usize,
    /// Mandatory breakpoints, strictly increasing.
    pub split_points: Vec<T>,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: lit::<T>(1e-12).max(T::epsilon() * lit(64.0)),
            max_subdivisions: 4000,
            split_points: Vec::new(),
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(rel_tol: T, max_subdivisions: usize, split_points: Vec<T>) -> Result<Self> {
        let spec = Self { rel_tol, max_subdivisions, split_points };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) {
            return Err(Error::Parameter(format!("quadrature rel_tol = {} must be > 0", self.rel_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Parameter("quadrature max_subdivisions must be >= 1".into()));
        }
        if self.split_points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("quadrature split points must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    /// Integral of `|f|`, used to set absolute floors for sums of pieces.
    pub abs_value: T,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    abs_value: T,
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut e = err.abs();
    if res_asc != T::zero() && e != T::zero() {
        let scale = (lit::<T>(200.0) * e / res_asc).powf(lit(1.5));
        e = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let fifty_eps = lit::<T>(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        e = e.max(fifty_eps * res_abs);
    }
    e
}

/// One 21-point Kronrod panel with its embedded Gauss error estimate.
pub fn gauss_kronrod21<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T, T) {
    let center = (a + b) / lit(2.0);
    let half = (b - a) / lit(2.0);
    let f_center = f(center);
    let mut res_k = lit::<T>(WGK[10]) * f_center;
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * lit::<T>(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = lit::<T>(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k / lit(2.0);
    let mut res_asc = lit::<T>(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + lit::<T>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let err = rescale_error((res_k - res_g) * scale, res_abs * scale, res_asc * scale);
    (res_k * half, err, res_abs * scale)
}

/// Globally adaptive integral of `f` over `[a, b]` with the given interior
/// breakpoints. Converges when the summed error estimate is at most
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    breakpoints: &[T],
    rel_tol: T,
    abs_tol: T,
    max_subdivisions: usize,
) -> Result<Estimate<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Parameter(format!("integration limits must be finite (got [{a}, {b}])")));
    }
    if a == b {
        return Ok(Estimate { value: T::zero(), error: T::zero(), abs_value: T::zero(), panels: 0 });
    }
    if a > b {
        let e = integrate(f, b, a, breakpoints, rel_tol, abs_tol, max_subdivisions)?;
        return Ok(Estimate { value: -e.value, ..e });
    }
    let mut cuts = vec![a];
    for &p in breakpoints {
        if p > *cuts.last().unwrap() && p < b {
            cuts.push(p);
        }
    }
    cuts.push(b);
    let mut panels: Vec<Panel<T>> = cuts
        .windows(2)
        .map(|w| {
            let (value, error, abs_value) = gauss_kronrod21(&f, w[0], w[1]);
            Panel { a: w[0], b: w[1], value, error, abs_value }
        })
        .collect();
    let mut frozen = vec![false; panels.len()];
    let min_width = T::epsilon() * lit(100.0);
    loop {
        let total: T = kahan_sum(panels.iter().map(|p| p.value));
        let err: T = panels.iter().map(|p| p.error).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if !err.is_finite() || !total.is_finite() {
            return Err(Error::NonConvergence(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        if err <= tol {
            break;
        }
        let pick = panels
            .iter()
            .enumerate()
            .filter(|(i, _)| !frozen[*i])
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(i) = pick else {
            // roundoff floor reached everywhere
            if err <= tol * lit(1e3) {
                break;
            }
            return Err(Error::NonConvergence(format!(
                "roundoff limits accuracy on [{a}, {b}]: error {err} > tolerance {tol}"
            )));
        };
        let p = panels[i];
        let mid = (p.a + p.b) / lit(2.0);
        let scale = p.a.abs().max(p.b.abs()).max(T::min_positive_value());
        if (p.b - p.a) <= min_width * scale || mid <= p.a || mid >= p.b {
            frozen[i] = true;
            continue;
        }
        if panels.len() >= max_subdivisions {
            return Err(Error::NonConvergence(format!(
                "{max_subdivisions} subdivisions exhausted on [{a}, {b}]: error {err} > tolerance {tol}"
            )));
        }
        let (v1, e1, a1) = gauss_kronrod21(&f, p.a, mid);
        let (v2, e2, a2) = gauss_kronrod21(&f, mid, p.b);
        panels[i] = Panel { a: p.a, b: mid, value: v1, error: e1, abs_value: a1 };
        panels.push(Panel { a: mid, b: p.b, value: v2, error: e2, abs_value: a2 });
        frozen.push(false);
    }
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(Estimate {
        value: kahan_sum(panels.iter().map(|p| p.value)),
        error: panels.iter().map(|p| p.error).sum(),
        abs_value: kahan_sum(panels.iter().map(|p| p.abs_value)),
        panels: panels.len(),
    })
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![0.0f64; m];
    let mut weights = vec![0.0f64; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes.into_iter().map(lit).collect(), weights.into_iter().map(lit).collect())
}
