use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use gls_core::constants::{
    envelope, k_hr, k_s, riesz_reciprocal, ConstantKind, HardyRellichQuery, SobolevQuery,
};
use gls_core::gls::{
    gls_norm_with, interval_hr, interval_jw, sharpness_probe_hr, verify_hardy_rellich, verify_weighted_sobolev,
    Given, GlsSpace, SupOptions, VerificationReport, VerifyOptions,
};
use gls_core::psi::{
    degenerate_psi_r, make_power_psi, make_power_psi_infinite, natural_psi, unit_psi, Interval, PsiFunction,
    PsiRecord, NATURAL_SAMPLES,
};
use gls_core::quadrature::QuadratureSpec;
use gls_core::radial::{lp_norm, radial_laplacian, ProfileSpec, ORIGIN_CUTOFF};
use gls_core::spectral::{fractional_laplacian, HankelSpec, SAMPLE_RANGE};
use gls_core::Error;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::args::{Command, Flags, GivenArg, SweepKind};
use crate::output::{cell, Table};

pub const MAX_GRID: usize = 1_000_000;
const DEFAULT_EPS: [f64; 4] = [0.1, 0.03, 0.01, 0.003];

/// Why a run stopped early.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) if e.is_numerical() => 3,
            Failure::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Run<T> = Result<T, Failure>;

/// A finished run: the JSON report, its tabular form, and the verdict.
pub struct Outcome {
    pub report: Value,
    pub table: Table,
    pub passed: bool,
}

#[derive(Serialize, Default)]
struct Provenance {
    quadrature: QuadratureInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    sup_grid: Option<SupInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hankel: Option<HankelInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<PsiRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<String>,
}

#[derive(Serialize, Default)]
struct QuadratureInfo {
    rule: &'static str,
    rel_tol: f64,
    max_subdivisions: usize,
    origin_cutoff: f64,
}

#[derive(Serialize)]
struct SupInfo {
    points: usize,
    endpoint_offset: f64,
    refine: bool,
    refine_tol: f64,
}

#[derive(Serialize)]
struct HankelInfo {
    convention: &'static str,
    output_radii: usize,
    output_range: [f64; 2],
    max_panels: usize,
}

#[derive(Serialize)]
struct Report<'a, R> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
    provenance: &'a Provenance,
    #[serde(flatten)]
    result: R,
}

struct Ctx {
    command: Command,
    flags: Flags,
    quadrature: QuadratureSpec<f64>,
}

impl Ctx {
    fn need_n(&self) -> Run<usize> {
        self.flags.n.ok_or_else(|| Failure::Usage(format!("{} needs --n", self.command.name())))
    }

    fn need_p(&self) -> Run<f64> {
        self.flags.p.ok_or_else(|| Failure::Usage(format!("{} needs --p", self.command.name())))
    }

    fn need_beta(&self) -> Run<f64> {
        self.flags.beta.ok_or_else(|| Failure::Usage(format!("{} needs --beta", self.command.name())))
    }

    fn profile(&self) -> Run<ProfileSpec> {
        parse_profile(self.flags.f.as_deref().unwrap_or("gaussian"))
    }

    fn hankel(&self) -> HankelSpec<f64> {
        HankelSpec { quadrature: self.quadrature.clone(), ..HankelSpec::default() }
    }

    fn sup(&self) -> Run<SupOptions<f64>> {
        let points = self.flags.points.unwrap_or(gls_core::gls::GRID_POINTS);
        check_grid(points)?;
        Ok(SupOptions { grid_points: points, ..SupOptions::default() })
    }

    fn provenance(&self) -> Provenance {
        Provenance {
            quadrature: QuadratureInfo {
                rule: "adaptive Gauss-Kronrod 10/21",
                rel_tol: self.quadrature.rel_tol,
                max_subdivisions: self.quadrature.max_subdivisions,
                origin_cutoff: ORIGIN_CUTOFF,
            },
            ..Default::default()
        }
    }

    fn finish<R: Serialize>(&self, prov: &Provenance, result: R, table: Table, passed: bool) -> Run<Outcome> {
        let timestamp = if self.flags.no_timestamp {
            None
        } else {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            Some(format!("unix:{secs}"))
        };
        let report = Report {
            tool: "gls",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.name(),
            timestamp,
            provenance: prov,
            result,
        };
        let report = serde_json::to_value(&report).map_err(|e| Failure::Usage(format!("report serialization: {e}")))?;
        let mut table = table;
        let mut head = vec![format!("gls {} {}", env!("CARGO_PKG_VERSION"), self.command.name())];
        if let Some(ts) = report.get("timestamp").and_then(Value::as_str) {
            head.push(format!("timestamp {ts}"));
        }
        head.append(&mut table.comments);
        table.comments = head;
        Ok(Outcome { report, table, passed })
    }
}

fn check_grid(points: usize) -> Run<()> {
    if points == 0 {
        return Err(Failure::Usage("the grid is empty (--points 0)".into()));
    }
    if points > MAX_GRID {
        return Err(Failure::Usage(format!("grid of {points} points exceeds the limit of {MAX_GRID}")));
    }
    Ok(())
}

pub fn parse_profile(text: &str) -> Run<ProfileSpec> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| Failure::Usage(format!("--f JSON spec: {e}")));
    }
    if t.ends_with(".json") {
        let body = std::fs::read_to_string(t).map_err(|e| Failure::Usage(format!("cannot read --f file {t}: {e}")))?;
        return serde_json::from_str(&body).map_err(|e| Failure::Usage(format!("--f file {t}: {e}")));
    }
    Ok(t.parse::<ProfileSpec>()?)
}

fn call_args(spec: &str) -> Run<(String, Vec<f64>)> {
    let s = spec.trim();
    match s.find('(') {
        None => Ok((s.to_string(), Vec::new())),
        Some(i) => {
            let inner = s[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Failure::Usage(format!("unbalanced parentheses in `{s}`")))?;
            let args = inner
                .split(',')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(|a| a.parse::<f64>().map_err(|_| Failure::Usage(format!("`{a}` is not a number in `{s}`"))))
                .collect::<Run<Vec<f64>>>()?;
            Ok((s[..i].trim().to_string(), args))
        }
    }
}

/// Builds the psi named by `spec` on `domain`; `natural` supplies the
/// natural function when asked for.
fn parse_psi(
    spec: &str,
    domain: Interval<f64>,
    natural: impl FnOnce(Interval<f64>) -> Run<PsiFunction<f64>>,
) -> Run<PsiFunction<f64>> {
    if spec.trim().ends_with(".json") || Path::new(spec.trim()).is_file() {
        let body = std::fs::read_to_string(spec.trim())
            .map_err(|e| Failure::Usage(format!("cannot read --psi file {spec}: {e}")))?;
        let rec: PsiRecord = serde_json::from_str(&body).map_err(|e| Failure::Usage(format!("--psi file {spec}: {e}")))?;
        return Ok(PsiFunction::from_record(&rec)?);
    }
    let (name, args) = call_args(spec)?;
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let arity = |max: usize| -> Run<()> {
        if args.len() > max {
            Err(Failure::Usage(format!("psi `{name}` takes at most {max} arguments")))
        } else {
            Ok(())
        }
    };
    let bounded = || -> Run<f64> {
        if domain.is_bounded() {
            Ok(domain.b)
        } else {
            Err(Failure::Usage(format!("psi `{name}` needs a finite --b")))
        }
    };
    match name.as_str() {
        "natural" => {
            arity(0)?;
            natural(domain)
        }
        "unit" | "one" => {
            arity(0)?;
            Ok(unit_psi(domain.a, bounded()?)?)
        }
        "power" => {
            arity(2)?;
            Ok(make_power_psi(domain.a, bounded()?, arg(0, 1.0), arg(1, 1.0))?)
        }
        "power_infinite" => {
            arity(2)?;
            Ok(make_power_psi_infinite(domain.a, arg(0, 1.0), arg(1, 1.0))?)
        }
        "degenerate" => {
            if args.len() != 1 {
                return Err(Failure::Usage("psi `degenerate(r)` takes exactly one argument".into()));
            }
            Ok(degenerate_psi_r(args[0], domain)?)
        }
        other => Err(Failure::Usage(format!(
            "unknown psi `{other}` (expected natural, unit, power(beta, gamma), power_infinite(beta, gamma), degenerate(r) or a JSON file)"
        ))),
    }
}

pub fn run(command: Command, flags: Flags) -> Run<Outcome> {
    let mut quadrature = QuadratureSpec::default();
    if let Some(t) = flags.rel_tol {
        quadrature.rel_tol = t;
    }
    quadrature.validate()?;
    let ctx = Ctx { command, flags, quadrature };
    match command {
        Command::Constants => constants(&ctx),
        Command::Lpnorm => lpnorm(&ctx),
        Command::Glsnorm => glsnorm(&ctx),
        Command::VerifyHr => verify_hr(&ctx),
        Command::VerifySobolev => verify_sobolev(&ctx),
        Command::Sharpness => sharpness(&ctx),
        Command::Sweep => sweep(&ctx),
    }
}

#[derive(Serialize)]
struct ConstantsResult {
    n: usize,
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_hr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    envelope_hr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    riesz_reciprocal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    envelope_s: Option<f64>,
}

fn constants(ctx: &Ctx) -> Run<Outcome> {
    let (n, p) = (ctx.need_n()?, ctx.need_p()?);
    let mut res = ConstantsResult {
        n,
        p,
        beta: ctx.flags.beta,
        k_hr: None,
        envelope_hr: None,
        k_s: None,
        riesz_reciprocal: None,
        envelope_s: None,
    };
    let hr = HardyRellichQuery::new(n, p);
    match (ctx.flags.beta, hr) {
        (None, Err(e)) => return Err(e.into()),
        (_, Ok(q)) => {
            res.k_hr = Some(k_hr(&q));
            res.envelope_hr = Some(envelope(n, p, ConstantKind::HardyRellich)?);
        }
        (Some(_), Err(_)) => {}
    }
    if let Some(beta) = ctx.flags.beta {
        let q = SobolevQuery::new(n, beta, p)?;
        res.k_s = Some(k_s(&q)?);
        res.riesz_reciprocal = Some(riesz_reciprocal(&q)?);
        res.envelope_s = Some(envelope(n, p, ConstantKind::Sobolev { beta })?);
    }
    let opt = |x: Option<f64>| x.map(cell).unwrap_or_default();
    let mut table = Table::new(&["n", "p", "beta", "k_hr", "envelope_hr", "k_s", "riesz_reciprocal", "envelope_s"]);
    table.push(vec![
        n.to_string(),
        cell(p),
        opt(res.beta),
        opt(res.k_hr),
        opt(res.envelope_hr),
        opt(res.k_s),
        opt(res.riesz_reciprocal),
        opt(res.envelope_s),
    ]);
    ctx.finish(&ctx.provenance(), res, table, true)
}

#[derive(Serialize)]
struct LpResult {
    n: usize,
    p: f64,
    f: String,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_error: Option<f64>,
}

fn lpnorm(ctx: &Ctx) -> Run<Outcome> {
    let (n, p) = (ctx.need_n()?, ctx.need_p()?);
    let spec = ctx.profile()?;
    let f = spec.build::<f64>(n)?;
    let value = lp_norm(&f, p, &ctx.quadrature)?;
    let closed_form = spec.closed_form_norm(n, p);
    let rel_error = closed_form.map(|c| (value - c).abs() / c);
    let mut table = Table::new(&["n", "p", "value", "closed_form", "rel_error"]);
    table.comments.push(format!("f = {spec}"));
    table.push(vec![
        n.to_string(),
        cell(p),
        cell(value),
        closed_form.map(cell).unwrap_or_default(),
        rel_error.map(cell).unwrap_or_default(),
    ]);
    let mut prov = ctx.provenance();
    prov.f = Some(spec.to_string());
    ctx.finish(&prov, LpResult { n, p, f: spec.to_string(), value, closed_form, rel_error }, table, true)
}

fn domain_or(ctx: &Ctx, a: f64, b: f64) -> Run<Interval<f64>> {
    let (a, b) = (ctx.flags.a.unwrap_or(a), ctx.flags.b.unwrap_or(b));
    Ok(Interval::new(a, b)?)
}

#[derive(Serialize)]
struct GlsResult {
    n: usize,
    f: String,
    psi_kind: &'static str,
    interval: [f64; 2],
    #[serde(flatten)]
    norm: gls_core::gls::GlsNormResult<f64>,
}

fn glsnorm(ctx: &Ctx) -> Run<Outcome> {
    let n = ctx.need_n()?;
    let spec = ctx.profile()?;
    let f = spec.build::<f64>(n)?;
    let q = &ctx.quadrature;
    let domain = domain_or(ctx, 1.0, n as f64 / 2.0)?;
    let psi = parse_psi(ctx.flags.psi.as_deref().unwrap_or("unit"), domain, |d| {
        Ok(natural_psi(|p| lp_norm(&f, p, q), d, NATURAL_SAMPLES)?)
    })?;
    let working = if psi.domain().is_bounded() { psi.domain() } else { Interval::new(domain.a, ctx.flags.b.unwrap_or(domain.b))? };
    let space = GlsSpace::new(psi.clone(), working)?;
    let sup = ctx.sup()?;
    let norm = gls_norm_with(&|p| lp_norm(&f, p, q), &space, &sup)?;
    let mut table = Table::new(&["p", "ratio"]);
    table.comments.push(format!("f = {spec}, psi = {}, interval = {working}", psi.kind_name()));
    table.comments.push(format!("value = {}, argmax_p = {}", cell(norm.value), cell(norm.argmax_p)));
    for s in &norm.samples {
        table.push(vec![cell(s.p), cell(s.ratio)]);
    }
    let mut prov = ctx.provenance();
    prov.f = Some(spec.to_string());
    prov.psi = Some(psi.to_record());
    prov.sup_grid = Some(sup_info(&sup));
    let res = GlsResult {
        n,
        f: spec.to_string(),
        psi_kind: psi.kind_name(),
        interval: [working.a, working.b],
        norm,
    };
    ctx.finish(&prov, res, table, true)
}

fn sup_info(s: &SupOptions<f64>) -> SupInfo {
    SupInfo { points: s.grid_points, endpoint_offset: s.endpoint_offset, refine: s.refine, refine_tol: s.refine_tol }
}

fn hankel_info(h: &HankelSpec<f64>) -> HankelInfo {
    HankelInfo {
        convention: "unitary",
        output_radii: h.output_radii.len(),
        output_range: [
            h.output_radii.first().copied().unwrap_or(SAMPLE_RANGE.0),
            h.output_radii.last().copied().unwrap_or(SAMPLE_RANGE.1),
        ],
        max_panels: h.max_panels,
    }
}

fn verification_table(rep: &VerificationReport<f64>) -> Table {
    let mut table = Table::new(&["p", "lhs_p", "rhs_p", "margin"]);
    table.comments.push(format!(
        "theorem = {:?}, n = {}, interval = ({}, {}), ratio = {}, passed = {}, argmax_p = {}",
        rep.theorem,
        rep.n,
        cell(rep.interval[0]),
        cell(rep.interval[1]),
        cell(rep.ratio),
        rep.passed,
        cell(rep.argmax_p)
    ));
    for s in &rep.samples {
        table.push(vec![cell(s.p), cell(s.lhs_p), cell(s.rhs_p), cell(s.margin)]);
    }
    table
}

fn verify_options(ctx: &Ctx, mut opts: VerifyOptions<f64>) -> Run<VerifyOptions<f64>> {
    if let Some(t) = ctx.flags.tol {
        opts.tolerance = t;
    }
    opts.sup = ctx.sup()?;
    opts.hankel = ctx.hankel();
    Ok(opts)
}

fn verify_hr(ctx: &Ctx) -> Run<Outcome> {
    let n = ctx.need_n()?;
    let spec = ctx.profile()?;
    let f = spec.build::<f64>(n)?;
    let q = &ctx.quadrature;
    let domain = domain_or(ctx, 1.0, n as f64 / 2.0)?;
    let psi = parse_psi(ctx.flags.psi.as_deref().unwrap_or("natural"), domain, |d| {
        let lap = radial_laplacian(&f)?;
        let range = interval_hr(n, d.a, d.b)?;
        Ok(natural_psi(|p| lp_norm(&lap, p, q), range, NATURAL_SAMPLES)?)
    })?;
    let opts = verify_options(ctx, VerifyOptions::hardy_rellich())?;
    let rep = verify_hardy_rellich(&f, &psi, &opts)?;
    let mut prov = ctx.provenance();
    prov.f = Some(spec.to_string());
    prov.psi = Some(psi.to_record());
    prov.sup_grid = Some(sup_info(&opts.sup));
    prov.tolerance = Some(opts.tolerance);
    prov.margin_tolerance = Some(opts.margin_tolerance);
    let table = verification_table(&rep);
    let passed = rep.passed;
    ctx.finish(&prov, rep, table, passed)
}

fn verify_sobolev(ctx: &Ctx) -> Run<Outcome> {
    let (n, beta) = (ctx.need_n()?, ctx.need_beta()?);
    let spec = ctx.profile()?;
    let input = spec.build::<f64>(n)?;
    let given = match ctx.flags.given.unwrap_or(GivenArg::F) {
        GivenArg::F => Given::F,
        GivenArg::G => Given::G,
    };
    let opts = verify_options(ctx, VerifyOptions::weighted_sobolev())?;
    let q = &ctx.quadrature;
    let domain = domain_or(ctx, 1.0, n as f64 / beta)?;
    let psi = parse_psi(ctx.flags.psi.as_deref().unwrap_or("natural"), domain, |d| {
        let range = interval_jw(n, beta, d.a, d.b)?;
        let g = match given {
            Given::F => fractional_laplacian(&input, beta, &opts.hankel)?,
            Given::G => input.clone(),
        };
        Ok(natural_psi(|p| lp_norm(&g, p, q), range, NATURAL_SAMPLES)?)
    })?;
    let rep = verify_weighted_sobolev(&input, beta, &psi, given, &opts)?;
    let mut prov = ctx.provenance();
    prov.f = Some(spec.to_string());
    prov.psi = Some(psi.to_record());
    prov.sup_grid = Some(sup_info(&opts.sup));
    prov.hankel = Some(hankel_info(&opts.hankel));
    prov.tolerance = Some(opts.tolerance);
    prov.margin_tolerance = Some(opts.margin_tolerance);
    let table = verification_table(&rep);
    let passed = rep.passed;
    ctx.finish(&prov, SobolevResult { given, report: rep }, table, passed)
}

#[derive(Serialize)]
struct SobolevResult {
    given: Given,
    #[serde(flatten)]
    report: VerificationReport<f64>,
}

fn sharpness(ctx: &Ctx) -> Run<Outcome> {
    let (n, p_star) = (ctx.need_n()?, ctx.need_p()?);
    let eps = ctx.flags.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec());
    let smoothing = ctx.flags.smoothing.unwrap_or(0.25);
    let opts = verify_options(ctx, VerifyOptions::hardy_rellich())?;
    let rep = sharpness_probe_hr(n, p_star, &eps, smoothing, &opts)?;
    let mut table = Table::new(&["eps", "ratio", "ratio_at_p_star", "argmax_p", "passed"]);
    table.comments.push(format!("n = {n}, p_star = {}, smoothing = {}", cell(p_star), cell(smoothing)));
    for pt in &rep.points {
        table.push(vec![cell(pt.eps), cell(pt.ratio), cell(pt.ratio_at_p_star), cell(pt.argmax_p), pt.passed.to_string()]);
    }
    let mut prov = ctx.provenance();
    prov.sup_grid = Some(sup_info(&opts.sup));
    prov.tolerance = Some(opts.tolerance);
    prov.margin_tolerance = Some(opts.margin_tolerance);
    let passed = rep.increasing && rep.points.iter().all(|pt| pt.passed);
    ctx.finish(&prov, rep, table, passed)
}

#[derive(Serialize)]
struct SweepResult {
    kind: &'static str,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    constant: &'static str,
    range: [f64; 2],
    points: usize,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_diff: Option<f64>,
}

fn sweep(ctx: &Ctx) -> Run<Outcome> {
    let n = ctx.need_n()?;
    let points = ctx.flags.points.unwrap_or(100);
    check_grid(points)?;
    let kind = ctx.flags.kind.unwrap_or(SweepKind::Envelope);
    let constant = match (kind, ctx.flags.beta) {
        (SweepKind::KsVsKhr, _) => ConstantKind::HardyRellich,
        (_, Some(beta)) => ConstantKind::Sobolev { beta },
        (_, None) => ConstantKind::HardyRellich,
    };
    let p_max = constant.p_max(n);
    let lo = ctx.flags.a.unwrap_or(1.0).max(1.0);
    let hi = ctx.flags.b.unwrap_or(p_max).min(p_max);
    if !(hi > lo) {
        return Err(Failure::Core(Error::EmptyInterval(format!("sweep range ({lo}, {hi}) is empty"))));
    }
    let grid: Vec<f64> = (0..points).map(|k| lo + (hi - lo) * (k + 1) as f64 / (points + 1) as f64).collect();
    let with_closed_form = n == 4 && kind == SweepKind::Envelope && matches!(constant, ConstantKind::HardyRellich);
    let (columns, label): (&[&str], &str) = match (kind, constant) {
        (SweepKind::Envelope, ConstantKind::HardyRellich) if with_closed_form => {
            (&["index", "p", "constant", "envelope", "closed_form"], "K_HR")
        }
        (SweepKind::Envelope, ConstantKind::HardyRellich) => (&["index", "p", "constant", "envelope"], "K_HR"),
        (SweepKind::Envelope, _) => (&["index", "p", "constant", "envelope"], "K_S"),
        (SweepKind::Constant, ConstantKind::HardyRellich) => (&["index", "p", "constant"], "K_HR"),
        (SweepKind::Constant, _) => (&["index", "p", "constant", "riesz_reciprocal"], "K_S"),
        (SweepKind::KsVsKhr, _) => (&["index", "p", "k_s", "k_hr", "abs_diff", "rel_diff"], "K_S(beta = 2) vs K_HR"),
    };
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &p)| -> Run<Vec<f64>> {
            let idx = i as f64;
            Ok(match kind {
                SweepKind::Envelope => {
                    let k = constant.constant(n, p)?;
                    let e = envelope(n, p, constant)?;
                    let mut row = vec![idx, p, k, e];
                    if with_closed_form {
                        row.push(p * p / 8.0);
                    }
                    row
                }
                SweepKind::Constant => {
                    let k = constant.constant(n, p)?;
                    match constant {
                        ConstantKind::HardyRellich => vec![idx, p, k],
                        ConstantKind::Sobolev { beta } => {
                            vec![idx, p, k, riesz_reciprocal(&SobolevQuery::new(n, beta, p)?)?]
                        }
                    }
                }
                SweepKind::KsVsKhr => {
                    let s = k_s(&SobolevQuery::new(n, 2.0, p)?)?;
                    let h = k_hr(&HardyRellichQuery::new(n, p)?);
                    vec![idx, p, s, h, (s - h).abs(), (s / h - 1.0).abs()]
                }
            })
        })
        .collect::<Run<_>>()?;
    let max_abs_diff = match kind {
        SweepKind::KsVsKhr => Some(rows.iter().map(|r| r[4]).fold(0.0, f64::max)),
        _ => None,
    };
    let grid_text = format!(
        "uniform interior grid p_k = a + (b - a)(k + 1)/(points + 1), k = 0..{}, a = {}, b = {}",
        points - 1,
        cell(lo),
        cell(hi)
    );
    let kind_name = match kind {
        SweepKind::Envelope => "envelope",
        SweepKind::KsVsKhr => "ks-vs-khr",
        SweepKind::Constant => "constant",
    };
    let mut table = Table::new(columns);
    table.comments.push(format!("sweep kind = {kind_name}, n = {n}, constant = {label}, points = {points}"));
    table.comments.push(grid_text.clone());
    if with_closed_form {
        table.comments.push("closed_form = p^2/8".into());
    }
    if let Some(m) = max_abs_diff {
        table.comments.push(format!("max abs_diff = {}", cell(m)));
    }
    table.comments.push(format!("columns: {}", columns.join(", ")));
    for r in &rows {
        let mut cells = vec![(r[0] as usize).to_string()];
        cells.extend(r[1..].iter().map(|&x| cell(x)));
        table.push(cells);
    }
    let mut prov = ctx.provenance();
    prov.grid = Some(grid_text);
    let res = SweepResult {
        kind: kind_name,
        n,
        beta: match constant {
            ConstantKind::Sobolev { beta } => Some(beta),
            ConstantKind::HardyRellich if kind == SweepKind::KsVsKhr => Some(2.0),
            ConstantKind::HardyRellich => None,
        },
        constant: label,
        range: [lo, hi],
        points,
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
        max_abs_diff,
    };
    ctx.finish(&prov, res, table, true)
}
