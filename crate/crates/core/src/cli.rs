//! Command-line front end: each subcommand runs a suite of checks and emits a JSON report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a computation
//! errors out, 2 on argument or configuration errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::almansi::{almansi_decompose, is_weighted_harmonic};
use crate::error::{Error, Result};
use crate::kelvin::{asymptotic_fit, inversion_chain, kelvin_pde_check, kelvin_transform, value_at_origin};
use crate::liouville::{growth_sequences, make_bubble, positivity_scan, verify_bubble_constant_with_t};
use crate::operator::{apply_power, OperatorParams};
use crate::poly::Poly;
use crate::quadrature::{
    average_law_check, build_weighted_sphere_rule, divergence_identity_check, divergence_refinement_study,
    omega_a, weighted_ball_volume, RadialRule, ShrinkSchedule,
};
use crate::radial::RadialPowerExpr;
use crate::rational::{format_rational, parse_rational, rat, to_f64, Rational};
use crate::report::{CheckResult, Report};
use crate::sampling::{ball_points, sphere_points};

#[derive(Parser, Debug)]
#[command(name = "degen-calc", version, about = "Symbolic and numeric checks for the weighted Laplacian L_a = Δ + ((2a-1)/x_{n+1}) ∂_{n+1}")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Split an even polynomial into weighted-harmonic parts.
    Decompose,
    /// Kelvin involution, inversion chain and the transformed equation.
    KelvinCheck,
    /// Bubble constant extraction and the pointwise equation residual.
    Bubble,
    /// Divergence identity on the unit ball.
    Divergence,
    /// Average law for the fundamental-solution family.
    AverageLaw,
    /// Growth recursions and the blow-up trace.
    Growth,
    /// Weighted sphere moments and omega_a.
    Integrate,
    /// Sign of the intermediate powers on the bubble and in the far field.
    ScanPositivity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::KelvinCheck => "kelvin-check",
            Command::Bubble => "bubble",
            Command::Divergence => "divergence",
            Command::AverageLaw => "average-law",
            Command::Growth => "growth",
            Command::Integrate => "integrate",
            Command::ScanPositivity => "scan-positivity",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Rational literal such as `3/2`.
    #[arg(long, global = true, default_value = "1")]
    pub a: String,
    #[arg(long, global = true, default_value_t = 1)]
    pub p: u32,
    /// Exponent of the nonlinearity; defaults to the critical one (or 2 for `growth`).
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Sphere rules are exact up to degree `2 * qdeg - 1`.
    #[arg(long, global = true, default_value_t = 12)]
    pub qdeg: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the command's default tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 30)]
    pub kmax: usize,
    /// Polynomial input in the JSON exchange format.
    #[arg(long, global = true)]
    pub poly: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    /// Admit 1/2 < a < 1 (outside the supported range).
    #[arg(long, global = true)]
    pub allow_small_a: bool,
}

/// Validated inputs for one run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub command: String,
    pub n: usize,
    #[serde(with = "crate::rational::serde_str")]
    pub a: Rational,
    pub p: u32,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub alpha: Option<Rational>,
    pub qdeg: u32,
    pub seed: u64,
    pub tol: Option<f64>,
    pub kmax: usize,
    pub samples: usize,
    pub poly: Option<Poly>,
    pub allow_small_a: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    which: Option<Command>,
}

fn serialize_opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&format_rational(r)),
        None => s.serialize_none(),
    }
}

pub fn parse_poly_file(path: &Path) -> Result<Poly> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Poly::from_json(&text)
}

impl SuiteConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let o = &cli.options;
        let a = parse_rational(&o.a)?;
        let alpha = o.alpha.as_deref().map(parse_rational).transpose()?;
        if o.tol.is_some_and(|t| t.is_nan() || t < 0.0) {
            return Err(Error::InvalidParams("tolerance must be a non-negative number".into()));
        }
        let poly = o.poly.as_deref().map(parse_poly_file).transpose()?;
        let config = SuiteConfig {
            command: cli.command.name().into(),
            n: o.n,
            a,
            p: o.p,
            alpha,
            qdeg: o.qdeg,
            seed: o.seed,
            tol: o.tol,
            kmax: o.kmax,
            samples: o.samples,
            poly,
            allow_small_a: o.allow_small_a,
            out: o.out.clone(),
            which: Some(cli.command),
        };
        if cli.command != Command::Growth {
            let params = config.params()?;
            if let Some(p) = &config.poly {
                if p.dim() != params.dim() {
                    return Err(Error::DimensionMismatch { left: params.dim(), right: p.dim() });
                }
            }
        }
        if cli.command == Command::Decompose && config.poly.is_none() {
            return Err(Error::InvalidParams("decompose needs --poly".into()));
        }
        Ok(config)
    }

    pub fn params(&self) -> Result<OperatorParams> {
        if self.allow_small_a {
            OperatorParams::with_small_a(self.n, self.a.clone(), self.p)
        } else {
            OperatorParams::new(self.n, self.a.clone(), self.p)
        }
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// Parses arguments, runs the suite, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let config = match SuiteConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {} failed: {e}", config.command);
            return 1;
        }
    };
    let text = report.to_json();
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => println!("{text}"),
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {}", c.name);
    }
    if report.pass {
        0
    } else {
        1
    }
}

pub fn run(config: &SuiteConfig) -> Result<Report> {
    let inputs = serde_json::to_value(config).map_err(|e| Error::Parse(e.to_string()))?;
    let which = config.which.ok_or_else(|| Error::InvalidParams("no command".into()))?;
    if which == Command::Growth {
        let mut report = Report::new(which.name(), inputs, None);
        run_growth(config, &mut report)?;
        return Ok(report);
    }
    let params = config.params()?;
    let mut report = Report::new(which.name(), inputs, Some(params.summary()));
    match which {
        Command::Decompose => run_decompose(config, &params, &mut report)?,
        Command::KelvinCheck => run_kelvin(config, &params, &mut report)?,
        Command::Bubble => run_bubble(config, &params, &mut report)?,
        Command::Divergence => run_divergence(config, &params, &mut report)?,
        Command::AverageLaw => run_average_law(config, &params, &mut report)?,
        Command::Integrate => run_integrate(config, &params, &mut report)?,
        Command::ScanPositivity => run_positivity(config, &params, &mut report)?,
        Command::Growth => unreachable!("handled above"),
    }
    Ok(report)
}

fn run_decompose(config: &SuiteConfig, params: &OperatorParams, report: &mut Report) -> Result<()> {
    let p = config.poly.as_ref().expect("checked at parse time");
    let mut components = Vec::new();
    let mut reconstructed = Poly::zero(p.dim());
    let mut all_harmonic = true;
    for (degree, part) in p.homogeneous_components() {
        let d = almansi_decompose(&part, params)?;
        reconstructed = &reconstructed + &d.reconstruct(p.dim());
        let parts: Vec<Value> = d
            .parts
            .iter()
            .map(|(i, h)| {
                all_harmonic &= is_weighted_harmonic(h, params);
                json!({ "i": i, "degree": degree - 2 * i, "part": h, "text": h.to_string() })
            })
            .collect();
        components.push(json!({ "degree": degree, "parts": parts }));
    }
    let exact = reconstructed == *p;
    report.push(CheckResult::new("round_trip", exact && all_harmonic).details(json!({
        "input": p.to_string(),
        "components": components,
        "reconstruction_exact": exact,
        "parts_harmonic": all_harmonic,
    })));
    Ok(())
}

fn default_u(config: &SuiteConfig, dim: usize) -> RadialPowerExpr {
    match &config.poly {
        Some(p) => RadialPowerExpr::from_poly(p.clone()),
        None => RadialPowerExpr::from_poly(Poly::one(dim) + Poly::var(dim, 0)),
    }
}

/// Far-field leading coefficients of `(-L_a)^i u*`, `i = 0..p-1`, compared with `c_i u(0)`.
fn far_field_coefficients(u: &RadialPowerExpr, params: &OperatorParams, grid_q: u32) -> Result<Vec<(f64, f64)>> {
    let chain = inversion_chain(u, params)?;
    let u0 = to_f64(&value_at_origin(u).expect("checked by the chain"));
    let grid = build_weighted_sphere_rule(params, grid_q)?;
    let star = kelvin_transform(u, params)?;
    let mut out = Vec::new();
    for level in &chain.levels {
        let image = apply_power(&star, params, level.i)?;
        let l = rat(2) * params.bubble_exponent() + rat(2 * level.i as i64);
        let fit = asymptotic_fit(&image, &l, &[100.0, 200.0, 400.0, 800.0], &grid)?;
        out.push((fit.a0, to_f64(&level.c) * u0));
    }
    Ok(out)
}

fn run_kelvin(config: &SuiteConfig, params: &OperatorParams, report: &mut Report) -> Result<()> {
    let dim = params.dim();
    let u = default_u(config, dim);
    let bubble = make_bubble(&Rational::one(), &vec![Rational::zero(); params.n()], params)?;

    let twice = kelvin_transform(&kelvin_transform(&u, params)?, params)?;
    let twice_bubble = kelvin_transform(&kelvin_transform(&bubble.profile, params)?, params)?;
    report.push(CheckResult::new("involution", twice == u && twice_bubble == bubble.profile));
    report.push(CheckResult::new("bubble_fixed_point", kelvin_transform(&bubble.profile, params)? == bubble.profile));

    let alpha = params.alpha_crit();
    let samples = ball_points(config.seed, dim, config.samples, 5.0, 1e-3);
    let pde = kelvin_pde_check(&bubble.profile, bubble.prefactor, &alpha, params, &samples, config.tol(1e-9))?;
    report.push(
        CheckResult::new("transformed_equation", pde.pass)
            .residual("max_relative", pde.max_relative_residual)
            .details(&pde),
    );

    let chain = inversion_chain(&u, params)?;
    let star = kelvin_transform(&u, params)?;
    let mut consistent = true;
    for level in &chain.levels {
        consistent &= apply_power(&star, params, level.i)? == chain.predicted(level.i)?;
    }
    let constants: Vec<String> = chain.levels.iter().map(|l| format_rational(&l.c)).collect();
    report.push(CheckResult::new("inversion_chain", consistent).details(json!({ "c": constants })));

    if value_at_origin(&u).is_some_and(|v| !v.is_zero()) {
        let coeffs = far_field_coefficients(&u, params, config.qdeg)?;
        let worst = coeffs.iter().map(|(fit, c)| ((fit - c) / c).abs()).fold(0.0, f64::max);
        report.push(
            CheckResult::new("far_field_leading_coefficient", worst <= 1e-2)
                .residual("max_relative", worst)
                .details(json!({ "fitted_vs_expected": coeffs })),
        );
    }
    Ok(())
}

fn run_bubble(config: &SuiteConfig, params: &OperatorParams, report: &mut Report) -> Result<()> {
    let bubble = make_bubble(&Rational::one(), &vec![Rational::zero(); params.n()], params)?;
    let rescaled = verify_bubble_constant_with_t(params, &rat(2))?;
    report.push(
        CheckResult::new("constant_extraction", rescaled.k == bubble.constant.k).details(json!({
            "K": format_rational(&bubble.constant.k),
            "c0": bubble.c0(),
            "c0_exponent": format_rational(&bubble.constant.exponent),
        })),
    );
    let samples = ball_points(config.seed, params.dim(), config.samples, 5.0, 1e-3);
    let residual = bubble.pde_residual(&samples)?;
    report.push(
        CheckResult::new("pde_residual", residual <= config.tol(1e-9))
            .residual("max_relative", residual)
            .details(json!({ "points": samples.len() })),
    );
    Ok(())
}

fn run_divergence(config: &SuiteConfig, params: &OperatorParams, report: &mut Report) -> Result<()> {
    let grid = build_weighted_sphere_rule(params, config.qdeg)?;
    let schedule = ShrinkSchedule::default();
    let rule = RadialRule::default();
    let (u, polynomial) = match &config.poly {
        Some(p) => (RadialPowerExpr::from_poly(p.clone()), true),
        None => (make_bubble(&Rational::one(), &vec![Rational::zero(); params.n()], params)?.profile, false),
    };
    let tol = config.tol(if polynomial { 1e-10 } else { 1e-8 });
    let rep = divergence_identity_check(&u, params, &grid, &schedule, &rule, tol)?;
    report.push(
        CheckResult::new("divergence_identity", rep.pass)
            .residual("max_relative", rep.max_relative_residual())
            .details(&rep),
    );
    if !polynomial {
        let study = divergence_refinement_study(&u, params, &grid, &schedule, 2, 5)?;
        report.push(CheckResult::new("refinement", study.slope >= 2.0).slope("residual_vs_h", study.slope).details(&study));
    }
    Ok(())
}

/// `c |x|^{2+2i-D}` normalized so that `(-L_a)^i` of it is `|x|^{2-D}`; `None` when the power is annihilated.
pub fn fundamental_family(i: u32, params: &OperatorParams) -> Result<Option<RadialPowerExpr>> {
    let dim = params.dim();
    let t = rat(2 + 2 * i as i64) - params.effective_dim();
    let raw = RadialPowerExpr::norm_power(dim, &t);
    let image = apply_power(&raw, params, i)?;
    let target = RadialPowerExpr::norm_power(dim, &(rat(2) - params.effective_dim()));
    if image.is_zero() {
        return Ok(None);
    }
    let c = image.terms()[0].coeff.constant_value().unwrap_or_else(Rational::zero);
    if c.is_zero() || image.scale(&c.recip()) != target {
        return Ok(None);
    }
    Ok(Some(raw.scale(&c.recip())))
}

fn run_average_law(config: &SuiteConfig, params: &OperatorParams, report: &mut Report) -> Result<()> {
    let grid = build_weighted_sphere_rule(params, config.qdeg)?;
    let d = to_f64(&params.effective_dim());
    let w = omega_a(params);
    let tol = config.tol(1e-6);
    for i in 0..params.p() {
        let Some(u) = fundamental_family(i, params)? else {
            continue;
        };
        let rep = average_law_check(&u, i, params, &grid, &ShrinkSchedule::default(), &RadialRule::default(), tol)?;
        let expected = -(d - 2.0) * w;
        let closed_gap = (rep.beta_from_definition - expected).abs() / expected.abs();
        report.push(
            CheckResult::new(format!("average_law_i{i}"), rep.pass && closed_gap <= tol)
                .residual("fit_vs_definition", rep.relative_gap)
                .residual("definition_vs_closed_form", closed_gap)
                .details(&rep),
        );
    }
    Ok(())
}

fn run_growth(config: &SuiteConfig, report: &mut Report) -> Result<()> {
    let alpha = config.alpha.clone().unwrap_or_else(|| rat(2));
    let d = rat(config.n as i64) + rat(2) * &config.a;
    let trace = growth_sequences(config.p, &alpha, &d, 1.0, config.kmax)?;
    let demo = trace.blow_up_log_trace(1.0, 2.0);
    report.push(CheckResult::new("closed_forms", trace.closed_forms_match).details(&trace));
    report.push(CheckResult::new("radius_bound", trace.monotone_and_bounded).residual("c", trace.c));
    report.push(CheckResult::new("blow_up_demo", true).details(json!({ "c0": 1.0, "radius": 2.0, "log_values": demo })));
    Ok(())
}

fn run_integrate(config: &SuiteConfig, params: &OperatorParams, report: &mut Report) -> Result<()> {
    let grid = build_weighted_sphere_rule(params, config.qdeg)?;
    let tol = config.tol(1e-12);
    let closed = omega_a(params);
    let total = grid.total_weight();
    let moment_error = grid.moment_error();
    report.push(
        CheckResult::new("moments", moment_error <= tol)
            .residual("max_relative", moment_error)
            .details(json!({ "degree": grid.degree(), "nodes": grid.len() })),
    );
    let gap = (total - closed).abs() / closed;
    report.push(
        CheckResult::new("omega_a", gap <= tol)
            .residual("relative", gap)
            .details(json!({ "closed_form": closed, "quadrature": total })),
    );
    let one = RadialPowerExpr::constant(params.dim(), Rational::one());
    let compiled = one.compile();
    let rule = RadialRule::default();
    let mut ball = 0.0;
    let mut outer = 1.0;
    for _ in 0..60 {
        ball += grid.shell_integral(outer / 2.0, outer, &rule, |x| compiled.evaluate(x))?;
        outer /= 2.0;
    }
    let exact = weighted_ball_volume(params);
    let gap = (ball - exact).abs() / exact;
    report.push(
        CheckResult::new("ball_volume", gap <= tol.max(1e-12))
            .residual("relative", gap)
            .details(json!({ "closed_form": exact, "quadrature": ball })),
    );
    Ok(())
}

fn run_positivity(config: &SuiteConfig, params: &OperatorParams, report: &mut Report) -> Result<()> {
    let bubble = make_bubble(&Rational::one(), &vec![Rational::zero(); params.n()], params)?;
    let samples = ball_points(config.seed, params.dim(), config.samples, 50.0, 1e-3);
    let rep = positivity_scan(&bubble.profile, bubble.prefactor, params, &samples)?;
    report.push(CheckResult::new("bubble_intermediate_powers", rep.pass).details(&rep));

    let u = default_u(config, params.dim());
    if value_at_origin(&u).is_some_and(|v| v > Rational::zero()) {
        let chain = inversion_chain(&u, params)?;
        let star = kelvin_transform(&u, params)?;
        let far = sphere_points(config.seed, params.dim(), 32, 1e3);
        let u0 = to_f64(&value_at_origin(&u).expect("checked"));
        let mut worst = 0.0f64;
        let mut positive = true;
        for level in chain.levels.iter().skip(1) {
            let image = apply_power(&star, params, level.i)?.compile();
            let l = to_f64(&(rat(2) * params.bubble_exponent() + rat(2 * level.i as i64)));
            let expected = to_f64(&level.c) * u0;
            for x in &far {
                let v = image.evaluate(x)?;
                positive &= v > 0.0;
                worst = worst.max((v * 1e3f64.powf(l) - expected).abs() / expected);
            }
        }
        report.push(
            CheckResult::new("far_field_sign", positive && worst <= 1e-2).residual("max_relative_leading", worst),
        );
    }
    Ok(())
}
