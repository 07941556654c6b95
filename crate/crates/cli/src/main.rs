//! `meroconvex`: command-line front end.
//!
//! Exit codes: 0 when the verdict holds (or the computation succeeded),
//! 1 when it is violated, 2 on usage or evaluation errors.

mod report;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use meroconvex::classify::{injectivity_spot_check, membership, order_estimate_with_witness, SAMPLED_TOL};
use meroconvex::factor::{lemma_equivalence_check, DEFAULT_RAYS, V_MARGIN_TOL};
use meroconvex::funcat::catalog;
use meroconvex::palpha::{
    check_palpha_with, constant_solver, sharpness_construct, DEFAULT_EPS_END, DEFAULT_REL_TOL, DEFAULT_TOL,
};
use meroconvex::radius::{radius_inverse_convexity, rotated_witness, verify_radius};
use meroconvex::schwarz::{schwarzian_norm, SchwarzianSample};
use meroconvex::theorems::{self, TheoremId, TheoremReport};
use meroconvex::{DiskSampler, Error, Family, FunctionExpr, QFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use report::RunReport;

#[derive(Parser, Debug)]
#[command(
    name = "meroconvex",
    version,
    about = "Meromorphically convex functions of order alpha"
)]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct FunctionArgs {
    /// Function of z, e.g. "z/4 + 1/z".
    #[arg(long, conflicts_with = "catalog")]
    expr: Option<String>,
    /// Catalog entry name (see `catalog`).
    #[arg(long)]
    catalog: Option<String>,
    /// Parameter of a parametrised catalog entry.
    #[arg(long)]
    param: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct SamplerArgs {
    #[arg(long, default_value_t = 0.999)]
    rmax: f64,
    #[arg(long, default_value_t = 64)]
    rings: usize,
    #[arg(long, default_value_t = 512)]
    points: usize,
    /// Radius of the punctured neighbourhood of 0 and of each singular point.
    #[arg(long, default_value_t = 1e-3)]
    exclude: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sampled membership of f in a family of order alpha.
    Classify {
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long)]
        family: Family,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long, default_value_t = SAMPLED_TOL)]
        tol: f64,
        /// Seed of the injectivity spot check (BC_I only).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Largest alpha for which the family's inequality holds on the samples.
    Order {
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long)]
        family: Family,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Schwarzian derivative at given points or at seeded random points.
    Schwarzian {
        #[command(flatten)]
        f: FunctionArgs,
        /// Point such as "0.3+0.2i"; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<String>,
        /// Number of random points in |z| < rmax when no --at is given.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0.999)]
        rmax: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower bound of sup (1-|z|^2)^2 |S_f(z)|, compared with 6.
    Norm {
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long, default_value_t = 64)]
        rings: usize,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long, default_value_t = 60)]
        refine: usize,
    },
    /// Whether a weight q lies in P(alpha).
    Palpha {
        #[command(flatten)]
        q: QArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_EPS_END)]
        eps_end: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Constant c with sqrt(c) cot(sqrt(c)) = alpha.
    ConstQ {
        #[arg(long)]
        alpha: f64,
    },
    /// Radius of inverse convexity; optionally checks a map against it.
    Radius {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// BC(alpha) against starlikeness of the ray solutions of v'' + (S_f/2) v = 0.
    FactorCheck {
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_RAYS)]
        rays: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Checks a structural result on a concrete function.
    Theorem {
        #[arg(long)]
        id: TheoremId,
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long)]
        alpha: f64,
        /// Extra orders for inclusion-monotone, comma separated.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[command(flatten)]
        q: QArgs,
        #[arg(long, default_value_t = DEFAULT_RAYS)]
        rays: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Integrates the power weight (1-beta)(n+1) x^n and looks for x y'/y <= beta.
    Sharpness {
        #[arg(long, default_value_t = 200)]
        n: u32,
        #[arg(long, default_value_t = 0.4)]
        beta: f64,
    },
    /// Lists the function catalog.
    Catalog {
        /// Show a single entry.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        param: Option<f64>,
    },
}

#[derive(Args, Debug, Clone)]
struct QArgs {
    /// Weight as an expression in x, e.g. "0.5/(1 + x^2)".
    #[arg(long, conflicts_with = "q_const")]
    q: Option<String>,
    /// Constant weight.
    #[arg(long)]
    q_const: Option<f64>,
}

enum Failure {
    Usage(String),
    Eval(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Eval(e)
    }
}

type Outcome = Result<(RunReport, String), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl FunctionArgs {
    fn given(&self) -> bool {
        self.expr.is_some() || self.catalog.is_some()
    }

    fn resolve(&self) -> Result<FunctionExpr, Failure> {
        match (&self.expr, &self.catalog) {
            (Some(e), _) => Ok(FunctionExpr::parse(e)?),
            (None, Some(name)) => Ok(catalog::instantiate(name, self.param)?.expr),
            (None, None) => Err(usage("one of --expr or --catalog is required")),
        }
    }

    fn label(&self) -> String {
        match (&self.expr, &self.catalog) {
            (Some(e), _) => e.clone(),
            (None, Some(n)) => match self.param {
                Some(p) => format!("{n}({p})"),
                None => n.clone(),
            },
            (None, None) => String::new(),
        }
    }
}

impl SamplerArgs {
    fn sampler(&self) -> Result<DiskSampler, Failure> {
        let mut s = DiskSampler::new(self.rmax, self.rings, self.points);
        s.exclusion_radius = self.exclude;
        s.validate()?;
        Ok(s)
    }

    fn record(&self, r: RunReport) -> RunReport {
        r.input("rmax", self.rmax)
            .input("rings", self.rings)
            .input("points", self.points)
            .input("exclude", self.exclude)
    }
}

impl QArgs {
    fn resolve(&self) -> Result<QFunction, Failure> {
        match (&self.q, self.q_const) {
            (Some(text), _) => Ok(QFunction::expression(text)?),
            (None, Some(c)) => Ok(QFunction::constant(c)?),
            (None, None) => Err(usage("one of --q or --q-const is required")),
        }
    }
}

/// A constant expression; `0.2i` is read as `0.2*i`.
fn parse_point(text: &str) -> Result<Complex64, Failure> {
    let mut expanded = String::with_capacity(text.len() + 2);
    let mut prev_digit = false;
    for c in text.chars() {
        if c == 'i' && prev_digit {
            expanded.push('*');
        }
        prev_digit = c.is_ascii_digit() || c == '.';
        expanded.push(c);
    }
    let e = FunctionExpr::parse(&expanded).map_err(|e| usage(format!("bad point `{text}`: {e}")))?;
    Ok(e.eval(Complex64::new(0.0, 0.0))?)
}

fn fmt_z(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn classify(f: &FunctionArgs, family: Family, alpha: f64, sampler: &SamplerArgs, tol: f64, seed: u64) -> Outcome {
    let g = f.resolve()?;
    let s = sampler.sampler()?;
    let v = membership(&g, family, alpha, &s, tol)?;
    let mut details = serde_json::json!({ "family_verdict": v });
    let mut text = format!(
        "{family}({alpha}): {}\nmargin {:.6e}, order estimate {:.6}, witness z = {} (value {:.6})",
        if v.holds_on_samples { "holds" } else { "violated" },
        v.margin,
        v.order_estimate,
        fmt_z(v.witness),
        v.witness_value
    );
    if v.univalence_not_checked {
        let spot = injectivity_spot_check(&g, s.r_max, 10_000, seed);
        details["injectivity_spot_check"] = serde_json::to_value(spot).expect("serialises");
        text.push_str(&format!(
            "\nunivalence not checked; injectivity spot check: {} suspicious of {} pairs",
            spot.suspicious, spot.pairs
        ));
    }
    let mut r = RunReport::new("classify", v.holds_on_samples)
        .input("function", f.label())
        .input("family", family)
        .input("alpha", alpha)
        .input("seed", seed)
        .tolerance("membership", tol)
        .margin(v.margin)
        .witness(v.witness, v.witness_value)
        .details(details);
    r = sampler.record(r);
    r.order_estimate = Some(v.order_estimate);
    Ok((r, text))
}

fn order(f: &FunctionArgs, family: Family, sampler: &SamplerArgs) -> Outcome {
    let g = f.resolve()?;
    let s = sampler.sampler()?;
    let (value, z) = order_estimate_with_witness(&g, family, &s)?;
    let clamped = value.clamp(0.0, 1.0);
    let mut r = RunReport::new("order", true)
        .input("function", f.label())
        .input("family", family)
        .witness(z, value)
        .details(serde_json::json!({ "raw_minimum": value }));
    r = sampler.record(r);
    r.order_estimate = Some(clamped);
    let text = format!(
        "{family} order estimate {clamped:.6} (raw minimum {value:.6} at z = {})",
        fmt_z(z)
    );
    Ok((r, text))
}

fn schwarzian_cmd(f: &FunctionArgs, at: &[String], samples: usize, rmax: f64, seed: u64) -> Outcome {
    let g = f.resolve()?;
    let points: Vec<Complex64> = if at.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let r = rmax * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
            })
            .collect()
    } else {
        at.iter().map(|t| parse_point(t)).collect::<Result<_, _>>()?
    };
    let values: Vec<SchwarzianSample> = points
        .iter()
        .map(|z| SchwarzianSample::at(&g, *z))
        .collect::<Result<_, _>>()?;
    let text = values
        .iter()
        .map(|v| format!("S_f({}) = {}", fmt_z(v.z), fmt_z(v.s)))
        .collect::<Vec<_>>()
        .join("\n");
    let r = RunReport::new("schwarzian", true)
        .input("function", f.label())
        .input("at", at)
        .input("samples", samples)
        .input("rmax", rmax)
        .input("seed", seed)
        .details(serde_json::json!({ "values": values }));
    Ok((r, text))
}

fn norm(f: &FunctionArgs, rings: usize, points: usize, refine: usize) -> Outcome {
    let g = f.resolve()?;
    let n = schwarzian_norm(&g, rings, points, refine)?;
    let holds = n.lower_bound <= 6.0 + SAMPLED_TOL;
    let r = RunReport::new("norm", holds)
        .input("function", f.label())
        .input("rings", rings)
        .input("points", points)
        .input("refine", refine)
        .tolerance("univalence_bound", SAMPLED_TOL)
        .margin(6.0 - n.lower_bound)
        .witness(n.argmax, n.lower_bound)
        .details(n);
    let text = format!(
        "Schwarzian norm >= {:.9} (attained near z = {}); {} the univalence bound 6",
        n.lower_bound,
        fmt_z(n.argmax),
        if holds { "within" } else { "exceeds" }
    );
    Ok((r, text))
}

fn q_label(q: &QArgs) -> String {
    match (&q.q, q.q_const) {
        (Some(t), _) => t.clone(),
        (None, Some(c)) => c.to_string(),
        (None, None) => String::new(),
    }
}

fn palpha(q: &QArgs, alpha: f64, eps_end: f64, tol: f64) -> Outcome {
    let qf = q.resolve()?;
    let v = check_palpha_with(&qf, alpha, eps_end, DEFAULT_REL_TOL, tol)?;
    let margin = v.limit_estimate - alpha;
    let text = format!(
        "q = {qf}: {} P({alpha}); lim y'/y ~ {:.9}, y {} on (0, 1)",
        if v.member { "in" } else { "not in" },
        v.limit_estimate,
        if v.positive_on_01 { "positive" } else { "vanishes" }
    );
    let r = RunReport::new("palpha", v.member)
        .input("q", q_label(q))
        .input("alpha", alpha)
        .input("eps_end", eps_end)
        .tolerance("membership", tol)
        .tolerance("ode_rel_tol", DEFAULT_REL_TOL)
        .margin(margin)
        .details(v);
    Ok((r, text))
}

fn const_q(alpha: f64) -> Outcome {
    let c = constant_solver(alpha)?;
    let t = c.sqrt();
    let residual = (t / t.tan() - alpha).abs();
    let r = RunReport::new("const-q", true)
        .input("alpha", alpha)
        .details(serde_json::json!({ "c": c, "residual": residual }));
    Ok((r, format!("c = {c:.15} (residual {residual:.3e})")))
}

fn radius(alpha: f64, f: &FunctionArgs, sampler: &SamplerArgs) -> Outcome {
    let res = radius_inverse_convexity(alpha)?;
    let mut text = format!(
        "r_{alpha} = {:.15} (closed form {:.15}, residual {:.3e})",
        res.r_alpha, res.closed_form, res.residual
    );
    let mut r = RunReport::new("radius", true).input("alpha", alpha);
    let mut details = serde_json::json!({ "radius": res });
    if f.given() {
        let g = f.resolve()?;
        let s = sampler.sampler()?;
        let inside = verify_radius(&g, alpha, &s)?;
        let outside = rotated_witness(&g, alpha, res.r_alpha + 0.01)?;
        text.push_str(&format!(
            "\ninside: {} (margin {:.3e}); at r + 0.01: smallest rotated value {:.6} at tau = {:.6}",
            if inside.holds_inside { "holds" } else { "violated" },
            inside.margin,
            outside.value,
            outside.tau
        ));
        r = sampler.record(r.input("function", f.label()));
        r.verdict.holds = inside.holds_inside;
        r = r.margin(inside.margin).witness(inside.witness, inside.margin + alpha);
        details["inside"] = serde_json::to_value(inside).expect("serialises");
        details["outside"] = serde_json::to_value(outside).expect("serialises");
    }
    Ok((r.tolerance("membership", SAMPLED_TOL).details(details), text))
}

fn factor_check(f: &FunctionArgs, alpha: f64, rays: usize, sampler: &SamplerArgs) -> Outcome {
    let g = f.resolve()?;
    let s = sampler.sampler()?;
    let c = lemma_equivalence_check(&g, alpha, rays, &s)?;
    let holds = c.bc_verdict.holds_on_samples && c.agree;
    let text = format!(
        "BC({alpha}): {}; v starlike margin {:.6e}; Wronskian drift {:.3e}; routes {}",
        if c.bc_verdict.holds_on_samples {
            "holds"
        } else {
            "violated"
        },
        c.v_starlike_margin,
        c.wronskian_drift,
        if c.agree { "agree" } else { "disagree" }
    );
    let mut r = RunReport::new("factor-check", holds)
        .input("function", f.label())
        .input("alpha", alpha)
        .input("rays", rays)
        .tolerance("membership", SAMPLED_TOL)
        .tolerance("v_margin", V_MARGIN_TOL)
        .margin(c.bc_verdict.margin)
        .witness(c.bc_verdict.witness, c.bc_verdict.witness_value);
    r = sampler.record(r).details(c);
    Ok((r, text))
}

#[allow(clippy::too_many_arguments)]
fn theorem(
    id: TheoremId,
    f: &FunctionArgs,
    alpha: f64,
    alphas: &[f64],
    q: &QArgs,
    rays: usize,
    sampler: &SamplerArgs,
) -> Outcome {
    let s = sampler.sampler()?;
    let reports: Vec<TheoremReport> = match id {
        TheoremId::ProperContainment if !f.given() => vec![theorems::proper_containment_witness(&s)?],
        TheoremId::Sufficiency => vec![theorems::verify_sufficiency(&f.resolve()?, &q.resolve()?, alpha, &s)?],
        TheoremId::Duality => vec![theorems::verify_duality(&f.resolve()?, alpha, &s)?],
        TheoremId::Characterization => vec![theorems::verify_characterization(&f.resolve()?, alpha, &s)?],
        TheoremId::Factorization => vec![theorems::verify_factorization(&f.resolve()?, alpha, rays, &s)?],
        TheoremId::InclusionMonotone | TheoremId::ScaleInvariance | TheoremId::ProperContainment => {
            let mut all = vec![alpha];
            all.extend_from_slice(alphas);
            theorems::verify_inclusions(&f.resolve()?, &all, &s)?
                .into_iter()
                .filter(|r| r.theorem_id == id)
                .collect()
        }
    };
    let consistent = reports.iter().all(|r| r.consistent);
    let mut text = String::new();
    for rep in &reports {
        text.push_str(&format!("{} [{}]\n", rep.theorem_id.as_str(), rep.inputs));
        for c in &rep.hypothesis_checks {
            text.push_str(&format!(
                "  hypothesis {}: {} ({:.3e})\n",
                c.name,
                pass(c.pass),
                c.margin
            ));
        }
        let c = &rep.conclusion_check;
        text.push_str(&format!(
            "  conclusion {}: {} ({:.3e})\n",
            c.name,
            pass(c.pass),
            c.margin
        ));
        text.push_str(&format!(
            "  {}\n",
            if rep.consistent { "consistent" } else { "INCONSISTENT" }
        ));
    }
    let mut r = RunReport::new("theorem", consistent)
        .input("id", id)
        .input("function", f.label())
        .input("alpha", alpha)
        .input("alphas", alphas)
        .input("q", q_label(q))
        .input("rays", rays)
        .tolerance("membership", SAMPLED_TOL);
    if let Some(worst) = reports.iter().map(|r| r.conclusion_check.margin).min_by(f64::total_cmp) {
        r = r.margin(worst);
    }
    r = sampler.record(r).details(reports);
    Ok((r, text.trim_end().to_string()))
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn sharpness(n: u32, beta: f64) -> Outcome {
    let w = sharpness_construct(n, beta)?;
    let holds = w.x0.is_some();
    let text = match (w.x0, w.convexity_value) {
        (Some(x0), Some(cv)) => format!(
            "x0 = {x0:.9}, x0 y'/y = {:.9}, convexity value {cv:.9}",
            w.ratio_at_x0.unwrap_or(f64::NAN)
        ),
        _ => format!(
            "no x with x y'/y <= {beta} before 1 - eps_end; smallest ratio {:.9}, ratio at end {:.9}",
            w.min_ratio, w.ratio_at_end
        ),
    };
    let mut r = RunReport::new("sharpness", holds)
        .input("n", n)
        .input("beta", beta)
        .input("eps_end", DEFAULT_EPS_END)
        .margin(beta - w.min_ratio)
        .details(w);
    if let (Some(x0), Some(v)) = (w.x0, w.ratio_at_x0) {
        r = r.witness(Complex64::new(x0, 0.0), v);
    }
    Ok((r, text))
}

fn catalog_cmd(name: Option<&str>, param: Option<f64>) -> Outcome {
    let entries = match name {
        Some(n) => vec![catalog::instantiate(n, param)?],
        None => catalog::entries(),
    };
    let mut text = String::new();
    for e in &entries {
        text.push_str(&format!("{:<22} {}\n", e.name, e.expr));
        for c in &e.expected {
            text.push_str(&format!("{:<22}   {} order {} ({})\n", "", c.family, c.order, c.cite));
        }
    }
    let r = RunReport::new("catalog", true)
        .input("name", name)
        .input("param", param)
        .details(catalog::to_json(&entries));
    Ok((r, text.trim_end().to_string()))
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Classify {
            f,
            family,
            alpha,
            sampler,
            tol,
            seed,
        } => classify(f, *family, *alpha, sampler, *tol, *seed),
        Command::Order { f, family, sampler } => order(f, *family, sampler),
        Command::Schwarzian {
            f,
            at,
            samples,
            rmax,
            seed,
        } => schwarzian_cmd(f, at, *samples, *rmax, *seed),
        Command::Norm {
            f,
            rings,
            points,
            refine,
        } => norm(f, *rings, *points, *refine),
        Command::Palpha { q, alpha, eps_end, tol } => palpha(q, *alpha, *eps_end, *tol),
        Command::ConstQ { alpha } => const_q(*alpha),
        Command::Radius { alpha, f, sampler } => radius(*alpha, f, sampler),
        Command::FactorCheck {
            f,
            alpha,
            rays,
            sampler,
        } => factor_check(f, *alpha, *rays, sampler),
        Command::Theorem {
            id,
            f,
            alpha,
            alphas,
            q,
            rays,
            sampler,
        } => theorem(*id, f, *alpha, alphas, q, *rays, sampler),
        Command::Sharpness { n, beta } => sharpness(*n, *beta),
        Command::Catalog { name, param } => catalog_cmd(name.as_deref(), *param),
    }
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("GFT_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| format!("GFT_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            return Err("GFT_THREADS must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let start = Instant::now();
    match dispatch(&cli.command) {
        Ok((mut report, text)) => {
            report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
            } else {
                println!("{text}");
            }
            ExitCode::from(if report.verdict.holds { 0 } else { 1 })
        }
        Err(failure) => {
            let msg = match failure {
                Failure::Usage(m) => m,
                Failure::Eval(e) => e.to_string(),
            };
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&ErrorReport { error: &msg }).expect("serialises")
                );
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse_with_implicit_i() {
        let z = |t: &str| parse_point(t).ok().unwrap();
        assert_eq!(z("0.3+0.2i"), Complex64::new(0.3, 0.2));
        assert_eq!(z("-0.5"), Complex64::new(-0.5, 0.0));
        assert_eq!(z("2i"), Complex64::new(0.0, 2.0));
        assert_eq!(z("i"), Complex64::new(0.0, 1.0));
        assert!(parse_point("0.3+").is_err());
    }

    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
