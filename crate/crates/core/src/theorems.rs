//! Executable cross-checks of the structural results about BC(alpha) and
//! BC_I(alpha). Each check evaluates its hypotheses and its conclusion
//! independently on samples; a report is inconsistent when every
//! hypothesis passes but the conclusion fails.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{membership, order_estimate, DiskSampler, Family, FamilyVerdict, SAMPLED_TOL};
use crate::error::{Error, Result};
use crate::factor::{lemma_equivalence_check, V_MARGIN_TOL};
use crate::funcat::{Expr, FunctionExpr};
use crate::palpha::{check_palpha, QFunction};
use crate::schwarz::schwarzian;

/// Tolerance of the scale-invariance comparison.
pub const SCALE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Schwarzian bound plus a P((1+alpha)/2) weight implies BC(alpha).
    Sufficiency,
    /// `g` in BC_I(alpha) iff `1/(z (1/g)')` in BS*(alpha).
    Duality,
    /// BC_I(alpha) shrinks as alpha grows.
    InclusionMonotone,
    /// BC_I(alpha) is closed under `g -> lambda g`.
    ScaleInvariance,
    /// BC_I(alpha) sits properly inside BS*(0).
    ProperContainment,
    /// BC_I(alpha) membership through `1/g` in C(alpha).
    Characterization,
    /// BC(alpha) iff the ray solution `v` is starlike of order (1+alpha)/2.
    Factorization,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Sufficiency,
        TheoremId::Duality,
        TheoremId::InclusionMonotone,
        TheoremId::ScaleInvariance,
        TheoremId::ProperContainment,
        TheoremId::Characterization,
        TheoremId::Factorization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Sufficiency => "sufficiency",
            TheoremId::Duality => "duality",
            TheoremId::InclusionMonotone => "inclusion-monotone",
            TheoremId::ScaleInvariance => "scale-invariance",
            TheoremId::ProperContainment => "proper-containment",
            TheoremId::Characterization => "characterization",
            TheoremId::Factorization => "factorization",
        }
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, margin: f64) -> Self {
        Check {
            name: name.into(),
            pass,
            margin,
        }
    }

    fn from_verdict(name: impl Into<String>, v: &FamilyVerdict) -> Self {
        Check::new(name, v.holds_on_samples, v.margin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub inputs: String,
    pub hypothesis_checks: Vec<Check>,
    pub conclusion_check: Check,
    pub consistent: bool,
}

impl TheoremReport {
    /// Report for an implication: inconsistent only when all hypotheses
    /// pass and the conclusion fails.
    fn implication(
        theorem_id: TheoremId,
        inputs: String,
        hypothesis_checks: Vec<Check>,
        conclusion_check: Check,
    ) -> Self {
        let hyps = hypothesis_checks.iter().all(|c| c.pass);
        TheoremReport {
            theorem_id,
            inputs,
            consistent: !(hyps && !conclusion_check.pass),
            hypothesis_checks,
            conclusion_check,
        }
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypothesis_checks.iter().all(|c| c.pass)
    }
}

/// `|S_f(z)| <= 2 q(|z|)` on `f` with a weight `q` in P((1 + alpha)/2)
/// should force `f` into BC(alpha).
pub fn verify_sufficiency(f: &FunctionExpr, q: &QFunction, alpha: f64, s: &DiskSampler) -> Result<TheoremReport> {
    s.validate()?;
    let points: Vec<Complex64> = s
        .points()
        .into_iter()
        .filter(|p| p.ring.is_some())
        .map(|p| p.z)
        .collect();
    let gaps: Vec<Result<f64>> = points
        .par_iter()
        .map(|z| Ok(2.0 * q.eval(z.norm())? - schwarzian(f, *z)?.norm()))
        .collect();
    let mut bound_margin = f64::INFINITY;
    let mut failed = 0;
    for g in gaps {
        match g {
            Ok(v) => bound_margin = bound_margin.min(v),
            Err(Error::NonnegativityViolated { x, value }) => return Err(Error::NonnegativityViolated { x, value }),
            Err(_) => failed += 1,
        }
    }
    if failed * 100 > points.len() {
        return Err(Error::TooManyFailures {
            failed,
            total: points.len(),
        });
    }
    let target = 0.5 * (1.0 + alpha);
    let pv = check_palpha(q, target)?;
    let conclusion = membership(f, Family::BC, alpha, s, SAMPLED_TOL)?;
    Ok(TheoremReport::implication(
        TheoremId::Sufficiency,
        format!("f = {f}, q = {q}, alpha = {alpha}"),
        vec![
            Check::new("|S_f| <= 2q(|z|)", bound_margin >= -SAMPLED_TOL, bound_margin),
            Check::new(format!("q in P({target})"), pv.member, pv.limit_estimate - target),
        ],
        Check::from_verdict(format!("f in BC({alpha})"), &conclusion),
    ))
}

/// `1/(z (1/g)')`, built symbolically.
pub fn duality_transform(g: &FunctionExpr) -> FunctionExpr {
    let dr = g.reciprocal().derivative();
    let expr = Expr::div(Expr::real(1.0), Expr::mul(Expr::Var, dr.expr));
    FunctionExpr::new(expr)
        .with_singularities(g.singular_points.iter().copied())
        .with_exclusion_radius(g.exclusion_radius)
}

fn agreement(theorem_id: TheoremId, inputs: String, left: Check, right: Check, tol: f64) -> TheoremReport {
    let borderline = left.margin.abs() <= tol && right.margin.abs() <= tol;
    let consistent = left.pass == right.pass || borderline;
    TheoremReport {
        theorem_id,
        inputs,
        hypothesis_checks: vec![left],
        conclusion_check: right,
        consistent,
    }
}

/// BC_I(alpha) on `g` against BS*(alpha) on its transform; the two
/// functionals coincide pointwise, so the verdicts must agree.
pub fn verify_duality(g: &FunctionExpr, alpha: f64, s: &DiskSampler) -> Result<TheoremReport> {
    let h1 = duality_transform(g);
    let left = membership(g, Family::BCI, alpha, s, SAMPLED_TOL)?;
    let right = membership(&h1, Family::BSstar, alpha, s, SAMPLED_TOL)?;
    Ok(agreement(
        TheoremId::Duality,
        format!("g = {g}, alpha = {alpha}"),
        Check::from_verdict(format!("g in BC_I({alpha})"), &left),
        Check::from_verdict(format!("1/(z(1/g)') in BS*({alpha})"), &right),
        SAMPLED_TOL,
    ))
}

/// BC_I(alpha) through its definition: `1/g` in C(alpha).
pub fn verify_characterization(g: &FunctionExpr, alpha: f64, s: &DiskSampler) -> Result<TheoremReport> {
    let left = membership(g, Family::BCI, alpha, s, SAMPLED_TOL)?;
    let right = membership(&g.reciprocal(), Family::C, alpha, s, SAMPLED_TOL)?;
    Ok(agreement(
        TheoremId::Characterization,
        format!("g = {g}, alpha = {alpha}"),
        Check::from_verdict(format!("g satisfies the BC_I({alpha}) inequality"), &left),
        Check::from_verdict(format!("1/g in C({alpha})"), &right),
        SAMPLED_TOL,
    ))
}

/// Nesting, scale invariance and containment in BS*(0), plus the
/// proper-containment witness `z + 1/z - 2`.
pub fn verify_inclusions(g: &FunctionExpr, alphas: &[f64], s: &DiskSampler) -> Result<Vec<TheoremReport>> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("need at least one alpha".into()));
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let verdicts: Vec<FamilyVerdict> = sorted
        .iter()
        .map(|a| membership(g, Family::BCI, *a, s, SAMPLED_TOL))
        .collect::<Result<_>>()?;

    // membership at alpha implies membership at every smaller beta
    let mut nest_ok = true;
    let mut nest_margin = f64::INFINITY;
    for (i, v) in verdicts.iter().enumerate() {
        if v.holds_on_samples {
            for w in &verdicts[..i] {
                nest_ok &= w.holds_on_samples;
                nest_margin = nest_margin.min(w.margin);
            }
        }
    }
    let hyps: Vec<Check> = verdicts
        .iter()
        .map(|v| Check::from_verdict(format!("g in BC_I({})", v.alpha), v))
        .collect();
    let any_member = verdicts.iter().any(|v| v.holds_on_samples);
    let monotone = TheoremReport {
        theorem_id: TheoremId::InclusionMonotone,
        inputs: format!("g = {g}, alphas = {sorted:?}"),
        consistent: nest_ok,
        hypothesis_checks: hyps,
        conclusion_check: Check::new("membership nests downward in alpha", nest_ok, nest_margin),
    };

    let base = order_estimate(g, Family::BCI, s)?;
    let mut worst: f64 = 0.0;
    for lambda in [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)] {
        let o = order_estimate(&g.scaled(lambda), Family::BCI, s)?;
        worst = worst.max((o - base).abs());
    }
    let scale = TheoremReport::implication(
        TheoremId::ScaleInvariance,
        format!("g = {g}, lambda in {{2, i}}"),
        vec![],
        Check::new("order of lambda g equals order of g", worst <= SCALE_TOL, -worst),
    );

    let lowest = &verdicts[0];
    let starlike = membership(g, Family::BSstar, 0.0, s, SAMPLED_TOL)?;
    let containment = TheoremReport::implication(
        TheoremId::ProperContainment,
        format!("g = {g}"),
        vec![Check::new(
            format!("g in BC_I(alpha) for some alpha in {sorted:?}"),
            any_member,
            lowest.margin,
        )],
        Check::from_verdict("g in BS*(0)", &starlike),
    );
    Ok(vec![monotone, scale, containment, proper_containment_witness(s)?])
}

/// `z + 1/z - 2` lies in BS*(0) but not in BC_I(0).
pub fn proper_containment_witness(s: &DiskSampler) -> Result<TheoremReport> {
    let h = FunctionExpr::parse("z + 1/z - 2")
        .expect("valid witness")
        .with_singularities([Complex64::new(1.0, 0.0)]);
    let starlike = membership(&h, Family::BSstar, 0.0, s, SAMPLED_TOL)?;
    let inverse_convex = membership(&h, Family::BCI, 0.0, s, SAMPLED_TOL)?;
    Ok(TheoremReport::implication(
        TheoremId::ProperContainment,
        format!("witness h = {h}"),
        vec![Check::from_verdict("h in BS*(0)", &starlike)],
        Check::new(
            "h not in BC_I(0)",
            !inverse_convex.holds_on_samples,
            -inverse_convex.margin,
        ),
    ))
}

/// BC(alpha) on `f` against starlikeness of order (1+alpha)/2 of `v`.
pub fn verify_factorization(f: &FunctionExpr, alpha: f64, n_rays: usize, s: &DiskSampler) -> Result<TheoremReport> {
    let r = lemma_equivalence_check(f, alpha, n_rays, s)?;
    let target = 0.5 * (1.0 + alpha);
    let mut report = agreement(
        TheoremId::Factorization,
        format!("f = {f}, alpha = {alpha}, rays = {n_rays}"),
        Check::from_verdict(format!("f in BC({alpha})"), &r.bc_verdict),
        Check::new(
            format!("v in S*({target})"),
            r.v_starlike_margin >= -V_MARGIN_TOL,
            r.v_starlike_margin,
        ),
        0.0,
    );
    report.consistent = r.agree;
    Ok(report)
}
