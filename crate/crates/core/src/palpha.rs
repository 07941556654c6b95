//! The weight class P(alpha): a continuous weight `q >= 0` on `[0, 1)`
//! belongs to it when the solution of
//!
//! ```text
//! y'' + q y = 0,   y(0) = 0,   y'(0) = 1
//! ```
//!
//! stays positive on `(0, 1)` and `lim_{x -> 1-} y'/y >= alpha`.
//!
//! The limit is never approached by integrating up to 1. The ratio is
//! sampled at `x_k = 1 - 2^-k` and Richardson-extrapolated in `h = 2^-k`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcat::FunctionExpr;
use crate::ode::{self, Segmented, State, StepStats};
use crate::optimize::bisect;

pub const DEFAULT_EPS_END: f64 = 1e-6;
pub const DEFAULT_REL_TOL: f64 = 1e-11;
/// Tolerance band of the membership verdict.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Required agreement of the last three extrapolants.
pub const EXTRAPOLATION_AGREEMENT: f64 = 1e-5;
pub const INTEGRAL_TOL: f64 = 1e-10;

const FIRST_K: i32 = 7;
const UNIFORM_NODES: usize = 1024;
const RICHARDSON_COLUMNS: usize = 3;

/// A nonnegative weight on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum QFunction {
    Constant(f64),
    /// Expression in the real variable `x`.
    Expression(FunctionExpr),
    /// Piecewise-linear interpolation of samples, held constant past the
    /// last abscissa.
    Samples {
        xs: Vec<f64>,
        qs: Vec<f64>,
    },
}

impl QFunction {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::NonnegativityViolated { x: 0.0, value: c });
        }
        Ok(QFunction::Constant(c))
    }

    pub fn expression(text: &str) -> Result<Self> {
        Ok(QFunction::Expression(FunctionExpr::parse_real(text)?))
    }

    pub fn samples(xs: Vec<f64>, qs: Vec<f64>) -> Result<Self> {
        if xs.len() != qs.len() || xs.len() < 2 {
            return Err(Error::InvalidArgument("samples need matching lengths >= 2".into()));
        }
        if xs[0] != 0.0 || xs.windows(2).any(|w| w[1] <= w[0]) || *xs.last().unwrap() >= 1.0 {
            return Err(Error::InvalidArgument(
                "sample abscissae must start at 0, increase strictly and stay below 1".into(),
            ));
        }
        if let Some((x, q)) = xs.iter().zip(&qs).find(|(_, q)| q.is_nan() || **q < 0.0) {
            return Err(Error::NonnegativityViolated { x: *x, value: *q });
        }
        Ok(QFunction::Samples { xs, qs })
    }

    /// `(2 - 2 alpha) / (pi (1 + x^2))`, dominating `|S_f|/2` for the scaled
    /// cotangent; its integral over `[0, 1]` is `(1 - alpha)/2`.
    pub fn arctan_weight(alpha: f64) -> Self {
        let k = (2.0 - 2.0 * alpha) / PI;
        QFunction::Expression(FunctionExpr::parse_real(&format!("({k})/(1 + x^2)")).expect("valid weight"))
    }

    /// `(1 - beta)(n + 1) x^n`, of integral `1 - beta`.
    pub fn power_weight(n: u32, beta: f64) -> Self {
        let k = (1.0 - beta) * (n as f64 + 1.0);
        QFunction::Expression(FunctionExpr::parse_real(&format!("({k})*x^{n}")).expect("valid weight"))
    }

    /// Evaluates the weight; negative values are input errors.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            QFunction::Constant(c) => *c,
            QFunction::Expression(e) => {
                let w = e.eval(Complex64::new(x, 0.0))?;
                if w.im.abs() > 1e-12 * w.re.abs().max(1.0) || !w.re.is_finite() {
                    return Err(Error::EvaluationFailed {
                        z: Complex64::new(x, 0.0),
                        reason: format!("weight is not real: {w}"),
                    });
                }
                w.re
            }
            QFunction::Samples { xs, qs } => {
                let i = xs.partition_point(|t| *t <= x);
                if i == 0 {
                    qs[0]
                } else if i == xs.len() {
                    qs[i - 1]
                } else {
                    let s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                    qs[i - 1] + s * (qs[i] - qs[i - 1])
                }
            }
        };
        if v < 0.0 {
            return Err(Error::NonnegativityViolated { x, value: v });
        }
        Ok(v)
    }
}

impl fmt::Display for QFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QFunction::Constant(c) => write!(f, "{c}"),
            QFunction::Expression(e) => write!(f, "{e}"),
            QFunction::Samples { xs, .. } => write!(f, "<{} samples>", xs.len()),
        }
    }
}

/// Abscissae `1 - 2^-k`, `k = 7, 8, ...`, not beyond `1 - eps_end`.
pub fn ratio_abscissae(eps_end: f64) -> Vec<f64> {
    (FIRST_K..)
        .map(|k| 2f64.powi(-k))
        .take_while(|h| *h >= eps_end)
        .map(|h| 1.0 - h)
        .collect()
}

/// Solution of the initial-value problem on `[0, 1 - eps_end]`.
pub struct OdeSolution {
    pub nodes: Vec<f64>,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
    pub eps_end: f64,
    pub stats: StepStats,
    dense: Segmented<2>,
}

impl fmt::Debug for OdeSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeSolution")
            .field("nodes", &self.nodes.len())
            .field("eps_end", &self.eps_end)
            .field("stats", &self.stats)
            .finish()
    }
}

impl OdeSolution {
    pub fn x_end(&self) -> f64 {
        1.0 - self.eps_end
    }

    /// `(y, y')` at any `x` in `[0, 1 - eps_end]`.
    pub fn state_at(&self, x: f64) -> Option<(f64, f64)> {
        self.dense.eval(x).map(|s| (s[0], s[1]))
    }
}

pub fn integrate_ivp(q: &QFunction, eps_end: f64, rel_tol: f64) -> Result<OdeSolution> {
    if !(1e-8..=1e-2).contains(&eps_end) {
        return Err(Error::InvalidArgument(format!(
            "eps_end = {eps_end} outside [1e-8, 1e-2]"
        )));
    }
    if !(rel_tol > 0.0 && rel_tol <= 1e-8) {
        return Err(Error::InvalidArgument(format!("rel_tol = {rel_tol} outside (0, 1e-8]")));
    }
    let x_end = 1.0 - eps_end;
    let mut stops = ratio_abscissae(eps_end);
    if stops.last().is_none_or(|s| *s < x_end) {
        stops.push(x_end);
    }
    let rhs = |x: f64, s: &State<2>| -> Result<State<2>> { Ok(State::<2>::new(s[1], -q.eval(x)? * s[0])) };
    let dense = ode::integrate(&rhs, 0.0, State::<2>::new(0.0, 1.0), &stops, rel_tol, rel_tol * 1e-3)?;

    let mut nodes: Vec<f64> = (0..UNIFORM_NODES)
        .map(|i| x_end * i as f64 / (UNIFORM_NODES - 1) as f64)
        .collect();
    nodes.extend(&stops);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let (mut y, mut yp) = (Vec::with_capacity(nodes.len()), Vec::with_capacity(nodes.len()));
    for &x in &nodes {
        let s = dense.eval(x).ok_or(Error::StepSizeUnderflow { x })?;
        y.push(s[0]);
        yp.push(s[1]);
    }
    Ok(OdeSolution {
        nodes,
        y,
        yp,
        eps_end,
        stats: dense.stats,
        dense,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PalphaVerdict {
    pub alpha: f64,
    pub positive_on_01: bool,
    pub first_zero: Option<f64>,
    /// Extrapolated `lim y'/y`; the raw ratio at `1 - eps_end` when `y`
    /// changes sign.
    pub limit_estimate: f64,
    /// `(x_k, y'/y)` samples behind the extrapolation.
    pub tail: Vec<(f64, f64)>,
    /// Spread of the last three extrapolants.
    pub extrapolation_spread: f64,
    pub tol: f64,
    pub member: bool,
}

impl PalphaVerdict {
    pub fn member_at(&self, alpha: f64, tol: f64) -> bool {
        self.positive_on_01 && self.limit_estimate >= alpha - tol
    }
}

/// First zero of `y` on `(0, 1 - eps_end]`, located to 1e-10. Besides sign
/// changes at nodes, intervals where `y'` changes sign from negative to
/// positive are searched for a dip below zero between nodes.
pub fn first_zero(sol: &OdeSolution) -> Option<f64> {
    let y_at = |x: f64| sol.state_at(x).map_or(f64::NAN, |s| s.0);
    let yp_at = |x: f64| sol.state_at(x).map_or(f64::NAN, |s| s.1);
    for i in 1..sol.nodes.len() {
        let (a, b) = (sol.nodes[i - 1], sol.nodes[i]);
        if sol.y[i] <= 0.0 {
            if sol.y[i] == 0.0 {
                return Some(b);
            }
            return Some(bisect(y_at, a, b, 1e-12));
        }
        if sol.yp[i - 1] < 0.0 && sol.yp[i] > 0.0 {
            let m = bisect(yp_at, a, b, 1e-12);
            if y_at(m) <= 0.0 {
                return Some(bisect(y_at, a, m, 1e-12));
            }
        }
    }
    None
}

/// Richardson table over ratios sampled at `h_k = 2^-k`; returns the final
/// column (up to three eliminations).
fn richardson(values: &[f64]) -> Vec<f64> {
    let mut col = values.to_vec();
    for j in 1..=RICHARDSON_COLUMNS.min(values.len().saturating_sub(1)) {
        let p = 2f64.powi(j as i32);
        col = col.windows(2).map(|w| (p * w[1] - w[0]) / (p - 1.0)).collect();
    }
    col
}

pub fn check_palpha(q: &QFunction, alpha: f64) -> Result<PalphaVerdict> {
    check_palpha_with(q, alpha, DEFAULT_EPS_END, DEFAULT_REL_TOL, DEFAULT_TOL)
}

pub fn check_palpha_with(q: &QFunction, alpha: f64, eps_end: f64, rel_tol: f64, tol: f64) -> Result<PalphaVerdict> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [0, 1]")));
    }
    let sol = integrate_ivp(q, eps_end, rel_tol)?;
    let zero = first_zero(&sol);
    let mut verdict = PalphaVerdict {
        alpha,
        positive_on_01: zero.is_none(),
        first_zero: zero,
        limit_estimate: 0.0,
        tail: Vec::new(),
        extrapolation_spread: 0.0,
        tol,
        member: false,
    };
    if zero.is_some() {
        let (y, yp) = sol.state_at(sol.x_end()).expect("end node");
        verdict.limit_estimate = yp / y;
        return Ok(verdict);
    }
    let tail: Vec<(f64, f64)> = ratio_abscissae(eps_end)
        .into_iter()
        .map(|x| {
            let (y, yp) = sol.state_at(x).expect("stop node");
            (x, yp / y)
        })
        .collect();
    let ratios: Vec<f64> = tail.iter().map(|t| t.1).collect();
    let last = richardson(&ratios);
    if last.len() < 3 {
        return Err(Error::InvalidArgument("eps_end too large for extrapolation".into()));
    }
    let tail3 = &last[last.len() - 3..];
    let spread =
        tail3.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) - tail3.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if spread.is_nan() || spread > EXTRAPOLATION_AGREEMENT {
        return Err(Error::ExtrapolationDiverged { tail });
    }
    verdict.limit_estimate = tail3[2];
    verdict.extrapolation_spread = spread;
    verdict.tail = tail;
    verdict.member = verdict.member_at(alpha, tol);
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u32,
}

/// `int_0^1 q` by tanh-sinh quadrature, whose nodes cluster doubly
/// exponentially at both ends and so handle an integrable blow-up at 1.
pub fn integral_of_q(q: &QFunction) -> Result<QuadratureResult> {
    let failure = RefCell::new(None);
    let out = quadrature::double_exponential::integrate(
        |x| match q.eval(x) {
            Ok(v) => v,
            Err(e) => {
                // the outermost nodes may round onto the excluded endpoint
                if x < 1.0 - 1e-12 {
                    failure.borrow_mut().get_or_insert(e);
                }
                0.0
            }
        },
        0.0,
        1.0,
        INTEGRAL_TOL,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !(out.integral.is_finite() && out.error_estimate <= INTEGRAL_TOL) {
        return Err(Error::QuadratureFailed(format!(
            "integral {} with error estimate {:e}",
            out.integral, out.error_estimate
        )));
    }
    Ok(QuadratureResult {
        value: out.integral,
        error_estimate: out.error_estimate,
        evaluations: out.num_function_evaluations,
    })
}

/// True iff `int_0^1 q <= c` (up to the quadrature tolerance); then `q`
/// lies in P(1 - c).
pub fn integral_criterion(q: &QFunction, c: f64) -> Result<bool> {
    if c.is_nan() || c > 1.0 {
        return Err(Error::InvalidArgument(format!("c = {c} must be <= 1")));
    }
    Ok(integral_of_q(q)?.value <= c + INTEGRAL_TOL)
}

/// The constant weight `c` whose solution `sin(sqrt(c) x)/sqrt(c)` has
/// `y'/y -> sqrt(c) cot sqrt(c) = target` at `x = 1`.
pub fn constant_solver(target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::TargetOutOfRange(target));
    }
    // t cot t decreases from 1 to 0 on (0, pi/2)
    let t = bisect(|t| t / t.tan() - target, f64::MIN_POSITIVE, PI / 2.0, 0.0);
    Ok(t * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessWitness {
    pub n: u32,
    pub beta: f64,
    /// First `x` with `x y'/y <= beta`, if any before `1 - eps_end`.
    pub x0: Option<f64>,
    pub ratio_at_x0: Option<f64>,
    /// `1 - 2 x0 y'/y`, the convexity functional of the reconstructed map.
    pub convexity_value: Option<f64>,
    /// `x y'/y` at `1 - eps_end`.
    pub ratio_at_end: f64,
    /// Smallest `x y'/y` over the nodes.
    pub min_ratio: f64,
}

/// Integrates the power weight `(1 - beta)(n + 1) x^n` and looks for a
/// point where `x y'/y <= beta`.
pub fn sharpness_construct(n: u32, beta: f64) -> Result<SharpnessWitness> {
    if n < 1 || !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and 0 <= beta < 1 (got {n}, {beta})"
        )));
    }
    let q = QFunction::power_weight(n, beta);
    let sol = integrate_ivp(&q, DEFAULT_EPS_END, DEFAULT_REL_TOL)?;
    let ratio = |x: f64| {
        let (y, yp) = sol.state_at(x).expect("inside the solution range");
        x * yp / y
    };
    let mut out = SharpnessWitness {
        n,
        beta,
        x0: None,
        ratio_at_x0: None,
        convexity_value: None,
        ratio_at_end: ratio(sol.x_end()),
        min_ratio: f64::INFINITY,
    };
    let mut prev = 0.0;
    for &x in sol.nodes.iter().skip(1) {
        let r = ratio(x);
        out.min_ratio = out.min_ratio.min(r);
        if r <= beta && out.x0.is_none() {
            // keep the bracket end where the inequality holds
            let (mut lo, mut hi) = (prev, x);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if ratio(mid) <= beta {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let r0 = ratio(hi);
            out.x0 = Some(hi);
            out.ratio_at_x0 = Some(r0);
            out.convexity_value = Some(1.0 - 2.0 * r0);
        }
        prev = x;
    }
    Ok(out)
}
