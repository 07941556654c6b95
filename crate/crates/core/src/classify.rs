//! Sample-based membership tests for the families C(a), S*(a), BC(a),
//! BS*(a) and BC_I(a).
//!
//! Every family is tested through a real functional whose sign convention
//! makes membership at order `a` read `functional >= a`:
//!
//! | family | functional |
//! |--------|------------|
//! | C      | `Re(1 + z f''/f')` |
//! | S*     | `Re(z f'/f)` |
//! | BC     | `-Re(1 + z f''/f')` |
//! | BS*    | `-Re(z f'/f)` |
//! | BC_I   | `Re(1 + z g''/g' - 2 z g'/g)` |
//!
//! Each functional is the real part of a function that is analytic on the
//! disk once the removable singularity at the origin is filled in, so the
//! infimum sits near the outer ring and the sampler clusters rings there.
//! Univalence is never verified.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcat::FunctionExpr;
use crate::jet::SINGULARITY_THRESHOLD;
use crate::optimize::golden_section_min;

/// Verdict tolerance for closed-form functionals.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Verdict tolerance for sampled grids.
pub const SAMPLED_TOL: f64 = 1e-6;
/// Sample points with `|f'|` below this are flagged.
pub const TINY_DERIVATIVE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    C,
    Sstar,
    BC,
    BSstar,
    BCI,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::C, Family::Sstar, Family::BC, Family::BSstar, Family::BCI];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::C => "c",
            Family::Sstar => "sstar",
            Family::BC => "bc",
            Family::BSstar => "bsstar",
            Family::BCI => "bci",
        }
    }

    /// Families defined for functions with a simple pole at the origin.
    pub fn is_meromorphic(self) -> bool {
        matches!(self, Family::BC | Family::BSstar | Family::BCI)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "c" => Family::C,
            "sstar" | "s*" => Family::Sstar,
            "bc" => Family::BC,
            "bsstar" | "bs*" => Family::BSstar,
            "bci" | "bc_i" => Family::BCI,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown family `{s}` (expected c, sstar, bc, bsstar, bci)"
                )))
            }
        })
    }
}

/// Sampling plan on the disk `|z| <= r_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskSampler {
    pub r_max: f64,
    pub rings: usize,
    pub points_per_ring: usize,
    /// Radius of the innermost ring; the punctured neighbourhood of 0.
    pub exclusion_radius: f64,
    pub extra_exclusions: Vec<(Complex64, f64)>,
}

impl Default for DiskSampler {
    fn default() -> Self {
        DiskSampler {
            r_max: 0.999,
            rings: 64,
            points_per_ring: 512,
            exclusion_radius: 1e-3,
            extra_exclusions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub z: Complex64,
    /// `None` for the centre.
    pub ring: Option<usize>,
    pub angle_index: usize,
}

impl DiskSampler {
    pub fn new(r_max: f64, rings: usize, points_per_ring: usize) -> Self {
        DiskSampler {
            r_max,
            rings,
            points_per_ring,
            ..Default::default()
        }
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.exclusion_radius && self.exclusion_radius < self.r_max && self.r_max < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sampler needs 0 < exclusion_radius < r_max < 1 (got {} and {})",
                self.exclusion_radius, self.r_max
            )));
        }
        if self.rings == 0 || self.points_per_ring == 0 {
            return Err(Error::InvalidArgument(
                "sampler needs at least one ring and one point".into(),
            ));
        }
        Ok(())
    }

    /// At least 1024 ring points.
    pub fn is_verdict_grade(&self) -> bool {
        self.rings * self.points_per_ring >= 1024
    }

    /// Ring radii from `exclusion_radius` to `r_max`, spaced geometrically
    /// toward the outer edge: the gap to `r_max` halves every `rings/10`
    /// rings.
    pub fn ring_radii(&self) -> Vec<f64> {
        let n = self.rings;
        if n == 1 {
            return vec![self.r_max];
        }
        let span = self.r_max - self.exclusion_radius;
        let full = 1.0 - 2f64.powi(-10);
        (0..n)
            .map(|j| {
                if j == n - 1 {
                    return self.r_max;
                }
                let s = (1.0 - 2f64.powf(-10.0 * j as f64 / (n - 1) as f64)) / full;
                self.exclusion_radius + span * s
            })
            .collect()
    }

    pub fn angle(&self, index: f64) -> f64 {
        2.0 * PI * index / self.points_per_ring as f64
    }

    fn excluded(&self, z: Complex64, extra: &[(Complex64, f64)]) -> bool {
        self.extra_exclusions
            .iter()
            .chain(extra)
            .any(|(c, r)| (z - c).norm() < *r)
    }

    /// The centre followed by every ring point, minus excluded neighbourhoods.
    pub fn points(&self) -> Vec<SamplePoint> {
        self.points_excluding(&[])
    }

    fn points_excluding(&self, extra: &[(Complex64, f64)]) -> Vec<SamplePoint> {
        let mut out = Vec::with_capacity(1 + self.rings * self.points_per_ring);
        let centre = Complex64::new(0.0, 0.0);
        if !self.excluded(centre, extra) {
            out.push(SamplePoint {
                z: centre,
                ring: None,
                angle_index: 0,
            });
        }
        for (k, r) in self.ring_radii().into_iter().enumerate() {
            for j in 0..self.points_per_ring {
                let z = Complex64::from_polar(r, self.angle(j as f64));
                if !self.excluded(z, extra) {
                    out.push(SamplePoint {
                        z,
                        ring: Some(k),
                        angle_index: j,
                    });
                }
            }
        }
        out
    }
}

/// Functional value together with `|f'(z)|`.
fn functional_with_derivative(f: &FunctionExpr, family: Family, z: Complex64) -> Result<(f64, f64)> {
    if z == Complex64::new(0.0, 0.0) && family != Family::C {
        // removable singularity: z f'/f -> -1 and z f''/f' -> -2 for B-form
        // functions, z f'/f -> 1 for normalised analytic ones
        return Ok((1.0, f64::INFINITY));
    }
    let j = match f.eval_jet(z) {
        Ok(j) => j,
        Err(_) if z == Complex64::new(0.0, 0.0) => return centre_of_convexity(f),
        Err(e) => return Err(e.at(z)),
    };
    let needs_derivative_ratio = !matches!(family, Family::Sstar | Family::BSstar);
    let d = j.v1.norm();
    if needs_derivative_ratio && d < SINGULARITY_THRESHOLD {
        return Err(Error::LocallyNonUnivalent { z, modulus: d });
    }
    let one = Complex64::new(1.0, 0.0);
    let log_derivative = || -> Result<Complex64> {
        if j.v0.norm() < SINGULARITY_THRESHOLD {
            return Err(Error::EvaluationFailed {
                z,
                reason: "f vanishes".into(),
            });
        }
        Ok(z * j.v1 / j.v0)
    };
    let value = match family {
        Family::C => (one + z * j.v2 / j.v1).re,
        Family::BC => -(one + z * j.v2 / j.v1).re,
        Family::Sstar => log_derivative()?.re,
        Family::BSstar => -log_derivative()?.re,
        Family::BCI => (one + z * j.v2 / j.v1 - 2.0 * log_derivative()?).re,
    };
    if !value.is_finite() {
        return Err(Error::EvaluationFailed {
            z,
            reason: "non-finite functional".into(),
        });
    }
    Ok((value, d))
}

/// C functional at the origin when the expression itself is singular there
/// (e.g. `1/(z + 1/z)`): the smallest value on a tiny circle.
fn centre_of_convexity(f: &FunctionExpr) -> Result<(f64, f64)> {
    let mut out = (f64::INFINITY, f64::INFINITY);
    for k in 0..8 {
        let z = Complex64::from_polar(1e-6, k as f64 * std::f64::consts::FRAC_PI_4);
        let (v, d) = functional_with_derivative(f, Family::C, z)?;
        out = (out.0.min(v), out.1.min(d));
    }
    Ok(out)
}

/// The family's test functional at `z`. At `z = 0` the limit value 1 is
/// returned for every family except C, whose functional is evaluated
/// directly (it equals 1 for any `f` analytic at the origin).
pub fn functional_value(f: &FunctionExpr, family: Family, z: Complex64) -> Result<f64> {
    functional_with_derivative(f, family, z).map(|(v, _)| v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyVerdict {
    pub family: Family,
    pub alpha: f64,
    pub holds_on_samples: bool,
    /// `min(functional) - alpha`
    pub margin: f64,
    pub witness: Complex64,
    pub witness_value: f64,
    /// `min(functional)` clamped to `[0, 1]`.
    pub order_estimate: f64,
    pub tol: f64,
    pub samples: usize,
    /// Points where `0 < |f'| < 1e-10`.
    pub tiny_derivative_points: usize,
    /// Set for BC_I, whose definition also requires univalence.
    pub univalence_not_checked: bool,
}

struct Evaluated {
    points: Vec<SamplePoint>,
    values: Vec<f64>,
    tiny: usize,
    argmin: usize,
}

fn evaluate(f: &FunctionExpr, family: Family, s: &DiskSampler) -> Result<Evaluated> {
    s.validate()?;
    let extra: Vec<(Complex64, f64)> = f
        .singular_points
        .iter()
        .filter(|p| p.norm() > 0.0)
        .map(|p| (*p, f.exclusion_radius))
        .collect();
    let points = s.points_excluding(&extra);
    let results: Vec<Result<(f64, f64)>> = points
        .par_iter()
        .map(|p| functional_with_derivative(f, family, p.z))
        .collect();
    let mut values = Vec::with_capacity(points.len());
    let mut tiny = 0;
    for r in results {
        let (v, d) = r?;
        if d < TINY_DERIVATIVE {
            tiny += 1;
        }
        values.push(v);
    }
    let argmin = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v < values[best] { i } else { best });
    Ok(Evaluated {
        points,
        values,
        tiny,
        argmin,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [0, 1)")));
    }
    Ok(())
}

pub fn membership(f: &FunctionExpr, family: Family, alpha: f64, s: &DiskSampler, tol: f64) -> Result<FamilyVerdict> {
    check_alpha(alpha)?;
    let ev = evaluate(f, family, s)?;
    let min = ev.values[ev.argmin];
    let margin = min - alpha;
    Ok(FamilyVerdict {
        family,
        alpha,
        holds_on_samples: margin >= -tol,
        margin,
        witness: ev.points[ev.argmin].z,
        witness_value: min,
        order_estimate: min.clamp(0.0, 1.0),
        tol,
        samples: ev.points.len(),
        tiny_derivative_points: ev.tiny,
        univalence_not_checked: family == Family::BCI,
    })
}

/// Infimum of the family functional: grid minimum followed by one
/// golden-section pass in angle along the extremal ring.
pub fn order_estimate(f: &FunctionExpr, family: Family, s: &DiskSampler) -> Result<f64> {
    order_estimate_with_witness(f, family, s).map(|(v, _)| v)
}

pub fn order_estimate_with_witness(f: &FunctionExpr, family: Family, s: &DiskSampler) -> Result<(f64, Complex64)> {
    let ev = evaluate(f, family, s)?;
    let p = ev.points[ev.argmin];
    let mut best = (ev.values[ev.argmin], p.z);
    if p.ring.is_some() {
        let r = p.z.norm();
        let j = p.angle_index as f64;
        let score = |t: f64| functional_value(f, family, Complex64::from_polar(r, t)).unwrap_or(f64::INFINITY);
        let (t, v) = golden_section_min(score, s.angle(j - 1.0), s.angle(j + 1.0), 60);
        if v < best.0 {
            best = (v, Complex64::from_polar(r, t));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InjectivitySpotCheck {
    pub pairs: usize,
    /// Pairs with `|f(z1) - f(z2)| < 1e-8 |z1 - z2|`.
    pub suspicious: usize,
    pub min_ratio: f64,
}

/// Heuristic univalence probe over random pairs in `0 < |z| <= r_max`.
pub fn injectivity_spot_check(f: &FunctionExpr, r_max: f64, pairs: usize, seed: u64) -> InjectivitySpotCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let r = r_max * rng.gen::<f64>().sqrt();
        Complex64::from_polar(r.max(f.exclusion_radius), rng.gen_range(0.0..2.0 * PI))
    };
    let mut out = InjectivitySpotCheck {
        pairs: 0,
        suspicious: 0,
        min_ratio: f64::INFINITY,
    };
    for _ in 0..pairs {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let (Ok(fa), Ok(fb)) = (f.eval(a), f.eval(b)) else {
            continue;
        };
        let ratio = (fa - fb).norm() / (a - b).norm();
        if !ratio.is_finite() {
            continue;
        }
        out.pairs += 1;
        out.min_ratio = out.min_ratio.min(ratio);
        if ratio < 1e-8 {
            out.suspicious += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> FunctionExpr {
        FunctionExpr::parse(s).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quarter_plus_inverse_functional() {
        let f = parse("z/4 + 1/z");
        let v = functional_value(&f, Family::BC, c(0.5, 0.0)).unwrap();
        assert!((v - 17.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn neg_log_at_origin() {
        let f = parse("-log(1-z)");
        assert_eq!(functional_value(&f, Family::C, c(0.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn limit_at_origin_for_b_form() {
        for text in ["z/4 + 1/z", "(1-z)/z", "z + 1/z - 2", "-(1)/log(1-z)"] {
            let f = parse(text);
            assert_eq!(functional_value(&f, Family::BC, c(0.0, 0.0)).unwrap(), 1.0);
            let near = functional_value(&f, Family::BC, c(1e-3, 0.0)).unwrap();
            assert!((near - 1.0).abs() < 1e-2, "{text}: {near}");
            let nearer = functional_value(&f, Family::BC, c(0.0, 1e-4)).unwrap();
            assert!((nearer - 1.0).abs() < 1e-4, "{text}: {nearer}");
        }
    }

    #[test]
    fn sampler_layout() {
        let s = DiskSampler::default();
        let radii = s.ring_radii();
        assert_eq!(radii.len(), 64);
        assert_eq!(radii[0], 1e-3);
        assert_eq!(*radii.last().unwrap(), 0.999);
        assert!(radii.windows(2).all(|w| w[1] > w[0]));
        // denser toward the edge
        assert!(radii[63] - radii[62] < radii[1] - radii[0]);
        assert_eq!(s.points().len(), 1 + 64 * 512);
        assert!(s.is_verdict_grade());
        assert!(!DiskSampler::new(0.9, 4, 16).is_verdict_grade());
        assert!(DiskSampler::new(1.0, 4, 16).validate().is_err());
    }

    #[test]
    fn quarter_plus_inverse_membership() {
        let f = parse("z/4 + 1/z");
        let v = membership(&f, Family::BC, 0.5, &DiskSampler::default(), SAMPLED_TOL).unwrap();
        assert!(v.holds_on_samples);
        assert!((v.order_estimate - 0.6).abs() < 1e-3);
        assert!(v.witness.re.abs() < 1e-9 && (v.witness.im.abs() - 0.999).abs() < 1e-12);
        assert!(!v.univalence_not_checked);
    }

    #[test]
    fn koebe_is_not_convex() {
        let k = parse("z/(1-z)^2");
        let v = membership(&k, Family::C, 0.0, &DiskSampler::default(), SAMPLED_TOL).unwrap();
        assert!(!v.holds_on_samples);
        assert!((v.witness - c(-0.999, 0.0)).norm() < 1e-9, "{}", v.witness);
    }

    #[test]
    fn order_estimates() {
        let s = DiskSampler::default();
        let v = order_estimate(&parse("-log(1-z)"), Family::C, &s).unwrap();
        assert!((v - 0.5).abs() < 1e-3);
        let v = order_estimate(&parse("z/4 + 1/z"), Family::BC, &s).unwrap();
        assert!((v - 0.6).abs() < 1e-3);
        let v = order_estimate(&parse("(1-z)/z"), Family::BC, &s).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scale_invariance_of_inverse_convexity() {
        let g = parse("-(1)/log(1-z)");
        for lambda in [c(2.0, 0.0), c(0.0, 1.0), c(-3.0, 4.0)] {
            let h = g.scaled(lambda);
            for z in [c(0.3, 0.1), c(-0.5, 0.6), c(0.9, 0.0)] {
                let a = functional_value(&g, Family::BCI, z).unwrap();
                let b = functional_value(&h, Family::BCI, z).unwrap();
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn reciprocal_duality_of_starlikeness() {
        let s = DiskSampler::new(0.99, 16, 128);
        for text in ["z/(1-z)^2", "z/(1-z)", "-log(1-z)"] {
            let f = parse(text);
            let a = order_estimate(&f, Family::Sstar, &s).unwrap();
            let b = order_estimate(&f.reciprocal(), Family::BSstar, &s).unwrap();
            assert!((a - b).abs() <= 1e-9, "{text}: {a} vs {b}");
        }
    }

    #[test]
    fn alpha_out_of_range() {
        let f = parse("z");
        assert!(membership(&f, Family::C, 1.0, &DiskSampler::default(), 1e-6).is_err());
        assert!(membership(&f, Family::C, -0.1, &DiskSampler::default(), 1e-6).is_err());
    }

    #[test]
    fn vanishing_derivative_errors() {
        let f = parse("z^2");
        assert!(matches!(
            functional_value(&f, Family::C, c(0.0, 0.0)),
            Err(Error::LocallyNonUnivalent { .. })
        ));
    }

    #[test]
    fn family_names() {
        for fam in Family::ALL {
            assert_eq!(fam.as_str().parse::<Family>().unwrap(), fam);
        }
        assert!("x".parse::<Family>().is_err());
    }

    #[test]
    fn spot_check_flags_nothing_for_univalent() {
        let r = injectivity_spot_check(&parse("z/(1-z)^2"), 0.99, 10_000, 7);
        assert_eq!(r.suspicious, 0);
        assert!(r.pairs > 9_000);
    }
}
