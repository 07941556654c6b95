//! Radius of inverse convexity: the largest disk on which every univalent
//! B-form map satisfies the BC_I(alpha) inequality. It is the unique zero
//! in `(0, 1)` of
//!
//! ```text
//! P_alpha(x) = -(1 + alpha) x^2 + 4x + alpha - 1,
//! ```
//!
//! which comes from the distortion bound
//! `Re(2z g'/g - z g''/g') <= (4r - 2r^2)/(1 - r^2)` on `|z| = r`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::classify::{functional_value, membership, DiskSampler, Family, SAMPLED_TOL};
use crate::error::{Error, Result};
use crate::funcat::FunctionExpr;
use crate::optimize::{bisect, golden_section_min};

pub fn radius_polynomial(alpha: f64, x: f64) -> f64 {
    (-1.0 - alpha) * x * x + 4.0 * x + alpha - 1.0
}

/// `(2 - sqrt(3 + a^2))/(1 + a)`, written as `(1 - a)/(2 + sqrt(3 + a^2))`
/// to avoid cancellation as `a -> 1`.
pub fn closed_form_radius(alpha: f64) -> f64 {
    (1.0 - alpha) / (2.0 + (3.0 + alpha * alpha).sqrt())
}

/// `(4r - 2r^2)/(1 - r^2)`, the sup of `Re(2z g'/g - z g''/g')` on `|z| = r`
/// over univalent B-form maps.
pub fn distortion_bound(r: f64) -> f64 {
    (4.0 * r - 2.0 * r * r) / (1.0 - r * r)
}

/// `Re(2z g'/g - z g''/g')`, which equals `1 - ` the BC_I functional.
pub fn distortion_functional(g: &FunctionExpr, z: Complex64) -> Result<f64> {
    Ok(1.0 - functional_value(g, Family::BCI, z)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusResult {
    pub alpha: f64,
    pub r_alpha: f64,
    /// `|P_alpha(r_alpha)|`
    pub residual: f64,
    pub closed_form: f64,
}

pub fn radius_inverse_convexity(alpha: f64) -> Result<RadiusResult> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [0, 1)")));
    }
    // P(0) = alpha - 1 < 0 < 2 = P(1)
    let r = bisect(|x| radius_polynomial(alpha, x), 0.0, 1.0, 0.0);
    Ok(RadiusResult {
        alpha,
        r_alpha: r,
        residual: radius_polynomial(alpha, r).abs(),
        closed_form: closed_form_radius(alpha),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusCheck {
    pub r_alpha: f64,
    pub holds_inside: bool,
    pub margin: f64,
    pub witness: Complex64,
}

/// Samples the BC_I(alpha) inequality on `|z| <= r_alpha`.
pub fn verify_radius(g: &FunctionExpr, alpha: f64, s: &DiskSampler) -> Result<RadiusCheck> {
    let r = radius_inverse_convexity(alpha)?.r_alpha;
    let mut inner = s.clone();
    inner.r_max = r;
    inner.exclusion_radius = inner.exclusion_radius.min(0.5 * r);
    let v = membership(g, Family::BCI, alpha, &inner, SAMPLED_TOL)?;
    Ok(RadiusCheck {
        r_alpha: r,
        holds_inside: v.holds_on_samples,
        margin: v.margin,
        witness: v.witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotatedWitness {
    /// Rotation angle of `e^{i tau} g(e^{i tau} z)`.
    pub tau: f64,
    pub z: Complex64,
    /// BC_I functional of the rotated map at `z`.
    pub value: f64,
    pub violates: bool,
}

/// Evaluates the BC_I functional of `e^{i tau} g(e^{i tau} z)` at `z = r`
/// for `tau = k pi/4`, then refines the best angle by golden section;
/// returns the smallest value found.
pub fn rotated_witness(g: &FunctionExpr, alpha: f64, r: f64) -> Result<RotatedWitness> {
    let z = Complex64::new(r, 0.0);
    let value_at = |tau: f64| functional_value(&g.rotated(tau), Family::BCI, z);
    let mut best = (0.0, f64::INFINITY);
    for k in 0..8 {
        let tau = k as f64 * PI / 4.0;
        let v = value_at(tau)?;
        if v < best.1 {
            best = (tau, v);
        }
    }
    let (tau, v) = golden_section_min(
        |t| value_at(t).unwrap_or(f64::INFINITY),
        best.0 - PI / 4.0,
        best.0 + PI / 4.0,
        60,
    );
    if v < best.1 {
        best = (tau, v);
    }
    Ok(RotatedWitness {
        tau: best.0,
        z,
        value: best.1,
        violates: best.1 < alpha,
    })
}
