//! Schwarzian and pre-Schwarzian derivatives, the sampled Schwarzian norm,
//! and the Mobius / reciprocal invariance residuals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcat::{FunctionExpr, Mobius};
use crate::jet::{Jet3, SINGULARITY_THRESHOLD};
use crate::optimize::golden_section_max;

/// Outer radius of the norm grid.
pub const NORM_MAX_RADIUS: f64 = 1.0 - 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchwarzianSample {
    pub z: Complex64,
    pub s: Complex64,
    /// `(1 - |z|^2)^2 |S_f(z)|`
    pub weighted: f64,
}

impl SchwarzianSample {
    pub fn at(f: &FunctionExpr, z: Complex64) -> Result<Self> {
        let s = schwarzian(f, z)?;
        Ok(SchwarzianSample {
            z,
            s,
            weighted: weight(z) * s.norm(),
        })
    }
}

fn weight(z: Complex64) -> f64 {
    let w = 1.0 - z.norm_sqr();
    w * w
}

fn nonzero_derivative(j: &Jet3, z: Complex64) -> Result<()> {
    let m = j.v1.norm();
    if m < SINGULARITY_THRESHOLD {
        return Err(Error::LocallyNonUnivalent { z, modulus: m });
    }
    Ok(())
}

/// `S_f` from a jet: `f'''/f' - (3/2)(f''/f')^2`. Near a pole the two terms
/// cancel badly, so the jet of `1/f` (same Schwarzian) is used when `|f| > 1`.
pub fn schwarzian_of_jet(j: &Jet3) -> Complex64 {
    let j = match j.v0.norm() > 1.0 {
        true => j
            .recip()
            .ok()
            .filter(|r| r.is_finite() && r.v1.norm() >= SINGULARITY_THRESHOLD)
            .unwrap_or(*j),
        false => *j,
    };
    let pre = j.v2 / j.v1;
    j.v3 / j.v1 - 1.5 * pre * pre
}

pub fn schwarzian(f: &FunctionExpr, z: Complex64) -> Result<Complex64> {
    let j = f.eval_jet(z).map_err(|e| e.at(z))?;
    nonzero_derivative(&j, z)?;
    Ok(schwarzian_of_jet(&j))
}

/// `f''/f'`.
pub fn pre_schwarzian(f: &FunctionExpr, z: Complex64) -> Result<Complex64> {
    let j = f.eval_jet(z).map_err(|e| e.at(z))?;
    nonzero_derivative(&j, z)?;
    Ok(j.v2 / j.v1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    /// Largest weighted modulus actually evaluated; a lower bound of the sup.
    pub lower_bound: f64,
    pub argmax: Complex64,
    pub evaluated: usize,
    pub failed: usize,
}

/// Lower bound of `sup (1 - |z|^2)^2 |S_f(z)|` over the disk.
///
/// Rings sit at `r_k = k/rings * (1 - 1e-4)`, `k = 1..=rings`, each with
/// `points_per_ring` equally spaced angles. The best cell is refined by
/// golden-section search in `r`, then in the angle. Up to 1% of the grid may
/// fail to evaluate (poles, vanishing `f'`); those points are skipped.
fn centre_by_mean(f: &FunctionExpr, rho: f64) -> Option<f64> {
    const N: usize = 64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..N {
        let z = Complex64::from_polar(rho, 2.0 * PI * j as f64 / N as f64);
        sum += schwarzian(f, z).ok()?;
    }
    let v = (sum / N as f64).norm();
    v.is_finite().then_some(v)
}

pub fn schwarzian_norm(
    f: &FunctionExpr,
    rings: usize,
    points_per_ring: usize,
    refine_iters: usize,
) -> Result<NormEstimate> {
    if rings < 8 || points_per_ring < 64 {
        return Err(Error::InvalidArgument(format!(
            "norm grid needs rings >= 8 and points_per_ring >= 64 (got {rings} x {points_per_ring})"
        )));
    }
    let radius = |k: f64| k / rings as f64 * NORM_MAX_RADIUS;
    let angle = |j: f64| 2.0 * PI * j / points_per_ring as f64;
    let value = |r: f64, th: f64| -> Option<f64> {
        SchwarzianSample::at(f, Complex64::from_polar(r, th))
            .ok()
            .map(|s| s.weighted)
            .filter(|w| w.is_finite())
    };

    let total = rings * points_per_ring;
    let grid: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (k, j) = (idx / points_per_ring + 1, idx % points_per_ring);
            value(radius(k as f64), angle(j as f64))
        })
        .collect();
    let failed = grid.iter().filter(|v| v.is_none()).count();
    if failed * 100 > total {
        return Err(Error::TooManyFailures { failed, total });
    }

    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (idx, v) in grid.iter().enumerate() {
        if let Some(v) = v {
            if *v > best {
                best = *v;
                best_idx = idx;
            }
        }
    }
    let (k, j) = (best_idx / points_per_ring + 1, best_idx % points_per_ring);
    let mut r_best = radius(k as f64);
    let mut th_best = angle(j as f64);
    // The centre is sampled on its own. When f has a pole there, S_f(0) is
    // taken as the mean of S_f over a small circle, which is exact for the
    // removable singularity S_f = S_{1/f} has at a simple pole.
    if let Some(v) = value(0.0, 0.0).or_else(|| centre_by_mean(f, 0.5 * radius(1.0))) {
        if v > best {
            best = v;
            r_best = 0.0;
            th_best = 0.0;
        }
    }

    if refine_iters > 0 {
        let lo = radius(k.saturating_sub(1).max(1) as f64);
        let hi = radius(k as f64 + 1.0).min(NORM_MAX_RADIUS);
        let th = th_best;
        let score = |r: f64| value(r, th).unwrap_or(f64::NEG_INFINITY);
        let (r, v) = golden_section_max(score, lo, hi, refine_iters);
        if v > best {
            best = v;
            r_best = r;
        }
        let r = r_best;
        let score = |t: f64| value(r, t).unwrap_or(f64::NEG_INFINITY);
        let (t, v) = golden_section_max(score, angle(j as f64 - 1.0), angle(j as f64 + 1.0), refine_iters);
        if v > best {
            best = v;
            th_best = t;
        }
    }

    Ok(NormEstimate {
        lower_bound: best,
        argmax: Complex64::from_polar(r_best, th_best),
        evaluated: total - failed,
        failed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceResiduals {
    /// `max |S_{T o f} - S_f|`
    pub mobius: f64,
    /// `max |S_{1/f} - S_f|`
    pub reciprocal: f64,
}

impl InvarianceResiduals {
    pub fn max(&self) -> f64 {
        self.mobius.max(self.reciprocal)
    }
}

pub fn invariance_residuals(f: &FunctionExpr, t: &Mobius, samples: &[Complex64]) -> Result<InvarianceResiduals> {
    let tf = f.compose_mobius(t)?;
    let rf = f.reciprocal();
    let mut out = InvarianceResiduals {
        mobius: 0.0,
        reciprocal: 0.0,
    };
    for &z in samples {
        let s = schwarzian(f, z)?;
        out.mobius = out.mobius.max((schwarzian(&tf, z)? - s).norm());
        out.reciprocal = out.reciprocal.max((schwarzian(&rf, z)? - s).norm());
    }
    Ok(out)
}
