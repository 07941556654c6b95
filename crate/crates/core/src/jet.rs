//! Complex Taylor jets truncated at order three.
//!
//! A [`Jet3`] carries `(f, f', f'', f''')` at a point. Arithmetic follows the
//! Leibniz rule and elementary functions are applied through the order-3
//! Faa di Bruno formula, so every derivative is exact up to rounding.
//!
//! `log`, `sqrt` and non-integer powers use the principal branch, with the cut
//! along the negative real axis.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Moduli below this trigger [`Error::DivisionAtZero`] or
/// [`Error::BranchPointOrPole`] instead of huge values.
pub const SINGULARITY_THRESHOLD: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub v0: Complex64,
    pub v1: Complex64,
    pub v2: Complex64,
    pub v3: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElemFn {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Cot,
    Sqrt,
    PowConst(f64),
}

impl Jet3 {
    pub const fn new(v0: Complex64, v1: Complex64, v2: Complex64, v3: Complex64) -> Self {
        Jet3 { v0, v1, v2, v3 }
    }

    /// The identity jet `(z0, 1, 0, 0)`.
    pub fn seed(z0: Complex64) -> Self {
        Jet3::new(z0, ONE, ZERO, ZERO)
    }

    pub fn constant(c: Complex64) -> Self {
        Jet3::new(c, ZERO, ZERO, ZERO)
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.v0, self.v1, self.v2, self.v3]
    }

    pub fn scale(self, c: Complex64) -> Self {
        Jet3::new(self.v0 * c, self.v1 * c, self.v2 * c, self.v3 * c)
    }

    /// Jet of `g(a(z))` given `g` and its first three derivatives at `a.v0`.
    pub fn compose(self, g: [Complex64; 4]) -> Self {
        let [g0, g1, g2, g3] = g;
        let (a1, a2, a3) = (self.v1, self.v2, self.v3);
        Jet3::new(
            g0,
            g1 * a1,
            g2 * a1 * a1 + g1 * a2,
            g3 * a1 * a1 * a1 + 3.0 * g2 * a1 * a2 + g1 * a3,
        )
    }

    pub fn recip(self) -> Result<Self> {
        self.recip_with(SINGULARITY_THRESHOLD)
    }

    pub fn recip_with(self, threshold: f64) -> Result<Self> {
        let m = self.v0.norm();
        if m < threshold || !m.is_finite() {
            return Err(Error::DivisionAtZero { modulus: m });
        }
        let r = self.v0.inv();
        let r2 = r * r;
        Ok(self.compose([r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2]))
    }

    pub fn checked_div(self, rhs: Jet3) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }

    pub fn arith(a: Jet3, b: Jet3, op: ArithOp) -> Result<Jet3> {
        match op {
            ArithOp::Add => Ok(a + b),
            ArithOp::Sub => Ok(a - b),
            ArithOp::Mul => Ok(a * b),
            ArithOp::Div => a.checked_div(b),
        }
    }

    /// `self^n` by repeated squaring; negative `n` goes through [`Jet3::recip`].
    pub fn powi(self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.recip()? } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Jet3::constant(ONE);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq;
            }
            sq = sq * sq;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn apply(self, f: ElemFn) -> Result<Self> {
        let x = self.v0;
        let pole = |func: &'static str| Error::BranchPointOrPole { func, arg: x };
        let g = match f {
            ElemFn::Exp => {
                let e = x.exp();
                [e, e, e, e]
            }
            ElemFn::Log => {
                if x.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole("log"));
                }
                let r = x.inv();
                [x.ln(), r, -r * r, 2.0 * r * r * r]
            }
            ElemFn::Sin => {
                let (s, c) = (x.sin(), x.cos());
                [s, c, -s, -c]
            }
            ElemFn::Cos => {
                let (s, c) = (x.sin(), x.cos());
                [c, -s, -c, s]
            }
            ElemFn::Tan => {
                let c = x.cos();
                if c.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole("tan"));
                }
                let t = x.sin() / c;
                let sec2 = ONE + t * t;
                [t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (ONE + 3.0 * t * t)]
            }
            ElemFn::Cot => {
                let s = x.sin();
                if s.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole("cot"));
                }
                let k = x.cos() / s;
                let csc2 = ONE + k * k;
                [k, -csc2, 2.0 * k * csc2, -2.0 * csc2 * (ONE + 3.0 * k * k)]
            }
            ElemFn::Sqrt => {
                if x.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole("sqrt"));
                }
                let s = x.sqrt();
                let r = x.inv();
                let d1 = 0.5 / s;
                let d2 = -0.5 * d1 * r;
                let d3 = -1.5 * d2 * r;
                [s, d1, d2, d3]
            }
            ElemFn::PowConst(c) => {
                if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
                    return self.powi(c as i32);
                }
                if x.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole("pow"));
                }
                let p = x.powf(c);
                let r = x.inv();
                let d1 = c * p * r;
                let d2 = (c - 1.0) * d1 * r;
                let d3 = (c - 2.0) * d2 * r;
                [p, d1, d2, d3]
            }
        };
        Ok(self.compose(g))
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, b: Jet3) -> Jet3 {
        Jet3::new(self.v0 + b.v0, self.v1 + b.v1, self.v2 + b.v2, self.v3 + b.v3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, b: Jet3) -> Jet3 {
        Jet3::new(self.v0 - b.v0, self.v1 - b.v1, self.v2 - b.v2, self.v3 - b.v3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, b: Jet3) -> Jet3 {
        let a = self;
        Jet3::new(
            a.v0 * b.v0,
            a.v0 * b.v1 + a.v1 * b.v0,
            a.v0 * b.v2 + 2.0 * a.v1 * b.v1 + a.v2 * b.v0,
            a.v0 * b.v3 + 3.0 * (a.v1 * b.v2 + a.v2 * b.v1) + a.v3 * b.v0,
        )
    }
}

/// `-w` with `0 - w` semantics, so a real negative value keeps `+0`
/// imaginary part and stays on the upper side of the branch cut, matching
/// a negative literal.
pub(crate) fn negate(w: Complex64) -> Complex64 {
    ZERO - w
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(negate(self.v0), negate(self.v1), negate(self.v2), negate(self.v3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    /// Derivatives from the Cauchy integral on a small circle (trapezoid rule).
    fn cauchy_derivatives(f: impl Fn(Complex64) -> Complex64, z0: Complex64, rho: f64) -> [Complex64; 4] {
        let n = 64;
        let mut out = [ZERO; 4];
        for j in 0..n {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let w = Complex64::from_polar(1.0, th);
            let fz = f(z0 + rho * w);
            for (k, o) in out.iter_mut().enumerate() {
                *o += fz * w.powi(-(k as i32));
            }
        }
        let fact = [1.0, 1.0, 2.0, 6.0];
        for k in 0..4 {
            out[k] *= fact[k] / (n as f64 * rho.powi(k as i32));
        }
        out
    }

    #[test]
    fn seed_is_identity_jet() {
        for z in [c(0.5, 0.0), c(0.0, 0.0), c(0.3, 0.4)] {
            assert_eq!(Jet3::seed(z).components(), [z, ONE, ZERO, ZERO]);
        }
    }

    #[test]
    fn reciprocal_of_variable_at_half() {
        let one = Jet3::constant(ONE);
        let j = Jet3::arith(one, Jet3::seed(c(0.5, 0.0)), ArithOp::Div).unwrap();
        let want = [c(2.0, 0.0), c(-4.0, 0.0), c(16.0, 0.0), c(-96.0, 0.0)];
        for (a, b) in j.components().iter().zip(want) {
            assert!(close(*a, b, 1e-14), "{a} vs {b}");
        }
    }

    #[test]
    fn square_follows_leibniz() {
        let f = Jet3::seed(c(0.3, -0.2)).apply(ElemFn::Sin).unwrap();
        let sq = f * f;
        assert!(close(sq.v1, 2.0 * f.v0 * f.v1, 1e-15));
        let zero = f + (-f);
        assert_eq!(zero.components(), [ZERO; 4]);
    }

    #[test]
    fn division_at_zero_is_reported() {
        let r = Jet3::arith(Jet3::seed(ONE), Jet3::seed(c(1e-14, 0.0)), ArithOp::Div);
        assert!(matches!(r, Err(Error::DivisionAtZero { .. })));
    }

    #[test]
    fn exp_at_origin() {
        let j = Jet3::seed(ZERO).apply(ElemFn::Exp).unwrap();
        assert_eq!(j.components(), [ONE; 4]);
    }

    #[test]
    fn log_one_minus_z_at_origin() {
        let arg = Jet3::constant(ONE) - Jet3::seed(ZERO);
        let j = arg.apply(ElemFn::Log).unwrap();
        let want = [ZERO, c(-1.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0)];
        for (a, b) in j.components().iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn cot_matches_laurent_series() {
        // cot z = 1/z + sum_{n>=1} (-1)^n 2^{2n} B_{2n} z^{2n-1} / (2n)!
        let bernoulli = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
            -3617.0 / 510.0,
        ];
        let z: f64 = 0.3;
        let mut series = 1.0 / z;
        let mut fact = 1.0;
        for (i, b) in bernoulli.iter().enumerate() {
            let n = i as i32 + 1;
            fact *= (2 * n - 1) as f64 * (2 * n) as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            series += sign * 4f64.powi(n) * b * z.powi(2 * n - 1) / fact;
        }
        let j = Jet3::seed(c(z, 0.0)).apply(ElemFn::Cot).unwrap();
        assert!((j.v0.re - series).abs() < 1e-12 * series.abs());
        assert!((series - 3.232_728_143_765_827_6).abs() < 1e-13);
    }

    #[test]
    fn cot_pole_is_reported() {
        let r = Jet3::seed(ZERO).apply(ElemFn::Cot);
        assert!(matches!(r, Err(Error::BranchPointOrPole { func: "cot", .. })));
        assert!(Jet3::seed(ZERO).apply(ElemFn::Log).is_err());
        assert!(Jet3::seed(ZERO).apply(ElemFn::Sqrt).is_err());
        assert!(Jet3::seed(ZERO).apply(ElemFn::PowConst(0.5)).is_err());
        assert!(Jet3::seed(ZERO).apply(ElemFn::PowConst(2.0)).is_ok());
    }

    #[test]
    fn elementary_functions_match_cauchy_oracle() {
        type Reference = fn(Complex64) -> Complex64;
        let cases: Vec<(ElemFn, Reference)> = vec![
            (ElemFn::Exp, |z| z.exp()),
            (ElemFn::Log, |z| z.ln()),
            (ElemFn::Sin, |z| z.sin()),
            (ElemFn::Cos, |z| z.cos()),
            (ElemFn::Tan, |z| z.tan()),
            (ElemFn::Cot, |z| z.cos() / z.sin()),
            (ElemFn::Sqrt, |z| z.sqrt()),
            (ElemFn::PowConst(-0.5), |z| z.powf(-0.5)),
            (ElemFn::PowConst(3.0), |z| z * z * z),
        ];
        let points = [c(0.7, 0.2), c(1.1, -0.4), c(0.4, 0.6)];
        for (f, oracle) in &cases {
            for &z in &points {
                let jet = Jet3::seed(z).apply(*f).unwrap();
                let want = cauchy_derivatives(oracle, z, 0.05);
                for (a, b) in jet.components().iter().zip(want) {
                    assert!(close(*a, b, 1e-10), "{f:?} at {z}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn chain_rule_through_composition() {
        // exp(sin(z^2)) against the contour oracle
        let z = c(0.4, -0.3);
        let jet = (Jet3::seed(z) * Jet3::seed(z))
            .apply(ElemFn::Sin)
            .unwrap()
            .apply(ElemFn::Exp)
            .unwrap();
        let want = cauchy_derivatives(|w| (w * w).sin().exp(), z, 0.05);
        for (a, b) in jet.components().iter().zip(want) {
            assert!(close(*a, b, 1e-10));
        }
    }

    fn arb_point() -> impl Strategy<Value = Complex64> {
        (0.2f64..1.2, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
    }

    fn arb_jet() -> impl Strategy<Value = Jet3> {
        (arb_point(), -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)
            .prop_map(|(v0, a, b, d)| Jet3::new(v0, c(a, b), c(b, d), c(d, a)))
    }

    proptest! {
        #[test]
        fn div_undoes_mul(a in arb_jet(), b in arb_jet()) {
            let back = (a * b).checked_div(b).unwrap();
            // division amplifies rounding by powers of |b_k / b_0|
            let m = [b.v1, b.v2, b.v3].iter().map(|v| v.norm()).fold(0.0, f64::max) / b.v0.norm();
            let tol = 1e-14 * (1.0 + m).powi(4);
            for (x, y) in back.components().iter().zip(a.components()) {
                prop_assert!(close(*x, y, tol), "{} vs {} (tol {})", x, y, tol);
            }
        }

        #[test]
        fn composition_is_associative(z in arb_point()) {
            // exp(sin(h)) with h = z^2 + 1, grouped both ways
            let h = Jet3::seed(z) * Jet3::seed(z) + Jet3::constant(ONE);
            let left = h.apply(ElemFn::Sin).unwrap().apply(ElemFn::Exp).unwrap();
            let outer = Jet3::seed(h.v0).apply(ElemFn::Sin).unwrap().apply(ElemFn::Exp).unwrap();
            let right = h.compose(outer.components());
            for (x, y) in left.components().iter().zip(right.components()) {
                prop_assert!(close(*x, y, 1e-12));
            }
        }
    }
}
