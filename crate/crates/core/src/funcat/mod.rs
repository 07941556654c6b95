//! One-variable complex expressions: parsing, printing, evaluation on
//! [`Jet3`], symbolic differentiation, and the built-in function catalog.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{ElemFn, Jet3, SINGULARITY_THRESHOLD};

pub mod catalog;
mod parser;

pub use catalog::{CatalogEntry, ExpectedMembership};

/// Default punctured neighbourhood of the pole at the origin.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Cot,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Cot,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn elem(self) -> ElemFn {
        match self {
            Func::Sin => ElemFn::Sin,
            Func::Cos => ElemFn::Cos,
            Func::Tan => ElemFn::Tan,
            Func::Cot => ElemFn::Cot,
            Func::Exp => ElemFn::Exp,
            Func::Log => ElemFn::Log,
            Func::Sqrt => ElemFn::Sqrt,
        }
    }

    fn value(self, x: Complex64) -> Result<Complex64> {
        let pole = || Error::BranchPointOrPole {
            func: self.name(),
            arg: x,
        };
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => {
                let c = x.cos();
                if c.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole());
                }
                x.sin() / c
            }
            Func::Cot => {
                let s = x.sin();
                if s.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole());
                }
                x.cos() / s
            }
            Func::Exp => x.exp(),
            Func::Log => {
                if x.norm() < SINGULARITY_THRESHOLD {
                    return Err(pole());
                }
                x.ln()
            }
            // the value is continuous at the branch point; only jets fail there
            Func::Sqrt => x.sqrt(),
        })
    }
}

/// Expression tree in a single variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn real(x: f64) -> Expr {
        Expr::Const(Complex64::new(x, 0.0))
    }

    fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(Complex64::new(1.0, 0.0))
    }

    // Smart constructors fold the trivial identities produced by `derivative`.

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            b
        } else if b.is_zero() {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            a
        } else if a.is_zero() {
            Expr::neg(b)
        } else {
            Expr::Sub(Box::new(a), Box::new(b))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            Expr::real(0.0)
        } else if a.is_one() {
            b
        } else if b.is_one() {
            a
        } else {
            Expr::Mul(Box::new(a), Box::new(b))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_one() {
            a
        } else if a.is_zero() {
            Expr::real(0.0)
        } else {
            Expr::Div(Box::new(a), Box::new(b))
        }
    }

    pub fn pow(a: Expr, c: f64) -> Expr {
        if c == 0.0 {
            Expr::real(1.0)
        } else if c == 1.0 {
            a
        } else {
            Expr::Pow(Box::new(a), c)
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn eval_jet(&self, z: Jet3) -> Result<Jet3> {
        Ok(match self {
            Expr::Const(c) => Jet3::constant(*c),
            Expr::Var => z,
            Expr::Neg(a) => -a.eval_jet(z)?,
            Expr::Add(a, b) => a.eval_jet(z)? + b.eval_jet(z)?,
            Expr::Sub(a, b) => a.eval_jet(z)? - b.eval_jet(z)?,
            Expr::Mul(a, b) => a.eval_jet(z)? * b.eval_jet(z)?,
            Expr::Div(a, b) => {
                let num = a.eval_jet(z)?;
                match b.as_const() {
                    Some(c) if c.norm() >= SINGULARITY_THRESHOLD => num.scale(c.inv()),
                    _ => num.checked_div(b.eval_jet(z)?)?,
                }
            }
            Expr::Pow(a, c) => a.eval_jet(z)?.apply(ElemFn::PowConst(*c))?,
            Expr::Call(f, a) => a.eval_jet(z)?.apply(f.elem())?,
        })
    }

    /// Plain value, without derivatives.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => z,
            Expr::Neg(a) => crate::jet::negate(a.eval(z)?),
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let d = b.eval(z)?;
                if d.norm() < SINGULARITY_THRESHOLD {
                    return Err(Error::DivisionAtZero { modulus: d.norm() });
                }
                a.eval(z)? / d
            }
            Expr::Pow(a, c) => {
                let x = a.eval(z)?;
                if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
                    if *c < 0.0 && x.norm() < SINGULARITY_THRESHOLD {
                        return Err(Error::DivisionAtZero { modulus: x.norm() });
                    }
                    x.powi(*c as i32)
                } else if x.norm() < SINGULARITY_THRESHOLD {
                    if *c <= 0.0 {
                        return Err(Error::BranchPointOrPole { func: "pow", arg: x });
                    }
                    Complex64::new(0.0, 0.0)
                } else {
                    x.powf(*c)
                }
            }
            Expr::Call(f, a) => f.value(a.eval(z)?)?,
        })
    }

    /// Symbolic d/dz.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::real(0.0),
            Expr::Var => Expr::real(1.0),
            Expr::Neg(a) => Expr::neg(a.derivative()),
            Expr::Add(a, b) => Expr::add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => Expr::sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                let num = Expr::sub(Expr::mul(a.derivative(), b.clone()), Expr::mul(a, b.derivative()));
                Expr::div(num, Expr::pow(b, 2.0))
            }
            Expr::Pow(a, c) => Expr::mul(
                Expr::mul(Expr::real(*c), Expr::pow((**a).clone(), c - 1.0)),
                a.derivative(),
            ),
            Expr::Call(f, a) => {
                let inner = (**a).clone();
                let da = a.derivative();
                let one = || Expr::real(1.0);
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, inner),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, inner)),
                    Func::Tan => Expr::add(one(), Expr::pow(Expr::call(Func::Tan, inner), 2.0)),
                    Func::Cot => Expr::neg(Expr::add(one(), Expr::pow(Expr::call(Func::Cot, inner), 2.0))),
                    Func::Exp => Expr::call(Func::Exp, inner),
                    Func::Log => Expr::div(one(), inner),
                    Func::Sqrt => Expr::div(one(), Expr::mul(Expr::real(2.0), Expr::call(Func::Sqrt, inner))),
                };
                Expr::mul(outer, da)
            }
        }
    }

    /// Replaces the variable with `with`.
    pub fn substitute(&self, with: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(with));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var => with.clone(),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Div(a, b) => Expr::Div(sub(a), sub(b)),
            Expr::Pow(a, c) => Expr::Pow(sub(a), *c),
            Expr::Call(f, a) => Expr::Call(*f, sub(a)),
        }
    }

    fn write(&self, var: char, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |out: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr| {
            write!(out, "(")?;
            a.write(var, out)?;
            write!(out, " {op} ")?;
            b.write(var, out)?;
            write!(out, ")")
        };
        match self {
            Expr::Const(c) => write_const(*c, out),
            Expr::Var => write!(out, "{var}"),
            Expr::Neg(a) => {
                write!(out, "(-")?;
                a.write(var, out)?;
                write!(out, ")")
            }
            Expr::Add(a, b) => bin(out, a, "+", b),
            Expr::Sub(a, b) => bin(out, a, "-", b),
            Expr::Mul(a, b) => bin(out, a, "*", b),
            Expr::Div(a, b) => bin(out, a, "/", b),
            Expr::Pow(a, c) => {
                write!(out, "(")?;
                a.write(var, out)?;
                write!(out, ")^{c}")
            }
            Expr::Call(f, a) => {
                write!(out, "{}(", f.name())?;
                a.write(var, out)?;
                write!(out, ")")
            }
        }
    }
}

fn write_const(c: Complex64, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let real = |out: &mut fmt::Formatter<'_>, x: f64| {
        if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
            write!(out, "(-{})", -x)
        } else {
            write!(out, "{x}")
        }
    };
    if c.im == 0.0 {
        real(out, c.re)
    } else if c.re == 0.0 {
        write!(out, "(")?;
        real(out, c.im)?;
        write!(out, "*i)")
    } else {
        write!(out, "(")?;
        real(out, c.re)?;
        write!(out, " + ")?;
        real(out, c.im)?;
        write!(out, "*i)")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write('z', f)
    }
}

/// Coefficients of a Mobius map `(a w + b) / (c w + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mobius::new(o, z, z, o)
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }
}

/// A parsed function together with the singularity metadata used by the
/// samplers.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionExpr {
    pub expr: Expr,
    pub variable: char,
    pub singular_points: Vec<Complex64>,
    pub exclusion_radius: f64,
}

/// Result of probing the Laurent expansion at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentCheck {
    pub is_b_form: bool,
    pub residue_estimate: Complex64,
    pub a0_estimate: Complex64,
}

impl FunctionExpr {
    pub fn new(expr: Expr) -> Self {
        FunctionExpr {
            expr,
            variable: 'z',
            singular_points: Vec::new(),
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    /// Parses `text` in the variable `z`.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(FunctionExpr::new(parser::parse(text, 'z')?))
    }

    /// Parses `text` in the real variable `x`.
    pub fn parse_real(text: &str) -> Result<Self> {
        let mut f = FunctionExpr::new(parser::parse(text, 'x')?);
        f.variable = 'x';
        Ok(f)
    }

    pub fn with_singularities(mut self, points: impl IntoIterator<Item = Complex64>) -> Self {
        self.singular_points.extend(points);
        self
    }

    pub fn with_exclusion_radius(mut self, r: f64) -> Self {
        self.exclusion_radius = r;
        self
    }

    fn derived(&self, expr: Expr) -> FunctionExpr {
        FunctionExpr {
            expr,
            variable: self.variable,
            singular_points: self.singular_points.clone(),
            exclusion_radius: self.exclusion_radius,
        }
    }

    pub fn eval_jet(&self, z0: Complex64) -> Result<Jet3> {
        self.expr.eval_jet(Jet3::seed(z0))
    }

    pub fn eval(&self, z0: Complex64) -> Result<Complex64> {
        self.expr.eval(z0)
    }

    /// `1 / f`.
    pub fn reciprocal(&self) -> FunctionExpr {
        self.derived(Expr::div(Expr::real(1.0), self.expr.clone()))
    }

    /// `lambda * f`.
    pub fn scaled(&self, lambda: Complex64) -> FunctionExpr {
        self.derived(Expr::mul(Expr::Const(lambda), self.expr.clone()))
    }

    /// `e^{i tau} f(e^{i tau} z)`, which keeps the `1/z` normalisation of a
    /// B-form function.
    pub fn rotated(&self, tau: f64) -> FunctionExpr {
        let rot = Complex64::from_polar(1.0, tau);
        let inner = Expr::mul(Expr::Const(rot), Expr::Var);
        let mut out = self.derived(Expr::mul(Expr::Const(rot), self.expr.substitute(&inner)));
        out.singular_points = self.singular_points.iter().map(|s| s / rot).collect();
        out
    }

    /// `T o f` for a Mobius map `T`.
    pub fn compose_mobius(&self, t: &Mobius) -> Result<FunctionExpr> {
        let det = t.determinant().norm();
        if det < SINGULARITY_THRESHOLD {
            return Err(Error::DegenerateMobius { det });
        }
        let f = self.expr.clone();
        let num = Expr::add(Expr::mul(Expr::Const(t.a), f.clone()), Expr::Const(t.b));
        let den = Expr::add(Expr::mul(Expr::Const(t.c), f), Expr::Const(t.d));
        Ok(self.derived(Expr::div(num, den)))
    }

    pub fn derivative(&self) -> FunctionExpr {
        self.derived(self.expr.derivative())
    }

    /// Estimates the residue and constant term of the Laurent expansion at
    /// the origin by trapezoidal averages over the circle `|z| = probe_radius`.
    pub fn laurent_b_check(&self, probe_radius: f64) -> Result<LaurentCheck> {
        if !(probe_radius > 0.0 && probe_radius <= 0.1) {
            return Err(Error::InvalidArgument(format!(
                "probe radius {probe_radius} outside (0, 0.1]"
            )));
        }
        const N: usize = 128;
        let mut residue = Complex64::new(0.0, 0.0);
        let mut a0 = Complex64::new(0.0, 0.0);
        for j in 0..N {
            let z = Complex64::from_polar(probe_radius, 2.0 * PI * j as f64 / N as f64);
            let fz = self.eval(z).map_err(|e| e.at(z))?;
            residue += z * fz;
            a0 += fz - z.inv();
        }
        residue /= N as f64;
        a0 /= N as f64;
        Ok(LaurentCheck {
            is_b_form: (residue - 1.0).norm() < 1e-6,
            residue_estimate: residue,
            a0_estimate: a0,
        })
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(self.variable, f)
    }
}

impl std::str::FromStr for FunctionExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FunctionExpr::parse(s)
    }
}
