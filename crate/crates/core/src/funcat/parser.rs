//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := unary (("*"|"/") unary)*
//! unary  := "-" unary | factor
//! factor := base ("^" "-"? realnum)?
//! base   := realnum | "i" | "pi" | VAR | "(" expr ")" | func "(" expr ")"
//! func   := "sin"|"cos"|"tan"|"cot"|"exp"|"log"|"sqrt"
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Expr, Func};
use crate::error::{Error, Result};

pub(super) fn parse(text: &str, var: char) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        var,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["+", "-", "*", "/", "^", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: char,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> Error {
        Error::Syntax {
            position: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            let s = (b as char).to_string();
            Err(self.error(&[s.as_str()]))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            // fold into the literal so that "-3" keeps a +0 imaginary part
            Ok(match self.unary()? {
                Expr::Const(c) => Expr::Const(Complex64::new(-c.re, 0.0 - c.im)),
                e => Expr::Neg(Box::new(e)),
            })
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat(b'^') {
            let negative = self.eat(b'-');
            self.skip_ws();
            let c = self.number().ok_or_else(|| self.error(&["number"]))?;
            return Ok(Expr::Pow(Box::new(base), if negative { -c } else { c }));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        let var = self.var.to_string();
        let expected = [
            "number",
            "i",
            "pi",
            var.as_str(),
            "(",
            "sin",
            "cos",
            "tan",
            "cot",
            "exp",
            "log",
            "sqrt",
        ];
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => {
                let start = self.pos;
                match self.number() {
                    Some(x) => Ok(Expr::real(x)),
                    None => {
                        self.pos = start;
                        Err(self.error(&["number"]))
                    }
                }
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                if ident == var {
                    return Ok(Expr::Var);
                }
                match ident {
                    "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                    "pi" => Ok(Expr::real(PI)),
                    _ => match Func::from_name(ident) {
                        Some(f) => {
                            self.expect(b'(')?;
                            let arg = self.expr()?;
                            self.expect(b')')?;
                            Ok(Expr::Call(f, Box::new(arg)))
                        }
                        None => {
                            self.pos = start;
                            Err(self.error(&expected))
                        }
                    },
                }
            }
            _ => Err(self.error(&expected)),
        }
    }

    /// `digits ("." digits?)? exponent?` or `"." digits exponent?`.
    fn number(&mut self) -> Option<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return None;
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }
}
