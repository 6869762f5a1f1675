//! Text grammar for rational points.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | postfix
//! postfix:= atom ('^*')*
//! atom   := number ['i'] | 'i' | '(' expr ')' | 'a' INT | NAME '(' INT (',' INT)* ')'
//! number := INT ['/' INT]
//! ```
//!
//! `a7` is the special point a_7. Named atoms such as `u(j,r,s)` are resolved
//! by the caller. Scalars may only multiply points: a nonzero constant term
//! is an error.

use super::starpoly::{StarPoly, StarRing};
use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Clone, Debug)]
enum Val {
    Scalar(GaussianRational),
    Point(StarPoly),
}

pub type Resolver<'a> = dyn Fn(&str, &[u64]) -> Option<StarPoly> + 'a;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    resolve: &'a Resolver<'a>,
}

pub fn parse_point(src: &str, resolve: &Resolver<'_>) -> Result<StarPoly> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, resolve };
    let v = p.expr()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    match v {
        Val::Point(q) => Ok(q),
        Val::Scalar(z) if z.is_zero() => Ok(StarPoly::zero()),
        Val::Scalar(_) => Err(p.err("a rational point has no constant term")),
    }
}

/// Parses with only the `aN` atoms.
pub fn parse_plain(src: &str) -> Result<StarPoly> {
    parse_point(src, &|_, _| None)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
        let col = before.iter().rev().take_while(|&&c| c != b'\n').count() + 1;
        Error::Parse { line, col, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap())
    }

    fn small(&mut self) -> Result<u64> {
        let n = self.int()?;
        u64::try_from(n).map_err(|_| self.err("index too large"))
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        loop {
            let neg = if self.eat(b'+') {
                false
            } else if self.eat(b'-') {
                true
            } else {
                return Ok(acc);
            };
            let mut t = self.term()?;
            if neg {
                t = scale(t, &GaussianRational::from_int(-1));
            }
            acc = self.add(acc, t)?;
        }
    }

    fn add(&self, a: Val, b: Val) -> Result<Val> {
        Ok(match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(&x + &y),
            (Val::Point(p), Val::Point(q)) => Val::Point(p.add(&q)),
            (Val::Point(p), Val::Scalar(z)) | (Val::Scalar(z), Val::Point(p)) => {
                if !z.is_zero() {
                    return Err(self.err("a rational point has no constant term"));
                }
                Val::Point(p)
            }
        })
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.unary()?;
        while self.eat(b'*') {
            let f = self.unary()?;
            acc = match (acc, f) {
                (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(&x * &y),
                (Val::Scalar(z), Val::Point(p)) | (Val::Point(p), Val::Scalar(z)) => Val::Point(p.scale(&z)),
                (Val::Point(p), Val::Point(q)) => Val::Point(p.mul(&q)),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val> {
        if self.eat(b'-') {
            let v = self.unary()?;
            return Ok(scale(v, &GaussianRational::from_int(-1)));
        }
        let mut v = self.atom()?;
        loop {
            self.ws();
            if self.src[self.pos..].starts_with(b"^*") {
                self.pos += 2;
                v = match v {
                    Val::Scalar(z) => Val::Scalar(z.conj()),
                    Val::Point(p) => Val::Point(p.adjoint()),
                };
            } else {
                return Ok(v);
            }
        }
    }

    fn atom(&mut self) -> Result<Val> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.int()?;
                let mut r = BigRational::from_integer(n);
                if self.eat(b'/') {
                    let d = self.int()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    r /= BigRational::from_integer(d);
                }
                if self.src.get(self.pos) == Some(&b'i') && !self.src.get(self.pos + 1).map_or(false, |c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                    return Ok(Val::Scalar(GaussianRational::new(BigRational::zero(), r)));
                }
                Ok(Val::Scalar(GaussianRational::real(r)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if name == "i" {
                    return Ok(Val::Scalar(GaussianRational::i()));
                }
                if name == "a" && self.src.get(self.pos).map_or(false, |c| c.is_ascii_digit()) {
                    return Ok(Val::Point(StarPoly::gen(self.small()?)));
                }
                if !self.eat(b'(') {
                    self.pos = start;
                    return Err(self.err(&format!("unknown atom '{name}'")));
                }
                let mut args = vec![self.small()?];
                while self.eat(b',') {
                    args.push(self.small()?);
                }
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                match (self.resolve)(&name, &args) {
                    Some(p) => Ok(Val::Point(p)),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("cannot resolve {name}{args:?}")))
                    }
                }
            }
            _ => Err(self.err("expected a number, a point or '('")),
        }
    }
}

fn scale(v: Val, z: &GaussianRational) -> Val {
    match v {
        Val::Scalar(x) => Val::Scalar(&x * z),
        Val::Point(p) => Val::Point(p.scale(z)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn display_round_trips() {
        let p = StarPoly::gen(3)
            .mul(&StarPoly::gen_star(1))
            .scale(&GaussianRational::new(q(1, 2), q(-3, 4)))
            .add(&StarPoly::gen(0).scale(&GaussianRational::from_int(-2)))
            .add(&StarPoly::gen(2).scale(&GaussianRational::new(q(0, 1), q(5, 1))));
        assert_eq!(parse_plain(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn errors_have_positions() {
        match parse_plain("a0 + 1") {
            Err(Error::Parse { line: 1, .. }) => {}
            e => panic!("{e:?}"),
        }
        match parse_plain("a0 *\n  foo") {
            Err(Error::Parse { line: 2, col: 3, .. }) => {}
            e => panic!("{e:?}"),
        }
    }
}
