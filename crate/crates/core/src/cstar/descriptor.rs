//! Text descriptors for the shipped presentations.
//!
//! ```text
//! descriptor := line*
//! line       := 'algebra' expr | 'oracle' mode | comment | blank
//! expr       := 'complex' | 'zero' | 'matrix' INT | 'uhf' RULE...
//!             | 'amplify' INT expr | 'unitize' expr | 'suspend' expr
//!             | 'product' '(' expr ')' '(' expr ')' | '(' expr ')'
//! mode       := 'computable' | 'right-ce' | 'left-ce'
//! ```
//!
//! `uhf` reads a certificate rule (`powers 2`, `explicit 1 2 6`, ...) up to
//! the next `)` or the end of the line. Every shipped presentation has ω generators, the
//! special points; `oracle` hides the realization behind a norm oracle of
//! the given mode. `#` starts a comment.

use super::presentation::{CPres, NormMode};
use super::shipped::{amplify, opaque, product, standard_complex, standard_matrix, suspend, unitize, ZeroAlgebra};
use crate::error::{Error, Result};
use crate::uhf::{uhf_presentation, UhfCertificate};
use std::sync::Arc;

/// A parsed descriptor: the presentation, plus the certificate when the
/// algebra is a bare `uhf` limit.
pub struct Descriptor {
    pub presentation: CPres,
    pub certificate: Option<UhfCertificate>,
}

struct Toks<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
    line: usize,
    /// Column (0-based) just past the end of the line.
    end: usize,
}

impl<'a> Toks<'a> {
    fn new(text: &'a str, line: usize, offset: usize) -> Self {
        let mut toks = Vec::new();
        let mut start = None;
        for (i, c) in text.char_indices() {
            if c.is_whitespace() || c == '(' || c == ')' {
                if let Some(s) = start.take() {
                    toks.push((s, &text[s..i]));
                }
                if c != ' ' && !c.is_whitespace() {
                    toks.push((i, &text[i..i + 1]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            toks.push((s, &text[s..]));
        }
        let toks = toks.into_iter().map(|(i, t)| (i + offset, t)).collect();
        Toks { toks, pos: 0, line, end: offset + text.len() }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let col = self.toks.get(self.pos).map_or(self.end + 1, |t| t.0 + 1);
        Error::Parse { line: self.line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Option<&'a str> {
        let t = self.toks.get(self.pos).map(|t| t.1);
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn expect(&mut self, want: &str) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected `{want}`, found `{t}`"))),
            None => Err(self.err(format!("expected `{want}`"))),
        }
    }

    fn int(&mut self) -> Result<usize> {
        match self.peek() {
            Some(t) => {
                let n = t.parse().map_err(|_| self.err(format!("expected a size, found `{t}`")))?;
                if n == 0 {
                    return Err(self.err("size must be positive"));
                }
                self.pos += 1;
                Ok(n)
            }
            None => Err(self.err("expected a size")),
        }
    }

    fn expr(&mut self, cert: &mut Option<UhfCertificate>) -> Result<CPres> {
        let at = self.pos;
        let Some(head) = self.next() else {
            return Err(self.err("expected an algebra"));
        };
        Ok(match head {
            "complex" => standard_complex(),
            "zero" => Arc::new(ZeroAlgebra),
            "matrix" => standard_matrix(self.int()?),
            "amplify" => {
                let n = self.int()?;
                amplify(self.expr(&mut None)?, n)
            }
            "unitize" => unitize(self.expr(&mut None)?),
            "suspend" => suspend(self.expr(&mut None)?),
            "product" => {
                self.expect("(")?;
                let a = self.expr(&mut None)?;
                self.expect(")")?;
                self.expect("(")?;
                let b = self.expr(&mut None)?;
                self.expect(")")?;
                product(a, b)
            }
            "(" => {
                let a = self.expr(cert)?;
                self.expect(")")?;
                a
            }
            "uhf" => {
                let start = self.pos;
                let stop = (start..self.toks.len()).find(|&i| self.toks[i].1 == ")").unwrap_or(self.toks.len());
                if stop == start {
                    return Err(self.err("expected a certificate rule after `uhf`"));
                }
                let rule: Vec<&str> = self.toks[start..stop].iter().map(|t| t.1).collect();
                let c = UhfCertificate::parse(&format!("dims {}", rule.join(" "))).map_err(|e| {
                    let msg = match e {
                        Error::Parse { msg, .. } => msg,
                        e => e.to_string(),
                    };
                    Error::Parse { line: self.line, col: self.toks[start].0 + 1, msg }
                })?;
                self.pos = stop;
                let p = uhf_presentation(&c);
                *cert = Some(c);
                p
            }
            other => {
                self.pos = at;
                return Err(self.err(format!("unknown algebra `{other}`")));
            }
        })
    }
}

pub fn parse_descriptor(src: &str) -> Result<Descriptor> {
    let mut algebra = None;
    let mut mode = None;
    for (i, raw) in src.lines().enumerate() {
        let text = raw.split('#').next().unwrap();
        let body = text.trim_start();
        if body.is_empty() {
            continue;
        }
        let indent = text.len() - body.len();
        let (key, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let offset = indent + key.len() + (body.len() > key.len()) as usize;
        let mut toks = Toks::new(rest, i + 1, offset);
        match key {
            "algebra" => {
                if algebra.is_some() {
                    return Err(Error::Parse { line: i + 1, col: indent + 1, msg: "second `algebra` line".into() });
                }
                let mut cert = None;
                let p = toks.expr(&mut cert)?;
                if toks.peek().is_some() {
                    return Err(toks.err("trailing text"));
                }
                algebra = Some((p, cert));
            }
            "oracle" => {
                mode = Some(match toks.next() {
                    Some("computable") => NormMode::Computable,
                    Some("right-ce") => NormMode::RightCe,
                    Some("left-ce") => NormMode::LeftCe,
                    _ => {
                        toks.pos = 0;
                        return Err(toks.err("expected computable, right-ce or left-ce"));
                    }
                });
            }
            other => {
                return Err(Error::Parse { line: i + 1, col: indent + 1, msg: format!("unknown key `{other}`") });
            }
        }
    }
    let Some((presentation, certificate)) = algebra else {
        return Err(Error::Parse { line: src.lines().count().max(1), col: 1, msg: "missing `algebra` line".into() });
    };
    Ok(match mode {
        Some(m) => Descriptor { presentation: opaque(presentation, m), certificate: None },
        None => Descriptor { presentation, certificate },
    })
}
