//! UHF certificates, the direct-limit presentation they describe, and exact
//! norm/trace evaluation of points over stage matrix units.
//!
//! Certificate text is a single rule line, optionally followed by a
//! supernatural spec:
//!
//! ```text
//! dims powers 2            n_j = 2^j
//! dims factorial           n_j = j!
//! dims explicit 1 2 6 12   listed, then constant
//! dims machine <program>   n_j = 2^{#W_j}
//! dims supernatural        n_j = ∏ p^{g_j(p)}, spec on the following lines
//! ```
//!
//! Points over a certificate use the generators x_{triple(j,r,s)} = ψ_j(E_rs)
//! (0-based r, s, reduced mod n_j).

use super::machine::CounterMachine;
use super::stage::StageMatrix;
use super::supernatural::{valuation, Supernatural};
use crate::coding::{triple, untriple};
use crate::cstar::{CPres, CPresentation, Elem, NormAnswer, NormMode, StarPoly, StarRing};
use crate::error::{Error, Result};
use crate::exact::{pow2, DyadicInterval, ExactMatrix, GaussianRational};
use crate::presentations::words::to_u64 as big_to_u64;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::{Arc, Mutex};

/// Largest stage realized densely through [`CPresentation::special`].
pub const DENSE_LIMIT: u64 = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum DimsRule {
    Powers(u64),
    Factorial,
    Explicit(Vec<BigUint>),
    Machine(CounterMachine),
    Supernatural(Supernatural),
}

impl DimsRule {
    fn compute(&self, j: u64) -> BigUint {
        match self {
            DimsRule::Powers(b) => BigUint::from(*b).pow(j as u32),
            DimsRule::Factorial => (1..=j).fold(BigUint::one(), |acc, i| acc * i),
            DimsRule::Explicit(v) => v.get(j as usize).or(v.last()).cloned().unwrap_or_else(BigUint::one),
            DimsRule::Machine(m) => BigUint::one() << m.w_count(j),
            DimsRule::Supernatural(s) => s.dim(j),
        }
    }
}

impl fmt::Display for DimsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimsRule::Powers(b) => write!(f, "dims powers {b}"),
            DimsRule::Factorial => write!(f, "dims factorial"),
            DimsRule::Explicit(v) => {
                write!(f, "dims explicit")?;
                for n in v {
                    write!(f, " {n}")?;
                }
                Ok(())
            }
            DimsRule::Machine(m) => write!(f, "dims machine {m}"),
            DimsRule::Supernatural(s) => write!(f, "dims supernatural\n{}", s.to_string().trim_end()),
        }
    }
}

/// The dimension sequence (n_j), memoized.
#[derive(Debug)]
pub struct Dims {
    pub rule: DimsRule,
    cache: Mutex<Vec<BigUint>>,
}

impl Dims {
    pub fn new(rule: DimsRule) -> Result<Self> {
        match &rule {
            DimsRule::Powers(0) => return Err(Error::Input("powers of 0".into())),
            DimsRule::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::Input("explicit dims list is empty".into()));
                }
                for w in v.windows(2) {
                    if w[0].is_zero() || !(&w[1] % &w[0]).is_zero() {
                        return Err(Error::Divisibility { m: big_to_u64(&w[0]).unwrap_or(0), n: big_to_u64(&w[1]).unwrap_or(0) });
                    }
                }
            }
            _ => {}
        }
        Ok(Dims { rule, cache: Mutex::new(Vec::new()) })
    }

    pub fn get(&self, j: u64) -> BigUint {
        let mut c = self.cache.lock().unwrap();
        while c.len() as u64 <= j {
            let next = self.rule.compute(c.len() as u64);
            c.push(next);
        }
        c[j as usize].clone()
    }

    pub fn get_u64(&self, j: u64) -> Result<u64> {
        big_to_u64(&self.get(j)).ok_or_else(|| Error::Unsupported(format!("stage {j} dimension exceeds 64 bits")))
    }
}

#[derive(Clone, Debug)]
pub enum Embedding {
    /// ψ_j(E_rs) is the special point x_{triple(j,r,s)} of the limit
    /// presentation.
    Canonical,
    /// ψ_j(E_rs) is the given rational point (row-major per stage) of some
    /// other presentation; stages past the list are not defined.
    Units(Arc<Vec<Vec<StarPoly>>>),
}

/// Dimensions (n_j) with n_j | n_{j+1}, and unital embeddings ψ_j with
/// ψ_{j+1}^{-1} ψ_j = E_{n_j, n_{j+1}}.
#[derive(Clone, Debug)]
pub struct UhfCertificate {
    pub dims: Arc<Dims>,
    pub embedding: Embedding,
}

impl UhfCertificate {
    pub fn new(rule: DimsRule) -> Result<Self> {
        Ok(UhfCertificate { dims: Arc::new(Dims::new(rule)?), embedding: Embedding::Canonical })
    }

    pub fn powers(b: u64) -> Self {
        Self::new(DimsRule::Powers(b)).expect("positive base")
    }

    pub fn dim(&self, j: u64) -> BigUint {
        self.dims.get(j)
    }

    pub fn dim_u64(&self, j: u64) -> Result<u64> {
        self.dims.get_u64(j)
    }

    /// Number of stages the certificate defines (None: all of them).
    pub fn stage_count(&self) -> Option<usize> {
        match &self.embedding {
            Embedding::Canonical => None,
            Embedding::Units(u) => Some(u.len()),
        }
    }

    /// ψ_j(E_rs) as a rational point of the certified presentation.
    pub fn stage_unit(&self, j: u64, r: u64, s: u64) -> Result<StarPoly> {
        match &self.embedding {
            Embedding::Canonical => Ok(StarPoly::gen(triple(j, r, s))),
            Embedding::Units(u) => {
                let n = self.dim_u64(j)?;
                let stage = u.get(j as usize).ok_or_else(|| Error::Staging(format!("stage {j} was not constructed")))?;
                Ok(stage[(r * n + s) as usize].clone())
            }
        }
    }

    /// ψ_j(a) for a stage matrix a.
    pub fn apply(&self, j: u64, a: &StageMatrix) -> Result<StarPoly> {
        let mut out = StarPoly::zero();
        for (&(r, s), z) in &a.entries {
            out = out.add(&self.stage_unit(j, r, s)?.scale(z));
        }
        Ok(out)
    }

    /// The unit ψ_0(I).
    pub fn unit_point(&self) -> Result<StarPoly> {
        self.apply(0, &StageMatrix::identity(self.dim_u64(0)?))
    }

    pub fn to_text(&self) -> String {
        self.dims.rule.to_string()
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src.lines().enumerate().filter(|(_, l)| !l.split('#').next().unwrap().trim().is_empty());
        let Some((ln, first)) = lines.next() else {
            return Err(Error::Parse { line: 1, col: 1, msg: "empty certificate".into() });
        };
        let first = first.split('#').next().unwrap();
        let col = first.len() - first.trim_start().len() + 1;
        let err = |msg: String| Error::Parse { line: ln + 1, col, msg };
        let words: Vec<&str> = first.split_whitespace().collect();
        let rest: String = src.lines().skip(ln + 1).collect::<Vec<_>>().join("\n");
        let rule = match words.as_slice() {
            ["dims", "powers", b] => DimsRule::Powers(b.parse().map_err(|_| err(format!("bad base `{b}`")))?),
            ["dims", "factorial"] => DimsRule::Factorial,
            ["dims", "explicit", ns @ ..] => DimsRule::Explicit(
                ns.iter()
                    .map(|n| n.parse::<BigUint>().map_err(|_| err(format!("bad dimension `{n}`"))))
                    .collect::<Result<_>>()?,
            ),
            ["dims", "machine", ..] => {
                let prog = first.trim_start()["dims".len()..].trim_start()["machine".len()..].trim();
                DimsRule::Machine(CounterMachine::parse(prog).map_err(|e| err(e.to_string()))?)
            }
            ["dims", "supernatural"] => DimsRule::Supernatural(Supernatural::parse(&rest).map_err(|e| match e {
                Error::Parse { line, col, msg } => Error::Parse { line: line + ln + 1, col, msg },
                other => other,
            })?),
            _ => return Err(err(format!("expected `dims <rule>`, found `{}`", first.trim()))),
        };
        if !matches!(rule, DimsRule::Supernatural(_)) {
            if let Some((ln2, _)) = lines.next() {
                return Err(Error::Parse { line: ln2 + 1, col: 1, msg: "unexpected text after the rule line".into() });
            }
        }
        Self::new(rule).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => err(other.to_string()),
        })
    }
}

/// Evaluates a point over stage matrix units in M_{n_J}, J the largest
/// referenced stage.
pub fn evaluate(dims: &Dims, p: &StarPoly) -> Result<StageMatrix> {
    let gens = p.generators();
    let top = gens.iter().map(|&g| untriple(g).0).max().unwrap_or(0);
    let n = dims.get_u64(top)?;
    let mut images = std::collections::BTreeMap::new();
    for g in gens {
        let (j, r, s) = untriple(g);
        let nj = dims.get_u64(j)?;
        images.insert(g, StageMatrix::unit(nj, r % nj, s % nj).embed(n)?);
    }
    Ok(p.eval(&mut |g| images[&g].clone(), &StageMatrix::zero(n)))
}

/// ‖pt‖ to within 2^-k, pt over stage matrix units.
pub fn limit_norm(cert: &UhfCertificate, pt: &StarPoly, k: u32) -> Result<DyadicInterval> {
    Ok(evaluate(&cert.dims, pt)?.norm(k))
}

/// The disk D(ζ; 3r/2) around the exact stage trace ζ, r = 2^-k; its real
/// section has width 3·2^-k.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceDisk {
    pub center: GaussianRational,
    pub radius: BigRational,
}

impl TraceDisk {
    pub fn real_interval(&self) -> DyadicInterval {
        DyadicInterval::new(&self.center.re - &self.radius, &self.center.re + &self.radius)
    }

    pub fn contains(&self, z: &GaussianRational) -> bool {
        (z - &self.center).norm_sqr() < &self.radius * &self.radius
    }

    pub fn overlaps(&self, o: &TraceDisk) -> bool {
        let d = (&self.center - &o.center).norm_sqr();
        let r = &self.radius + &o.radius;
        d < &r * &r
    }
}

/// τ(pt) of the unique tracial state.
pub fn trace(cert: &UhfCertificate, pt: &StarPoly, k: u32) -> Result<TraceDisk> {
    let center = evaluate(&cert.dims, pt)?.trace();
    Ok(TraceDisk { center, radius: pow2(-(k as i64)) * BigRational::new(3.into(), 2.into()) })
}

/// Exact τ(pt).
pub fn trace_exact(cert: &UhfCertificate, pt: &StarPoly) -> Result<GaussianRational> {
    Ok(evaluate(&cert.dims, pt)?.trace())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UhfMvn {
    Equivalent,
    Inequivalent,
}

/// p ∼ q iff τ(p) = τ(q), for exact stage projections.
pub fn mvn_decide_uhf(cert: &UhfCertificate, p: &StarPoly, q: &StarPoly) -> Result<UhfMvn> {
    let mut t = Vec::new();
    for (name, x) in [("p", p), ("q", q)] {
        let m = evaluate(&cert.dims, x)?;
        if !m.is_projection() {
            let res = m.mul(&m).sub(&m).norm(8).lo.max(m.sub(&m.adjoint()).norm(8).lo);
            return Err(Error::Input(format!("{name} is not a projection (residual ≥ {res})")));
        }
        t.push(m.trace());
    }
    Ok(if t[0] == t[1] { UhfMvn::Equivalent } else { UhfMvn::Inequivalent })
}

/// The direct-limit presentation: special point triple(j,r,s) is
/// ψ_j(E_{r mod n_j, s mod n_j}).
pub struct UhfPresentation {
    pub dims: Arc<Dims>,
}

impl UhfPresentation {
    pub fn certificate(&self) -> UhfCertificate {
        UhfCertificate { dims: self.dims.clone(), embedding: Embedding::Canonical }
    }
}

impl CPresentation for UhfPresentation {
    fn describe(&self) -> String {
        format!("UHF({})", self.dims.rule.to_string().replace('\n', "; "))
    }

    fn mode(&self) -> NormMode {
        NormMode::Computable
    }

    fn special(&self, i: u64) -> Option<Elem> {
        let (j, r, s) = untriple(i);
        let n = self.dims.get_u64(j).ok().filter(|&n| n <= DENSE_LIMIT)?;
        Some(Elem::Blocks(vec![ExactMatrix::unit(n as usize, (r % n) as usize, (s % n) as usize)]))
    }

    fn zero_elem(&self) -> Option<Elem> {
        Some(Elem::Blocks(vec![ExactMatrix::zeros(1, 1)]))
    }

    fn norm_query(&self, p: &StarPoly, k: u32) -> NormAnswer {
        match evaluate(&self.dims, p) {
            Ok(m) => NormAnswer::Interval(m.norm(k)),
            Err(_) => NormAnswer::Unknown,
        }
    }

    fn unit(&self) -> Option<StarPoly> {
        self.certificate().unit_point().ok()
    }

    fn lift(&self, e: &Elem) -> Option<StarPoly> {
        let b = e.blocks()?;
        if b.len() != 1 {
            return None;
        }
        let m = b[0].rows() as u64;
        let j = (0..=DENSE_LIMIT).find(|&j| self.dims.get_u64(j).ok() == Some(m))?;
        self.certificate().apply(j, &StageMatrix::from_dense(&b[0])).ok()
    }

    fn block_trace_invariant(&self) -> bool {
        true
    }

    fn block_traces(&self, p: &StarPoly) -> Option<Vec<GaussianRational>> {
        Some(vec![evaluate(&self.dims, p).ok()?.trace()])
    }
}

pub fn uhf_presentation(cert: &UhfCertificate) -> CPres {
    Arc::new(UhfPresentation { dims: cert.dims.clone() })
}

/// n_j = ∏ p^{g_j(p)}, with canonical embeddings up the chain.
pub fn presentation_from_supernatural(eps: &Supernatural) -> (CPres, UhfCertificate) {
    let cert = UhfCertificate::new(DimsRule::Supernatural(eps.clone())).expect("supernatural dims are valid");
    (uhf_presentation(&cert), cert)
}

/// v_p(n_0), v_p(n_1), … for `stages` stages: a nondecreasing stream whose
/// supremum is ε(p).
pub fn supernatural_from_certificate(cert: &UhfCertificate, p: u64, stages: u64) -> Vec<u64> {
    let mut best = 0;
    (0..stages)
        .map(|j| {
            best = best.max(valuation(&cert.dim(j), p));
            best
        })
        .collect()
}

impl fmt::Display for UhfCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Approximation of a trace value by its exact rational real part (traces
/// of self-adjoint points are real).
pub fn trace_value(cert: &UhfCertificate, pt: &StarPoly) -> Result<BigRational> {
    let t = trace_exact(cert, pt)?;
    if !t.im.is_zero() {
        return Err(Error::Input(format!("trace {t} is not real")));
    }
    Ok(t.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rules() {
        for src in ["dims powers 2", "dims factorial", "dims explicit 1 2 6 12", "dims machine halt", "dims supernatural\n2 inf\n3 1"] {
            let c = UhfCertificate::parse(src).unwrap();
            assert_eq!(UhfCertificate::parse(&c.to_text()).unwrap().to_text(), c.to_text());
        }
        assert!(matches!(UhfCertificate::parse("dims explicit 2 3"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(UhfCertificate::parse("\ndims cubes"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(UhfCertificate::parse("dims factorial").unwrap().dim(5), BigUint::from(120u32));
    }
}
