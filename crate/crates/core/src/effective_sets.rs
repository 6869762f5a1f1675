//! Rational balls, c.e. open and c.e. closed sets, weakly stable relation
//! systems, the nested-ball point search, and the chain search that
//! semidecides Murray-von Neumann equivalence.

use crate::coding::unpair;
use crate::cstar::{
    assemble, rational_point_u64, split, Amplified, CPres, CPresentation, ComputablePoint, Elem, StarPoly, StarRing,
};
use crate::error::{Error, Result};
use crate::exact::{pow2, ExactMatrix};
use crate::fuel::Fuel;
use crate::matrix_fd::{mvn_decide_fd, spectral_round_to_projection, ExactProjection, FdMvn};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;

/// Three-valued answer of a fuel-bounded comparison.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Tri {
    Yes,
    No,
    Unknown { fuel: u64 },
}

impl Tri {
    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }
}

/// An open ball in A^N with rational radius, centered at a tuple of rational
/// points; the metric on tuples is the max of the component distances.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ball {
    pub centers: Vec<StarPoly>,
    pub radius: BigRational,
}

pub type RationalBall = Ball;

impl Ball {
    pub fn new(centers: Vec<StarPoly>, radius: BigRational) -> Self {
        assert!(radius > BigRational::zero(), "balls have positive radius");
        Ball { centers, radius }
    }

    pub fn single(center: StarPoly, radius: BigRational) -> Self {
        Self::new(vec![center], radius)
    }

    pub fn arity(&self) -> usize {
        self.centers.len()
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.centers.iter().map(|c| c.to_string()).collect();
        write!(f, "B({}; {})", cs.join(", "), self.radius)
    }
}

/// Upper bound on ‖p‖ at precision k, if the oracle gives one.
fn upper(a: &dyn CPresentation, p: &StarPoly, k: u32) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    a.norm_query(p, k).upper().cloned()
}

fn lower(a: &dyn CPresentation, p: &StarPoly, k: u32) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    a.norm_query(p, k).lower().cloned()
}

/// Certifies ‖p‖ < bound by refining the oracle; `No` when ‖p‖ ≥ bound is
/// certified instead.
pub fn certify_below(a: &dyn CPresentation, p: &StarPoly, bound: &BigRational, fuel: &mut Fuel) -> Tri {
    for k in 0.. {
        if !fuel.burn(1) {
            return Tri::Unknown { fuel: fuel.spent() };
        }
        if let Some(u) = upper(a, p, k) {
            if &u < bound {
                return Tri::Yes;
            }
        }
        if let Some(l) = lower(a, p, k) {
            if &l >= bound {
                return Tri::No;
            }
        }
        if k > 60 {
            return Tri::Unknown { fuel: fuel.spent() };
        }
    }
    unreachable!()
}

/// max_j ‖x_j - y_j‖ + extra < bound, certified.
fn certify_tuple_below(
    a: &dyn CPresentation,
    x: &[StarPoly],
    y: &[StarPoly],
    extra: &BigRational,
    bound: &BigRational,
    fuel: &mut Fuel,
) -> Tri {
    let room = bound - extra;
    if room <= BigRational::zero() {
        return Tri::No;
    }
    let mut all = Tri::Yes;
    for (p, q) in x.iter().zip(y) {
        match certify_below(a, &p.sub(q), &room, fuel) {
            Tri::Yes => {}
            Tri::No => return Tri::No,
            u => all = u,
        }
    }
    all
}

/// B(ρ0; r0) ⊆ B(ρ1; r1), via ‖ρ0 - ρ1‖ + r0 < r1. `No` means that
/// inequality is certified to fail.
pub fn ball_subset(a: &dyn CPresentation, b0: &Ball, b1: &Ball, fuel: u64) -> Tri {
    let mut f = Fuel::new(fuel);
    certify_tuple_below(a, &b0.centers, &b1.centers, &b0.radius, &b1.radius, &mut f)
}

/// A c.e. open set: the union of an enumerated family of balls.
pub trait CeOpenSet: Send + Sync {
    fn ball(&self, i: u64) -> Option<Ball>;
}

/// The whole space A^N as ∪_i B(0; 2^i).
pub struct WholeSpace {
    pub arity: usize,
}

impl CeOpenSet for WholeSpace {
    fn ball(&self, i: u64) -> Option<Ball> {
        Some(Ball::new(vec![StarPoly::zero(); self.arity], pow2(i.min(62) as i64)))
    }
}

/// A finite union of balls.
pub struct FiniteUnion(pub Vec<Ball>);

impl CeOpenSet for FiniteUnion {
    fn ball(&self, i: u64) -> Option<Ball> {
        self.0.get(i as usize).cloned()
    }
}

/// A c.e. closed set: the balls meeting it can be confirmed.
pub trait CeClosedSet: Send + Sync {
    fn arity(&self) -> usize;

    /// Sound semidecision of B ∩ C ≠ ∅ (Yes or Unknown).
    fn meets(&self, b: &Ball, fuel: &mut Fuel) -> Tri;

    /// Tuples worth trying as centers of small balls meeting C near `near`.
    fn candidates_near(&self, _near: &[StarPoly]) -> Vec<Vec<StarPoly>> {
        Vec::new()
    }
}

pub type Guide = Arc<dyn Fn(&dyn CPresentation, &[StarPoly]) -> Vec<Vec<StarPoly>> + Send + Sync>;

/// Relations {p_i(x) = 0} ∪ {‖x_j‖ ≤ C_j} with a modulus of weak stability.
/// Generators 0..arity of the p_i are the variables; generator arity + i is
/// the fixed parameter `params[i]` (e.g. the unit).
#[derive(Clone)]
pub struct RelationSystem {
    pub arity: usize,
    pub polys: Vec<StarPoly>,
    pub params: Vec<StarPoly>,
    pub bounds: Vec<BigRational>,
    pub modulus: Arc<dyn Fn(u32) -> u32 + Send + Sync>,
    /// Proposes near-solutions close to given tuples; only used to pick
    /// candidates, never to certify.
    pub guide: Option<Guide>,
}

impl RelationSystem {
    pub fn substitute(&self, p: &StarPoly, a: &[StarPoly]) -> StarPoly {
        p.substitute(&mut |g| {
            let g = g as usize;
            if g < self.arity {
                a[g].clone()
            } else {
                self.params[g - self.arity].clone()
            }
        })
    }

    pub fn g(&self, k: u32) -> u32 {
        (self.modulus)(k)
    }
}

/// {x = x*, x² = x, ‖x‖ ≤ 1} with g(k) = k + 3.
///
/// With residual δ ≤ 1/8, the spectral projection of the Hermitian part of x
/// onto (1/2, ∞) lies within 5.82δ of x, which is below 2^-k once
/// δ < 2^-(k+3).
pub fn projection_relations() -> RelationSystem {
    let x = StarPoly::gen(0);
    RelationSystem {
        arity: 1,
        polys: vec![x.sub(&x.adjoint()), x.mul(&x).sub(&x)],
        params: vec![],
        bounds: vec![BigRational::one()],
        modulus: Arc::new(|k| k + 3),
        guide: Some(Arc::new(|a, near| round_to_projection_points(a, &near[0]).into_iter().map(|p| vec![p]).collect())),
    }
}

/// n×n matrix units (x_{rs} at variable r·n + s): x_rs* = x_sr,
/// x_rs x_r's' = δ_{sr'} x_rs', ‖x_rs‖ ≤ 1; with `unit`, also Σ x_rr = 1.
/// Default modulus k + 3 + ⌈log2(n+1)⌉.
pub fn matrix_unit_relations(n: usize, unit: Option<StarPoly>) -> RelationSystem {
    let v = |r: usize, s: usize| StarPoly::gen((r * n + s) as u64);
    let mut polys = Vec::new();
    for r in 0..n {
        for s in 0..n {
            polys.push(v(r, s).adjoint().sub(&v(s, r)));
            for r2 in 0..n {
                for s2 in 0..n {
                    let prod = v(r, s).mul(&v(r2, s2));
                    polys.push(if s == r2 { prod.sub(&v(r, s2)) } else { prod });
                }
            }
        }
    }
    let mut params = vec![];
    if let Some(u) = unit {
        let mut sum = StarPoly::zero();
        for r in 0..n {
            sum = sum.add(&v(r, r));
        }
        polys.push(sum.sub(&StarPoly::gen((n * n) as u64)));
        params.push(u);
    }
    let extra = (usize::BITS - n.leading_zeros()) as u32; // ⌈log2(n+1)⌉
    RelationSystem {
        arity: n * n,
        polys,
        params,
        bounds: vec![BigRational::one(); n * n],
        modulus: Arc::new(move |k| k + 3 + extra),
        guide: None,
    }
}

/// Guided candidates for projections near a point: spectral rounding of its
/// realization, then lifted back to rational points.
pub fn round_to_projection_points(a: &dyn CPresentation, near: &StarPoly) -> Vec<StarPoly> {
    let Some(e) = a.realize(near) else { return vec![] };
    let Some(blocks) = e.blocks() else { return vec![] };
    let mut out = Vec::new();
    let mut rounded = Vec::new();
    for b in blocks {
        match spectral_round_to_projection(b).ok().and_then(|r| r.exact) {
            Some(p) => rounded.push(p.matrix().clone()),
            None => return out,
        }
    }
    if let Some(p) = a.lift(&Elem::Blocks(rounded)) {
        out.push(p);
    }
    out
}

/// The c.e. closed zero set of a relation system over (A#)^N.
pub struct RelationClosedSet {
    pub a: CPres,
    pub rel: RelationSystem,
}

pub fn ce_closed_from_relations(a: CPres, rel: RelationSystem) -> RelationClosedSet {
    RelationClosedSet { a, rel }
}

/// The tuple of rational points coded by i (iterated pairing).
pub fn rational_tuple(i: u64, arity: usize) -> Vec<StarPoly> {
    let mut out = Vec::with_capacity(arity);
    let mut rest = i;
    for j in 0..arity {
        if j + 1 == arity {
            out.push(rational_point_u64(rest));
        } else {
            let (x, y) = unpair(rest);
            out.push(rational_point_u64(x));
            rest = y;
        }
    }
    out
}

impl RelationClosedSet {
    /// The S_0 condition for B(ā; 2^-k): every ‖p_i(ā)‖ < 2^-g(k) and
    /// ‖a_j‖ < C_j + 2^-g(k), certified.
    pub fn s0_test(&self, abar: &[StarPoly], k: u32, fuel: &mut Fuel) -> Tri {
        let eps = pow2(-(self.rel.g(k) as i64));
        let mut all = Tri::Yes;
        for p in &self.rel.polys {
            match certify_below(&*self.a, &self.rel.substitute(p, abar), &eps, fuel) {
                Tri::Yes => {}
                Tri::No => return Tri::No,
                u => all = u,
            }
        }
        for (x, c) in abar.iter().zip(&self.rel.bounds) {
            match certify_below(&*self.a, x, &(c + &eps), fuel) {
                Tri::Yes => {}
                Tri::No => return Tri::No,
                u => all = u,
            }
        }
        all
    }

    /// Step t of the enumeration of S_0: (i, k) = unpair(t); emits
    /// B(tuple_i; 2^-k) when it passes the test within the fuel.
    pub fn emitted(&self, t: u64, fuel: u64) -> Option<Ball> {
        let (i, k) = unpair(t);
        let k = k.min(60) as u32;
        let abar = rational_tuple(i, self.rel.arity);
        let mut f = Fuel::new(fuel);
        self.s0_test(&abar, k, &mut f).is_yes().then(|| Ball::new(abar, pow2(-(k as i64))))
    }

    /// Tries ā as the center of an S_0 ball inside b.
    fn try_center(&self, abar: &[StarPoly], b: &Ball, fuel: &mut Fuel) -> Tri {
        // smallest k with ‖ā - c‖ + 2^-k < r, found by halving
        let mut last = Tri::No;
        for k in 0..48u32 {
            let r = pow2(-(k as i64));
            if r >= b.radius {
                continue;
            }
            match certify_tuple_below(&*self.a, abar, &b.centers, &r, &b.radius, fuel) {
                Tri::Yes => return self.s0_test(abar, k, fuel),
                Tri::No => {
                    last = Tri::No;
                    // the distance alone exceeds the radius: no k helps
                    let mut f = Fuel::new(64);
                    if certify_tuple_below(&*self.a, abar, &b.centers, &BigRational::zero(), &b.radius, &mut f) == Tri::No {
                        return Tri::No;
                    }
                }
                u => return u,
            }
            if fuel.exhausted() {
                return Tri::Unknown { fuel: fuel.spent() };
            }
        }
        last
    }
}

impl CeClosedSet for RelationClosedSet {
    fn arity(&self) -> usize {
        self.rel.arity
    }

    /// B meets the zero set iff B includes an S_0 ball. Candidates: the
    /// center itself, guided near-solutions, then the generic enumeration.
    fn meets(&self, b: &Ball, fuel: &mut Fuel) -> Tri {
        let mut tried: Vec<Vec<StarPoly>> = vec![b.centers.clone()];
        tried.extend(self.candidates_near(&b.centers));
        for c in &tried {
            if self.try_center(c, b, fuel).is_yes() {
                return Tri::Yes;
            }
            if fuel.exhausted() {
                return Tri::Unknown { fuel: fuel.spent() };
            }
        }
        for i in 0u64.. {
            if fuel.exhausted() {
                break;
            }
            let c = rational_tuple(i, self.rel.arity);
            if !tried.contains(&c) && self.try_center(&c, b, fuel).is_yes() {
                return Tri::Yes;
            }
            let _ = fuel.burn(1);
        }
        Tri::Unknown { fuel: fuel.spent() }
    }

    fn candidates_near(&self, near: &[StarPoly]) -> Vec<Vec<StarPoly>> {
        match &self.rel.guide {
            Some(g) => g(&*self.a, near),
            None => vec![],
        }
    }
}

/// The nested balls B_0 ⊇ B_1 ⊇ … found by the intersection search; their
/// centers converge to a point of U ∩ C.
#[derive(Clone, Debug)]
pub struct NestedPoint {
    pub balls: Vec<Ball>,
}

impl NestedPoint {
    /// Center of B_j (within 2^-j of the limit) for j up to the searched
    /// depth; deeper requests get the deepest center.
    pub fn approx(&self, j: u32) -> Vec<StarPoly> {
        let i = (j as usize).min(self.balls.len() - 1);
        self.balls[i].centers.clone()
    }

    /// First coordinate as a point handle (valid to the searched depth).
    pub fn handle(&self) -> ComputablePoint {
        let me = self.clone();
        ComputablePoint::new(move |k| me.approx(k)[0].clone())
    }
}

/// Candidate balls at round `extra`: guided centers, the given center and
/// the first `extra` generic tuples, each with radii r, r/2, …, r/2^extra.
fn ball_candidates(c: &dyn CeClosedSet, near: &Ball, radius: &BigRational, extra: u64) -> Vec<Ball> {
    let mut cs: Vec<Vec<StarPoly>> = c.candidates_near(&near.centers);
    cs.push(near.centers.clone());
    for i in 0..extra {
        cs.push(rational_tuple(i, near.arity()));
    }
    let mut out = Vec::new();
    for e in 0..=extra.min(24) {
        let r = radius * pow2(-(e as i64));
        out.extend(cs.iter().map(|v| Ball::new(v.clone(), r.clone())));
    }
    out
}

/// Point search in an intersection: B_0 of radius < 1 inside U meeting C,
/// then B_{j+1} of radius < 2^-(j+1) inside B_j meeting C, to depth k.
pub fn find_point_in_intersection(
    a: &dyn CPresentation,
    u: &dyn CeOpenSet,
    c: &dyn CeClosedSet,
    k: u32,
    fuel: u64,
) -> Result<NestedPoint> {
    let mut f = Fuel::new(fuel);
    let exhausted = |f: &Fuel, depth: usize| Error::FuelExhausted {
        fuel: f.spent(),
        detail: format!("intersection search reached depth {depth} of {k}"),
    };
    // B_0: dovetail over the balls of U and generic centers
    let r0 = BigRational::new(1.into(), 2.into());
    let mut first = None;
    'outer: for t in 0u64.. {
        if f.exhausted() {
            return Err(exhausted(&f, 0));
        }
        let (ui, extra) = unpair(t);
        let Some(ub) = u.ball(ui) else {
            let _ = f.burn(1);
            continue;
        };
        for cand in ball_candidates(c, &ub, &r0, extra) {
            if !f.burn(1) {
                return Err(exhausted(&f, 0));
            }
            let mut sub = Fuel::new(f.remaining().min(4096));
            let inside = certify_tuple_below(a, &cand.centers, &ub.centers, &cand.radius, &ub.radius, &mut sub);
            let meets = inside.is_yes() && c.meets(&cand, &mut sub).is_yes();
            let _ = f.burn(sub.spent());
            if meets {
                first = Some(cand);
                break 'outer;
            }
        }
    }
    let mut balls = vec![first.unwrap()];
    for j in 1..=k {
        let r = pow2(-(j as i64) - 1);
        let prev = balls.last().unwrap().clone();
        let mut found = None;
        for extra in 0u64.. {
            if f.exhausted() {
                return Err(exhausted(&f, balls.len()));
            }
            for cand in ball_candidates(c, &prev, &r, extra) {
                let mut sub = Fuel::new(f.remaining().min(4096));
                let inside = certify_tuple_below(a, &cand.centers, &prev.centers, &cand.radius, &prev.radius, &mut sub);
                let ok = inside.is_yes() && c.meets(&cand, &mut sub).is_yes();
                let _ = f.burn(sub.spent().max(1));
                if ok {
                    found = Some(cand);
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        balls.push(found.unwrap());
    }
    Ok(NestedPoint { balls })
}

// ---------------------------------------------------------------------------
// Murray-von Neumann chain search

/// A chain certificate: balls B ∋ p and B' ∋ q of M_n(A#), and balls
/// B_0 … B_k of M_{4n}(A#) meeting the projections, consecutive ones at
/// sup-distance < 1, with B ⊕ 0 close to B_0 and B_k close to B' ⊕ 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainCertificate {
    pub n: usize,
    pub b: Ball,
    pub b_prime: Ball,
    pub chain: Vec<Ball>,
}

#[derive(Clone, Debug)]
pub enum MvnVerdict {
    Equivalent(ChainCertificate),
    Unknown { fuel: u64 },
}

impl MvnVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, MvnVerdict::Equivalent(_))
    }
}

/// (p ⊕ 0_n) ⊕ 0_2n as a rational point of M_{4n}(A#).
pub fn pad_point(base: &CPres, n: usize, p: &StarPoly) -> StarPoly {
    let small = Amplified { base: base.clone(), n };
    let big = Amplified { base: base.clone(), n: 4 * n };
    let entries = small.entries(p);
    let mut out = StarPoly::zero();
    for r in 0..n {
        for s in 0..n {
            let e = &entries[r * n + s];
            if !e.is_zero() {
                out = out.add(&big.place(e, r, s));
            }
        }
    }
    out
}

fn sup_distance_below_one(a: &dyn CPresentation, x: &Ball, y: &Ball, fuel: &mut Fuel) -> Tri {
    certify_tuple_below(a, &x.centers, &y.centers, &(&x.radius + &y.radius), &BigRational::one(), fuel)
}

impl ChainCertificate {
    /// Re-checks conditions (1)-(4) and that every chain ball meets the
    /// projections of M_{4n}(A).
    pub fn verify(&self, base: &CPres, fuel: u64) -> bool {
        let mut f = Fuel::new(fuel);
        let big: CPres = Arc::new(Amplified { base: base.clone(), n: 4 * self.n });
        if self.chain.is_empty() {
            return false;
        }
        let pad = |b: &Ball| Ball::new(vec![pad_point(base, self.n, &b.centers[0])], b.radius.clone());
        let projections = ce_closed_from_relations(big.clone(), projection_relations());
        let links = self.chain.windows(2).all(|w| sup_distance_below_one(&*big, &w[0], &w[1], &mut f).is_yes());
        let meets = self.chain.iter().all(|b| projections.meets(b, &mut f).is_yes());
        let start = sup_distance_below_one(&*big, &pad(&self.b), &self.chain[0], &mut f).is_yes();
        let end = sup_distance_below_one(&*big, self.chain.last().unwrap(), &pad(&self.b_prime), &mut f).is_yes();
        links && meets && start && end
    }

    /// Line format: `mvn-chain n=<n>`, then `B`, `B'` and one `chain` line per
    /// ball, each `<tag> r=<radius> c=<point>`.
    pub fn to_text(&self) -> String {
        let line = |tag: &str, b: &Ball| format!("{tag} r={} c={}\n", b.radius, b.centers[0]);
        let mut s = format!("mvn-chain n={}\n", self.n);
        s += &line("B", &self.b);
        s += &line("B'", &self.b_prime);
        for b in &self.chain {
            s += &line("chain", b);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, col: 1, msg: msg.into() };
        let (l0, head) = lines.next().ok_or_else(|| perr(0, "empty certificate"))?;
        let n: usize = head
            .strip_prefix("mvn-chain n=")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| perr(l0, "expected 'mvn-chain n=<n>'"))?;
        let mut b = None;
        let mut bp = None;
        let mut chain = Vec::new();
        for (i, l) in lines {
            let (tag, rest) = l.split_once(' ').ok_or_else(|| perr(i, "expected '<tag> r=… c=…'"))?;
            let rest = rest.trim().strip_prefix("r=").ok_or_else(|| perr(i, "expected r="))?;
            let (r, c) = rest.split_once(" c=").ok_or_else(|| perr(i, "expected c="))?;
            let radius: BigRational = r.parse().map_err(|_| perr(i, "bad radius"))?;
            if radius <= BigRational::zero() {
                return Err(perr(i, "radius must be positive"));
            }
            let center = crate::cstar::parse_plain(c).map_err(|e| match e {
                Error::Parse { col, msg, .. } => Error::Parse { line: i + 1, col, msg },
                e => e,
            })?;
            let ball = Ball::single(center, radius);
            match tag {
                "B" => b = Some(ball),
                "B'" => bp = Some(ball),
                "chain" => chain.push(ball),
                _ => return Err(perr(i, "unknown tag")),
            }
        }
        Ok(ChainCertificate {
            n,
            b: b.ok_or_else(|| perr(0, "missing B"))?,
            b_prime: bp.ok_or_else(|| perr(0, "missing B'"))?,
            chain,
        })
    }
}

/// Exact projection blocks from an approximate point, by spectral rounding
/// of each realized block.
fn rounded_blocks(a: &dyn CPresentation, p: &StarPoly) -> Option<Vec<ExactMatrix>> {
    let e = a.realize(p)?;
    e.blocks()?.iter().map(|b| spectral_round_to_projection(b).ok()?.exact.map(|x| x.matrix().clone())).collect()
}

/// Per-block entry grids of an element of M_N(A): grid[r][s] = block list.
fn entry_grid(e: &Elem, n: usize) -> Vec<Elem> {
    split(e, n)
}

/// Moves entries of an M_n(A) element into an M_N(A) element at offset
/// (ro, co).
fn place_grid(entries: &[Elem], n: usize, big: usize, ro: usize, co: usize, zero: &Elem) -> Elem {
    let mut grid = vec![zero.clone(); big * big];
    for r in 0..n {
        for s in 0..n {
            grid[(r + ro) * big + (s + co)] = entries[r * n + s].clone();
        }
    }
    assemble(&grid, big)
}

/// Guided chain: p' = p⊕0⊕0, a half-rotation to 0⊕q⊕0, then a
/// half-rotation to q' = q⊕0⊕0. Half-rotation midpoints between orthogonal
/// equivalent projections P, Q with partial isometry v are (P+Q+v+v*)/2.
fn guided_chain(base: &CPres, n: usize, p: &StarPoly, q: &StarPoly) -> Option<Vec<StarPoly>> {
    let small = Amplified { base: base.clone(), n };
    let big = Amplified { base: base.clone(), n: 4 * n };
    let (pb, qb) = (rounded_blocks(&small, p)?, rounded_blocks(&small, q)?);
    let zero = base.zero_elem()?;
    let pe = entry_grid(&Elem::Blocks(pb), n);
    let qe = entry_grid(&Elem::Blocks(qb), n);
    let p1 = place_grid(&pe, n, 4 * n, 0, 0, &zero);
    let q2 = place_grid(&qe, n, 4 * n, n, n, &zero);
    let q1 = place_grid(&qe, n, 4 * n, 0, 0, &zero);
    let v_shift = place_grid(&qe, n, 4 * n, 0, n, &zero);
    let (p1b, q2b) = (p1.blocks()?.clone(), q2.blocks()?.clone());
    let mut v1 = Vec::new();
    for (x, y) in p1b.iter().zip(&q2b) {
        let (xp, yp) = (ExactProjection::new(x.clone()).ok()?, ExactProjection::new(y.clone()).ok()?);
        match mvn_decide_fd(&xp, &yp) {
            FdMvn::Equivalent(w) => v1.push(w.matrix?),
            FdMvn::Inequivalent => return None,
        }
    }
    let v1 = Elem::Blocks(v1);
    let half = crate::exact::GaussianRational::real(BigRational::new(1.into(), 2.into()));
    let mid = |x: &Elem, y: &Elem, v: &Elem| x.add(y).add(v).add(&v.adjoint()).scale(&half);
    let m1 = mid(&p1, &q2, &v1);
    let m2 = mid(&q1, &q2, &v_shift);
    [p1, m1, q2, m2, q1].iter().map(|e| big.lift(e)).collect()
}

/// Semidecides p ∼ q for computable projections p, q of M_n(A#). Answers
/// Equivalent only with a chain certificate that passed [`ChainCertificate::verify`].
pub fn mvn_semidecide(
    base: &CPres,
    n: usize,
    p: &ComputablePoint,
    q: &ComputablePoint,
    fuel: u64,
) -> Result<MvnVerdict> {
    let small: CPres = Arc::new(Amplified { base: base.clone(), n });
    let big: CPres = Arc::new(Amplified { base: base.clone(), n: 4 * n });
    let mut f = Fuel::new(fuel);
    // projection check on the approximations: residual ≥ 1/2 + slack is an error
    for (name, h) in [("p", p), ("q", q)] {
        let x = h.at(8);
        let res = x.mul(&x).sub(&x);
        let herm = x.sub(&x.adjoint());
        let bound = BigRational::new(1.into(), 8.into());
        for r in [res, herm] {
            if let Some(l) = lower(&*small, &r, 10) {
                if l > bound {
                    return Err(Error::Input(format!("{name} is not a projection (residual ≥ {l})")));
                }
            }
        }
    }
    let chain_r = pow2(-5);
    for kp in [6u32, 10, 14] {
        let (pk, qk) = (p.at(kp), q.at(kp));
        let rb = pow2(-(kp as i64));
        let b = Ball::single(pk.clone(), rb.clone());
        let bp = Ball::single(qk.clone(), rb.clone());
        // guided candidates first, then the generic enumeration of centers
        let mut nodes: Vec<StarPoly> = guided_chain(base, n, &pk, &qk).unwrap_or_default();
        let mut generic = 0u64;
        loop {
            if let Some(cert) = reach(&big, base, n, &b, &bp, &nodes, &chain_r, &mut f) {
                return Ok(MvnVerdict::Equivalent(cert));
            }
            if f.exhausted() || generic >= 64 {
                break;
            }
            for _ in 0..8 {
                nodes.push(rational_point_u64(generic));
                generic += 1;
            }
        }
        if f.exhausted() {
            break;
        }
    }
    Ok(MvnVerdict::Unknown { fuel: f.spent() })
}

/// Reachability over candidate balls: start nodes satisfy (3), end nodes
/// (4), edges (1), and every node meets the projections.
#[allow(clippy::too_many_arguments)]
fn reach(
    big: &CPres,
    base: &CPres,
    n: usize,
    b: &Ball,
    bp: &Ball,
    nodes: &[StarPoly],
    r: &BigRational,
    f: &mut Fuel,
) -> Option<ChainCertificate> {
    let balls: Vec<Ball> = nodes.iter().map(|c| Ball::single(c.clone(), r.clone())).collect();
    let projections = ce_closed_from_relations(big.clone(), projection_relations());
    let ok: Vec<bool> = balls
        .iter()
        .map(|x| {
            let mut sub = Fuel::new(f.remaining().min(256));
            let m = projections.meets(x, &mut sub).is_yes();
            f.burn(sub.spent());
            m
        })
        .collect();
    let pb = Ball::single(pad_point(base, n, &b.centers[0]), b.radius.clone());
    let qb = Ball::single(pad_point(base, n, &bp.centers[0]), bp.radius.clone());
    let m = balls.len();
    let mut prev: Vec<Option<usize>> = vec![None; m];
    let mut seen = vec![false; m];
    let mut queue = std::collections::VecDeque::new();
    for i in 0..m {
        if ok[i] && sup_distance_below_one(&**big, &pb, &balls[i], f).is_yes() {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        if sup_distance_below_one(&**big, &balls[i], &qb, f).is_yes() {
            let mut chain = vec![balls[i].clone()];
            let mut j = i;
            while let Some(k) = prev[j] {
                chain.push(balls[k].clone());
                j = k;
            }
            chain.reverse();
            let cert = ChainCertificate { n, b: b.clone(), b_prime: bp.clone(), chain };
            return cert.verify(base, 1 << 16).then_some(cert);
        }
        for j in 0..m {
            if !seen[j] && ok[j] && sup_distance_below_one(&**big, &balls[i], &balls[j], f).is_yes() {
                seen[j] = true;
                prev[j] = Some(i);
                queue.push_back(j);
            }
        }
        if f.exhausted() {
            return None;
        }
    }
    None
}

