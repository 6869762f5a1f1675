//! Concrete realizations of rational points.
//!
//! Every shipped algebra embeds in a finite direct sum of matrix algebras, or
//! in continuous paths [0,1] → such a sum. An element is either a list of
//! square blocks, or a piecewise-polynomial path of block lists. Blocks of
//! different sizes at the same position are compared through the canonical
//! embedding E_{m,n}(a) = I_{n/m} ⊗ a, which is how direct-limit (UHF)
//! elements from different stages meet.

use super::starpoly::StarRing;
use crate::exact::{certified_opnorm, pow2, DyadicInterval, ExactMatrix, GaussianRational};
use crate::exact::norm::frobenius_upper;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::borrow::Cow;

pub type Blocks = Vec<ExactMatrix>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Elem {
    Blocks(Blocks),
    Path(Path),
}

/// Piecewise-polynomial path: on [knots[i], knots[i+1]] the value is
/// Σ_d pieces[i][d] t^d (global parameter t).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Path {
    pub knots: Vec<BigRational>,
    pub pieces: Vec<Vec<Blocks>>,
}

/// E_{m,n}(a) = block diagonal with n/m copies of a.
pub fn embed(a: &ExactMatrix, n: usize) -> ExactMatrix {
    let m = a.rows();
    if m == n {
        return a.clone();
    }
    assert!(m > 0 && n % m == 0, "cannot embed a {m}x{m} block into size {n}");
    ExactMatrix::identity(n / m).kron(a)
}

fn harmonize<'a>(a: &'a ExactMatrix, b: &'a ExactMatrix) -> (Cow<'a, ExactMatrix>, Cow<'a, ExactMatrix>) {
    use std::cmp::Ordering::*;
    match a.rows().cmp(&b.rows()) {
        Equal => (Cow::Borrowed(a), Cow::Borrowed(b)),
        Less => (Cow::Owned(embed(a, b.rows())), Cow::Borrowed(b)),
        Greater => (Cow::Borrowed(a), Cow::Owned(embed(b, a.rows()))),
    }
}

fn zip_blocks(a: &Blocks, b: &Blocks, f: impl Fn(&ExactMatrix, &ExactMatrix) -> ExactMatrix) -> Blocks {
    assert_eq!(a.len(), b.len(), "block structure mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let (x, y) = harmonize(x, y);
            f(&x, &y)
        })
        .collect()
}

fn zero_like(a: &Blocks) -> Blocks {
    a.iter().map(|_| ExactMatrix::zeros(1, 1)).collect()
}

fn blocks_zero(a: &Blocks) -> bool {
    a.iter().all(|m| m.is_zero())
}

fn poly_add(p: &[Blocks], q: &[Blocks]) -> Vec<Blocks> {
    let n = p.len().max(q.len());
    let z = zero_like(p.first().or(q.first()).expect("nonempty polynomial"));
    let mut out: Vec<Blocks> =
        (0..n).map(|d| zip_blocks(p.get(d).unwrap_or(&z), q.get(d).unwrap_or(&z), |x, y| x.add(y))).collect();
    while out.len() > 1 && blocks_zero(out.last().unwrap()) {
        out.pop();
    }
    out
}

fn poly_mul(p: &[Blocks], q: &[Blocks]) -> Vec<Blocks> {
    let z = zero_like(&p[0]);
    let mut out: Vec<Blocks> = vec![z; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        if blocks_zero(a) {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            if blocks_zero(b) {
                continue;
            }
            let prod = zip_blocks(a, b, |x, y| x.mul(y));
            out[i + j] = zip_blocks(&out[i + j], &prod, |x, y| x.add(y));
        }
    }
    while out.len() > 1 && blocks_zero(out.last().unwrap()) {
        out.pop();
    }
    out
}

fn eval_poly(p: &[Blocks], t: &BigRational) -> Blocks {
    let tz = GaussianRational::real(t.clone());
    let mut acc = p.last().unwrap().clone();
    for c in p.iter().rev().skip(1) {
        acc = acc.iter().map(|m| m.scale(&tz)).collect();
        acc = zip_blocks(&acc, c, |x, y| x.add(y));
    }
    acc
}

fn blocks_norm(b: &Blocks, k: u32) -> DyadicInterval {
    b.iter().fold(DyadicInterval::point(BigRational::zero()), |acc, m| acc.max(&certified_opnorm(m, k)))
}

impl Path {
    fn constant(b: Blocks) -> Path {
        Path { knots: vec![BigRational::zero(), BigRational::one()], pieces: vec![vec![b]] }
    }

    fn segment_containing(&self, lo: &BigRational, hi: &BigRational) -> usize {
        (0..self.pieces.len())
            .find(|&i| &self.knots[i] <= lo && hi <= &self.knots[i + 1])
            .expect("segment outside the path's knots")
    }

    fn combine(&self, o: &Path, f: impl Fn(&[Blocks], &[Blocks]) -> Vec<Blocks>) -> Path {
        let mut knots: Vec<BigRational> = self.knots.iter().chain(o.knots.iter()).cloned().collect();
        knots.sort();
        knots.dedup();
        let mut pieces = Vec::with_capacity(knots.len() - 1);
        for w in knots.windows(2) {
            let a = &self.pieces[self.segment_containing(&w[0], &w[1])];
            let b = &o.pieces[o.segment_containing(&w[0], &w[1])];
            pieces.push(f(a, b));
        }
        Path { knots, pieces }
    }

    pub fn eval_at(&self, t: &BigRational) -> Blocks {
        let i = (0..self.pieces.len()).find(|&i| t <= &self.knots[i + 1]).unwrap_or(self.pieces.len() - 1);
        eval_poly(&self.pieces[i], t)
    }

    fn map(&self, f: impl Fn(&ExactMatrix) -> ExactMatrix) -> Path {
        Path {
            knots: self.knots.clone(),
            pieces: self.pieces.iter().map(|p| p.iter().map(|b| b.iter().map(&f).collect()).collect()).collect(),
        }
    }

    /// sup_t ‖path(t)‖ to width 2^-k. Affine pieces attain their sup at an
    /// endpoint (the norm is convex along segments); higher-degree pieces are
    /// bisected with a Lipschitz bound from the coefficient norms.
    fn norm(&self, k: u32) -> DyadicInterval {
        let mut best = DyadicInterval::point(BigRational::zero());
        let tol = pow2(-(k as i64));
        for (i, p) in self.pieces.iter().enumerate() {
            let (a, b) = (&self.knots[i], &self.knots[i + 1]);
            if p.len() <= 2 {
                best = best.max(&blocks_norm(&eval_poly(p, a), k)).max(&blocks_norm(&eval_poly(p, b), k));
                continue;
            }
            let mut lip = BigRational::zero();
            for (d, c) in p.iter().enumerate().skip(1) {
                let cn: BigRational = c.iter().map(frobenius_upper).fold(BigRational::zero(), |x, y| x.max(y));
                lip += cn * BigRational::from_integer(d.into());
            }
            let two = BigRational::from_integer(2.into());
            let mut lower = BigRational::zero();
            let mut cells: Vec<(BigRational, BigRational, BigRational)> = Vec::new();
            let mut todo = vec![(a.clone(), b.clone())];
            loop {
                for (u, v) in todo.drain(..) {
                    let c = (&u + &v) / &two;
                    let iv = blocks_norm(&eval_poly(p, &c), k + 2);
                    if iv.lo > lower {
                        lower = iv.lo.clone();
                    }
                    let ub = iv.hi + &lip * (&v - &u) / &two;
                    cells.push((u, v, ub));
                }
                let upper = cells.iter().map(|c| c.2.clone()).fold(lower.clone(), |x, y| x.max(y));
                if &upper - &lower <= tol {
                    best = best.max(&DyadicInterval::new(lower, upper));
                    break;
                }
                let thresh = &lower + &tol / &two;
                let (split, keep): (Vec<_>, Vec<_>) = cells.drain(..).partition(|c| c.2 > thresh);
                cells = keep;
                for (u, v, _) in split {
                    let m = (&u + &v) / &two;
                    todo.push((u, m.clone()));
                    todo.push((m, v));
                }
            }
        }
        best
    }
}

impl Elem {
    pub fn scalar(z: GaussianRational) -> Elem {
        Elem::Blocks(vec![ExactMatrix::scalar(1, z)])
    }

    pub fn as_path(&self) -> Cow<'_, Path> {
        match self {
            Elem::Path(p) => Cow::Borrowed(p),
            Elem::Blocks(b) => Cow::Owned(Path::constant(b.clone())),
        }
    }

    pub fn blocks(&self) -> Option<&Blocks> {
        match self {
            Elem::Blocks(b) => Some(b),
            Elem::Path(_) => None,
        }
    }

    pub fn block_count(&self) -> usize {
        match self {
            Elem::Blocks(b) => b.len(),
            Elem::Path(p) => p.pieces[0][0].len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Blocks(b) => blocks_zero(b),
            Elem::Path(p) => p.pieces.iter().all(|q| q.iter().all(blocks_zero)),
        }
    }

    /// Same block structure, all zero.
    pub fn zero_like(&self) -> Elem {
        match self {
            Elem::Blocks(b) => Elem::Blocks(zero_like(b)),
            Elem::Path(p) => Elem::Blocks(zero_like(&p.pieces[0][0])),
        }
    }

    pub fn norm(&self, k: u32) -> DyadicInterval {
        match self {
            Elem::Blocks(b) => blocks_norm(b, k),
            Elem::Path(p) => p.norm(k),
        }
    }

    pub fn eval_at(&self, t: &BigRational) -> Blocks {
        match self {
            Elem::Blocks(b) => b.clone(),
            Elem::Path(p) => p.eval_at(t),
        }
    }

    /// Constant paths become plain blocks again.
    fn simplify(p: Path) -> Elem {
        if p.pieces.iter().all(|q| q.len() == 1) && p.pieces.windows(2).all(|w| w[0] == w[1]) {
            return Elem::Blocks(p.pieces[0][0].clone());
        }
        Elem::Path(p)
    }

    fn binary(&self, o: &Elem, bf: impl Fn(&ExactMatrix, &ExactMatrix) -> ExactMatrix, pf: impl Fn(&[Blocks], &[Blocks]) -> Vec<Blocks>) -> Elem {
        match (self, o) {
            (Elem::Blocks(a), Elem::Blocks(b)) => Elem::Blocks(zip_blocks(a, b, bf)),
            _ => Elem::simplify(self.as_path().combine(&o.as_path(), pf)),
        }
    }

    /// Concatenation of block lists: the element (self, o) of a direct sum.
    pub fn concat(&self, o: &Elem) -> Elem {
        match (self, o) {
            (Elem::Blocks(a), Elem::Blocks(b)) => Elem::Blocks(a.iter().chain(b).cloned().collect()),
            _ => {
                let (pa, pb) = (self.as_path(), o.as_path());
                let (za, zb) = (zero_like(&pa.pieces[0][0]), zero_like(&pb.pieces[0][0]));
                Elem::simplify(pa.combine(&pb, |x, y| {
                    let n = x.len().max(y.len());
                    (0..n)
                        .map(|d| {
                            let l = x.get(d).unwrap_or(&za);
                            let r = y.get(d).unwrap_or(&zb);
                            l.iter().chain(r).cloned().collect()
                        })
                        .collect()
                }))
            }
        }
    }

    /// Splits a block list at position `at` (inverse of `concat`).
    pub fn split_at(&self, at: usize) -> (Elem, Elem) {
        match self {
            Elem::Blocks(b) => (Elem::Blocks(b[..at].to_vec()), Elem::Blocks(b[at..].to_vec())),
            Elem::Path(p) => {
                let part = |r: std::ops::Range<usize>| {
                    Elem::simplify(Path {
                        knots: p.knots.clone(),
                        pieces: p
                            .pieces
                            .iter()
                            .map(|q| q.iter().map(|bl| bl[r.clone()].to_vec()).collect())
                            .collect(),
                    })
                };
                (part(0..at), part(at..p.pieces[0][0].len()))
            }
        }
    }

    /// Multiplies by the scalar function f(t) (piecewise polynomial).
    pub fn times_function(&self, knots: &[BigRational], coeffs: &[Vec<BigRational>]) -> Elem {
        let f = Path {
            knots: knots.to_vec(),
            pieces: coeffs
                .iter()
                .map(|c| c.iter().map(|x| vec![ExactMatrix::scalar(1, GaussianRational::real(x.clone()))]).collect())
                .collect(),
        };
        let me = self.as_path();
        let nb = me.pieces[0][0].len();
        let widen = |p: &[Blocks]| -> Vec<Blocks> { p.iter().map(|b| vec![b[0].clone(); nb]).collect() };
        Elem::simplify(me.combine(&f, |x, y| poly_mul(x, &widen(y))))
    }

    pub fn map_matrices(&self, f: impl Fn(&ExactMatrix) -> ExactMatrix) -> Elem {
        match self {
            Elem::Blocks(b) => Elem::Blocks(b.iter().map(f).collect()),
            Elem::Path(p) => Elem::Path(p.map(f)),
        }
    }

    /// Largest block size at each position (over all path coefficients).
    pub fn block_sizes(&self) -> Vec<usize> {
        match self {
            Elem::Blocks(b) => b.iter().map(|m| m.rows()).collect(),
            Elem::Path(p) => {
                let mut s = vec![1; p.pieces[0][0].len()];
                for q in &p.pieces {
                    for b in q {
                        for (i, m) in b.iter().enumerate() {
                            s[i] = s[i].max(m.rows());
                        }
                    }
                }
                s
            }
        }
    }

    /// Trace of every block at t = 0, normalized by the block size.
    pub fn normalized_block_traces(&self) -> Vec<GaussianRational> {
        self.eval_at(&BigRational::zero())
            .iter()
            .map(|m| {
                if m.rows() == 0 {
                    GaussianRational::zero()
                } else {
                    crate::exact::trace_exact(m).expect("square block")
                }
            })
            .collect()
    }
}

/// Assembles the element Σ a_rs ⊗ E_rs of M_n(A) from its n×n entries
/// (row-major), A-index outer, so canonical embeddings commute with
/// amplification.
pub fn assemble(entries: &[Elem], n: usize) -> Elem {
    assert_eq!(entries.len(), n * n);
    if entries.iter().all(|e| matches!(e, Elem::Blocks(_))) {
        let nb = entries[0].block_count();
        let mut out = Vec::with_capacity(nb);
        for p in 0..nb {
            let d = entries.iter().map(|e| e.blocks().unwrap()[p].rows()).max().unwrap();
            let mut m = ExactMatrix::zeros(d * n, d * n);
            for r in 0..n {
                for s in 0..n {
                    let a = embed(&entries[r * n + s].blocks().unwrap()[p], d);
                    for i in 0..d {
                        for j in 0..d {
                            let z = a.get(i, j);
                            if !z.is_zero() {
                                m.set(i * n + r, j * n + s, z.clone());
                            }
                        }
                    }
                }
            }
            out.push(m);
        }
        return Elem::Blocks(out);
    }
    // paths: common knots, then assemble coefficient by coefficient
    let paths: Vec<Path> = entries.iter().map(|e| e.as_path().into_owned()).collect();
    let mut knots: Vec<BigRational> = paths.iter().flat_map(|p| p.knots.iter().cloned()).collect();
    knots.sort();
    knots.dedup();
    let mut pieces = Vec::new();
    for w in knots.windows(2) {
        let segs: Vec<&Vec<Blocks>> = paths.iter().map(|p| &p.pieces[p.segment_containing(&w[0], &w[1])]).collect();
        let deg = segs.iter().map(|s| s.len()).max().unwrap();
        let z = zero_like(&segs[0][0]);
        let mut poly = Vec::new();
        for d in 0..deg {
            let coeff: Vec<Elem> = segs.iter().map(|s| Elem::Blocks(s.get(d).cloned().unwrap_or_else(|| z.clone()))).collect();
            match assemble(&coeff, n) {
                Elem::Blocks(b) => poly.push(b),
                Elem::Path(_) => unreachable!(),
            }
        }
        pieces.push(poly);
    }
    Elem::simplify(Path { knots, pieces })
}

/// Inverse of [`assemble`]: the n×n entries of an element of M_n(A).
pub fn split(e: &Elem, n: usize) -> Vec<Elem> {
    let split_blocks = |b: &Blocks| -> Vec<Blocks> {
        let mut out: Vec<Blocks> = vec![Vec::with_capacity(b.len()); n * n];
        for m in b {
            assert_eq!(m.rows() % n, 0, "block size not divisible by the amplification");
            let d = m.rows() / n;
            for r in 0..n {
                for s in 0..n {
                    let mut a = ExactMatrix::zeros(d, d);
                    for i in 0..d {
                        for j in 0..d {
                            a.set(i, j, m.get(i * n + r, j * n + s).clone());
                        }
                    }
                    out[r * n + s].push(a);
                }
            }
        }
        out
    };
    match e {
        Elem::Blocks(b) => split_blocks(b).into_iter().map(Elem::Blocks).collect(),
        Elem::Path(p) => {
            let per_seg: Vec<Vec<Vec<Blocks>>> =
                p.pieces.iter().map(|poly| poly.iter().map(&split_blocks).collect()).collect();
            (0..n * n)
                .map(|idx| {
                    Elem::simplify(Path {
                        knots: p.knots.clone(),
                        pieces: per_seg.iter().map(|poly| poly.iter().map(|c| c[idx].clone()).collect()).collect(),
                    })
                })
                .collect()
        }
    }
}

impl StarRing for Elem {
    fn add(&self, o: &Self) -> Self {
        self.binary(o, |x, y| x.add(y), poly_add)
    }

    fn mul(&self, o: &Self) -> Self {
        self.binary(o, |x, y| x.mul(y), poly_mul)
    }

    fn scale(&self, z: &GaussianRational) -> Self {
        self.map_matrices(|m| m.scale(z))
    }

    fn adjoint(&self) -> Self {
        self.map_matrices(|m| m.adjoint())
    }
}
