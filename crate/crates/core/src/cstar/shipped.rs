//! Shipped presentations and constructions on presentations.

use super::elem::{assemble, split, Elem};
use super::presentation::{CPres, CPresentation, NormAnswer, NormMode};
use super::starpoly::{Letter, StarPoly, StarRing};
use crate::coding::{self, pair, triple, unpair, untriple};
use crate::exact::{certified_opnorm, pow2, sqrt_bounds, DyadicInterval, ExactMatrix, GaussianRational};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

/// ℂ with special points the Gaussian rationals (a_i = gaussian(i), so
/// a_0 = 1).
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardComplex;

impl CPresentation for StandardComplex {
    fn describe(&self) -> String {
        "C".into()
    }

    fn mode(&self) -> NormMode {
        NormMode::Computable
    }

    fn special(&self, i: u64) -> Option<Elem> {
        Some(Elem::scalar(coding::gaussian(i)))
    }

    fn zero_elem(&self) -> Option<Elem> {
        Some(Elem::scalar(GaussianRational::zero()))
    }

    fn unit(&self) -> Option<StarPoly> {
        Some(StarPoly::gen(0))
    }

    fn lift(&self, e: &Elem) -> Option<StarPoly> {
        let b = e.blocks()?;
        if b.len() != 1 || b[0].rows() != 1 {
            return None;
        }
        Some(StarPoly::monomial(vec![Letter { gen: 0, star: false }], b[0].get(0, 0).clone()))
    }

    fn block_trace_invariant(&self) -> bool {
        true
    }
}

pub fn standard_complex() -> CPres {
    Arc::new(StandardComplex)
}

/// The zero algebra: every special point is 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroAlgebra;

impl CPresentation for ZeroAlgebra {
    fn describe(&self) -> String {
        "0".into()
    }

    fn mode(&self) -> NormMode {
        NormMode::Computable
    }

    fn special(&self, _i: u64) -> Option<Elem> {
        Some(Elem::Blocks(vec![]))
    }

    fn zero_elem(&self) -> Option<Elem> {
        Some(Elem::Blocks(vec![]))
    }

    fn unit(&self) -> Option<StarPoly> {
        Some(StarPoly::zero())
    }

    fn lift(&self, e: &Elem) -> Option<StarPoly> {
        (e.block_count() == 0).then(StarPoly::zero)
    }

    fn block_trace_invariant(&self) -> bool {
        true
    }
}

/// M_n(A): the k-th special point is a_m E_{r mod n, s mod n} with
/// (m, r, s) = untriple(k).
pub struct Amplified {
    pub base: CPres,
    pub n: usize,
}

pub fn amplify(base: CPres, n: usize) -> CPres {
    assert!(n >= 1);
    Arc::new(Amplified { base, n })
}

/// Standard presentation of M_n(ℂ).
pub fn standard_matrix(n: usize) -> CPres {
    amplify(standard_complex(), n)
}

/// Decoded special-point code of an amplification: (point index, row, col),
/// 0-based.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MatrixPointCode {
    pub k: u64,
    pub point: u64,
    pub row: usize,
    pub col: usize,
}

impl MatrixPointCode {
    pub fn decode(n: usize, k: u64) -> Self {
        let (m, r, s) = untriple(k);
        MatrixPointCode { k, point: m, row: (r % n as u64) as usize, col: (s % n as u64) as usize }
    }

    pub fn encode(point: u64, row: usize, col: usize) -> u64 {
        triple(point, row as u64, col as u64)
    }
}

impl Amplified {
    /// Rational point of M_n(A) equal to the entry matrix with p at (r,s).
    pub fn place(&self, p: &StarPoly, r: usize, s: usize) -> StarPoly {
        let mut out = StarPoly::zero();
        for (mono, c) in p.terms() {
            let last = mono.len() - 1;
            let letters: Vec<Letter> = mono
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    if i < last {
                        Letter { gen: MatrixPointCode::encode(l.gen, r, r), star: l.star }
                    } else if l.star {
                        Letter { gen: MatrixPointCode::encode(l.gen, s, r), star: true }
                    } else {
                        Letter { gen: MatrixPointCode::encode(l.gen, r, s), star: false }
                    }
                })
                .collect();
            out = out.add(&StarPoly::monomial(letters, c.clone()));
        }
        out
    }

    /// Entries (row-major) of a rational point of M_n(A), as rational points
    /// of A.
    pub fn entries(&self, p: &StarPoly) -> Vec<StarPoly> {
        let n = self.n;
        let eye: Vec<StarPoly> = (0..n * n).map(|_| StarPoly::zero()).collect();
        // realize symbolically in M_n(StarPoly)
        let gen = |g: u64| -> SymMat {
            let c = MatrixPointCode::decode(n, g);
            let mut m = SymMat(eye.clone(), n);
            m.0[c.row * n + c.col] = StarPoly::gen(c.point);
            m
        };
        let mut gen = gen;
        p.eval(&mut gen, &SymMat(eye.clone(), n)).0
    }

    /// Norm of a point of M_n(A) from norms of entries in A alone:
    /// ‖X‖^{2m} = ‖(X*X)^m‖ lies between the largest entry norm and the sum of
    /// entry norms of (X*X)^m, and the two bounds meet as m grows.
    fn norm_from_entries(&self, p: &StarPoly, k: u32) -> NormAnswer {
        let n = self.n;
        let x = SymMat(self.entries(p), n);
        let mut y = x.adjoint().mul(&x);
        let mut root = 2u32; // ‖X‖ = ‖Y‖^{1/root}
        let mut best_hi: Option<BigRational> = None;
        let mut best_lo: Option<BigRational> = None;
        for _ in 0..6 {
            let mut lo_max = BigRational::zero();
            // ‖Y‖ ≤ ‖(‖Y_rs‖)_rs‖, the norm of the scalar matrix of entry norms
            let mut ub = Some(ExactMatrix::zeros(n, n));
            for (i, e) in y.0.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let a = self.base.norm_query(e, k + 8);
                if let Some(l) = a.lower() {
                    if l > &lo_max {
                        lo_max = l.clone();
                    }
                }
                match (&mut ub, a.upper()) {
                    (Some(m), Some(u)) => m.set(i / n, i % n, GaussianRational::real(u.clone())),
                    _ => ub = None,
                }
            }
            let hi_sum = ub.map(|m| certified_opnorm(&m, k + 8).hi);
            let lo = nth_root_bounds(&lo_max, root, k + 4).0;
            if best_lo.as_ref().map_or(true, |b| &lo > b) {
                best_lo = Some(lo);
            }
            if let Some(s) = hi_sum {
                let hi = nth_root_bounds(&s, root, k + 4).1;
                if best_hi.as_ref().map_or(true, |b| &hi < b) {
                    best_hi = Some(hi);
                }
            }
            if let (Some(l), Some(h)) = (&best_lo, &best_hi) {
                if h - l <= pow2(-(k as i64)) && self.base.mode() == NormMode::Computable {
                    return NormAnswer::Interval(DyadicInterval::new(l.clone(), h.clone()));
                }
            }
            y = y.mul(&y);
            root *= 2;
        }
        match self.base.mode() {
            NormMode::RightCe | NormMode::Computable => best_hi.map_or(NormAnswer::Unknown, NormAnswer::Upper),
            NormMode::LeftCe => best_lo.map_or(NormAnswer::Unknown, NormAnswer::Lower),
            NormMode::Mixed => NormAnswer::Unknown,
        }
    }
}

/// Bounds on x^{1/2^j}·… for root = 2^j, by repeated square roots.
fn nth_root_bounds(x: &BigRational, root: u32, p: u32) -> (BigRational, BigRational) {
    let (mut lo, mut hi) = (x.clone(), x.clone());
    let mut r = root;
    while r > 1 {
        lo = sqrt_bounds(&lo, p + 4).0;
        hi = sqrt_bounds(&hi, p + 4).1;
        r /= 2;
    }
    (lo, hi)
}

#[derive(Clone)]
struct SymMat(Vec<StarPoly>, usize);

impl StarRing for SymMat {
    fn add(&self, o: &Self) -> Self {
        SymMat(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect(), self.1)
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.1;
        let mut out = vec![StarPoly::zero(); n * n];
        for r in 0..n {
            for s in 0..n {
                for t in 0..n {
                    let (a, b) = (&self.0[r * n + t], &o.0[t * n + s]);
                    if !a.is_zero() && !b.is_zero() {
                        out[r * n + s] = out[r * n + s].add(&a.mul(b));
                    }
                }
            }
        }
        SymMat(out, n)
    }

    fn scale(&self, z: &GaussianRational) -> Self {
        SymMat(self.0.iter().map(|a| a.scale(z)).collect(), self.1)
    }

    fn adjoint(&self) -> Self {
        let n = self.1;
        SymMat((0..n * n).map(|i| self.0[(i % n) * n + i / n].adjoint()).collect(), n)
    }
}

impl CPresentation for Amplified {
    fn describe(&self) -> String {
        format!("M_{}({})", self.n, self.base.describe())
    }

    fn mode(&self) -> NormMode {
        self.base.mode()
    }

    fn special(&self, k: u64) -> Option<Elem> {
        let c = MatrixPointCode::decode(self.n, k);
        let z = self.base.zero_elem()?;
        let mut entries = vec![z; self.n * self.n];
        entries[c.row * self.n + c.col] = self.base.special(c.point)?;
        Some(assemble(&entries, self.n))
    }

    fn zero_elem(&self) -> Option<Elem> {
        let z = self.base.zero_elem()?;
        Some(assemble(&vec![z; self.n * self.n], self.n))
    }

    fn norm_query(&self, p: &StarPoly, k: u32) -> NormAnswer {
        match self.realize(p) {
            Some(e) => NormAnswer::Interval(e.norm(k)),
            None => self.norm_from_entries(p, k),
        }
    }

    fn unit(&self) -> Option<StarPoly> {
        let u = self.base.unit()?;
        let mut out = StarPoly::zero();
        for r in 0..self.n {
            out = out.add(&self.place(&u, r, r));
        }
        Some(out)
    }

    fn lift(&self, e: &Elem) -> Option<StarPoly> {
        let parts = split(e, self.n);
        let mut out = StarPoly::zero();
        for r in 0..self.n {
            for s in 0..self.n {
                let part = &parts[r * self.n + s];
                if part.is_zero() {
                    continue;
                }
                out = out.add(&self.place(&self.base.lift(part)?, r, s));
            }
        }
        Some(out)
    }

    fn block_trace_invariant(&self) -> bool {
        self.base.block_trace_invariant()
    }

    // (1/n) Σ_r τ(x_rr), computed entrywise so bases with cheap traces stay cheap
    fn block_traces(&self, p: &StarPoly) -> Option<Vec<GaussianRational>> {
        let n = self.n;
        let entries = self.entries(p);
        let mut acc: Option<Vec<GaussianRational>> = None;
        for r in 0..n {
            let t = self.base.block_traces(&entries[r * n + r])?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.iter().zip(&t).map(|(x, y)| x + y).collect(),
            });
        }
        let inv = GaussianRational::real(BigRational::new(1.into(), (n as i64).into()));
        Some(acc?.iter().map(|x| x * &inv).collect())
    }
}

/// A × B: special point 2m is (a_m, 0) and 2m+1 is (0, b_m).
pub struct Product {
    pub a: CPres,
    pub b: CPres,
}

pub fn product(a: CPres, b: CPres) -> CPres {
    Arc::new(Product { a, b })
}

impl Product {
    /// The components of a rational point of A × B.
    pub fn project(&self, p: &StarPoly) -> (StarPoly, StarPoly) {
        let side = |parity: u64| {
            p.substitute(&mut |g| if g % 2 == parity { StarPoly::gen(g / 2) } else { StarPoly::zero() })
        };
        (side(0), side(1))
    }

    /// (p, q) as a rational point of A × B.
    pub fn pair_points(&self, p: &StarPoly, q: &StarPoly) -> StarPoly {
        p.substitute(&mut |g| StarPoly::gen(2 * g)).add(&q.substitute(&mut |g| StarPoly::gen(2 * g + 1)))
    }

    fn split_elem(&self, e: &Elem) -> Option<(Elem, Elem)> {
        let na = self.a.zero_elem()?.block_count();
        Some(e.split_at(na))
    }
}

impl CPresentation for Product {
    fn describe(&self) -> String {
        format!("{} x {}", self.a.describe(), self.b.describe())
    }

    fn mode(&self) -> NormMode {
        self.a.mode().weaker(self.b.mode())
    }

    fn special(&self, i: u64) -> Option<Elem> {
        let (za, zb) = (self.a.zero_elem()?, self.b.zero_elem()?);
        Some(if i % 2 == 0 { self.a.special(i / 2)?.concat(&zb) } else { za.concat(&self.b.special(i / 2)?) })
    }

    fn zero_elem(&self) -> Option<Elem> {
        Some(self.a.zero_elem()?.concat(&self.b.zero_elem()?))
    }

    fn norm_query(&self, p: &StarPoly, k: u32) -> NormAnswer {
        if let Some(e) = self.realize(p) {
            return NormAnswer::Interval(e.norm(k));
        }
        let (pa, pb) = self.project(p);
        self.a.norm_query(&pa, k).max(&self.b.norm_query(&pb, k))
    }

    fn unit(&self) -> Option<StarPoly> {
        Some(self.pair_points(&self.a.unit()?, &self.b.unit()?))
    }

    fn lift(&self, e: &Elem) -> Option<StarPoly> {
        let (ea, eb) = self.split_elem(e)?;
        Some(self.pair_points(&self.a.lift(&ea)?, &self.b.lift(&eb)?))
    }

    fn block_trace_invariant(&self) -> bool {
        self.a.block_trace_invariant() && self.b.block_trace_invariant()
    }
}

/// Ã = A ⊕ ℂ with (a,α)(b,β) = (ab + βa + αb, αβ); special point ⟨m,k⟩ is
/// (a_m, gaussian(k)). Realized by (a,α) ↦ (a + α·1, α), which is an
/// injective *-homomorphism whenever A is realized in matrices or paths
/// (with 1 the identity of the realization).
pub struct Unitization {
    pub base: CPres,
}

pub fn unitize(base: CPres) -> CPres {
    Arc::new(Unitization { base })
}

impl Unitization {
    fn ones(&self) -> Option<Elem> {
        let z = self.base.zero_elem()?;
        Some(Elem::Blocks(vec![ExactMatrix::identity(1); z.block_count()]))
    }

    fn embed(&self, a: &Elem, alpha: &GaussianRational) -> Option<Elem> {
        let shifted = a.add(&self.ones()?.scale(alpha));
        Some(shifted.concat(&Elem::scalar(alpha.clone())))
    }

    /// ι(p): the point (p, 0).
    pub fn include(&self, p: &StarPoly) -> StarPoly {
        p.substitute(&mut |g| StarPoly::gen(pair(g, 1)))
    }

    /// The scalar part α of a rational point (p, α).
    pub fn scalar_part(&self, p: &StarPoly) -> GaussianRational {
        let v = p.eval(&mut |g| coding::gaussian(unpair(g).1), &GaussianRational::zero());
        v
    }
}

impl StarRing for GaussianRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn scale(&self, z: &GaussianRational) -> Self {
        self * z
    }

    fn adjoint(&self) -> Self {
        self.conj()
    }
}

impl CPresentation for Unitization {
    fn describe(&self) -> String {
        format!("unitization({})", self.base.describe())
    }

    fn mode(&self) -> NormMode {
        self.base.mode()
    }

    fn special(&self, i: u64) -> Option<Elem> {
        let (m, k) = unpair(i);
        self.embed(&self.base.special(m)?, &coding::gaussian(k))
    }

    fn zero_elem(&self) -> Option<Elem> {
        self.embed(&self.base.zero_elem()?, &GaussianRational::zero())
    }

    fn unit(&self) -> Option<StarPoly> {
        // (a_0, 1) - (a_0, 0)
        Some(StarPoly::gen(pair(0, 0)).sub(&StarPoly::gen(pair(0, 1))))
    }

    fn lift(&self, e: &Elem) -> Option<StarPoly> {
        let n = e.block_count();
        let (shifted, alpha) = e.split_at(n - 1);
        let alpha = alpha.blocks()?[0].get(0, 0).clone();
        let a = shifted.sub(&self.ones()?.scale(&alpha));
        let lifted = if a.is_zero() { StarPoly::zero() } else { self.include(&self.base.lift(&a)?) };
        Some(lifted.add(&self.unit()?.scale(&alpha)))
    }

    fn block_trace_invariant(&self) -> bool {
        self.base.block_trace_invariant()
    }
}

/// Hat function of index m: with (i, j, l) = untriple(m) and
/// (a, c, b) = unit rationals of (i, j, l), the piecewise-linear function that
/// is 0 outside (a, b), 1 at c; the zero function unless a < c < b.
pub fn hat(m: u64) -> Option<(BigRational, BigRational, BigRational)> {
    let (i, j, l) = untriple(m);
    let (a, c, b) = (coding::unit_rational(i), coding::unit_rational(j), coding::unit_rational(l));
    (a < c && c < b).then_some((a, c, b))
}

/// Knots and per-segment coefficients [c0, c1] of a hat function.
pub fn hat_pieces(a: &BigRational, c: &BigRational, b: &BigRational) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let mut knots = vec![BigRational::zero()];
    let mut coeffs = Vec::new();
    if !a.is_zero() {
        knots.push(a.clone());
        coeffs.push(vec![BigRational::zero()]);
    }
    let up = BigRational::one() / (c - a);
    coeffs.push(vec![-(a * &up), up]);
    knots.push(c.clone());
    let down = BigRational::one() / (b - c);
    coeffs.push(vec![b * &down, -down]);
    knots.push(b.clone());
    if !b.is_one() {
        coeffs.push(vec![BigRational::zero()]);
        knots.push(BigRational::one());
    }
    (knots, coeffs)
}

/// SA = C_0((0,1)) ⊗ A: special point ⟨m,k⟩ is hat_m ⊗ a_k.
pub struct Suspension {
    pub base: CPres,
}

pub fn suspend(base: CPres) -> CPres {
    Arc::new(Suspension { base })
}

impl CPresentation for Suspension {
    fn describe(&self) -> String {
        format!("S({})", self.base.describe())
    }

    fn mode(&self) -> NormMode {
        self.base.mode()
    }

    fn special(&self, i: u64) -> Option<Elem> {
        let (m, k) = unpair(i);
        let a = self.base.special(k)?;
        Some(match hat(m) {
            None => a.zero_like(),
            Some((lo, c, hi)) => {
                let (knots, coeffs) = hat_pieces(&lo, &c, &hi);
                a.times_function(&knots, &coeffs)
            }
        })
    }

    fn zero_elem(&self) -> Option<Elem> {
        self.base.zero_elem()
    }

    fn block_trace_invariant(&self) -> bool {
        // projections in SA are 0; classes in M_n(SA) vanish with A
        self.base.block_trace_invariant()
    }
}

/// A presentation given only by a norm oracle.
pub struct OraclePresentation {
    pub name: String,
    pub mode: NormMode,
    pub oracle: Arc<dyn Fn(&StarPoly, u32) -> NormAnswer + Send + Sync>,
    pub unit: Option<StarPoly>,
}

impl CPresentation for OraclePresentation {
    fn describe(&self) -> String {
        self.name.clone()
    }

    fn mode(&self) -> NormMode {
        self.mode
    }

    fn norm_query(&self, p: &StarPoly, k: u32) -> NormAnswer {
        (self.oracle)(p, k)
    }

    fn unit(&self) -> Option<StarPoly> {
        self.unit.clone()
    }
}

/// Hides the realization of a presentation, keeping only its norm oracle
/// (at the given mode). Used to exercise the oracle-only code paths.
pub fn opaque(inner: CPres, mode: NormMode) -> CPres {
    let name = format!("opaque({})", inner.describe());
    let unit = inner.unit();
    let oracle = move |p: &StarPoly, k: u32| -> NormAnswer {
        let ans = inner.norm_query(p, k + 1);
        match mode {
            NormMode::Computable => ans,
            NormMode::RightCe => ans.upper().map_or(NormAnswer::Unknown, |u| NormAnswer::Upper(u + pow2(-(k as i64) - 1))),
            NormMode::LeftCe => ans.lower().map_or(NormAnswer::Unknown, |l| NormAnswer::Lower(l - pow2(-(k as i64) - 1))),
            NormMode::Mixed => NormAnswer::Unknown,
        }
    };
    Arc::new(OraclePresentation { name, mode, oracle: Arc::new(oracle), unit })
}
