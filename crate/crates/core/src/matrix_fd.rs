//! M_n(ℂ) with exact projections: canonical embeddings, rank and trace,
//! decidable Murray-von Neumann equivalence, and spectral rounding.

use crate::error::{Error, Result};
use crate::exact::{certified_opnorm, pow2, trace_exact, ExactMatrix, GaussianRational};
use crate::exact::matrix::row_echelon;
use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

pub use crate::cstar::standard_matrix as fd_presentation;

/// The unital embedding E_{m,n}: a ↦ diag(a, …, a), n/m copies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CanonicalEmbedding {
    pub m: usize,
    pub n: usize,
}

pub fn canonical_embedding(m: usize, n: usize) -> Result<CanonicalEmbedding> {
    if m == 0 || n % m != 0 {
        return Err(Error::Divisibility { m: m as u64, n: n as u64 });
    }
    Ok(CanonicalEmbedding { m, n })
}

impl CanonicalEmbedding {
    pub fn apply(&self, a: &ExactMatrix) -> Result<ExactMatrix> {
        if a.rows() != self.m || a.cols() != self.m {
            return Err(Error::Dimension(format!("E_{{{},{}}} applied to {}x{}", self.m, self.n, a.rows(), a.cols())));
        }
        Ok(crate::cstar::embed(a, self.n))
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &CanonicalEmbedding) -> Result<CanonicalEmbedding> {
        if inner.n != self.m {
            return Err(Error::Dimension(format!("cannot compose E_{{{},{}}} after E_{{{},{}}}", self.m, self.n, inner.m, inner.n)));
        }
        canonical_embedding(inner.m, self.n)
    }
}

/// A matrix with p = p* = p² exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactProjection(ExactMatrix);

impl ExactProjection {
    pub fn new(m: ExactMatrix) -> Result<Self> {
        if !m.is_square() || !m.is_projection() {
            return Err(Error::NotProjection(format!("{}x{} matrix with p != p* or p != p^2", m.rows(), m.cols())));
        }
        Ok(ExactProjection(m))
    }

    /// diag of 0/1 flags.
    pub fn diagonal(flags: &[bool]) -> Self {
        let d: Vec<GaussianRational> =
            flags.iter().map(|&f| if f { GaussianRational::one() } else { GaussianRational::zero() }).collect();
        ExactProjection(ExactMatrix::diag(&d))
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// p ⊕ 0_k.
    pub fn pad(&self, n: usize) -> ExactProjection {
        if n <= self.dim() {
            return self.clone();
        }
        ExactProjection(self.0.direct_sum(&ExactMatrix::zeros(n - self.dim(), n - self.dim())))
    }
}

/// (rank, normalized trace); the trace is rank/n.
pub fn rank_trace(p: &ExactProjection) -> (usize, BigRational) {
    let tr = trace_exact(&p.0).expect("projections are square").re;
    let rank = (&tr * BigRational::from_integer(p.dim().into())).to_integer().to_usize().unwrap();
    debug_assert_eq!(rank, p.0.rank());
    (rank, tr)
}

/// A partial isometry v with vv* = p and v*v = q, kept factored as
/// v = Σ_i u_i w_i* / λ_i over orthogonal bases (u_i) of ran p and (w_i) of
/// ran q, where |λ_i|² = ‖u_i‖²‖w_i‖². The entries are rational exactly when
/// every λ_i can be chosen in ℚ(i).
#[derive(Clone, Debug)]
pub struct MvnWitness {
    pub us: Vec<Vec<GaussianRational>>,
    pub ws: Vec<Vec<GaussianRational>>,
    pub matrix: Option<ExactMatrix>,
}

#[derive(Clone, Debug)]
pub enum FdMvn {
    Equivalent(MvnWitness),
    Inequivalent,
}

impl FdMvn {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, FdMvn::Equivalent(_))
    }
}

fn inner(a: &[GaussianRational], b: &[GaussianRational]) -> GaussianRational {
    a.iter().zip(b).fold(GaussianRational::zero(), |acc, (x, y)| &acc + &(&x.conj() * y))
}

/// Orthogonal (unnormalized) basis of the column space.
fn orthogonal_range(p: &ExactMatrix) -> Vec<Vec<GaussianRational>> {
    let (_, pivots) = row_echelon(p);
    let mut basis: Vec<Vec<GaussianRational>> = Vec::new();
    for c in pivots {
        let mut v: Vec<GaussianRational> = (0..p.rows()).map(|r| p.get(r, c).clone()).collect();
        for b in &basis {
            let f = &inner(b, &v) / &inner(b, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= &(&f * y);
            }
        }
        basis.push(v);
    }
    basis
}

/// a, b ∈ ℚ with a² + b² = r, by search over integer representations of
/// numerator·denominator (bounded).
fn two_squares(r: &BigRational) -> Option<GaussianRational> {
    let nd = (r.numer() * r.denom()).to_u64()?;
    if nd > 1 << 40 {
        return None;
    }
    let d = BigInt::from(r.denom().clone());
    let mut x = nd.sqrt();
    loop {
        let rest = nd - x * x;
        let y = rest.sqrt();
        if y * y == rest {
            return Some(GaussianRational::new(BigRational::new(x.into(), d.clone()), BigRational::new(y.into(), d)));
        }
        if x == 0 || x * x * 2 < nd {
            return None;
        }
        x -= 1;
    }
}

fn outer(u: &[GaussianRational], w: &[GaussianRational]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(u.len(), w.len());
    for (i, a) in u.iter().enumerate() {
        for (j, b) in w.iter().enumerate() {
            m.set(i, j, a * &b.conj());
        }
    }
    m
}

impl MvnWitness {
    /// Checks vv* = p and v*v = q exactly, in factored form (and on the
    /// matrix when present).
    pub fn verify(&self, p: &ExactMatrix, q: &ExactMatrix) -> bool {
        let proj = |basis: &[Vec<GaussianRational>], n: usize| {
            let mut m = ExactMatrix::zeros(n, n);
            for (i, u) in basis.iter().enumerate() {
                for b in &basis[..i] {
                    if !inner(b, u).is_zero() {
                        return None;
                    }
                }
                let s = GaussianRational::real(BigRational::one() / inner(u, u).re);
                m = m.add(&outer(u, u).scale(&s));
            }
            Some(m)
        };
        if self.us.len() != self.ws.len() {
            return false;
        }
        let factored = proj(&self.us, p.rows()).as_ref() == Some(p) && proj(&self.ws, q.rows()).as_ref() == Some(q);
        let exact = self.matrix.as_ref().map_or(true, |v| v.mul(&v.adjoint()) == *p && v.adjoint().mul(v) == *q);
        factored && exact
    }
}

/// p ∼ q in M_n(ℂ) iff rank p = rank q; pads the smaller with zeros.
pub fn mvn_decide_fd(p: &ExactProjection, q: &ExactProjection) -> FdMvn {
    let n = p.dim().max(q.dim());
    let (p, q) = (p.pad(n), q.pad(n));
    if rank_trace(&p).0 != rank_trace(&q).0 {
        return FdMvn::Inequivalent;
    }
    let us = orthogonal_range(&p.0);
    let ws = orthogonal_range(&q.0);
    let mut v = Some(ExactMatrix::zeros(n, n));
    for (u, w) in us.iter().zip(&ws) {
        let r = inner(u, u).re * inner(w, w).re;
        v = match (v, two_squares(&r)) {
            (Some(acc), Some(lambda)) => Some(acc.add(&outer(u, w).scale(&lambda.inv().unwrap()))),
            _ => None,
        };
    }
    FdMvn::Equivalent(MvnWitness { us, ws, matrix: v })
}

/// Result of rounding an almost-projection to a projection.
#[derive(Clone, Debug)]
pub struct RoundedProjection {
    pub residual: BigRational,
    /// Set when purification lands on an exact projection.
    pub exact: Option<ExactProjection>,
    start: ExactMatrix,
}

fn round_dyadic(m: &ExactMatrix, p: u32) -> ExactMatrix {
    let s = BigRational::from_integer(BigInt::one() << p);
    let r = |x: &BigRational| (x * &s).round() / &s;
    let mut out = ExactMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m.get(i, j);
            out.set(i, j, GaussianRational::new(r(&z.re), r(&z.im)));
        }
    }
    out
}

/// Upper bound on max(‖M² - M‖, ‖M - M*‖).
pub fn projection_residual(m: &ExactMatrix) -> BigRational {
    let a = certified_opnorm(&m.mul(m).sub(m), 20).hi;
    let b = certified_opnorm(&m.sub(&m.adjoint()), 20).hi;
    a.max(b)
}

/// Rounds M with residual < 1/4 to the spectral projection of its Hermitian
/// part onto (1/2, ∞), by McWeeny purification P ↦ 3P² - 2P³ on dyadic
/// roundings.
pub fn spectral_round_to_projection(m: &ExactMatrix) -> Result<RoundedProjection> {
    if !m.is_square() {
        return Err(Error::Dimension("spectral rounding of a non-square matrix".into()));
    }
    let residual = projection_residual(m);
    if residual >= BigRational::new(1.into(), 4.into()) {
        return Err(Error::OutOfBasin(residual.to_string()));
    }
    let half = GaussianRational::real(BigRational::new(1.into(), 2.into()));
    let start = m.add(&m.adjoint()).scale(&half);
    let mut r = RoundedProjection { residual, exact: None, start };
    if let Ok(p) = ExactProjection::new(m.clone()) {
        r.exact = Some(p);
        return Ok(r);
    }
    let cand = r.approx(40);
    for p in [2u32, 4, 8, 16, 32] {
        if let Ok(e) = ExactProjection::new(round_dyadic(&cand, p)) {
            r.exact = Some(e);
            break;
        }
    }
    Ok(r)
}

impl RoundedProjection {
    /// A Hermitian matrix within 2^-k of the rounded projection.
    pub fn approx(&self, k: u32) -> ExactMatrix {
        if let Some(e) = &self.exact {
            return e.0.clone();
        }
        let three = GaussianRational::from_int(3);
        let two = GaussianRational::from_int(2);
        let prec = k + 12;
        let mut p = round_dyadic(&self.start, prec);
        for _ in 0..200 {
            let p2 = p.mul(&p);
            let next = round_dyadic(&p2.scale(&three).sub(&p2.mul(&p).scale(&two)), prec);
            let step = certified_opnorm(&next.sub(&p), 8).hi;
            p = next;
            if step < pow2(-(k as i64) - 4) {
                break;
            }
        }
        p
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn two_square_search() {
        let z = two_squares(&q(1, 2)).unwrap();
        assert_eq!(z.norm_sqr(), q(1, 2));
        assert!(two_squares(&q(3, 1)).is_none());
    }
}
