//! The presentation interface: special points, norm oracles and modes.

use super::elem::Elem;
use super::starpoly::{rational_point_u64, StarPoly, StarRing};
use crate::error::{Error, Result};
use crate::exact::{pow2, DyadicInterval, GaussianRational};
use num_rational::BigRational;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NormMode {
    Computable,
    RightCe,
    LeftCe,
    /// Product of a right-c.e. and a left-c.e. factor: neither kind of
    /// one-sided approximation survives the max.
    Mixed,
}

impl NormMode {
    pub fn weaker(self, o: NormMode) -> NormMode {
        use NormMode::*;
        match (self, o) {
            (Computable, m) | (m, Computable) => m,
            (a, b) if a == b => a,
            _ => Mixed,
        }
    }
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMode::Computable => "computable",
            NormMode::RightCe => "right_ce",
            NormMode::LeftCe => "left_ce",
            NormMode::Mixed => "mixed",
        })
    }
}

/// One answer of a norm oracle at stage/precision k.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NormAnswer {
    /// Contains the norm; width ≤ 2^-k.
    Interval(DyadicInterval),
    /// k-th term of a decreasing sequence converging to the norm.
    Upper(BigRational),
    /// k-th term of an increasing sequence converging to the norm.
    Lower(BigRational),
    Unknown,
}

impl NormAnswer {
    pub fn interval(&self) -> Option<&DyadicInterval> {
        match self {
            NormAnswer::Interval(i) => Some(i),
            _ => None,
        }
    }

    pub fn upper(&self) -> Option<&BigRational> {
        match self {
            NormAnswer::Interval(i) => Some(&i.hi),
            NormAnswer::Upper(u) => Some(u),
            _ => None,
        }
    }

    pub fn lower(&self) -> Option<&BigRational> {
        match self {
            NormAnswer::Interval(i) => Some(&i.lo),
            NormAnswer::Lower(l) => Some(l),
            _ => None,
        }
    }

    /// max(‖a‖, ‖b‖) from answers about a and b.
    pub fn max(&self, o: &NormAnswer) -> NormAnswer {
        use NormAnswer::*;
        match (self, o) {
            (Interval(a), Interval(b)) => Interval(a.max(b)),
            (Interval(_) | Upper(_), Interval(_) | Upper(_)) => {
                Upper(self.upper().unwrap().max(o.upper().unwrap()).clone())
            }
            (Interval(_) | Lower(_), Interval(_) | Lower(_)) => {
                Lower(self.lower().unwrap().max(o.lower().unwrap()).clone())
            }
            _ => Unknown,
        }
    }
}

/// A presentation of a C*-algebra.
///
/// Shipped presentations are matrix-backed: their special points have exact
/// realizations ([`Elem`]) and norms are certified from those. Presentations
/// without a realization answer through `norm_query` alone.
pub trait CPresentation: Send + Sync {
    fn describe(&self) -> String;

    fn mode(&self) -> NormMode;

    /// Exact realization of the i-th special point.
    fn special(&self, _i: u64) -> Option<Elem> {
        None
    }

    /// The zero element of the realization (fixes the block structure).
    fn zero_elem(&self) -> Option<Elem> {
        None
    }

    fn realize(&self, p: &StarPoly) -> Option<Elem> {
        let zero = self.zero_elem()?;
        let mut specials = std::collections::BTreeMap::new();
        for g in p.generators() {
            specials.insert(g, self.special(g)?);
        }
        Some(p.eval(&mut |g| specials[&g].clone(), &zero))
    }

    /// Norm information about p at precision (or stage) k.
    fn norm_query(&self, p: &StarPoly, k: u32) -> NormAnswer {
        match self.realize(p) {
            Some(e) => NormAnswer::Interval(e.norm(k)),
            None => NormAnswer::Unknown,
        }
    }

    /// A rational point equal to the unit, when the algebra is unital and the
    /// presentation knows it.
    fn unit(&self) -> Option<StarPoly> {
        None
    }

    /// A rational point whose realization is exactly `e`, if there is one.
    fn lift(&self, _e: &Elem) -> Option<StarPoly> {
        None
    }

    /// True when projections of every M_n(A) are Murray-von Neumann
    /// equivalent iff their realizations have equal (unnormalized) trace in
    /// every block at t = 0. Holds for finite-dimensional and UHF
    /// realizations, and for unitized suspensions of those (vector bundles
    /// over the circle are trivial).
    fn block_trace_invariant(&self) -> bool {
        false
    }

    /// Normalized trace of every block of the realization at t = 0.
    fn block_traces(&self, p: &StarPoly) -> Option<Vec<GaussianRational>> {
        Some(self.realize(p)?.normalized_block_traces())
    }
}

pub type CPres = Arc<dyn CPresentation>;

/// The fixed effective list of rational points; `i ↦ q_i` is total and
/// surjective onto all constant-free *-polynomials.
pub fn enumerate_rational_points() -> impl Iterator<Item = StarPoly> {
    (0u64..).map(rational_point_u64)
}

/// Interval for ‖p‖ of width ≤ 2^-k, when the mode allows one.
pub fn norm_interval(a: &dyn CPresentation, p: &StarPoly, k: u32) -> Option<DyadicInterval> {
    a.norm_query(p, k).interval().cloned()
}

/// Certified interval for ‖p - q‖.
pub fn distance(a: &dyn CPresentation, p: &StarPoly, q: &StarPoly, k: u32) -> Option<DyadicInterval> {
    norm_interval(a, &p.sub(q), k)
}

/// A computable point: a map k ↦ rational point b_k with ‖a - b_k‖ < 2^-k.
#[derive(Clone)]
pub struct ComputablePoint {
    approx: Arc<dyn Fn(u32) -> StarPoly + Send + Sync>,
}

impl fmt::Debug for ComputablePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComputablePoint({})", self.at(0))
    }
}

impl ComputablePoint {
    pub fn new(f: impl Fn(u32) -> StarPoly + Send + Sync + 'static) -> Self {
        ComputablePoint { approx: Arc::new(f) }
    }

    /// From an approximator returning rational-point indices.
    pub fn from_indices(f: impl Fn(u32) -> u64 + Send + Sync + 'static) -> Self {
        Self::new(move |k| rational_point_u64(f(k)))
    }

    pub fn constant(p: StarPoly) -> Self {
        Self::new(move |_| p.clone())
    }

    pub fn at(&self, k: u32) -> StarPoly {
        (self.approx)(k)
    }
}

/// Wraps an approximator as a point handle after checking
/// ‖b_k - b_{k+1}‖ ≤ 2^-k + 2^-(k+1) for k < `upto`. A violation proven by
/// the norm oracle is an error; an undecidable comparison is not.
pub fn computable_point(a: &dyn CPresentation, approx: ComputablePoint, upto: u32) -> Result<ComputablePoint> {
    for k in 0..upto {
        let bound = pow2(-(k as i64)) + pow2(-(k as i64) - 1);
        let d = a.norm_query(&approx.at(k).sub(&approx.at(k + 1)), k + 4);
        if let Some(lo) = d.lower() {
            if lo > &bound {
                return Err(Error::Cauchy {
                    k,
                    detail: format!("‖b_{k} - b_{}‖ ≥ {lo} > {bound}", k + 1),
                });
            }
        }
    }
    Ok(approx)
}
