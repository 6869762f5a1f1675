//! The Murray-von Neumann semigroup D(A) presented over D_ω.
//!
//! Generator ⟨m, k⟩ labels the class of the k-th enumerated projection of
//! M_{m+1}(A); a word labels the class of the direct sum of its letters.

use crate::coding::{pair, unpair};
use crate::cstar::{rational_point_u64, Amplified, MatrixPointCode, CPres, CPresentation, ComputablePoint, Elem, StarPoly, StarRing};
use crate::effective_sets::{mvn_semidecide, round_to_projection_points, MvnVerdict};
use crate::exact::{ExactMatrix, GaussianRational};
use crate::fuel::Verdict;
use crate::presentations::{KernelMode, Presentation, SgWord, WordMap};
use crate::uhf::UhfCertificate;
use num_rational::BigRational;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Where the k-th projection of M_n(A) comes from.
#[derive(Clone, Debug)]
pub enum ProjectionSource {
    /// Even k = 2i: the i-th rational point of M_n(A) if it is an exact
    /// projection, else its spectral rounding, else 0. Odd k = 2i+1: the
    /// diagonal projection of the realized unit selected by the bits of i.
    Generic,
    /// k = ⟨j, r⟩: the stage-j diagonal projection of M_n(M_{n_j}) with its
    /// first r mod (n·n_j + 1) diagonal entries equal to 1.
    Uhf(UhfCertificate),
    /// The inner enumeration with its first entries skipped: k ↦ inner(k + s).
    Offset(Box<ProjectionSource>, u64),
}

fn is_exact_projection(a: &dyn CPresentation, p: &StarPoly) -> bool {
    match a.realize(p) {
        Some(e) => e.mul(&e).sub(&e).is_zero() && e.sub(&e.adjoint()).is_zero(),
        None => false,
    }
}

impl ProjectionSource {
    /// The k-th projection of M_n(A), as a point in the amplified coding.
    pub fn projection(&self, a: &CPres, n: usize, k: u64) -> StarPoly {
        let amp = Amplified { base: a.clone(), n };
        match self {
            ProjectionSource::Offset(inner, skip) => inner.projection(a, n, k.saturating_add(*skip)),
            ProjectionSource::Uhf(cert) => {
                let (j, r) = unpair(k);
                let Ok(nj) = cert.dim_u64(j) else { return StarPoly::zero() };
                let total = (n as u64).saturating_mul(nj);
                let ones = r % total.saturating_add(1);
                let mut out = StarPoly::zero();
                for t in 0..ones {
                    let (b, i) = ((t / nj) as usize, t % nj);
                    if let Ok(u) = cert.stage_unit(j, i, i) {
                        out = out.add(&amp.place(&u, b, b));
                    }
                }
                out
            }
            ProjectionSource::Generic if k % 2 == 0 => {
                let p = rational_point_u64(k / 2);
                if is_exact_projection(&amp, &p) {
                    return p;
                }
                round_to_projection_points(&amp, &p).into_iter().next().unwrap_or_else(StarPoly::zero)
            }
            ProjectionSource::Generic => {
                let bits = k / 2;
                let Some(Elem::Blocks(blocks)) = amp.unit().and_then(|u| amp.realize(&u)) else {
                    return StarPoly::zero();
                };
                let total: usize = blocks.iter().map(|b| b.rows()).sum();
                let mask = if total >= 64 { bits } else { bits % (1u64 << total) };
                let mut pos = 0;
                let mut diag = Vec::new();
                for b in &blocks {
                    let mut m = ExactMatrix::zeros(b.rows(), b.rows());
                    for i in 0..b.rows() {
                        if pos < 64 && mask >> pos & 1 == 1 {
                            m.set(i, i, GaussianRational::one());
                        }
                        pos += 1;
                    }
                    diag.push(m);
                }
                amp.lift(&Elem::Blocks(diag)).unwrap_or_else(StarPoly::zero)
            }
        }
    }

    /// The stage a UHF source projection lives at.
    pub fn stage(&self, k: u64) -> Option<u64> {
        match self {
            ProjectionSource::Uhf(_) => Some(unpair(k).0),
            ProjectionSource::Offset(inner, skip) => inner.stage(k.saturating_add(*skip)),
            ProjectionSource::Generic => None,
        }
    }
}

/// Handles p_{n,0}, p_{n,1}, … of the enumeration for M_n(A).
pub fn enumerate_projections(a: &CPres, source: &ProjectionSource, n: usize) -> impl Iterator<Item = ComputablePoint> {
    let (a, source) = (a.clone(), source.clone());
    (0u64..).map(move |k| ComputablePoint::constant(source.projection(&a, n, k)))
}

/// D(A)# for a presentation A# and a projection enumeration.
///
/// When A is block-trace invariant the kernel compares trace vectors and
/// is computable; otherwise it runs the chain search on padded direct sums
/// and is only c.e.
pub struct DPresentation {
    pub a: CPres,
    pub source: ProjectionSource,
    cache: Mutex<HashMap<u64, StarPoly>>,
}

pub fn build_d(a: CPres, source: ProjectionSource) -> Arc<DPresentation> {
    Arc::new(DPresentation { a, source, cache: Mutex::default() })
}

impl DPresentation {
    pub fn trace_route(&self) -> bool {
        self.a.block_trace_invariant()
    }

    /// Generator ⟨m, k⟩ as (n, projection of M_n(A)).
    pub fn generator(&self, g: u64) -> (usize, StarPoly) {
        let (m, k) = unpair(g);
        let n = m as usize + 1;
        if let Some(p) = self.cache.lock().unwrap().get(&g) {
            return (n, p.clone());
        }
        let p = self.source.projection(&self.a, n, k);
        self.cache.lock().unwrap().insert(g, p.clone());
        (n, p)
    }

    pub fn generator_code(n: usize, k: u64) -> u64 {
        pair(n as u64 - 1, k)
    }

    /// Unnormalized block traces n·τ(p) of a projection of M_n(A).
    pub fn class_value(&self, n: usize, p: &StarPoly) -> Option<Vec<GaussianRational>> {
        let amp = Amplified { base: self.a.clone(), n };
        let scale = GaussianRational::from_int(n as i64);
        Some(amp.block_traces(p)?.iter().map(|t| t * &scale).collect())
    }

    /// Σ of the class values of the letters.
    pub fn value(&self, w: &SgWord) -> Option<Vec<GaussianRational>> {
        let mut acc: Option<Vec<GaussianRational>> = None;
        for &g in w.gens() {
            let (n, p) = self.generator(g);
            let v = self.class_value(n, &p)?;
            acc = Some(match acc {
                None => v,
                Some(a) => a.iter().zip(&v).map(|(x, y)| x + y).collect(),
            });
        }
        acc
    }

    /// Real part of the summed trace value (the value in ℚ for UHF).
    pub fn total_trace(&self, w: &SgWord) -> Option<BigRational> {
        let v = self.value(w)?;
        Some(v.iter().map(|z| z.re.clone()).sum())
    }

    /// φ_0(w) = ⊕ q_j as a point of M_N(A), N = Σ n_j.
    pub fn direct_sum(&self, w: &SgWord) -> (usize, StarPoly) {
        let parts: Vec<(usize, StarPoly)> = w.gens().iter().map(|&g| self.generator(g)).collect();
        let total = parts.iter().map(|(n, _)| n).sum();
        let big = Amplified { base: self.a.clone(), n: total };
        let mut out = StarPoly::zero();
        let mut off = 0;
        for (n, p) in parts {
            out = out.add(&shift(&self.a, n, &p, &big, off));
            off += n;
        }
        (total, out)
    }

    /// Is p ∈ M_n(A) equivalent to q ∈ M_m(A)? Sizes are padded right and
    /// below with zero blocks.
    pub fn equivalent(&self, n: usize, p: &StarPoly, m: usize, q: &StarPoly, fuel: u64) -> Verdict {
        if self.trace_route() {
            return match (self.class_value(n, p), self.class_value(m, q)) {
                (Some(x), Some(y)) => Verdict::from_bool(x == y),
                _ => Verdict::Unknown { fuel: 0 },
            };
        }
        let size = n.max(m);
        let big = Amplified { base: self.a.clone(), n: size };
        let (pp, qq) = (shift(&self.a, n, p, &big, 0), shift(&self.a, m, q, &big, 0));
        match mvn_semidecide(&self.a, size, &ComputablePoint::constant(pp), &ComputablePoint::constant(qq), fuel) {
            Ok(MvnVerdict::Equivalent(_)) => Verdict::InKernel,
            Ok(MvnVerdict::Unknown { fuel }) => Verdict::Unknown { fuel },
            Err(_) => Verdict::Unknown { fuel: 0 },
        }
    }
}

/// Moves p ∈ M_n(A) to the diagonal block at offset `off` of M_N(A).
fn shift(a: &CPres, n: usize, p: &StarPoly, big: &Amplified, off: usize) -> StarPoly {
    let small = Amplified { base: a.clone(), n };
    let entries = small.entries(p);
    let mut out = StarPoly::zero();
    for r in 0..n {
        for s in 0..n {
            let e = &entries[r * n + s];
            if !e.is_zero() {
                out = out.add(&big.place(e, off + r, off + s));
            }
        }
    }
    out
}

impl Presentation<SgWord> for DPresentation {
    fn mode(&self) -> KernelMode {
        if self.trace_route() {
            KernelMode::Computable
        } else {
            KernelMode::Ce
        }
    }

    fn kernel(&self, a: &SgWord, b: &SgWord, fuel: u64) -> Verdict {
        if self.trace_route() {
            return match (self.value(a), self.value(b)) {
                (Some(x), Some(y)) => Verdict::from_bool(x == y),
                _ => Verdict::Unknown { fuel: 0 },
            };
        }
        let (n, p) = self.direct_sum(a);
        let (m, q) = self.direct_sum(b);
        self.equivalent(n, &p, m, &q, fuel)
    }

    fn describe(&self, w: &SgWord) -> Option<String> {
        let v = self.value(w)?;
        Some(v.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(" ⊕ "))
    }
}

/// A *-homomorphism A → B given by the images of the generators of A#.
#[derive(Clone)]
pub struct StarHom {
    pub image: Arc<dyn Fn(u64) -> StarPoly + Send + Sync>,
}

impl StarHom {
    pub fn new(image: impl Fn(u64) -> StarPoly + Send + Sync + 'static) -> Self {
        StarHom { image: Arc::new(image) }
    }

    pub fn identity() -> Self {
        Self::new(StarPoly::gen)
    }

    pub fn apply(&self, p: &StarPoly) -> StarPoly {
        p.substitute(&mut |g| (self.image)(g))
    }

    /// φ_n = φ ⊗ id on M_n, in the amplified codings of both sides.
    pub fn amplified(&self, b: &CPres, n: usize, p: &StarPoly) -> StarPoly {
        let big = Amplified { base: b.clone(), n };
        p.substitute(&mut |g| {
            let c = MatrixPointCode::decode(n, g);
            big.place(&(self.image)(c.point), c.row, c.col)
        })
    }

    /// ψ ∘ self.
    pub fn then(&self, psi: &StarHom) -> StarHom {
        let (f, g) = (self.clone(), psi.clone());
        StarHom::new(move |i| g.apply(&(f.image)(i)))
    }
}

/// D(φ): each letter is sent to a target generator of the same size whose
/// projection is equivalent to the image; found letters are memoized.
pub struct DMap {
    pub phi: StarHom,
    pub source: Arc<DPresentation>,
    pub target: Arc<DPresentation>,
    /// Fuel for each equivalence test during the search.
    pub test_fuel: u64,
    found: Mutex<HashMap<u64, u64>>,
}

pub fn d_of_map(phi: StarHom, source: Arc<DPresentation>, target: Arc<DPresentation>) -> Arc<DMap> {
    Arc::new(DMap { phi, source, target, test_fuel: 20_000, found: Mutex::default() })
}

/// Same classes, two presentations of D(A): D(id) between them.
pub fn align_d(d: Arc<DPresentation>, d_dagger: Arc<DPresentation>) -> Arc<DMap> {
    d_of_map(StarHom::identity(), d, d_dagger)
}

impl DMap {
    /// Target generator for letter g, searching at most `candidates`
    /// target projections.
    pub fn letter(&self, g: u64, candidates: u64) -> Option<u64> {
        if let Some(&t) = self.found.lock().unwrap().get(&g) {
            return Some(t);
        }
        let (n, p) = self.source.generator(g);
        let img = self.phi.amplified(&self.target.a, n, &p);
        for k in 0..candidates {
            let t = DPresentation::generator_code(n, k);
            let (_, q) = self.target.generator(t);
            if self.target.equivalent(n, &img, n, &q, self.test_fuel).is_in() {
                self.found.lock().unwrap().insert(g, t);
                return Some(t);
            }
        }
        None
    }

    /// F(w), or None when some letter is not matched within the budget.
    pub fn try_apply(&self, w: &SgWord, candidates: u64) -> Option<SgWord> {
        let gens: Option<Vec<u64>> = w.gens().iter().map(|&g| self.letter(g, candidates)).collect();
        SgWord::new(gens?).ok()
    }
}

impl WordMap<SgWord, SgWord> for DMap {
    /// Unbounded search: terminates whenever the target enumeration is
    /// complete up to equivalence, which the shipped sources are.
    fn apply(&self, w: &SgWord) -> SgWord {
        let mut budget = 64;
        loop {
            if let Some(v) = self.try_apply(w, budget) {
                return v;
            }
            budget *= 4;
        }
    }
}
