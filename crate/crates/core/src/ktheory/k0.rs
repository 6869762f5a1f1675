//! K_0 = G ∘ D, its positive cone, the UHF identification with ℚ(ε), the
//! nonunital version through the unitization, and K_1 = K_0 ∘ S.

use super::grothendieck::{g_of_map, gamma, groth_kernel_decide, grothendieck, GrothendieckPresentation};
use super::semigroup::{build_d, d_of_map, DPresentation, ProjectionSource, StarHom};
use crate::coding::pair;
use crate::cstar::{suspend, unitize, CPres, StandardComplex, StarPoly, StarRing, Unitization};
use crate::error::{Error, Result};
use crate::fuel::{Fuel, Verdict};
use crate::presentations::{
    kernel_of_map, subgroup_presentation, GpPres, GpWord, KernelMode, Presentation, SgWord, SubgroupPresentation,
    WordMap,
};
use crate::uhf::{QEpsilonElement, UhfCertificate};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::sync::Arc;

/// K_0(A#) together with the D(A)# it is built from.
#[derive(Clone)]
pub struct K0 {
    pub d: Arc<DPresentation>,
    pub g: Arc<GrothendieckPresentation>,
}

/// K_0(A#) = G(D(A#)). The kernel is decided through one semigroup query
/// when D(A)# is computable (trace route; the shipped trace-invariant
/// algebras are stably finite, so D(A) cancels).
pub fn k0(a: CPres, source: ProjectionSource) -> K0 {
    let d = build_d(a, source);
    let g = if d.mode() == KernelMode::Computable { groth_kernel_decide(d.clone()) } else { grothendieck(d.clone()) };
    K0 { d, g }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeAnswer {
    Positive,
    NotPositive,
    Unknown { fuel: u64 },
}

impl K0 {
    pub fn kernel(&self, a: &GpWord, b: &GpWord, fuel: u64) -> Verdict {
        self.g.kernel(a, b, fuel)
    }

    pub fn gamma(&self, w: &SgWord) -> GpWord {
        gamma(w)
    }

    /// Group label of [p] − [q] for generators p, q of D(A)#.
    pub fn difference(&self, p: &SgWord, q: &SgWord) -> GpWord {
        gamma(p).mul(&gamma(q).inverse())
    }

    /// Total trace of a label, when D(A)# has a trace route.
    pub fn value(&self, w: &GpWord) -> Option<BigRational> {
        let (p, n) = GrothendieckPresentation::sides(w);
        let v = |x: Option<SgWord>| match x {
            None => Some(BigRational::zero()),
            Some(x) => self.d.total_trace(&x),
        };
        Some(v(p)? - v(n)?)
    }

    /// Candidates w' for w = γ(w'): for a UHF source, the stage diagonal
    /// with the same trace; then single letters of D(A)#.
    fn cone_candidates(&self, w: &GpWord) -> Vec<SgWord> {
        let mut out = Vec::new();
        if let (ProjectionSource::Uhf(cert), Some(v)) = (&self.d.source, self.value(w)) {
            // p(j, r) has trace r / n_j
            if !v.is_negative() {
                for j in 0..64u64 {
                    let Ok(nj) = cert.dim_u64(j) else { break };
                    let r = &v * BigRational::from_integer(nj.into());
                    if r.is_integer() {
                        let r: u64 = r.to_integer().try_into().unwrap_or(u64::MAX);
                        let n = r.div_ceil(nj).max(1);
                        out.push(SgWord::letter(DPresentation::generator_code(n as usize, pair(j, r))));
                        break;
                    }
                }
            }
        }
        out
    }

    /// Semidecides w ∈ K_0(A)^+: searches w' with (w, γ(w')) in the kernel.
    pub fn cone_semidecide(&self, w: &GpWord, fuel: u64) -> ConeAnswer {
        let mut f = Fuel::new(fuel);
        let guided = self.cone_candidates(w);
        for i in 0u64.. {
            let cand = match guided.get(i as usize) {
                Some(c) => c.clone(),
                None => SgWord::letter(i - guided.len() as u64),
            };
            let per = f.remaining().min(1000).max(1);
            match self.kernel(w, &gamma(&cand), per) {
                Verdict::InKernel => return ConeAnswer::Positive,
                Verdict::Unknown { fuel } => {
                    f.burn(fuel.max(1));
                }
                Verdict::NotInKernel => {
                    f.burn(1);
                }
            }
            if f.exhausted() {
                break;
            }
        }
        ConeAnswer::Unknown { fuel: f.spent() }
    }

    /// For linearly ordered K_0: runs the semidecision on w and on −w with
    /// growing budgets and returns the first confirmation.
    pub fn cone_decide(&self, w: &GpWord, fuel: u64) -> ConeAnswer {
        let mut spent = 0;
        let mut budget = 16;
        while spent < fuel {
            let b = budget.min(fuel - spent);
            if self.cone_semidecide(w, b) == ConeAnswer::Positive {
                return ConeAnswer::Positive;
            }
            if self.cone_semidecide(&w.inverse(), b) == ConeAnswer::Positive {
                // −w ≥ 0: w ≥ 0 only if w = 0
                return match self.kernel(w, &GpWord::identity(), b) {
                    Verdict::InKernel => ConeAnswer::Positive,
                    Verdict::NotInKernel => ConeAnswer::NotPositive,
                    Verdict::Unknown { .. } => ConeAnswer::Unknown { fuel: spent + 2 * b },
                };
            }
            spent += 2 * b;
            budget *= 4;
        }
        ConeAnswer::Unknown { fuel: spent }
    }
}

impl Presentation<GpWord> for K0 {
    fn mode(&self) -> KernelMode {
        self.g.mode()
    }

    fn kernel(&self, a: &GpWord, b: &GpWord, fuel: u64) -> Verdict {
        self.g.kernel(a, b, fuel)
    }

    fn describe(&self, w: &GpWord) -> Option<String> {
        self.value(w).map(|v| v.to_string()).or_else(|| self.g.describe(w))
    }
}

/// The value in ℚ(ε) of a K_0 label of a certificate-backed UHF algebra:
/// trace of the positive side minus trace of the negative side.
pub fn k0_to_rational(k: &K0, w: &GpWord) -> Result<QEpsilonElement> {
    if k.d.source.stage(0).is_none() {
        return Err(Error::Input("k0_to_rational needs a certificate-backed UHF projection source".into()));
    };
    let value = k.value(w).ok_or_else(|| Error::Unsupported("trace of a label".into()))?;
    let mut stage = Some(0u64);
    let (p, n) = GrothendieckPresentation::sides(w);
    for side in [p, n].into_iter().flatten() {
        for &g in side.gens() {
            let (_, kk) = crate::coding::unpair(g);
            stage = stage.zip(k.d.source.stage(kk)).map(|(a, b)| a.max(b));
        }
    }
    Ok(QEpsilonElement::new(value, stage))
}

/// K_0(A#) for a certificate-backed UHF algebra.
pub fn k0_uhf(cert: &UhfCertificate) -> K0 {
    k0(crate::uhf::uhf_presentation(cert), ProjectionSource::Uhf(cert.clone()))
}

/// The scalar map π: Ã → ℂ, (a, α) ↦ α.
pub fn scalar_map(base: &CPres) -> StarHom {
    let u = Unitization { base: base.clone() };
    StarHom::new(move |g| StarPoly::gen(0).scale(&u.scalar_part(&StarPoly::gen(g))))
}

/// K_0 of a possibly nonunital A: the kernel of K_0(π): K_0(Ã) → K_0(ℂ),
/// presented as a subgroup of K_0(Ã).
pub struct K0Nonunital {
    pub unitized: K0,
    pub complex: K0,
    pub pi: Arc<dyn WordMap<GpWord, GpWord>>,
    pub group: Arc<SubgroupPresentation>,
}

impl K0Nonunital {
    /// The K_0(Ã) label of generator x_t of the kernel subgroup.
    pub fn include(&self, w: &GpWord) -> GpWord {
        self.group.include(w)
    }
}

pub fn k0_nonunital(a: CPres, fuel: u64) -> Result<K0Nonunital> {
    let tilde = unitize(a.clone());
    let unitized = k0(tilde, ProjectionSource::Generic);
    let complex = k0(Arc::new(StandardComplex), ProjectionSource::Generic);
    let dpi = d_of_map(scalar_map(&a), unitized.d.clone(), complex.d.clone());
    let pi: Arc<dyn WordMap<GpWord, GpWord>> = Arc::new(g_of_map(dpi));
    let target: GpPres = Arc::new(complex.clone());
    let kernel = kernel_of_map(pi.clone(), target);
    let ambient: GpPres = Arc::new(unitized.clone());
    let group = subgroup_presentation(ambient, kernel, fuel)?;
    Ok(K0Nonunital { unitized, complex, pi, group })
}

/// K_1(A#) = K_0(SA#).
pub fn k1(a: CPres, fuel: u64) -> Result<K0Nonunital> {
    k0_nonunital(suspend(a), fuel)
}
