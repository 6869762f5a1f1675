//! The Grothendieck group G(S)# of a presented abelian semigroup S#.
//!
//! Letter x_n of F_ω labels the formal difference [P] − [N] of the pair
//! (P, N) of D_ω words coded by n (the semigroup product encoding). A group
//! word labels the sum of its letters, inverses swapping P and N.

use crate::fuel::{Fuel, Verdict};
use crate::presentations::{GeneratorMap, GpPres, GpWord, KernelMode, Presentation, SgPres, SgProduct, SgWord, WordMap};
use std::sync::Arc;

pub struct GrothendieckPresentation {
    pub s: SgPres,
    /// Caller asserts S is cancellative with a computable kernel; then one
    /// fixed z decides the kernel.
    pub cancellative: bool,
}

pub fn grothendieck(s: SgPres) -> Arc<GrothendieckPresentation> {
    Arc::new(GrothendieckPresentation { s, cancellative: false })
}

/// G(S)# with the kernel decided through a single semigroup query.
pub fn groth_kernel_decide(s: SgPres) -> Arc<GrothendieckPresentation> {
    Arc::new(GrothendieckPresentation { s, cancellative: true })
}

/// The fixed element added on both sides of kernel queries.
pub fn base_letter() -> SgWord {
    SgWord::letter(0)
}

fn cat(a: Option<SgWord>, b: &SgWord) -> Option<SgWord> {
    Some(match a {
        None => b.clone(),
        Some(a) => a.concat(b),
    })
}

impl GrothendieckPresentation {
    /// (P, N) with w = [P] − [N]; either side may be empty.
    pub fn sides(w: &GpWord) -> (Option<SgWord>, Option<SgWord>) {
        let (mut p, mut n) = (None, None);
        for &(g, inv) in w.letters() {
            let (a, b) = SgProduct::components_of_letter(g);
            if inv {
                p = cat(p, &b);
                n = cat(n, &a);
            } else {
                p = cat(p, &a);
                n = cat(n, &b);
            }
        }
        (p, n)
    }

    /// The two semigroup words compared for a = b with a = P−N, b = P'−N':
    /// P + N' + z and P' + N + z.
    fn equation(a: &GpWord, b: &GpWord, z: &SgWord) -> (SgWord, SgWord) {
        let (pa, na) = Self::sides(a);
        let (pb, nb) = Self::sides(b);
        let mut l = cat(pa, z);
        if let Some(x) = nb {
            l = cat(l, &x);
        }
        let mut r = cat(pb, z);
        if let Some(x) = na {
            r = cat(r, &x);
        }
        (l.unwrap(), r.unwrap())
    }

    /// γ(a) = [(a + z, z)], written letter by letter so indices stay small.
    pub fn gamma(&self, a: &SgWord) -> GpWord {
        gamma(a)
    }
}

/// γ(a) = [(a + z, z)], written per letter as [(x_g, z)] + [(z + z, z)] so
/// the letter codes stay polynomial in g. Panics when a code leaves u64
/// (generators beyond about 6·10^4).
pub fn gamma(a: &SgWord) -> GpWord {
    let z = base_letter();
    let lift = SgProduct::letter_of(&z.concat(&z), &z).expect("small letter index");
    let mut out = GpWord::identity();
    for &g in a.gens() {
        let code = SgProduct::letter_of(&SgWord::letter(g), &z).expect("letter index fits u64");
        out = out.mul(&GpWord::letter(code)).mul(&GpWord::letter(lift));
    }
    out
}

impl Presentation<GpWord> for GrothendieckPresentation {
    fn mode(&self) -> KernelMode {
        if self.cancellative {
            self.s.mode()
        } else {
            KernelMode::Ce
        }
    }

    /// a = b iff P + N' + z = P' + N + z for some z (one fixed z when
    /// cancellative). The search over z dovetails with the semigroup kernel.
    fn kernel(&self, a: &GpWord, b: &GpWord, fuel: u64) -> Verdict {
        if self.cancellative {
            let (l, r) = Self::equation(a, b, &base_letter());
            return self.s.kernel(&l, &r, fuel);
        }
        let mut f = Fuel::new(fuel);
        for t in 0u64.. {
            let (i, j) = crate::coding::unpair(t);
            let z = SgWord::from_index_u64(i);
            let (l, r) = Self::equation(a, b, &z);
            let budget = (j + 1).min(f.remaining());
            if budget == 0 {
                break;
            }
            if self.s.kernel(&l, &r, budget).is_in() {
                return Verdict::InKernel;
            }
            if !f.burn(budget) {
                break;
            }
        }
        Verdict::Unknown { fuel: f.spent() }
    }

    fn describe(&self, w: &GpWord) -> Option<String> {
        let (p, n) = Self::sides(w);
        let show = |x: &Option<SgWord>| match x {
            None => "0".to_string(),
            Some(x) => self.s.describe(x).unwrap_or_else(|| x.to_string()),
        };
        Some(format!("[{}] - [{}]", show(&p), show(&n)))
    }
}

/// ψ_φ: G(S)# → H# for a semigroup map φ: S# → H#, x_n ↦ φ(P)·φ(N)^{-1}.
pub fn universal_map(phi: Arc<dyn WordMap<SgWord, GpWord>>) -> impl WordMap<GpWord, GpWord> {
    GeneratorMap(move |n| {
        let (p, q) = SgProduct::components_of_letter(n);
        phi.apply(&p).mul(&phi.apply(&q).inverse())
    })
}

/// G(φ)(x_n) = γ(φ(P)) − γ(φ(N)) for a semigroup map φ: S0# → S1#.
pub fn g_of_map(phi: Arc<dyn WordMap<SgWord, SgWord>>) -> impl WordMap<GpWord, GpWord> {
    GeneratorMap(move |n| {
        let (p, q) = SgProduct::components_of_letter(n);
        gamma(&phi.apply(&p)).mul(&gamma(&phi.apply(&q)).inverse())
    })
}

/// Boxed form of a group word map.
pub fn boxed(m: impl WordMap<GpWord, GpWord> + 'static) -> Arc<dyn WordMap<GpWord, GpWord>> {
    Arc::new(m)
}

pub fn as_gp(g: Arc<GrothendieckPresentation>) -> GpPres {
    g
}
