//! (Semi)group presentations: labelings of D_ω or F_ω together with a
//! kernel oracle, plus the constructions the K-theory pipeline needs
//! (kernels of maps, c.e. subgroups, products).

pub mod groups;
pub mod words;

pub use groups::*;
pub use words::{GpWord, SgWord};

use crate::fuel::Verdict;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KernelMode {
    Computable,
    Ce,
}

impl KernelMode {
    pub fn weaker(self, o: KernelMode) -> KernelMode {
        self.max(o)
    }
}

/// A presentation: words `W` label elements; `kernel` (semi)decides whether
/// two words label the same element.
pub trait Presentation<W>: Send + Sync {
    fn mode(&self) -> KernelMode;
    fn kernel(&self, a: &W, b: &W, fuel: u64) -> Verdict;
    /// Human-readable description of the labelled element, when cheap.
    fn describe(&self, _w: &W) -> Option<String> {
        None
    }
}

pub type SgPres = Arc<dyn Presentation<SgWord>>;
pub type GpPres = Arc<dyn Presentation<GpWord>>;

/// A homomorphism given by a total word transformation.
pub trait WordMap<A, B>: Send + Sync {
    fn apply(&self, w: &A) -> B;
}

pub struct FnMap<F>(pub F);

impl<A, B, F: Fn(&A) -> B + Send + Sync> WordMap<A, B> for FnMap<F> {
    fn apply(&self, w: &A) -> B {
        (self.0)(w)
    }
}

/// Group homomorphism determined by the images of the generators.
pub struct GeneratorMap<F>(pub F);

impl<F: Fn(u64) -> GpWord + Send + Sync> WordMap<GpWord, GpWord> for GeneratorMap<F> {
    fn apply(&self, w: &GpWord) -> GpWord {
        let mut acc = GpWord::identity();
        for &(g, inv) in w.letters() {
            let img = (self.0)(g);
            acc = acc.mul(&if inv { img.inverse() } else { img });
        }
        acc
    }
}

/// A c.e. set of words: a candidate enumeration together with a fuel-bounded
/// membership semidecision.
pub trait CeSet<W>: Send + Sync {
    fn candidate(&self, i: u64) -> W;
    fn semidecide(&self, w: &W, fuel: u64) -> Verdict;

    /// The dovetailed enumeration: step t tests candidate i with fuel j+1
    /// where (i, j) = unpair(t). Returns the candidate when confirmed.
    fn step(&self, t: u64) -> Option<W> {
        let (i, j) = crate::coding::unpair(t);
        let w = self.candidate(i);
        self.semidecide(&w, j + 1).is_in().then_some(w)
    }

    /// First `count` distinct members found within `steps` dovetail steps.
    fn first_members(&self, count: usize, steps: u64) -> Vec<W>
    where
        W: PartialEq,
    {
        let mut out: Vec<W> = Vec::new();
        for t in 0..steps {
            if out.len() >= count {
                break;
            }
            if let Some(w) = self.step(t) {
                if !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }
}

/// Kernel of a homomorphism f: G0# → G1#, as a c.e. set of G0#-labels.
pub struct MapKernel {
    pub map: Arc<dyn WordMap<GpWord, GpWord>>,
    pub target: GpPres,
}

impl CeSet<GpWord> for MapKernel {
    fn candidate(&self, i: u64) -> GpWord {
        GpWord::from_index_u64(i)
    }

    fn semidecide(&self, w: &GpWord, fuel: u64) -> Verdict {
        self.target.kernel(&self.map.apply(w), &GpWord::identity(), fuel)
    }
}

pub fn kernel_of_map(map: Arc<dyn WordMap<GpWord, GpWord>>, target: GpPres) -> Arc<MapKernel> {
    Arc::new(MapKernel { map, target })
}

/// A finite subset given explicitly, read as a c.e. set.
pub struct ExplicitSet(pub Vec<GpWord>);

impl CeSet<GpWord> for ExplicitSet {
    fn candidate(&self, i: u64) -> GpWord {
        self.0[(i as usize) % self.0.len().max(1)].clone()
    }

    fn semidecide(&self, w: &GpWord, _fuel: u64) -> Verdict {
        Verdict::from_bool(self.0.contains(w))
    }
}

/// Presentation of a subgroup H ⊆ G from a c.e. set of G-labels. Generator
/// x_t labels the t-th output of the dovetailed enumeration, where steps that
/// confirm nothing repeat the first member found; the inclusion is the word
/// map x_t ↦ that G-label.
pub struct SubgroupPresentation {
    pub ambient: GpPres,
    pub members: Arc<dyn CeSet<GpWord>>,
    first: GpWord,
}

impl SubgroupPresentation {
    pub fn new(ambient: GpPres, members: Arc<dyn CeSet<GpWord>>, fuel: u64) -> crate::Result<Self> {
        for t in 0..fuel {
            if let Some(w) = members.step(t) {
                return Ok(SubgroupPresentation { ambient, members, first: w });
            }
        }
        Err(crate::Error::Staging(format!("no subgroup member enumerated within {fuel} steps")))
    }

    /// The G-label named by generator x_t.
    pub fn generator_label(&self, t: u64) -> GpWord {
        self.members.step(t).unwrap_or_else(|| self.first.clone())
    }

    /// The inclusion H# → G#.
    pub fn include(&self, w: &GpWord) -> GpWord {
        GeneratorMap(|g| self.generator_label(g)).apply(w)
    }
}

impl Presentation<GpWord> for SubgroupPresentation {
    fn mode(&self) -> KernelMode {
        KernelMode::Ce.max(self.ambient.mode())
    }

    fn kernel(&self, a: &GpWord, b: &GpWord, fuel: u64) -> Verdict {
        let v = self.ambient.kernel(&self.include(a), &self.include(b), fuel);
        // inclusion is injective, so a negative answer from a computable
        // ambient kernel is final; the mode stays c.e.
        v
    }

    fn describe(&self, w: &GpWord) -> Option<String> {
        self.ambient.describe(&self.include(w))
    }
}

pub fn subgroup_presentation(
    ambient: GpPres,
    members: Arc<dyn CeSet<GpWord>>,
    fuel: u64,
) -> crate::Result<Arc<SubgroupPresentation>> {
    SubgroupPresentation::new(ambient, members, fuel).map(Arc::new)
}

/// Splits fuel between two subqueries and combines their verdicts by "and".
pub fn both(a: impl FnOnce(u64) -> Verdict, b: impl FnOnce(u64) -> Verdict, fuel: u64) -> Verdict {
    let half = (fuel / 2).max(1);
    match a(half) {
        Verdict::NotInKernel => Verdict::NotInKernel,
        Verdict::Unknown { .. } => match b(half) {
            Verdict::NotInKernel => Verdict::NotInKernel,
            _ => Verdict::Unknown { fuel },
        },
        Verdict::InKernel => match b(half) {
            Verdict::InKernel => Verdict::InKernel,
            Verdict::NotInKernel => Verdict::NotInKernel,
            Verdict::Unknown { .. } => Verdict::Unknown { fuel },
        },
    }
}

/// Semigroup product S0 × S1. Letter x_n labels the pair of nonempty words
/// with tuple codes (i, j) = unpair(n); a word labels the componentwise
/// concatenation.
pub struct SgProduct {
    pub left: SgPres,
    pub right: SgPres,
}

impl SgProduct {
    pub fn components_of_letter(n: u64) -> (SgWord, SgWord) {
        let (i, j) = crate::coding::unpair(n);
        (SgWord::from_tuple_code(i), SgWord::from_tuple_code(j))
    }

    /// Letter index of a pair of words; None if the code leaves u64.
    pub fn letter_of(a: &SgWord, b: &SgWord) -> Option<u64> {
        crate::coding::checked_pair(a.tuple_code()?, b.tuple_code()?)
    }

    pub fn project(w: &SgWord) -> (SgWord, SgWord) {
        let mut l: Vec<u64> = Vec::new();
        let mut r: Vec<u64> = Vec::new();
        for &n in w.gens() {
            let (a, b) = Self::components_of_letter(n);
            l.extend_from_slice(a.gens());
            r.extend_from_slice(b.gens());
        }
        (SgWord::new(l).unwrap(), SgWord::new(r).unwrap())
    }
}

impl Presentation<SgWord> for SgProduct {
    fn mode(&self) -> KernelMode {
        self.left.mode().weaker(self.right.mode())
    }

    fn kernel(&self, a: &SgWord, b: &SgWord, fuel: u64) -> Verdict {
        let (a0, a1) = Self::project(a);
        let (b0, b1) = Self::project(b);
        both(|f| self.left.kernel(&a0, &b0, f), |f| self.right.kernel(&a1, &b1, f), fuel)
    }

    fn describe(&self, w: &SgWord) -> Option<String> {
        let (a, b) = Self::project(w);
        Some(format!(
            "({}, {})",
            self.left.describe(&a).unwrap_or_else(|| a.to_string()),
            self.right.describe(&b).unwrap_or_else(|| b.to_string())
        ))
    }
}

/// Group product G0 × G1. Letter x_n labels the pair decoded from
/// unpair(n+1), which ranges over all pairs of group words except (e, e).
pub struct GpProduct {
    pub left: GpPres,
    pub right: GpPres,
}

impl GpProduct {
    pub fn components_of_letter(n: u64) -> (GpWord, GpWord) {
        let (i, j) = crate::coding::unpair(n + 1);
        (GpWord::from_index_u64(i), GpWord::from_index_u64(j))
    }

    pub fn letter_of(a: &GpWord, b: &GpWord) -> Option<u64> {
        let i = words::to_u64(&a.index())?;
        let j = words::to_u64(&b.index())?;
        if i == 0 && j == 0 {
            return None;
        }
        Some(crate::coding::pair(i, j) - 1)
    }

    pub fn project(w: &GpWord) -> (GpWord, GpWord) {
        let mut l = GpWord::identity();
        let mut r = GpWord::identity();
        for &(n, inv) in w.letters() {
            let (a, b) = Self::components_of_letter(n);
            if inv {
                l = l.mul(&a.inverse());
                r = r.mul(&b.inverse());
            } else {
                l = l.mul(&a);
                r = r.mul(&b);
            }
        }
        (l, r)
    }

    /// Injection of the left factor: a ↦ the single letter labelling (a, e).
    pub fn inject_left(a: &GpWord) -> GpWord {
        match Self::letter_of(a, &GpWord::identity()) {
            Some(n) => GpWord::letter(n),
            None => GpWord::identity(),
        }
    }

    pub fn inject_right(b: &GpWord) -> GpWord {
        match Self::letter_of(&GpWord::identity(), b) {
            Some(n) => GpWord::letter(n),
            None => GpWord::identity(),
        }
    }
}

impl Presentation<GpWord> for GpProduct {
    fn mode(&self) -> KernelMode {
        self.left.mode().weaker(self.right.mode())
    }

    fn kernel(&self, a: &GpWord, b: &GpWord, fuel: u64) -> Verdict {
        let (a0, a1) = Self::project(a);
        let (b0, b1) = Self::project(b);
        both(|f| self.left.kernel(&a0, &b0, f), |f| self.right.kernel(&a1, &b1, f), fuel)
    }
}

pub fn product_presentation_sg(left: SgPres, right: SgPres) -> Arc<SgProduct> {
    Arc::new(SgProduct { left, right })
}

pub fn product_presentation_gp(left: GpPres, right: GpPres) -> Arc<GpProduct> {
    Arc::new(GpProduct { left, right })
}
