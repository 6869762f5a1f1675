//! Small concrete (semi)groups with computable kernels, used as targets and
//! as test fixtures for the general constructions.

use super::{GpWord, KernelMode, Presentation, SgWord};
use crate::coding;
use crate::fuel::Verdict;
use num_rational::BigRational;
use num_traits::Zero;

/// ℤ^d with x_i ↦ e_{i mod d}.
pub struct ZdGroup {
    pub d: usize,
}

impl ZdGroup {
    pub fn coords(&self, w: &GpWord) -> Vec<i64> {
        let mut v = vec![0i64; self.d];
        for &(g, inv) in w.letters() {
            v[(g % self.d as u64) as usize] += if inv { -1 } else { 1 };
        }
        v
    }
}

impl Presentation<GpWord> for ZdGroup {
    fn mode(&self) -> KernelMode {
        KernelMode::Computable
    }

    fn kernel(&self, a: &GpWord, b: &GpWord, _fuel: u64) -> Verdict {
        Verdict::from_bool(self.coords(a) == self.coords(b))
    }

    fn describe(&self, w: &GpWord) -> Option<String> {
        Some(format!("{:?}", self.coords(w)))
    }
}

/// The trivial group: every word labels the identity.
pub struct TrivialGroup;

impl Presentation<GpWord> for TrivialGroup {
    fn mode(&self) -> KernelMode {
        KernelMode::Computable
    }

    fn kernel(&self, _a: &GpWord, _b: &GpWord, _fuel: u64) -> Verdict {
        Verdict::InKernel
    }

    fn describe(&self, _w: &GpWord) -> Option<String> {
        Some("0".into())
    }
}

/// (ℚ, +) with x_n ↦ the n-th rational of the fixed enumeration.
pub struct RationalGroup;

impl RationalGroup {
    pub fn value(w: &GpWord) -> BigRational {
        let mut s = BigRational::zero();
        for &(g, inv) in w.letters() {
            let r = coding::rational(g);
            if inv {
                s -= r;
            } else {
                s += r;
            }
        }
        s
    }

    /// A one-letter label of r.
    pub fn label(r: &BigRational) -> GpWord {
        match coding::rational_index(r) {
            Some(n) => GpWord::letter(n),
            None => {
                // fall back to (numerator)·(1/denominator)
                let unit = BigRational::new(1.into(), r.denom().clone());
                let n = coding::rational_index(&unit).expect("unit fraction index");
                let k: i64 = r.numer().try_into().expect("numerator fits i64");
                GpWord::letter(n).pow(k)
            }
        }
    }
}

impl Presentation<GpWord> for RationalGroup {
    fn mode(&self) -> KernelMode {
        KernelMode::Computable
    }

    fn kernel(&self, a: &GpWord, b: &GpWord, _fuel: u64) -> Verdict {
        Verdict::from_bool(Self::value(a) == Self::value(b))
    }

    fn describe(&self, w: &GpWord) -> Option<String> {
        Some(Self::value(w).to_string())
    }
}

/// (ℕ⁺, +) with x_i ↦ i + 1.
pub struct PositiveIntegers;

impl PositiveIntegers {
    pub fn value(w: &SgWord) -> u64 {
        w.gens().iter().map(|g| g + 1).sum()
    }

    pub fn label(n: u64) -> SgWord {
        assert!(n >= 1);
        SgWord::letter(n - 1)
    }
}

impl Presentation<SgWord> for PositiveIntegers {
    fn mode(&self) -> KernelMode {
        KernelMode::Computable
    }

    fn kernel(&self, a: &SgWord, b: &SgWord, _fuel: u64) -> Verdict {
        Verdict::from_bool(Self::value(a) == Self::value(b))
    }

    fn describe(&self, w: &SgWord) -> Option<String> {
        Some(Self::value(w).to_string())
    }
}

/// x ↦ x² (the doubling endomorphism of an abelian group, written
/// multiplicatively on words).
pub fn doubling(w: &GpWord) -> GpWord {
    w.mul(w)
}
