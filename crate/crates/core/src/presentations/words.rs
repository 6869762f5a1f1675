//! Words of the free semigroup D_ω and the free group F_ω, with fixed
//! bijections onto ℕ.
//!
//! The alphabet is infinite, so both bijections grade words by weight
//! Σ(g+1) rather than by length; within a weight the order is lexicographic.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::sync::Mutex;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SgWord(Vec<u64>);

impl SgWord {
    pub fn new(gens: Vec<u64>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Input("semigroup words are nonempty".into()));
        }
        Ok(SgWord(gens))
    }

    pub fn letter(g: u64) -> Self {
        SgWord(vec![g])
    }

    pub fn gens(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn concat(&self, o: &SgWord) -> SgWord {
        let mut g = self.0.clone();
        g.extend_from_slice(&o.0);
        SgWord(g)
    }

    pub fn weight(&self) -> u64 {
        self.0.iter().map(|g| g + 1).sum()
    }

    /// Index: words of smaller weight first; inside weight W the word
    /// (g_1..g_k) is a composition of W whose cut set, read as a W-1 bit
    /// string, gives the rank.
    pub fn index(&self) -> BigUint {
        let w = self.weight();
        let mut rank = BigUint::zero();
        let mut pos = 0u64;
        for g in &self.0[..self.0.len() - 1] {
            pos += g + 1;
            rank.set_bit(w - 1 - pos, true);
        }
        (BigUint::one() << (w - 1)) - 1u32 + rank
    }

    pub fn from_index(n: &BigUint) -> SgWord {
        let m = n + 1u32;
        let w = m.bits();
        let rank = m - (BigUint::one() << (w - 1));
        let mut gens = Vec::new();
        let mut last = 0u64;
        for pos in 1..w {
            if rank.bit(w - 1 - pos) {
                gens.push(pos - last - 1);
                last = pos;
            }
        }
        gens.push(w - last - 1);
        SgWord(gens)
    }

    pub fn from_index_u64(n: u64) -> SgWord {
        Self::from_index(&BigUint::from(n))
    }

    /// Length-prefixed tuple code ⟨k-1, ⟨g_1, ⟨g_2, … g_k⟩⟩⟩. Unlike `index`
    /// it grows polynomially in the generators, so products can carry
    /// large letters.
    pub fn tuple_code(&self) -> Option<u64> {
        let mut it = self.0.iter().rev();
        let mut acc = *it.next()?;
        for &g in it {
            acc = crate::coding::checked_pair(g, acc)?;
        }
        crate::coding::checked_pair(self.0.len() as u64 - 1, acc)
    }

    pub fn from_tuple_code(n: u64) -> SgWord {
        let (len, mut rest) = crate::coding::unpair(n);
        let mut gens = Vec::with_capacity(len as usize + 1);
        for _ in 0..len {
            let (g, r) = crate::coding::unpair(rest);
            gens.push(g);
            rest = r;
        }
        gens.push(rest);
        SgWord(gens)
    }
}

impl fmt::Display for SgWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| format!("x{g}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Debug for SgWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A freely reduced word in F_ω; `true` marks an inverse letter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GpWord(Vec<(u64, bool)>);

impl GpWord {
    pub fn identity() -> Self {
        GpWord(Vec::new())
    }

    pub fn letter(g: u64) -> Self {
        GpWord(vec![(g, false)])
    }

    pub fn inv_letter(g: u64) -> Self {
        GpWord(vec![(g, true)])
    }

    /// Builds the reduced form of an arbitrary letter sequence.
    pub fn reduce(letters: Vec<(u64, bool)>) -> Self {
        let mut out: Vec<(u64, bool)> = Vec::with_capacity(letters.len());
        for l in letters {
            match out.last() {
                Some(&(g, s)) if g == l.0 && s != l.1 => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        GpWord(out)
    }

    pub fn letters(&self) -> &[(u64, bool)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &GpWord) -> GpWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        GpWord::reduce(v)
    }

    pub fn inverse(&self) -> GpWord {
        GpWord(self.0.iter().rev().map(|&(g, s)| (g, !s)).collect())
    }

    pub fn pow(&self, n: i64) -> GpWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = GpWord::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn weight(&self) -> u64 {
        self.0.iter().map(|(g, _)| g + 1).sum()
    }

    pub fn index(&self) -> BigUint {
        let r = self.weight();
        let mut idx = BigUint::zero();
        for w in 0..r {
            idx += total(w);
        }
        let mut rem = r;
        let mut forbidden: Option<(u64, bool)> = None;
        for &(g, s) in &self.0 {
            for lg in 0..=g {
                for ls in [false, true] {
                    if (lg, ls) >= (g, s) {
                        break;
                    }
                    if forbidden == Some((lg, ls)) {
                        continue;
                    }
                    idx += avoiding(rem - (lg + 1), lg + 1);
                }
            }
            rem -= g + 1;
            forbidden = Some((g, !s));
        }
        idx
    }

    pub fn from_index(n: &BigUint) -> GpWord {
        let mut n = n.clone();
        let mut r = 0u64;
        loop {
            let t = total(r);
            if n < t {
                break;
            }
            n -= t;
            r += 1;
        }
        let mut out = Vec::new();
        let mut rem = r;
        let mut forbidden: Option<(u64, bool)> = None;
        while rem > 0 {
            'pick: for lg in 0..rem {
                for ls in [false, true] {
                    if forbidden == Some((lg, ls)) {
                        continue;
                    }
                    let c = avoiding(rem - (lg + 1), lg + 1);
                    if n < c {
                        out.push((lg, ls));
                        rem -= lg + 1;
                        forbidden = Some((lg, !ls));
                        break 'pick;
                    }
                    n -= c;
                }
            }
        }
        GpWord(out)
    }

    pub fn from_index_u64(n: u64) -> GpWord {
        Self::from_index(&BigUint::from(n))
    }

    /// Exponent sum of generator g.
    pub fn exponent_of(&self, g: u64) -> i64 {
        self.0.iter().filter(|l| l.0 == g).map(|l| if l.1 { -1 } else { 1 }).sum()
    }
}

impl fmt::Display for GpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> =
            self.0.iter().map(|&(g, s)| if s { format!("x{g}^-1") } else { format!("x{g}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Debug for GpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Counting tables for reduced words. A(R,k): reduced words of weight R that
// start with one fixed letter of weight k. T(R): all reduced words of weight R.
struct Tables {
    t: Vec<BigUint>,
    a: Vec<Vec<BigUint>>, // a[R][k], k in 1..=R
}

static TABLES: Mutex<Option<Tables>> = Mutex::new(None);

fn ensure(r: u64) -> (BigUint, Vec<BigUint>) {
    let mut guard = TABLES.lock().unwrap();
    let tb = guard.get_or_insert_with(|| Tables { t: vec![BigUint::one()], a: vec![vec![BigUint::zero()]] });
    while tb.t.len() as u64 <= r {
        let big_r = tb.t.len();
        let mut row = vec![BigUint::zero(); big_r + 1];
        let mut tot = BigUint::zero();
        for k in 1..=big_r {
            let rest = big_r - k;
            let back = if k <= rest { tb.a[rest][k].clone() } else { BigUint::zero() };
            row[k] = &tb.t[rest] - back;
            tot += &row[k] * 2u32;
        }
        tb.t.push(tot);
        tb.a.push(row);
    }
    (tb.t[r as usize].clone(), tb.a[r as usize].clone())
}

fn total(r: u64) -> BigUint {
    ensure(r).0
}

/// Reduced words of weight `r` whose first letter is not a fixed letter of
/// weight `k` (the inverse of the letter just placed).
fn avoiding(r: u64, k: u64) -> BigUint {
    let (t, a) = ensure(r);
    if k as usize <= r as usize && r > 0 {
        t - &a[k as usize]
    } else {
        t
    }
}

pub fn to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}
