//! Rational points: constant-free *-polynomials with ℚ(i) coefficients in the
//! special points of a presentation.

use crate::coding;
use crate::exact::GaussianRational;
use crate::presentations::SgWord;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub gen: u64,
    pub star: bool,
}

pub type Monomial = Vec<Letter>;

/// Sum of coefficient·monomial terms, kept with like terms merged and zero
/// coefficients dropped; the empty sum is the zero point.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct StarPoly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

/// Arithmetic shared by every realization of rational points.
pub trait StarRing: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, z: &GaussianRational) -> Self;
    fn adjoint(&self) -> Self;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&GaussianRational::from_int(-1)))
    }
}

impl StarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn gen(i: u64) -> Self {
        Self::monomial(vec![Letter { gen: i, star: false }], GaussianRational::one())
    }

    pub fn gen_star(i: u64) -> Self {
        Self::monomial(vec![Letter { gen: i, star: true }], GaussianRational::one())
    }

    pub fn monomial(m: Monomial, c: GaussianRational) -> Self {
        assert!(!m.is_empty(), "monomials are nonempty");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        StarPoly { terms }
    }

    pub fn from_terms(ts: impl IntoIterator<Item = (GaussianRational, Monomial)>) -> Self {
        let mut p = StarPoly::zero();
        for (c, m) in ts {
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let vanished = {
            let e = self.terms.entry(m.clone()).or_default();
            *e += c;
            e.is_zero()
        };
        if vanished {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn generators(&self) -> Vec<u64> {
        let mut g: Vec<u64> = self.terms.keys().flatten().map(|l| l.gen).collect();
        g.sort();
        g.dedup();
        g
    }

    /// Evaluates in any *-ring given images of the special points.
    pub fn eval<R: StarRing>(&self, gen: &mut impl FnMut(u64) -> R, zero: &R) -> R {
        let mut cache: BTreeMap<u64, (R, Option<R>)> = BTreeMap::new();
        let mut acc = zero.clone();
        for (m, c) in &self.terms {
            let mut prod: Option<R> = None;
            for l in m {
                let entry = cache.entry(l.gen).or_insert_with(|| (gen(l.gen), None));
                let v = if l.star {
                    if entry.1.is_none() {
                        entry.1 = Some(entry.0.adjoint());
                    }
                    entry.1.clone().unwrap()
                } else {
                    entry.0.clone()
                };
                prod = Some(match prod {
                    None => v,
                    Some(p) => p.mul(&v),
                });
            }
            acc = acc.add(&prod.unwrap().scale(c));
        }
        acc
    }

    /// Substitutes a rational point for every special point.
    pub fn substitute(&self, f: &mut impl FnMut(u64) -> StarPoly) -> StarPoly {
        self.eval(f, &StarPoly::zero())
    }

    /// Position in the fixed enumeration of rational points (see
    /// [`rational_point`]).
    pub fn index(&self) -> Option<BigUint> {
        if self.is_zero() {
            return Some(BigUint::zero());
        }
        let mut codes = Vec::new();
        for (m, c) in &self.terms {
            let letters: Vec<u64> = m.iter().map(|l| 2 * l.gen + l.star as u64).collect();
            let mono = crate::presentations::words::to_u64(&SgWord::new(letters).ok()?.index())?;
            codes.push(coding::pair(coding::gaussian_index(c)?, mono));
        }
        Some(SgWord::new(codes).ok()?.index() + 1u32)
    }
}

/// The i-th rational point: 0 is the zero point; otherwise i-1 indexes a
/// nonempty word of term codes, each code pairing a ℚ(i) coefficient with a
/// word over letters 2g (for a_g) and 2g+1 (for a_g*). Surjective, not
/// injective.
pub fn rational_point(i: &BigUint) -> StarPoly {
    if i.is_zero() {
        return StarPoly::zero();
    }
    let w = SgWord::from_index(&(i - 1u32));
    StarPoly::from_terms(w.gens().iter().map(|&code| {
        let (ci, mi) = coding::unpair(code);
        let mono = SgWord::from_index_u64(mi).gens().iter().map(|&l| Letter { gen: l / 2, star: l % 2 == 1 }).collect();
        (coding::gaussian(ci), mono)
    }))
}

pub fn rational_point_u64(i: u64) -> StarPoly {
    rational_point(&BigUint::from(i))
}

impl StarRing for StarPoly {
    fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c);
        }
        p
    }

    fn mul(&self, o: &Self) -> Self {
        let mut p = StarPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                p.add_term(m, &(c1 * c2));
            }
        }
        p
    }

    fn scale(&self, z: &GaussianRational) -> Self {
        if z.is_zero() {
            return StarPoly::zero();
        }
        StarPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * z)).collect() }
    }

    fn adjoint(&self) -> Self {
        StarPoly::from_terms(self.terms.iter().map(|(m, c)| {
            (c.conj(), m.iter().rev().map(|l| Letter { gen: l.gen, star: !l.star }).collect())
        }))
    }
}

impl fmt::Display for StarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> =
                m.iter().map(|l| if l.star { format!("a{}^*", l.gen) } else { format!("a{}", l.gen) }).collect();
            if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", c, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for StarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
