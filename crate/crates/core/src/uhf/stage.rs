//! Sparse stage representatives: elements of M_n(ℚ(i)) stored by nonzero
//! entries, with the canonical embedding I_{N/n} ⊗ a between stages.

use crate::cstar::StarRing;
use crate::error::{Error, Result};
use crate::exact::{certified_opnorm, DyadicInterval, ExactMatrix, GaussianRational};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

/// Cap on the number of stored entries produced by one embedding.
pub const MAX_ENTRIES: u64 = 1 << 21;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StageMatrix {
    pub n: u64,
    pub entries: BTreeMap<(u64, u64), GaussianRational>,
}

impl StageMatrix {
    pub fn zero(n: u64) -> Self {
        StageMatrix { n, entries: BTreeMap::new() }
    }

    pub fn unit(n: u64, r: u64, s: u64) -> Self {
        let mut m = Self::zero(n);
        m.entries.insert((r, s), GaussianRational::one());
        m
    }

    pub fn identity(n: u64) -> Self {
        StageMatrix { n, entries: (0..n).map(|i| ((i, i), GaussianRational::one())).collect() }
    }

    pub fn from_dense(a: &ExactMatrix) -> Self {
        let mut m = Self::zero(a.rows() as u64);
        for r in 0..a.rows() {
            for s in 0..a.cols() {
                if !a.get(r, s).is_zero() {
                    m.entries.insert((r as u64, s as u64), a.get(r, s).clone());
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> ExactMatrix {
        let n = self.n as usize;
        let mut a = ExactMatrix::zeros(n, n);
        for (&(r, s), z) in &self.entries {
            a.set(r as usize, s as usize, z.clone());
        }
        a
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn insert_add(&mut self, at: (u64, u64), z: GaussianRational) {
        let e = self.entries.entry(at).or_insert_with(GaussianRational::zero);
        *e += &z;
        if e.is_zero() {
            self.entries.remove(&at);
        }
    }

    /// E_{n,N}(self) = I_{N/n} ⊗ self.
    pub fn embed(&self, big: u64) -> Result<StageMatrix> {
        if big == self.n {
            return Ok(self.clone());
        }
        if self.n == 0 || big % self.n != 0 {
            return Err(Error::Divisibility { m: self.n, n: big });
        }
        let copies = big / self.n;
        if copies.saturating_mul(self.entries.len() as u64) > MAX_ENTRIES {
            return Err(Error::Unsupported(format!("embedding M_{} into M_{big} stores too many entries", self.n)));
        }
        let mut out = Self::zero(big);
        for l in 0..copies {
            for (&(r, s), z) in &self.entries {
                out.entries.insert((r + l * self.n, s + l * self.n), z.clone());
            }
        }
        Ok(out)
    }

    /// Normalized trace.
    pub fn trace(&self) -> GaussianRational {
        let mut t = GaussianRational::zero();
        for (&(r, s), z) in &self.entries {
            if r == s {
                t += z;
            }
        }
        t.scale(&BigRational::new(1.into(), self.n.into()))
    }

    /// Certified operator norm: connected blocks of the nonzero pattern are
    /// solved densely, identical blocks once.
    pub fn norm(&self, k: u32) -> DyadicInterval {
        let mut parent: BTreeMap<(bool, u64), (bool, u64)> = BTreeMap::new();
        fn find(p: &mut BTreeMap<(bool, u64), (bool, u64)>, x: (bool, u64)) -> (bool, u64) {
            let mut x = x;
            loop {
                let px = *p.entry(x).or_insert(x);
                if px == x {
                    return x;
                }
                let gp = *p.entry(px).or_insert(px);
                p.insert(x, gp);
                x = gp;
            }
        }
        for &(r, s) in self.entries.keys() {
            let (a, b) = (find(&mut parent, (false, r)), find(&mut parent, (true, s)));
            if a != b {
                parent.insert(a, b);
            }
        }
        let mut comps: BTreeMap<(bool, u64), (BTreeSet<u64>, BTreeSet<u64>)> = BTreeMap::new();
        for &(r, s) in self.entries.keys() {
            let root = find(&mut parent, (false, r));
            let c = comps.entry(root).or_default();
            c.0.insert(r);
            c.1.insert(s);
        }
        let mut seen = BTreeSet::new();
        let mut best = DyadicInterval::point(BigRational::zero());
        for (rows, cols) in comps.values() {
            let ri: BTreeMap<u64, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
            let ci: BTreeMap<u64, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let mut block = ExactMatrix::zeros(rows.len(), cols.len());
            for r in rows {
                for (&(_, s), z) in self.entries.range((*r, 0)..=(*r, u64::MAX)) {
                    block.set(ri[r], ci[&s], z.clone());
                }
            }
            let key = block.to_string();
            if seen.insert(key) {
                best = best.max(&certified_opnorm(&block, k));
            }
        }
        best
    }

    pub fn is_projection(&self) -> bool {
        self.adjoint() == *self && self.mul(self) == *self
    }
}

impl StarRing for StageMatrix {
    fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "stage size mismatch");
        let mut out = self.clone();
        for (&at, z) in &o.entries {
            out.insert_add(at, z.clone());
        }
        out
    }

    fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "stage size mismatch");
        let mut out = Self::zero(self.n);
        for (&(r, t), a) in &self.entries {
            for (&(_, s), b) in o.entries.range((t, 0)..=(t, u64::MAX)) {
                out.insert_add((r, s), a * b);
            }
        }
        out
    }

    fn scale(&self, z: &GaussianRational) -> Self {
        if z.is_zero() {
            return Self::zero(self.n);
        }
        StageMatrix { n: self.n, entries: self.entries.iter().map(|(&at, x)| (at, x * z)).collect() }
    }

    fn adjoint(&self) -> Self {
        StageMatrix { n: self.n, entries: self.entries.iter().map(|(&(r, s), x)| ((s, r), x.conj())).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_and_norm() {
        let e = StageMatrix::unit(2, 0, 1).add(&StageMatrix::unit(2, 1, 0));
        let big = e.embed(8).unwrap();
        assert_eq!(big.entries.len(), 8);
        assert!(big.norm(20).contains(&BigRational::from_integer(1.into())));
        assert_eq!(StageMatrix::unit(2, 0, 0).embed(4).unwrap().trace(), GaussianRational::from_parts(1, 2, 0, 1));
        assert!(StageMatrix::unit(3, 0, 0).embed(4).is_err());
        let d = StageMatrix::unit(2, 0, 0).embed(4).unwrap().sub(&StageMatrix::unit(4, 0, 0));
        assert!(d.is_projection());
        assert!(d.norm(20).contains(&BigRational::from_integer(1.into())));
    }
}
