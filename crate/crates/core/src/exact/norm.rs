use super::gaussian::GaussianRational;
use super::matrix::ExactMatrix;
use super::poly::{RatPoly, Sturm};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;

/// Closed interval with rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl DyadicInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        DyadicInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, o: &DyadicInterval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Enclosure of max(x, y) for x in self, y in o.
    pub fn max(&self, o: &DyadicInterval) -> DyadicInterval {
        DyadicInterval { lo: self.lo.clone().max(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    pub fn add(&self, o: &DyadicInterval) -> DyadicInterval {
        DyadicInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn widen(&self, r: &BigRational) -> DyadicInterval {
        DyadicInterval { lo: &self.lo - r, hi: &self.hi + r }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Bounds lo ≤ √x ≤ hi with hi - lo ≤ 2^-p; exact when x is a rational square.
pub fn sqrt_bounds(x: &BigRational, p: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "square root of a negative rational");
    if let (Some(a), Some(b)) = (perfect_sqrt(x.numer()), perfect_sqrt(x.denom())) {
        let r = BigRational::new(a, b);
        return (r.clone(), r);
    }
    let scaled = x * BigRational::from_integer(BigInt::one() << (2 * p as usize));
    let s = scaled.floor().to_integer().sqrt();
    let den = BigInt::one() << p as usize;
    (BigRational::new(s.clone(), den.clone()), BigRational::new(s + 1, den))
}

/// Characteristic polynomial det(xI - H) of a Hermitian matrix; the
/// coefficients are real, so the result lives in ℚ[x].
pub fn charpoly_hermitian(h: &ExactMatrix) -> RatPoly {
    let n = h.rows();
    let mut a = h.clone();
    // reduce to upper Hessenberg form by similarity
    for m in 1..n.saturating_sub(1) {
        let Some(piv) = (m..n).find(|&i| !a.get(i, m - 1).is_zero()) else { continue };
        if piv != m {
            for j in 0..n {
                let (x, y) = (a.get(piv, j).clone(), a.get(m, j).clone());
                a.set(piv, j, y);
                a.set(m, j, x);
            }
            for i in 0..n {
                let (x, y) = (a.get(i, piv).clone(), a.get(i, m).clone());
                a.set(i, piv, y);
                a.set(i, m, x);
            }
        }
        let pivot = a.get(m, m - 1).clone();
        for i in m + 1..n {
            if a.get(i, m - 1).is_zero() {
                continue;
            }
            let f = a.get(i, m - 1) / &pivot;
            for j in 0..n {
                let v = a.get(i, j) - &(&f * a.get(m, j));
                a.set(i, j, v);
            }
            for r in 0..n {
                let v = a.get(r, m) + &(&f * a.get(r, i));
                a.set(r, m, v);
            }
        }
    }
    // p_m = (x - h_mm) p_{m-1} - sum_{i<m} h_{i,m} (prod_{j=i+1..m} h_{j,j-1}) p_{i-1}
    let mut ps: Vec<Vec<GaussianRational>> = vec![vec![GaussianRational::one()]];
    for m in 1..=n {
        let prev = &ps[m - 1];
        let mut next = vec![GaussianRational::zero(); m + 1];
        for (d, c) in prev.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= &(c * a.get(m - 1, m - 1));
        }
        let mut prod = GaussianRational::one();
        for i in (1..m).rev() {
            prod = &prod * a.get(i, i - 1);
            if prod.is_zero() {
                break;
            }
            let f = a.get(i - 1, m - 1) * &prod;
            if f.is_zero() {
                continue;
            }
            for (d, c) in ps[i - 1].iter().enumerate() {
                next[d] -= &(&f * c);
            }
        }
        ps.push(next);
    }
    RatPoly::new(ps.pop().unwrap().into_iter().map(|z| z.re).collect())
}

/// Enclosure of √λ_max(H) for a positive semidefinite Hermitian H.
fn sqrt_top_eigenvalue(h: &ExactMatrix, k: u32) -> DyadicInterval {
    let n = h.rows();
    if n == 1 {
        let (lo, hi) = sqrt_bounds(&h.get(0, 0).re, k);
        return DyadicInterval::new(lo, hi);
    }
    let tr = h.trace().re;
    if tr.is_zero() {
        return DyadicInterval::point(BigRational::zero());
    }
    let p = charpoly_hermitian(h).squarefree();
    let sturm = Sturm::new(&p);
    // upper bound: λ_max ≤ trace, so √λ_max ≤ 2^e once 4^e ≥ trace
    let mut e: i64 = 0;
    while pow2(2 * e) < tr {
        e += 1;
    }
    while e > -64 && pow2(2 * (e - 1)) >= tr {
        e -= 1;
    }
    let mut lo = BigRational::zero();
    let mut hi = pow2(e);
    let target = pow2(-(k as i64));
    while &hi - &lo > target {
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        if sturm.roots_above(&(&mid * &mid)) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    DyadicInterval::new(lo, hi)
}

/// Certified enclosure of the operator norm ‖M‖ of width at most 2^-k.
///
/// The nonzero pattern of M splits into connected blocks (rows and columns as
/// vertices of a bipartite graph); ‖M‖ is the max over blocks, and identical
/// blocks are only solved once.
pub fn certified_opnorm(m: &ExactMatrix, k: u32) -> DyadicInterval {
    let (r, c) = (m.rows(), m.cols());
    let mut parent: Vec<usize> = (0..r + c).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..r {
        for j in 0..c {
            if !m.get(i, j).is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, r + j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut comps: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for i in 0..r {
        let root = find(&mut parent, i);
        comps.entry(root).or_default().0.push(i);
    }
    for j in 0..c {
        let root = find(&mut parent, r + j);
        comps.entry(root).or_default().1.push(j);
    }
    let mut seen: HashMap<ExactMatrix, ()> = HashMap::new();
    let mut best = DyadicInterval::point(BigRational::zero());
    let mut keys: Vec<_> = comps.into_values().filter(|(rs, cs)| !rs.is_empty() && !cs.is_empty()).collect();
    keys.sort();
    for (rs, cs) in keys {
        let block = m.submatrix(&rs, &cs);
        if block.is_zero() || seen.insert(block.clone(), ()).is_some() {
            continue;
        }
        let adj = block.adjoint();
        let h = if rs.len() <= cs.len() { block.mul(&adj) } else { adj.mul(&block) };
        best = best.max(&sqrt_top_eigenvalue(&h, k));
    }
    best
}

/// (lower bound of ‖M‖_max, upper bound of ‖M‖_1), where ‖M‖_max is the
/// largest entry modulus and ‖M‖_1 the sum of all entry moduli. Both are exact
/// when the moduli are rational; otherwise within 2^-40.
pub fn norm_bounds(m: &ExactMatrix) -> (BigRational, BigRational) {
    let mut max_lo = BigRational::zero();
    let mut one_hi = BigRational::zero();
    for z in m.entries() {
        if z.is_zero() {
            continue;
        }
        let (lo, hi) = sqrt_bounds(&z.norm_sqr(), 40);
        if lo > max_lo {
            max_lo = lo;
        }
        one_hi += hi;
    }
    (max_lo, one_hi)
}

/// Normalized trace: sum of the diagonal divided by the dimension.
pub fn trace_exact(m: &ExactMatrix) -> Result<GaussianRational> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Dimension(format!("trace of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = BigRational::from_integer(BigInt::from(m.rows()));
    Ok(m.trace().scale(&(BigRational::one() / n)))
}

/// Upper bound on ‖M‖ that is cheap: the Frobenius norm, rounded up.
pub fn frobenius_upper(m: &ExactMatrix) -> BigRational {
    let s: BigRational = m.entries().iter().map(|z| z.norm_sqr()).fold(BigRational::zero(), |a, b| a + b);
    sqrt_bounds(&s, 20).1
}

pub fn biguint_to_rational(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::gaussian::q;

    #[test]
    fn identity_and_units() {
        let i2 = certified_opnorm(&ExactMatrix::identity(2), 10);
        assert!(i2.contains(&q(1, 1)) && i2.width() <= pow2(-10));
        let e12 = certified_opnorm(&ExactMatrix::unit(2, 0, 1), 8);
        assert!(e12.contains(&q(1, 1)));
    }

    #[test]
    fn golden_ratio() {
        let m = ExactMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        let iv = certified_opnorm(&m, 20);
        // φ = (1+√5)/2 lies in [1.6180339, 1.6180340]
        assert!(iv.lo <= q(16180340, 10000000) && iv.hi >= q(16180339, 10000000));
        assert!(iv.width() <= pow2(-20));
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(norm_bounds(&ExactMatrix::zeros(2, 2)), (q(0, 1), q(0, 1)));
        assert_eq!(norm_bounds(&ExactMatrix::identity(2)), (q(1, 1), q(2, 1)));
        let m = ExactMatrix::diag(&[GaussianRational::from_parts(0, 1, 3, 5), GaussianRational::from_parts(4, 5, 0, 1)]);
        assert_eq!(norm_bounds(&m), (q(4, 5), q(7, 5)));
    }

    #[test]
    fn traces() {
        assert_eq!(trace_exact(&ExactMatrix::identity(4)).unwrap(), GaussianRational::one());
        assert_eq!(trace_exact(&ExactMatrix::unit(2, 0, 0)).unwrap(), GaussianRational::from_parts(1, 2, 0, 1));
        let d = ExactMatrix::diag(&[1.into(), 1.into(), 0.into()]);
        assert_eq!(trace_exact(&d).unwrap(), GaussianRational::from_parts(2, 3, 0, 1));
        assert!(trace_exact(&ExactMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn charpoly_small() {
        let h = ExactMatrix::from_ints(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]);
        // det(xI - H) = x^3 - 6x^2 + 10x - 4
        assert_eq!(charpoly_hermitian(&h), RatPoly::new(vec![q(-4, 1), q(10, 1), q(-6, 1), q(1, 1)]));
    }
}
