//! Dense univariate polynomials over ℚ with Sturm chains, enough for root
//! counting on characteristic polynomials of Hermitian matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients low degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RatPoly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (RatPoly(vec![]), self.clone());
        }
        let mut quo = vec![BigRational::zero(); r.len() - dd];
        let lead = d.lead().unwrap().clone();
        for i in (0..quo.len()).rev() {
            let f = &r[i + dd] / &lead;
            if f.is_zero() {
                continue;
            }
            for (j, c) in d.0.iter().enumerate() {
                r[i + j] -= &f * c;
            }
            quo[i] = f;
        }
        r.truncate(dd);
        (RatPoly::new(quo), RatPoly::new(r))
    }

    pub fn monic(&self) -> RatPoly {
        match self.lead() {
            None => self.clone(),
            Some(l) => RatPoly(self.0.iter().map(|c| c / l).collect()),
        }
    }

    pub fn gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.div_rem(&y).1;
            x = y;
            y = r;
        }
        x.monic()
    }

    /// The squarefree part p / gcd(p, p').
    pub fn squarefree(&self) -> RatPoly {
        let g = RatPoly::gcd(self, &self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        self.div_rem(&g).0
    }
}

/// A Sturm chain for a squarefree polynomial.
pub struct Sturm {
    chain: Vec<RatPoly>,
}

impl Sturm {
    pub fn new(p: &RatPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            chain.push(RatPoly(r.0.into_iter().map(|c| -c).collect()));
        }
        chain.pop();
        Sturm { chain }
    }

    fn changes<I: Iterator<Item = i8>>(signs: I) -> usize {
        let mut last = 0i8;
        let mut n = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
        n
    }

    pub fn changes_at(&self, x: &BigRational) -> usize {
        Self::changes(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    pub fn changes_at_infinity(&self) -> usize {
        Self::changes(self.chain.iter().map(|p| p.lead().map_or(0, sign)))
    }

    /// Number of distinct real roots in (x, ∞).
    pub fn roots_above(&self, x: &BigRational) -> usize {
        self.changes_at(x) - self.changes_at_infinity()
    }
}

fn sign(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::gaussian::q;

    #[test]
    fn sturm_counts_roots() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = RatPoly::new(vec![q(6, 1), q(-7, 1), q(0, 1), q(1, 1)]);
        let s = Sturm::new(&p);
        assert_eq!(s.roots_above(&q(-10, 1)), 3);
        assert_eq!(s.roots_above(&q(3, 2)), 1);
        assert_eq!(s.roots_above(&q(2, 1)), 0);
    }

    #[test]
    fn squarefree_part() {
        // (x-1)^2 (x+1)
        let p = RatPoly::new(vec![q(1, 1), q(-1, 1), q(-1, 1), q(1, 1)]);
        let sf = p.squarefree().monic();
        assert_eq!(sf, RatPoly::new(vec![q(-1, 1), q(0, 1), q(1, 1)]));
    }
}
