//! The group ℚ(ε) ⊆ ℚ generated by the p^-m with m ≤ ε(p).

use super::supernatural::{factor, Supernatural};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};

/// A reduced fraction, with a stage j such that its denominator divides n_j
/// when one is known.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QEpsilonElement {
    pub value: BigRational,
    pub stage: Option<u64>,
}

impl QEpsilonElement {
    pub fn new(value: BigRational, stage: Option<u64>) -> Self {
        QEpsilonElement { value, stage }
    }

    pub fn compare(&self, o: &Self) -> Ordering {
        self.value.cmp(&o.value)
    }
}

impl Add for &QEpsilonElement {
    type Output = QEpsilonElement;

    // denominators dividing n_i and n_j divide n_max(i,j)
    fn add(self, o: &QEpsilonElement) -> QEpsilonElement {
        let stage = self.stage.zip(o.stage).map(|(a, b)| a.max(b));
        QEpsilonElement { value: &self.value + &o.value, stage }
    }
}

impl Neg for &QEpsilonElement {
    type Output = QEpsilonElement;

    fn neg(self) -> QEpsilonElement {
        QEpsilonElement { value: -&self.value, stage: self.stage }
    }
}

impl fmt::Display for QEpsilonElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Membership {
    Member { stage: u64 },
    Unknown { fuel: u64 },
}

/// Semidecides a/b ∈ ℚ(ε): searches stages j < fuel for b | n_j, prime by
/// prime (b | n_j iff v_p(b) ≤ g_j(p) for every p | b).
pub fn membership(eps: &Supernatural, r: &BigRational, fuel: u64) -> Membership {
    let b: &BigInt = r.denom();
    let Some(b) = b.abs().to_u64() else {
        return Membership::Unknown { fuel: 0 };
    };
    let need = factor(b);
    for j in 0..fuel {
        if need.iter().all(|(&p, &e)| eps.g(j, p) >= e) {
            return Membership::Member { stage: j };
        }
    }
    Membership::Unknown { fuel }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn dyadic_membership() {
        let two = Supernatural::infinite(2).unwrap();
        assert_eq!(membership(&two, &q(3, 8), 100), Membership::Member { stage: 3 });
        assert_eq!(membership(&two, &q(0, 1), 1), Membership::Member { stage: 0 });
        assert_eq!(membership(&two, &q(1, 3), 10_000), Membership::Unknown { fuel: 10_000 });
        let a = QEpsilonElement::new(q(3, 8), Some(3));
        let b = QEpsilonElement::new(q(1, 2), Some(1));
        assert_eq!((&a + &b).value, q(7, 8));
        assert_eq!((&a + &b).stage, Some(3));
        assert_eq!((-&a).compare(&b), Ordering::Less);
    }
}
