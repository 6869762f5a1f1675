//! Fixed effective codings: Cantor pairing, triples, and enumerations of ℚ,
//! ℚ ∩ [0,1] and ℚ(i). Every decoder here has a matching encoder.

use crate::exact::GaussianRational;
use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Cantor pairing ⟨a, b⟩ = (a+b)(a+b+1)/2 + b. Panics on u64 overflow.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a.checked_add(b).expect("pairing overflow");
    let t = (s as u128) * (s as u128 + 1) / 2 + b as u128;
    u64::try_from(t).expect("pairing overflow")
}

/// ⟨a, b⟩, or None when it leaves u64.
pub fn checked_pair(a: u64, b: u64) -> Option<u64> {
    let s = a.checked_add(b)? as u128;
    u64::try_from(s * (s + 1) / 2 + b as u128).ok()
}

pub fn unpair(n: u64) -> (u64, u64) {
    let n128 = n as u128;
    let mut w = ((8 * n128 + 1).sqrt() - 1) / 2;
    while w * (w + 1) / 2 > n128 {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= n128 {
        w += 1;
    }
    let b = n128 - w * (w + 1) / 2;
    ((w - b) as u64, b as u64)
}

/// ⟨a, b, c⟩ = ⟨a, ⟨b, c⟩⟩.
pub fn triple(a: u64, b: u64, c: u64) -> u64 {
    pair(a, pair(b, c))
}

pub fn untriple(n: u64) -> (u64, u64, u64) {
    let (a, r) = unpair(n);
    let (b, c) = unpair(r);
    (a, b, c)
}

/// n-th term (n ≥ 1) of the Calkin–Wilf sequence 1, 1/2, 2, 1/3, 3/2, …
pub fn calkin_wilf(n: u64) -> BigRational {
    assert!(n >= 1);
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        if (n >> i) & 1 == 0 {
            b = &a + &b;
        } else {
            a = &a + &b;
        }
    }
    BigRational::new(a, b)
}

/// Inverse of `calkin_wilf` on positive rationals; None when the index
/// does not fit in a u64.
pub fn calkin_wilf_index(x: &BigRational) -> Option<u64> {
    assert!(x.is_positive());
    let (mut a, mut b) = (x.numer().clone(), x.denom().clone());
    let mut bits: Vec<u8> = Vec::new();
    while !(a.is_one() && b.is_one()) {
        if a < b {
            bits.push(0);
            b -= &a;
        } else {
            bits.push(1);
            a -= &b;
        }
        if bits.len() > 63 {
            return None;
        }
    }
    let mut n: u64 = 1;
    for &bit in bits.iter().rev() {
        n = (n << 1) | bit as u64;
    }
    Some(n)
}

/// Enumeration of ℚ: 1, 0, -1, 1/2, -1/2, 2, -2, …
pub fn rational(n: u64) -> BigRational {
    match n {
        0 => BigRational::one(),
        1 => BigRational::zero(),
        _ if n % 2 == 0 => -calkin_wilf(n / 2),
        _ => calkin_wilf(n / 2 + 1),
    }
}

pub fn rational_index(x: &BigRational) -> Option<u64> {
    if x.is_zero() {
        return Some(1);
    }
    if x.is_one() {
        return Some(0);
    }
    if x.is_negative() {
        calkin_wilf_index(&-x).and_then(|m| m.checked_mul(2))
    } else {
        calkin_wilf_index(x).and_then(|m| (m - 1).checked_mul(2)?.checked_add(1))
    }
}

/// Enumeration of ℚ \ {0}: 1, -1, 1/2, -1/2, 2, …
pub fn nonzero_rational(n: u64) -> BigRational {
    if n == 0 {
        BigRational::one()
    } else if n % 2 == 1 {
        -calkin_wilf(n.div_ceil(2))
    } else {
        calkin_wilf(n / 2 + 1)
    }
}

pub fn nonzero_rational_index(x: &BigRational) -> Option<u64> {
    assert!(!x.is_zero());
    if x.is_one() {
        return Some(0);
    }
    if x.is_negative() {
        calkin_wilf_index(&-x)?.checked_mul(2).map(|v| v - 1)
    } else {
        calkin_wilf_index(x).and_then(|c| (c - 1).checked_mul(2))
    }
}

/// Enumeration of ℚ ∩ [0,1]: 0, 1, then x/(1+x) over the positive rationals.
pub fn unit_rational(n: u64) -> BigRational {
    match n {
        0 => BigRational::zero(),
        1 => BigRational::one(),
        _ => {
            let x = calkin_wilf(n - 1);
            &x / (&x + BigRational::one())
        }
    }
}

pub fn unit_rational_index(t: &BigRational) -> Option<u64> {
    if t.is_zero() {
        return Some(0);
    }
    if t.is_one() {
        return Some(1);
    }
    if t.is_negative() || *t > BigRational::one() {
        return None;
    }
    let x = t / (BigRational::one() - t);
    calkin_wilf_index(&x)?.checked_add(1)
}

/// Enumeration of ℚ(i); index 0 is 1.
pub fn gaussian(n: u64) -> GaussianRational {
    let (a, b) = unpair(n);
    let im = if b == 0 { BigRational::zero() } else { nonzero_rational(b - 1) };
    GaussianRational::new(rational(a), im)
}

pub fn gaussian_index(z: &GaussianRational) -> Option<u64> {
    let a = rational_index(&z.re)?;
    let b = if z.im.is_zero() { 0 } else { nonzero_rational_index(&z.im)? + 1 };
    Some(pair(a, b))
}

pub fn to_u64(x: &BigInt) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_round_trip() {
        for n in 0..5000u64 {
            let (a, b) = unpair(n);
            assert_eq!(pair(a, b), n);
            let (x, y, z) = untriple(n);
            assert_eq!(triple(x, y, z), n);
        }
    }

    #[test]
    fn rationals_round_trip() {
        for n in 0..3000u64 {
            assert_eq!(rational_index(&rational(n)), Some(n));
            assert_eq!(unit_rational_index(&unit_rational(n)), Some(n));
            assert_eq!(gaussian_index(&gaussian(n)), Some(n));
        }
        assert_eq!(gaussian(0), GaussianRational::one());
    }
}
