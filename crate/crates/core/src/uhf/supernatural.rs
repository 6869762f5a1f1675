//! Lower semicomputable supernatural numbers.
//!
//! Text format, one entry per line (`#` starts a comment):
//!
//! ```text
//! 2 inf                 ε(2) = ∞, stages h_j(2) = j
//! 3 1                   ε(3) = 1, stages h_j(3) = min(1, j)
//! machine 4 dec 0 1 3; dec 0 0 2; inc 1 2; halt
//!                       stages h_s(p_4) = #W_s for that counter machine
//! ```
//!
//! Primes are indexed from 0 (p_0 = 2). Every other prime has exponent 0.

use super::machine::CounterMachine;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p_e, with p_0 = 2.
pub fn nth_prime(e: u64) -> u64 {
    (2..).filter(|&n| is_prime(n)).nth(e as usize).unwrap()
}

/// e with p_e = p.
pub fn prime_index(p: u64) -> u64 {
    (2..p).filter(|&n| is_prime(n)).count() as u64
}

/// Prime factorization by trial division.
pub fn factor(mut n: u64) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// Exponent of p in n.
pub fn valuation(n: &BigUint, p: u64) -> u64 {
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut v = 0;
    if n == BigUint::default() {
        return u64::MAX;
    }
    while (&n % &p) == BigUint::default() {
        n /= &p;
        v += 1;
    }
    v
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Finite(u64),
    Infinite,
    /// h_s = #W_s of the machine.
    Machine(CounterMachine),
}

/// A supernatural number given by stages h_j: primes → ℕ, monotone in j.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Supernatural {
    entries: BTreeMap<u64, Exponent>,
}

impl Supernatural {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, p: u64, e: Exponent) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Input(format!("{p} is not prime")));
        }
        self.entries.insert(p, e);
        Ok(self)
    }

    pub fn finite(pairs: &[(u64, u64)]) -> Result<Self> {
        pairs.iter().try_fold(Self::new(), |s, &(p, e)| s.with(p, Exponent::Finite(e)))
    }

    /// The supernatural number p^∞.
    pub fn infinite(p: u64) -> Result<Self> {
        Self::new().with(p, Exponent::Infinite)
    }

    pub fn entries(&self) -> &BTreeMap<u64, Exponent> {
        &self.entries
    }

    /// h_j(p).
    pub fn h(&self, j: u64, p: u64) -> u64 {
        match self.entries.get(&p) {
            None => 0,
            Some(Exponent::Finite(e)) => (*e).min(j),
            Some(Exponent::Infinite) => j,
            Some(Exponent::Machine(m)) => m.w_count(j),
        }
    }

    /// h_j(p) restricted to primes p_e with e ≤ j.
    pub fn g(&self, j: u64, p: u64) -> u64 {
        if prime_index(p) <= j {
            self.h(j, p)
        } else {
            0
        }
    }

    /// The nonzero values of h_j.
    pub fn stage(&self, j: u64) -> BTreeMap<u64, u64> {
        self.entries.keys().map(|&p| (p, self.h(j, p))).filter(|&(_, e)| e > 0).collect()
    }

    /// n_j = ∏ p^{g_j(p)}.
    pub fn dim(&self, j: u64) -> BigUint {
        let mut n = BigUint::one();
        for &p in self.entries.keys() {
            let e = self.g(j, p);
            if e > 0 {
                n *= BigUint::from(p).pow(e as u32);
            }
        }
        n
    }

    /// Equality of stage j of both. Equality of the limits is only
    /// semidecidable in general, so this is all the API offers.
    pub fn truncation_eq(&self, o: &Supernatural, j: u64) -> bool {
        self.stage(j) == o.stage(j)
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut out = Supernatural::new();
        for (ln, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap();
            let col = line.len() - line.trim_start().len() + 1;
            let err = |msg: String| Error::Parse { line: ln + 1, col, msg };
            let words: Vec<&str> = line.split_whitespace().collect();
            let (p, e) = match words.as_slice() {
                [] => continue,
                ["machine", idx, ..] => {
                    let idx: u64 = idx.parse().map_err(|_| err(format!("bad machine index `{idx}`")))?;
                    let prog = line.trim_start()["machine".len()..].trim_start()[words[1].len()..].trim();
                    let m = CounterMachine::parse(prog).map_err(|e| match e {
                        Error::Parse { col: c, msg, .. } => {
                            Error::Parse { line: ln + 1, col: line.find(prog).unwrap_or(0) + c, msg }
                        }
                        other => err(other.to_string()),
                    })?;
                    (nth_prime(idx), Exponent::Machine(m))
                }
                [p, e] => {
                    let p: u64 = p.parse().map_err(|_| err(format!("bad prime `{p}`")))?;
                    if !is_prime(p) {
                        return Err(err(format!("{p} is not prime")));
                    }
                    let e = if *e == "inf" {
                        Exponent::Infinite
                    } else {
                        Exponent::Finite(e.parse().map_err(|_| err(format!("bad exponent `{e}`")))?)
                    };
                    (p, e)
                }
                _ => return Err(err(format!("expected `p exponent` or `machine index program`, found `{}`", line.trim()))),
            };
            if out.entries.insert(p, e).is_some() {
                return Err(err(format!("prime {p} given twice")));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, e) in &self.entries {
            match e {
                Exponent::Finite(e) => writeln!(f, "{p} {e}")?,
                Exponent::Infinite => writeln!(f, "{p} inf")?,
                Exponent::Machine(m) => writeln!(f, "machine {} {m}", prime_index(*p))?,
            }
        }
        Ok(())
    }
}

/// The supernatural number of the double-jump example: h_s(p_e) = #W_{e,s}
/// for the e-th machine.
pub fn hard_supernatural(machines: &[CounterMachine]) -> Supernatural {
    let mut s = Supernatural::new();
    for (e, m) in machines.iter().enumerate() {
        s.entries.insert(nth_prime(e as u64), Exponent::Machine(m.clone()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!((0..6).map(nth_prime).collect::<Vec<_>>(), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(prime_index(13), 5);
        assert_eq!(factor(360), BTreeMap::from([(2, 3), (3, 2), (5, 1)]));
        assert_eq!(valuation(&BigUint::from(3_628_800u64), 5), 2);
    }

    #[test]
    fn text_round_trip() {
        let s = Supernatural::parse("2 inf\n3 1 # comment\nmachine 2 halt\n").unwrap();
        assert_eq!(s.h(5, 2), 5);
        assert_eq!(s.h(5, 5), 5);
        assert_eq!(Supernatural::parse(&s.to_string()).unwrap(), s);
        assert!(matches!(Supernatural::parse("2 1\n4 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Supernatural::parse("machine 0 inc 0 9"), Err(Error::Input(_)) | Err(Error::Parse { .. })));
    }

    #[test]
    fn dims() {
        let two = Supernatural::infinite(2).unwrap();
        assert_eq!((0..4).map(|j| two.dim(j)).collect::<Vec<_>>(), [1u32, 2, 4, 8].map(BigUint::from).to_vec());
        let six = Supernatural::finite(&[(2, 1), (3, 1)]).unwrap();
        assert_eq!((0..4).map(|j| six.dim(j)).collect::<Vec<_>>(), [1u32, 6, 6, 6].map(BigUint::from).to_vec());
    }
}
