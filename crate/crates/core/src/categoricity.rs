//! Back-and-forth between two UHF certificates of the same algebra.
//!
//! With stage dims (m_k) on the source side and (n_ℓ) on the target side,
//! k_0 = 0, ℓ_j is the least stage above all earlier ℓ with m_{k_j} | n_{ℓ_j},
//! and k_{j+1} the least stage above all earlier k with n_{ℓ_j} | m_{k_{j+1}}.
//! The maximum over no earlier stages is −1. The isomorphism sends
//! φ_{k_j}(a) to ψ_{ℓ_j}(E(a)).

use crate::coding::untriple;
use crate::cstar::StarPoly;
use crate::error::{Error, Result};
use crate::ktheory::StarHom;
use crate::uhf::{evaluate, Embedding, StageMatrix, UhfCertificate};
use num_bigint::BigUint;
use num_traits::Zero;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Interleaved stage indices: m_{k_j} | n_{ℓ_j} and n_{ℓ_j} | m_{k_{j+1}}.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interleaving {
    pub k_seq: Vec<u64>,
    pub l_seq: Vec<u64>,
}

impl fmt::Display for Interleaving {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>4} {:>6} {:>6}", "j", "k_j", "l_j")?;
        for (j, (k, l)) in self.k_seq.iter().zip(&self.l_seq).enumerate() {
            writeln!(f, "{j:>4} {k:>6} {l:>6}")?;
        }
        Ok(())
    }
}

fn divides(a: &BigUint, b: &BigUint) -> bool {
    !a.is_zero() && (b % a).is_zero()
}

/// Least stage t > after (after = −1 allowed) with `d | dims(t)`, looking
/// at most `bound` stages ahead.
fn least_above(cert: &UhfCertificate, after: i64, d: &BigUint, bound: u64, stage: usize) -> Result<u64> {
    let start = (after + 1) as u64;
    for t in start..start + bound {
        if divides(d, &cert.dim(t)) {
            return Ok(t);
        }
    }
    Err(Error::SupernaturalMismatchSuspected { stage, bound: bound as usize })
}

impl Interleaving {
    /// Extends both sequences by one step: ℓ_j, then k_{j+1}.
    fn step(&mut self, a: &UhfCertificate, b: &UhfCertificate, bound: u64) -> Result<()> {
        if self.k_seq.is_empty() {
            self.k_seq.push(0);
        }
        let j = self.l_seq.len();
        let kj = self.k_seq[j];
        let l_prev = self.l_seq.last().map_or(-1, |&l| l as i64);
        let l = least_above(b, l_prev, &a.dim(kj), bound, j)?;
        self.l_seq.push(l);
        let k_prev = *self.k_seq.last().unwrap() as i64;
        let k = least_above(a, k_prev, &b.dim(l), bound, j + 1)?;
        self.k_seq.push(k);
        Ok(())
    }

    /// Pairs (k_j, ℓ_j) computed so far.
    pub fn depth(&self) -> usize {
        self.l_seq.len()
    }

    /// Truncates to `depth` pairs.
    pub fn truncated(&self, depth: usize) -> Interleaving {
        Interleaving { k_seq: self.k_seq[..depth].to_vec(), l_seq: self.l_seq[..depth].to_vec() }
    }
}

/// The first `depth` pairs (k_j, ℓ_j). `fuel` bounds how many stages each
/// divisibility search looks ahead; running past it is reported as a
/// suspected supernatural mismatch, never as a verdict.
pub fn interleave(a: &UhfCertificate, b: &UhfCertificate, depth: usize, fuel: u64) -> Result<Interleaving> {
    let mut il = Interleaving::default();
    while il.depth() < depth {
        il.step(a, b, fuel)?;
    }
    Ok(il.truncated(depth))
}

/// The isomorphism γ̄: A → B with a lazily extended interleaving.
pub struct Isomorphism {
    pub source: UhfCertificate,
    pub target: UhfCertificate,
    /// Look-ahead bound for each divisibility search.
    pub fuel: u64,
    il: Mutex<Interleaving>,
}

impl Isomorphism {
    pub fn new(source: UhfCertificate, target: UhfCertificate, fuel: u64) -> Self {
        Isomorphism { source, target, fuel, il: Mutex::default() }
    }

    /// The least j with k_j ≥ stage, extending the interleaving as needed.
    pub fn pair_for_stage(&self, stage: u64) -> Result<(u64, u64)> {
        let mut il = self.il.lock().unwrap();
        loop {
            if let Some(j) = (0..il.depth()).find(|&j| il.k_seq[j] >= stage) {
                return Ok((il.k_seq[j], il.l_seq[j]));
            }
            il.step(&self.source, &self.target, self.fuel)?;
        }
    }

    pub fn interleaving(&self) -> Interleaving {
        let il = self.il.lock().unwrap();
        il.truncated(il.depth())
    }

    /// γ_j(φ_J(a)) for a stage-J matrix a: a is carried to stage k_j ≥ J,
    /// embedded into M_{n_{ℓ_j}} and pushed through ψ_{ℓ_j}.
    pub fn image_of_stage(&self, stage: u64, a: &StageMatrix) -> Result<StarPoly> {
        let (k, l) = self.pair_for_stage(stage)?;
        let at_k = a.embed(self.source.dim_u64(k)?)?;
        let at_l = at_k.embed(self.target.dim_u64(l)?)?;
        self.target.apply(l, &at_l)
    }

    /// A rational point of B within 2^-k of γ̄(pt). A point of the canonical
    /// limit presentation lies exactly in the stage of its largest
    /// generator, so ρ' = φ_J^{-1}(pt) is found exactly and the returned
    /// point is γ̄(pt) itself.
    pub fn approx(&self, pt: &StarPoly, _k: u32) -> Result<StarPoly> {
        if !matches!(self.source.embedding, Embedding::Canonical) {
            return Err(Error::Unsupported(
                "source certificate must describe the canonical limit presentation".into(),
            ));
        }
        if pt.is_zero() {
            return Ok(StarPoly::zero());
        }
        let stage = pt.generators().iter().map(|&g| untriple(g).0).max().unwrap_or(0);
        let rho = evaluate(&self.source.dims, pt)?;
        self.image_of_stage(stage, &rho)
    }

    /// γ̄ as a *-homomorphism on generators x_{⟨j,r,s⟩} = φ_j(E_rs).
    pub fn star_hom(self: &Arc<Self>) -> StarHom {
        let me = self.clone();
        StarHom::new(move |g| {
            let (j, r, s) = untriple(g);
            let image = me
                .source
                .dim_u64(j)
                .and_then(|n| me.image_of_stage(j, &StageMatrix::unit(n, r % n, s % n)));
            image.unwrap_or_else(|e| panic!("image of generator {g}: {e}"))
        })
    }
}

/// One-shot form of [`Isomorphism::approx`] with look-ahead 64.
pub fn iso_approx(a: &UhfCertificate, b: &UhfCertificate, pt: &StarPoly, k: u32) -> Result<StarPoly> {
    Isomorphism::new(a.clone(), b.clone(), 64).approx(pt, k)
}
