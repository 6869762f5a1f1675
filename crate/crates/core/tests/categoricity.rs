use effk::categoricity::*;
use effk::coding::triple;
use effk::cstar::{StarPoly, StarRing};
use effk::error::Error;
use effk::exact::{pow2, GaussianRational};
use effk::ktheory::{build_d, d_of_map, ProjectionSource};
use effk::presentations::{Presentation, SgWord};
use effk::uhf::{limit_norm, trace, trace_value, uhf_presentation, UhfCertificate};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

fn two() -> UhfCertificate {
    UhfCertificate::powers(2)
}

fn four() -> UhfCertificate {
    UhfCertificate::powers(4)
}

/// The recursion over exponents for dims 2^k vs 4^ℓ: 2^k | 4^ℓ iff k ≤ 2ℓ.
/// Brute force over all stages below 64.
fn exponent_oracle(depth: usize) -> (Vec<u64>, Vec<u64>) {
    let (mut ks, mut ls) = (vec![0u64], vec![]);
    for j in 0..depth {
        let lp = ls.last().map_or(-1i64, |&l| l as i64);
        let l = (0..64u64).filter(|&l| l as i64 > lp && ks[j] <= 2 * l).min().unwrap();
        ls.push(l);
        let kp = *ks.iter().max().unwrap() as i64;
        let k = (0..64u64).filter(|&k| k as i64 > kp && 2 * l <= k).min().unwrap();
        ks.push(k);
    }
    ks.truncate(depth);
    (ks, ls)
}

#[test]
fn dyadic_versus_quaternary_table() {
    let il = interleave(&two(), &four(), 6, 64).unwrap();
    let (ks, ls) = exponent_oracle(6);
    assert_eq!(il.k_seq, ks);
    assert_eq!(il.l_seq, ls);
    // frozen
    assert_eq!(il.k_seq, vec![0, 1, 2, 4, 6, 8]);
    assert_eq!(il.l_seq, vec![0, 1, 2, 3, 4, 5]);
    for j in 0..6 {
        let (k, l) = (il.k_seq[j] as u32, il.l_seq[j] as u32);
        assert_eq!(4u64.pow(l) % 2u64.pow(k), 0);
        if j + 1 < 6 {
            assert_eq!(2u64.pow(il.k_seq[j + 1] as u32) % 4u64.pow(l), 0);
        }
    }
}

#[test]
fn identical_certificates_interleave_diagonally() {
    for b in [2, 3, 6] {
        let c = UhfCertificate::powers(b);
        let il = interleave(&c, &c, 8, 16).unwrap();
        assert_eq!(il.k_seq, (0..8).collect::<Vec<_>>());
        assert_eq!(il.l_seq, (0..8).collect::<Vec<_>>());
    }
}

#[test]
fn mismatch_is_suspected() {
    let err = interleave(&two(), &UhfCertificate::powers(3), 4, 32).unwrap_err();
    assert!(matches!(err, Error::SupernaturalMismatchSuspected { bound: 32, .. }), "{err}");
}

fn unit(c: &UhfCertificate, j: u64, r: u64, s: u64) -> StarPoly {
    c.stage_unit(j, r, s).unwrap()
}

fn random_point(g: &mut ChaCha8Rng) -> StarPoly {
    let mut p = StarPoly::zero();
    for _ in 0..g.gen_range(1..4) {
        let j = g.gen_range(0..4u64);
        let n = 1 << j;
        let z = GaussianRational::from_parts(g.gen_range(-3..4), g.gen_range(1..3), g.gen_range(-2..3), 1);
        p = p.add(&StarPoly::gen(triple(j, g.gen_range(0..n), g.gen_range(0..n))).scale(&z));
    }
    p
}

fn norm_upper(c: &UhfCertificate, p: &StarPoly, k: u32) -> BigRational {
    limit_norm(c, p, k).unwrap().hi
}

#[test]
fn unit_and_trace_examples() {
    let (a, b) = (two(), four());
    let iso = Isomorphism::new(a.clone(), b.clone(), 64);
    let one = a.unit_point().unwrap();
    let img = iso.approx(&one, 10).unwrap();
    assert!(norm_upper(&b, &img.sub(&b.unit_point().unwrap()), 10) <= pow2(-10));
    let e = iso.approx(&unit(&a, 1, 0, 0), 10).unwrap();
    assert_eq!(trace_value(&b, &e).unwrap(), BigRational::new(1.into(), 2.into()));
    assert!(iso_approx(&a, &b, &StarPoly::zero(), 4).unwrap().is_zero());
}

#[test]
fn approximate_isomorphism_on_samples() {
    let start = Instant::now();
    let (a, b) = (two(), four());
    let fwd = Isomorphism::new(a.clone(), b.clone(), 64);
    let back = Isomorphism::new(b.clone(), a.clone(), 64);
    let mut g = ChaCha8Rng::seed_from_u64(0xca7);
    let k = 8;
    let tol = pow2(-6);
    for _ in 0..50 {
        let (p, q) = (random_point(&mut g), random_point(&mut g));
        let (gp, gq) = (fwd.approx(&p, k).unwrap(), fwd.approx(&q, k).unwrap());

        // isometry
        let (na, nb) = (limit_norm(&a, &p, k).unwrap(), limit_norm(&b, &gp, k).unwrap());
        assert!((na.mid() - nb.mid()).abs() <= pow2(-(k as i64) + 1));

        // *, + and adjoint
        let prod = fwd.approx(&p.mul(&q), k).unwrap();
        assert!(norm_upper(&b, &prod.sub(&gp.mul(&gq)), k) <= tol);
        let sum = fwd.approx(&p.add(&q), k).unwrap();
        assert!(norm_upper(&b, &sum.sub(&gp.add(&gq)), k) <= tol);
        let adj = fwd.approx(&p.adjoint(), k).unwrap();
        assert!(norm_upper(&b, &adj.sub(&gp.adjoint()), k) <= tol);

        // round trip
        let round = back.approx(&gp, k).unwrap();
        assert!(norm_upper(&a, &round.sub(&p), k) <= pow2(-(k as i64) + 2));

        // traces
        assert!(trace(&a, &p, k).unwrap().overlaps(&trace(&b, &gp, k).unwrap()));
    }
    assert!(start.elapsed().as_secs() < 120);
}

#[test]
fn isometry_on_sums_of_units() {
    let (a, b) = (two(), four());
    let iso = Isomorphism::new(a.clone(), b.clone(), 64);
    for j in 0..4u64 {
        let n = 1 << j;
        let mut p = StarPoly::zero();
        for r in 0..n {
            p = p.add(&unit(&a, j, r, (r + 1) % n));
            let k = 12;
            let img = iso.approx(&p, k).unwrap();
            let (x, y) = (limit_norm(&a, &p, k).unwrap(), limit_norm(&b, &img, k).unwrap());
            assert!((x.mid() - y.mid()).abs() <= pow2(-(k as i64) + 1));
        }
    }
}

#[test]
fn non_canonical_source_is_refused() {
    let a = two();
    let units = (0..2u64).map(|j| {
        let n = 1 << j;
        (0..n * n).map(|i| a.stage_unit(j, i / n, i % n).unwrap()).collect::<Vec<_>>()
    });
    let extracted = UhfCertificate { dims: a.dims.clone(), embedding: effk::uhf::Embedding::Units(Arc::new(units.collect())) };
    assert!(iso_approx(&extracted, &four(), &a.unit_point().unwrap(), 4).is_err());
}

#[test]
fn semigroup_map_along_the_isomorphism() {
    let (a, b) = (two(), four());
    let iso = Arc::new(Isomorphism::new(a.clone(), b.clone(), 64));
    let da = build_d(uhf_presentation(&a), ProjectionSource::Uhf(a.clone()));
    let db = build_d(uhf_presentation(&b), ProjectionSource::Uhf(b.clone()));
    let f = d_of_map(iso.star_hom(), da.clone(), db.clone());
    let mut g = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let w = SgWord::letter(effk::coding::pair(g.gen_range(0..2), effk::coding::pair(g.gen_range(0..3), g.gen_range(0..9))));
        let img = f.try_apply(&w, 4096).expect("trace-matched class in the target enumeration");
        assert_eq!(da.total_trace(&w), db.total_trace(&img));
        assert!(db.kernel(&img, &img, 0).is_in());
    }
    let one = iso.star_hom().apply(&a.unit_point().unwrap());
    assert!(norm_upper(&b, &one.sub(&b.unit_point().unwrap()), 8).is_zero());
}
