use effk::coding::triple;
use effk::cstar::{standard_complex, standard_matrix, Amplified, ComputablePoint, StarPoly, StarRing};
use effk::exact::{pow2, q, GaussianRational};
use effk::uhf::*;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn two() -> UhfCertificate {
    UhfCertificate::powers(2)
}

/// ψ_j(E_{r,s}) with 1-based r, s.
fn u(cert: &UhfCertificate, j: u64, r: u64, s: u64) -> StarPoly {
    cert.stage_unit(j, r - 1, s - 1).unwrap()
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

#[test]
fn dims_from_supernatural() {
    let (_, c) = presentation_from_supernatural(&Supernatural::infinite(2).unwrap());
    assert_eq!((0..4).map(|j| c.dim(j)).collect::<Vec<_>>(), vec![big(1), big(2), big(4), big(8)]);
    let (_, c) = presentation_from_supernatural(&Supernatural::new());
    assert!((0..20).all(|j| c.dim(j) == big(1)));
    let (_, c) = presentation_from_supernatural(&Supernatural::finite(&[(2, 1), (3, 1)]).unwrap());
    assert_eq!(c.dim(1), big(6));
    assert!((1..20).all(|j| c.dim(j) == big(6)));
}

#[test]
fn valuation_streams() {
    assert_eq!(supernatural_from_certificate(&two(), 2, 6), vec![0, 1, 2, 3, 4, 5]);
    assert_eq!(supernatural_from_certificate(&two(), 3, 6), vec![0; 6]);
    let fact = UhfCertificate::new(DimsRule::Factorial).unwrap();
    let stream = supernatural_from_certificate(&fact, 5, 11);
    // Legendre: v_5(j!) = Σ_i ⌊j/5^i⌋
    let legendre = |j: u64| (1..6).map(|i| j / 5u64.pow(i)).sum::<u64>();
    for (j, v) in stream.iter().enumerate() {
        assert_eq!(*v, legendre(j as u64));
    }
    assert_eq!(stream[10], 2);
}

#[test]
fn limit_norm_examples() {
    let c = two();
    let one = BigRational::one();
    for j in 0..6 {
        let unit = c.apply(j, &StageMatrix::identity(c.dim_u64(j).unwrap())).unwrap();
        assert!(limit_norm(&c, &unit, 20).unwrap().contains(&one));
    }
    let flip = u(&c, 1, 1, 2).add(&u(&c, 1, 2, 1));
    assert!(limit_norm(&c, &flip, 20).unwrap().contains(&one));
    let diff = u(&c, 1, 1, 1).sub(&u(&c, 2, 1, 1));
    let n = limit_norm(&c, &diff, 20).unwrap();
    assert!(n.contains(&one));
    assert!(n.width() <= pow2(-20));
}

#[test]
fn trace_examples() {
    let c = two();
    let t = trace(&c, &c.unit_point().unwrap(), 10).unwrap();
    assert!(t.real_interval().contains(&BigRational::one()));
    assert_eq!(t.real_interval().width(), pow2(-10) * BigRational::from_integer(3.into()));
    for j in 0..=10 {
        let t = trace(&c, &u(&c, j, 1, 1), 12).unwrap();
        assert!(t.real_interval().contains(&pow2(-(j as i64))));
    }
    assert!(trace(&c, &u(&c, 1, 1, 2), 8).unwrap().real_interval().contains(&BigRational::zero()));
}

#[test]
fn mvn_examples() {
    let c = two();
    let p = u(&c, 2, 1, 1).add(&u(&c, 2, 2, 2));
    assert_eq!(mvn_decide_uhf(&c, &p, &u(&c, 1, 1, 1)).unwrap(), UhfMvn::Equivalent);
    assert_eq!(mvn_decide_uhf(&c, &c.unit_point().unwrap(), &u(&c, 1, 1, 1)).unwrap(), UhfMvn::Inequivalent);
    assert_eq!(mvn_decide_uhf(&c, &p, &p).unwrap(), UhfMvn::Equivalent);
    let bad = u(&c, 1, 1, 2);
    assert!(matches!(mvn_decide_uhf(&c, &bad, &p), Err(effk::Error::Input(_))));
}

#[test]
fn hard_machines_are_monotone() {
    let ms = [CounterMachine::never(), CounterMachine::accept_all(), CounterMachine::accept_even()];
    let s = hard_supernatural(&ms);
    let mut prev = [0u64; 3];
    for step in 0..=1000u64 {
        for (e, p) in [2u64, 3, 5].into_iter().enumerate() {
            let h = s.h(step, p);
            assert!(h >= prev[e]);
            prev[e] = h;
        }
        assert_eq!(s.h(step, 2), 0);
        assert_eq!(s.h(step, 3), step);
        // even x < s halting after x + 1 steps: ⌈s/2⌉ of them
        assert_eq!(s.h(step, 5), (0..step).filter(|x| x % 2 == 0 && x + 1 <= step).count() as u64);
    }
}

#[test]
fn qepsilon_examples() {
    let two = Supernatural::infinite(2).unwrap();
    let six = Supernatural::finite(&[(2, 1), (3, 1)]).unwrap();
    assert_eq!(membership(&two, &q(3, 8), 50), Membership::Member { stage: 3 });
    assert!(matches!(membership(&two, &q(1, 3), 10_000), Membership::Unknown { .. }));
    for eps in [&two, &six, &Supernatural::new()] {
        assert!(matches!(membership(eps, &q(0, 1), 5), Membership::Member { .. }));
        assert!(matches!(membership(eps, &q(1, 1), 5), Membership::Member { .. }));
    }
    assert!(matches!(membership(&six, &q(5, 6), 5), Membership::Member { stage: 1 }));
    assert!(matches!(membership(&six, &q(1, 4), 100), Membership::Unknown { .. }));
}

#[test]
fn extraction_from_the_dyadic_limit() {
    let (a, _) = presentation_from_supernatural(&Supernatural::infinite(2).unwrap());
    let unit = a.unit().unwrap();
    let ex = extract_certificate(&a, &unit, &ExtractConfig::default()).unwrap();
    assert!(ex.complete, "{:?}", ex.diagnostics);
    assert_eq!(ex.reports.len(), 5);
    let mut prev = 1u64;
    for (j, r) in ex.reports.iter().enumerate() {
        assert!(r.inv2_exact);
        assert!(r.inv1.iter().all(|c| c.residual < c.bound && c.point < c.stage));
        assert!(r.dim.is_power_of_two() && r.dim % prev == 0 && r.dim > prev);
        assert_eq!(ex.certificate.dim_u64(j as u64 + 1).unwrap(), r.dim);
        prev = r.dim;
    }
    // ψ_{j+1}(E(x)) = ψ_j(x) on matrix units, checked exactly
    let cert = &ex.certificate;
    for j in 0..5u64 {
        let (n, m) = (cert.dim_u64(j).unwrap(), cert.dim_u64(j + 1).unwrap());
        for (r, s) in [(0, 0), (0, n - 1), (n - 1, 0)] {
            let up = StageMatrix::unit(n, r, s).embed(m).unwrap();
            let lhs = cert.apply(j + 1, &up).unwrap();
            let rhs = cert.stage_unit(j, r, s).unwrap();
            assert!(a.norm_query(&lhs.sub(&rhs), 10).upper().unwrap().is_zero());
        }
    }
}

#[test]
fn extraction_from_small_algebras() {
    let c = standard_complex();
    let ex = extract_certificate(&c, &c.unit().unwrap(), &ExtractConfig { stages: 3, ..Default::default() }).unwrap();
    assert!(ex.complete, "{:?}", ex.diagnostics);
    assert!((0..4).all(|j| ex.certificate.dim_u64(j).unwrap() == 1));

    let m2 = standard_matrix(2);
    let ex = extract_certificate(&m2, &m2.unit().unwrap(), &ExtractConfig { stages: 3, ..Default::default() }).unwrap();
    assert!(ex.complete, "{:?}", ex.diagnostics);
    assert_eq!(ex.certificate.dim_u64(1).unwrap(), 2);
    assert!(ex.reports[0].relations_checked);
}

#[test]
fn units_found() {
    let (a, cert) = presentation_from_supernatural(&Supernatural::infinite(2).unwrap());
    let amp = Amplified { base: a.clone(), n: 1 };
    let label = ComputablePoint::constant(amp.place(&a.unit().unwrap(), 0, 0));
    match find_unit(&a, 1, &label, 50_000).unwrap() {
        UnitSearch::Found { point, .. } => {
            assert_eq!(point, StarPoly::gen(triple(0, 0, 0)));
            assert_eq!(evaluate(&cert.dims, &point).unwrap(), StageMatrix::identity(1));
        }
        UnitSearch::Unknown { fuel } => panic!("no unit within {fuel}"),
    }
    for a in [standard_complex(), standard_matrix(2)] {
        // labels are points of M_1(A), in the amplified coding
        let amp = Amplified { base: a.clone(), n: 1 };
        let label = ComputablePoint::constant(amp.place(&a.unit().unwrap(), 0, 0));
        match find_unit(&a, 1, &label, 50_000).unwrap() {
            UnitSearch::Found { handle, .. } => {
                let d = handle.at(10).sub(&a.unit().unwrap());
                assert!(d.is_zero() || a.norm_query(&d, 10).upper().unwrap() < &pow2(-10));
            }
            UnitSearch::Unknown { fuel } => panic!("no unit within {fuel}"),
        }
    }
}

fn stage_point(j: u64, seed: &[(u64, u64, i64)]) -> StarPoly {
    let c = two();
    let n = c.dim_u64(j).unwrap();
    let mut m = StageMatrix::zero(n);
    for &(r, s, v) in seed {
        m = m.add(&StageMatrix::unit(n, r % n, s % n).scale(&GaussianRational::from_int(v)));
    }
    c.apply(j, &m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn supernatural_round_trip(exps in proptest::collection::vec(0u64..=8, 6)) {
        let primes = [2u64, 3, 5, 7, 11, 13];
        let pairs: Vec<(u64, u64)> = primes.iter().copied().zip(exps.iter().copied()).filter(|&(_, e)| e > 0).collect();
        let eps = Supernatural::finite(&pairs).unwrap();
        let (_, cert) = presentation_from_supernatural(&eps);
        for (p, e) in primes.iter().zip(&exps) {
            prop_assert_eq!(*supernatural_from_certificate(&cert, *p, 10).last().unwrap(), *e);
        }
    }

    #[test]
    fn trace_is_additive_and_unital(j in 0u64..5, a in proptest::collection::vec((0u64..16, 0u64..16, -3i64..4), 0..6),
                                    b in proptest::collection::vec((0u64..16, 0u64..16, -3i64..4), 0..6), jb in 0u64..5) {
        let c = two();
        let (x, y) = (stage_point(j, &a), stage_point(jb, &b));
        let sum = trace_exact(&c, &x.add(&y)).unwrap();
        prop_assert_eq!(sum, trace_exact(&c, &x).unwrap() + trace_exact(&c, &y).unwrap());
        prop_assert_eq!(trace_exact(&c, &c.unit_point().unwrap()).unwrap(), GaussianRational::one());
    }

    #[test]
    fn projection_traces_and_restaging(j in 0u64..5, bits in 0u32..32, bits2 in 0u32..32) {
        let c = two();
        let n = c.dim_u64(j).unwrap();
        let diag = |bits: u32| (0..n).filter(|i| bits >> i & 1 == 1).map(|i| (i, i, 1)).collect::<Vec<_>>();
        let (p, q2) = (stage_point(j, &diag(bits)), stage_point(j, &diag(bits2)));
        let t = trace_value(&c, &p).unwrap();
        prop_assert!((t.clone() * BigRational::from_integer(n.into())).is_integer());
        // the same projection one stage up
        let up = c.apply(j + 1, &evaluate(&c.dims, &p).unwrap().embed(c.dim_u64(j + 1).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(mvn_decide_uhf(&c, &p, &up).unwrap(), UhfMvn::Equivalent);
        let same = mvn_decide_uhf(&c, &p, &q2).unwrap() == UhfMvn::Equivalent;
        prop_assert_eq!(same, (bits & ((1 << n) - 1)).count_ones() == (bits2 & ((1 << n) - 1)).count_ones());
        prop_assert_eq!(mvn_decide_uhf(&c, &q2, &p).unwrap(), mvn_decide_uhf(&c, &p, &q2).unwrap());
    }
}
