use effk::cstar::*;
use effk::effective_sets::*;
use effk::exact::{pow2, q, ExactMatrix, GaussianRational};
use effk::fuel::Fuel;
use effk::matrix_fd::{mvn_decide_fd, ExactProjection};
use std::sync::Arc;

fn c_point(z: GaussianRational) -> StarPoly {
    StarPoly::gen(0).scale(&z)
}

fn real(n: i64, d: i64) -> GaussianRational {
    GaussianRational::real(q(n, d))
}

fn mat_point(a: &CPres, m: ExactMatrix) -> StarPoly {
    a.lift(&Elem::Blocks(vec![m])).unwrap()
}

#[test]
fn ball_subset_examples() {
    let c = standard_complex();
    let zero = StarPoly::zero();
    assert_eq!(ball_subset(&*c, &Ball::single(zero.clone(), q(1, 1)), &Ball::single(zero.clone(), q(2, 1)), 50), Tri::Yes);
    assert_eq!(ball_subset(&*c, &Ball::single(zero.clone(), q(2, 1)), &Ball::single(zero.clone(), q(1, 1)), 50), Tri::No);
    let half = c_point(real(1, 2));
    assert_eq!(ball_subset(&*c, &Ball::single(half, q(1, 4)), &Ball::single(zero, q(1, 1)), 50), Tri::Yes);
}

#[test]
fn projection_balls_in_c() {
    let c = standard_complex();
    let set = ce_closed_from_relations(c.clone(), projection_relations());
    // every emitted ball passes an independent residual recheck and sits near 0 or 1
    let mut emitted = 0;
    for t in 0..3000u64 {
        if let Some(b) = set.emitted(t, 200) {
            emitted += 1;
            let z = c.realize(&b.centers[0]).unwrap().blocks().unwrap()[0].get(0, 0).clone();
            let res = (&(&z * &z) - &z).norm_sqr();
            let k = -(b.radius.denom().bits() as i64 - 1);
            let eps = pow2(k - 3);
            assert!(res < &eps * &eps, "{z}");
            let d0 = z.norm_sqr();
            let d1 = (&z - &GaussianRational::one()).norm_sqr();
            assert!(d0 < q(1, 4) || d1 < q(1, 4));
        }
    }
    assert!(emitted > 0);
    // the identity relation emits around everything
    let trivial = RelationSystem {
        arity: 1,
        polys: vec![StarPoly::gen(0).sub(&StarPoly::gen(0))],
        params: vec![],
        bounds: vec![q(1000, 1)],
        modulus: Arc::new(|k| k),
        guide: None,
    };
    let all = ce_closed_from_relations(c.clone(), trivial);
    assert!((0..50).all(|t| all.emitted(effk::coding::pair(t, 0), 100).is_some()));
}

#[test]
fn intersection_points() {
    let c = standard_complex();
    let projections = ce_closed_from_relations(c.clone(), projection_relations());
    let u = FiniteUnion(vec![Ball::single(c_point(real(9, 10)), q(1, 5))]);
    let pt = find_point_in_intersection(&*c, &u, &projections, 8, 100_000).unwrap();
    let h = computable_point(&*c, pt.handle(), 8).unwrap();
    let d = distance(&*c, &h.at(8), &StarPoly::gen(0), 12).unwrap();
    assert!(d.hi < pow2(-8));
    // C = {0}
    let zero_set = ce_closed_from_relations(
        c.clone(),
        RelationSystem {
            arity: 1,
            polys: vec![StarPoly::gen(0)],
            params: vec![],
            bounds: vec![q(1, 1)],
            modulus: Arc::new(|k| k + 1),
            guide: None,
        },
    );
    let pt = find_point_in_intersection(&*c, &WholeSpace { arity: 1 }, &zero_set, 6, 100_000).unwrap();
    assert!(distance(&*c, &pt.approx(6)[0], &StarPoly::zero(), 10).unwrap().hi < pow2(-6));
    // M_2: near E_11
    let m2 = standard_matrix(2);
    let e11 = mat_point(&m2, ExactMatrix::unit(2, 0, 0));
    let near = mat_point(&m2, ExactMatrix::from_rows(vec![vec![real(19, 20), real(1, 40)], vec![real(1, 40), real(1, 30)]]).unwrap());
    let u = FiniteUnion(vec![Ball::single(near, q(1, 8))]);
    let projections = ce_closed_from_relations(m2.clone(), projection_relations());
    let pt = find_point_in_intersection(&*m2, &u, &projections, 6, 100_000).unwrap();
    let x = pt.approx(6)[0].clone();
    let e = m2.realize(&x).unwrap();
    assert!(ExactProjection::new(e.blocks().unwrap()[0].clone()).is_ok());
    assert!(distance(&*m2, &x, &e11, 10).unwrap().hi < q(1, 4));
}

#[test]
fn matrix_unit_relations_meet_exact_systems() {
    let c = standard_complex();
    let rel = matrix_unit_relations(2, Some(StarPoly::gen(0)));
    assert_eq!(rel.g(0), 5);
    // in ℂ there is no 2×2 unital system; the exact zero tuple fails the unit relation
    let set = ce_closed_from_relations(c.clone(), rel);
    let zero = vec![StarPoly::zero(); 4];
    let mut f = Fuel::new(2_000);
    assert!(!set.s0_test(&zero, 2, &mut f).is_yes());
    // in M_2(ℂ) the standard units pass at every scale
    let m2 = standard_matrix(2);
    let units: Vec<StarPoly> = (0..4).map(|i| mat_point(&m2, ExactMatrix::unit(2, i / 2, i % 2))).collect();
    let set = ce_closed_from_relations(m2.clone(), matrix_unit_relations(2, m2.unit()));
    for k in 0..6 {
        let mut f = Fuel::new(10_000);
        assert!(set.s0_test(&units, k, &mut f).is_yes());
    }
    let ball = Ball::new(units.clone(), q(1, 10));
    let mut f = Fuel::new(10_000);
    assert!(set.meets(&ball, &mut f).is_yes());
}

fn diag_point(m: &CPres, bits: u32, n: usize) -> StarPoly {
    let p = ExactProjection::diagonal(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
    mat_point(m, p.matrix().clone())
}

#[test]
fn mvn_chain_search() {
    let c = standard_complex();
    let one = ComputablePoint::constant(StarPoly::gen(0));
    let zero = ComputablePoint::constant(StarPoly::zero());
    let v = mvn_semidecide(&c, 1, &one, &one, 200_000).unwrap();
    let MvnVerdict::Equivalent(cert) = v else { panic!() };
    assert!(cert.verify(&c, 100_000));
    let text = cert.to_text();
    assert_eq!(ChainCertificate::from_text(&text).unwrap(), cert);
    assert!(!mvn_semidecide(&c, 1, &zero, &one, 100_000).unwrap().is_equivalent());
    let m2 = standard_matrix(2);
    let e11 = ComputablePoint::constant(diag_point(&m2, 1, 2));
    let e22 = ComputablePoint::constant(diag_point(&m2, 2, 2));
    assert!(mvn_semidecide(&c, 2, &e11, &e22, 200_000).unwrap().is_equivalent());
    let bad = ComputablePoint::constant(StarPoly::gen(0).scale(&real(1, 2)));
    assert!(matches!(mvn_semidecide(&c, 1, &bad, &one, 1000), Err(effk::Error::Input(_))));
}

#[test]
fn mvn_agrees_with_rank_on_diagonals() {
    let c = standard_complex();
    for n in 1..=2usize {
        let m = standard_matrix(n);
        for a in 0..1u32 << n {
            for b in 0..1u32 << n {
                let (pa, pb) = (diag_point(&m, a, n), diag_point(&m, b, n));
                let v = mvn_semidecide(&c, n, &ComputablePoint::constant(pa), &ComputablePoint::constant(pb), 2_000).unwrap();
                let fd = mvn_decide_fd(
                    &ExactProjection::diagonal(&(0..n).map(|i| a >> i & 1 == 1).collect::<Vec<_>>()),
                    &ExactProjection::diagonal(&(0..n).map(|i| b >> i & 1 == 1).collect::<Vec<_>>()),
                );
                assert_eq!(v.is_equivalent(), fd.is_equivalent(), "n={n} a={a:b} b={b:b}");
            }
        }
    }
}
