use effk::exact::{certified_opnorm, q, trace_exact, ExactMatrix, GaussianRational};
use effk::matrix_fd::*;
use proptest::prelude::*;

fn diag_proj(bits: u32, n: usize) -> ExactProjection {
    ExactProjection::diagonal(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
}

#[test]
fn embeddings() {
    let e13 = canonical_embedding(1, 3).unwrap();
    assert_eq!(e13.apply(&ExactMatrix::identity(1)).unwrap(), ExactMatrix::identity(3));
    let e24 = canonical_embedding(2, 4).unwrap();
    assert_eq!(e24.apply(&ExactMatrix::unit(2, 0, 1)).unwrap(), ExactMatrix::unit(4, 0, 1).add(&ExactMatrix::unit(4, 2, 3)));
    assert!(matches!(canonical_embedding(2, 5), Err(effk::Error::Divisibility { m: 2, n: 5 })));
    let e26 = canonical_embedding(2, 6).unwrap();
    let e12 = canonical_embedding(1, 2).unwrap();
    let e16 = e26.compose(&e12).unwrap();
    assert_eq!(e16, canonical_embedding(1, 6).unwrap());
    for i in 0..20 {
        let z = ExactMatrix::scalar(1, effk::coding::gaussian(i));
        assert_eq!(e26.apply(&e12.apply(&z).unwrap()).unwrap(), e16.apply(&z).unwrap());
    }
}

#[test]
fn fd_mvn_examples() {
    let p = diag_proj(0b01, 2);
    let q2 = diag_proj(0b10, 2);
    match mvn_decide_fd(&p, &q2) {
        FdMvn::Equivalent(w) => {
            assert!(w.verify(p.matrix(), q2.matrix()));
            assert!(w.matrix.is_some());
        }
        FdMvn::Inequivalent => panic!(),
    }
    assert!(!mvn_decide_fd(&diag_proj(0, 2), &diag_proj(3, 2)).is_equivalent());
    let h = GaussianRational::real(q(1, 2));
    let tilted = ExactProjection::new(ExactMatrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), h]]).unwrap()).unwrap();
    match mvn_decide_fd(&tilted, &p) {
        FdMvn::Equivalent(w) => assert!(w.verify(tilted.matrix(), p.matrix()) && w.matrix.is_some()),
        _ => panic!(),
    }
    match mvn_decide_fd(&tilted, &tilted) {
        FdMvn::Equivalent(w) => assert!(w.verify(tilted.matrix(), tilted.matrix())),
        _ => panic!(),
    }
}

#[test]
fn fd_mvn_is_rank_equality() {
    for n in 1..=4usize {
        for a in 0..1u32 << n {
            for b in 0..1u32 << n {
                let (p, q) = (diag_proj(a, n), diag_proj(b, n));
                let d = mvn_decide_fd(&p, &q);
                assert_eq!(d.is_equivalent(), rank_trace(&p) == rank_trace(&q));
                if let FdMvn::Equivalent(w) = d {
                    assert!(w.verify(p.matrix(), q.matrix()));
                }
            }
        }
    }
}

#[test]
fn rank_trace_examples() {
    assert_eq!(rank_trace(&ExactProjection::new(ExactMatrix::identity(3)).unwrap()), (3, q(1, 1)));
    assert_eq!(rank_trace(&diag_proj(1, 2)), (1, q(1, 2)));
    assert_eq!(rank_trace(&diag_proj(0b0101, 4)), (2, q(1, 2)));
}

#[test]
fn spectral_rounding() {
    let p = ExactMatrix::unit(2, 0, 0);
    let r = spectral_round_to_projection(&p).unwrap();
    assert_eq!(r.exact.unwrap().matrix(), &p);
    let m = ExactMatrix::diag(&[GaussianRational::real(q(9, 10)), GaussianRational::real(q(1, 10))]);
    let r = spectral_round_to_projection(&m).unwrap();
    assert_eq!(r.exact.as_ref().unwrap().matrix(), &p);
    assert!(certified_opnorm(&m.sub(&p), 10).hi <= q(2, 1) * &r.residual);
    let bad = ExactMatrix::scalar(1, GaussianRational::real(q(1, 2)));
    assert!(matches!(spectral_round_to_projection(&bad), Err(effk::Error::OutOfBasin(_))));
}

proptest! {
    #[test]
    fn embedding_preserves_norm_and_trace(entries in proptest::collection::vec(-6i64..=6, 4), k in 1usize..4) {
        let m = ExactMatrix::from_ints(&[&entries[0..2], &entries[2..4]]);
        let e = canonical_embedding(2, 2 * k).unwrap().apply(&m).unwrap();
        prop_assert!(certified_opnorm(&m, 12).overlaps(&certified_opnorm(&e, 12)));
        prop_assert_eq!(trace_exact(&m).unwrap(), trace_exact(&e).unwrap());
    }
}
