//! Corner Hessian determinants on the quadrilateral family with slanted side
//! through (0, k) and (1, q), facets bottom, right, slanted, left.

use num_traits::{Signed, Zero};
use torex::extremal::DfContext;
use torex::presets::hirzebruch_qk;
use torex::rational::{q, qr};
use torex::stability::{corner_determinant, quadrilateral_stability, Status};
use torex::Q;

fn det(qq: &Q, k: &Q, cusps: &[usize], corner: usize) -> Q {
    let p = hirzebruch_qk(qq, k).unwrap().with_cusps(cusps).unwrap();
    corner_determinant(&DfContext::new(&p).unwrap(), corner).unwrap().determinant
}

fn first(qq: &Q, k: &Q) -> Q {
    k.pow(4) + q(2) * k.pow(2) * qq.pow(2) + qq.pow(4) - k.pow(3) + q(3) * k.pow(2) * qq + q(3) * k * qq.pow(2) - qq.pow(3)
}

fn second(qq: &Q, k: &Q) -> Q {
    let t = |c: i64, a: i32, b: i32| q(c) * k.pow(a) * qq.pow(b);
    [
        t(3, 6, 1),
        t(3, 5, 2),
        t(6, 4, 3),
        t(6, 3, 4),
        t(3, 2, 5),
        t(3, 1, 6),
        t(2, 6, 0),
        t(2, 5, 1),
        t(6, 4, 2),
        t(4, 3, 3),
        t(6, 2, 4),
        t(2, 1, 5),
        t(2, 0, 6),
        t(-2, 5, 0),
        t(-2, 4, 1),
        t(4, 3, 2),
        t(4, 2, 3),
        t(-2, 1, 4),
        t(-2, 0, 5),
    ]
    .into_iter()
    .sum()
}

fn opposite(qq: &Q, k: &Q) -> Q {
    (k - qq).pow(2) * (k + qq).pow(2) * k.pow(2) / (q(2) * (k.pow(2) + q(4) * k * qq + qq.pow(2)).pow(2))
}

fn g(qq: &Q, k: &Q) -> Q {
    qq.pow(2) + q(4) * qq * k + k.pow(2)
}

fn f(qq: &Q, k: &Q) -> Q {
    qq.pow(2) + k.pow(2)
}

fn adjacent_samples() -> Vec<(Q, Q)> {
    vec![(qr(7, 3), qr(4, 3)), (q(5), q(3)), (qr(1, 2), qr(3, 2)), (q(6), q(1)), (qr(9, 4), qr(13, 4)), (q(1), q(4))]
}

#[test]
fn adjacent_determinants_are_positive_multiples() {
    for (qq, k) in adjacent_samples() {
        let d_right = det(&qq, &k, &[1, 2], 1);
        let d_slanted = det(&qq, &k, &[1, 2], 2);
        assert!(first(&qq, &k).is_positive() && second(&qq, &k).is_positive());
        let r1 = &d_slanted / first(&qq, &k);
        let r2 = &d_right / second(&qq, &k);
        assert!(r1.is_positive() && r2.is_positive(), "q={qq} k={k}");
        // the normalising factors of this parametrisation of the crease family
        let sum = &qq + &k;
        assert_eq!(r1, qq.pow(2) * k.pow(2) * &sum / (f(&qq, &k).pow(2) * g(&qq, &k)), "q={qq} k={k}");
        assert_eq!(r2, qq.pow(3) * &k * &sum / (f(&qq, &k).pow(2) * g(&qq, &k).pow(2)), "q={qq} k={k}");
    }
}

#[test]
fn adjacent_ratio_is_not_constant() {
    let ratios: Vec<Q> = adjacent_samples().iter().map(|(qq, k)| det(qq, k, &[1, 2], 2) / first(qq, k)).collect();
    assert!(ratios.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn opposite_determinant_matches_closed_form() {
    for (qq, k) in adjacent_samples().into_iter().chain([(q(2), q(2)), (qr(5, 3), qr(5, 3))]) {
        let closed = opposite(&qq, &k);
        assert_eq!(det(&qq, &k, &[1, 3], 3), q(2) * &closed, "q={qq} k={k}");
        assert_eq!(det(&qq, &k, &[1, 3], 1), q(2) * (&qq / &k).pow(2) * &closed, "q={qq} k={k}");
        assert_eq!(closed.is_zero(), qq == k);
    }
}

#[test]
fn verdicts_on_the_family() {
    for (qq, k) in adjacent_samples() {
        let base = hirzebruch_qk(&qq, &k).unwrap();
        let status = |c: &[usize]| quadrilateral_stability(&base.with_cusps(c).unwrap()).unwrap().status;
        assert_eq!(status(&[1, 2]), Status::Stable);
        assert_eq!(status(&[1, 3]), Status::Stable);
        assert_eq!(status(&[1, 2, 3]), Status::Unstable);
    }
    let square = hirzebruch_qk(&q(2), &q(2)).unwrap().with_cusps(&[1, 3]).unwrap();
    assert_eq!(quadrilateral_stability(&square).unwrap().status, Status::StrictlySemistable);
}
