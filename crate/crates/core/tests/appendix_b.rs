//! Trapezoid family with vertices (-d, 0), (k, 0), (0, 1), (-d, 1): extremal
//! functions against an independent slice-integral oracle and the closed forms.

use num_traits::{One, Signed, Zero};
use torex::classify::{classify_pair, Final};
use torex::extremal::{extremal_affine, Convention};
use torex::presets::sloped_quadrilateral;
use torex::rational::{q, qr};
use torex::{Affine, Pt, Q};

/// Polynomial in one variable as a coefficient list.
fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn ppow(a: &[Q], n: usize) -> Vec<Q> {
    (0..n).fold(vec![Q::one()], |acc, _| pmul(&acc, a))
}

fn integrate01(p: &[Q]) -> Q {
    p.iter().enumerate().map(|(i, c)| c / q(i as i64 + 1)).sum()
}

/// `int x^a y^b` over `0 <= y <= 1`, `-d <= x <= k (1 - y)`.
fn moment(d: &Q, k: &Q, a: usize, b: usize) -> Q {
    let right = ppow(&[k.clone(), -k.clone()], a + 1);
    let left = (0..=a).fold(Q::one(), |acc, _| acc * -d.clone());
    let mut slice: Vec<Q> = right.iter().map(|c| c / q(a as i64 + 1)).collect();
    slice[0] -= left / q(a as i64 + 1);
    let yb: Vec<Q> = (0..=b).map(|i| if i == b { Q::one() } else { Q::zero() }).collect();
    integrate01(&pmul(&slice, &yb))
}

fn det3(m: &[[Q; 3]; 3]) -> Q {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Edges in the order left, bottom, slanted, top with their labels `(grad, constant)`.
fn edges(d: &Q, k: &Q) -> Vec<([Q; 2], [Q; 2], [Q; 2])> {
    let v1 = [-d.clone(), q(0)];
    let v2 = [k.clone(), q(0)];
    let v3 = [q(0), q(1)];
    let v4 = [-d.clone(), q(1)];
    vec![
        (v1.clone(), v4.clone(), [q(1), q(0)]),
        (v1, v2.clone(), [q(0), q(1)]),
        (v2, v3.clone(), [q(-1), -k.clone()]),
        (v3, v4, [q(0), q(-1)]),
    ]
}

/// Appendix-convention extremal function `(x, y, constant)` with the given
/// edges carrying measure, from Cramer's rule on the normal equations.
fn oracle(d: &Q, k: &Q, measured: &[usize]) -> [Q; 3] {
    // basis 1, x, y
    let exps = [(0, 0), (1, 0), (0, 1)];
    let mut m: [[Q; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = moment(d, k, exps[i].0 + exps[j].0, exps[i].1 + exps[j].1);
        }
    }
    let mut rhs: [Q; 3] = Default::default();
    for (e, (p, r, g)) in edges(d, k).into_iter().enumerate() {
        if !measured.contains(&e) {
            continue;
        }
        let w = [&r[0] - &p[0], &r[1] - &p[1]];
        let dens = (&g[0] * &w[1] - &g[1] * &w[0]).abs() / (&g[0] * &g[0] + &g[1] * &g[1]);
        let mid = [(&p[0] + &r[0]) / q(2), (&p[1] + &r[1]) / q(2)];
        rhs[0] += dens.clone();
        rhs[1] += &dens * &mid[0];
        rhs[2] += &dens * &mid[1];
    }
    let full = det3(&m);
    let solve = |col: usize| {
        let mut mm = m.clone();
        for (row, r) in mm.iter_mut().zip(rhs.iter()) {
            row[col] = r.clone();
        }
        det3(&mm) / &full
    };
    [solve(1), solve(2), solve(0)]
}

fn core(d: &Q, k: &Q, measured: &[usize]) -> Affine {
    let cusps: Vec<usize> = (0..4).filter(|j| !measured.contains(j)).collect();
    let p = sloped_quadrilateral(d, k).unwrap().with_cusps(&cusps).unwrap();
    extremal_affine(&p, Convention::Appendix).unwrap()
}

fn as_triple(a: &Affine) -> [Q; 3] {
    [a.a[0].clone(), a.a[1].clone(), a.c.clone()]
}

/// Closed forms for `A_i` (only facet `i` measured) as `(x, y, constant)`,
/// with the sign of the `A_2` constant and the `y` coefficient of `A_4`
/// fixed by the oracle below.
fn printed_a(i: usize, d: &Q, k: &Q) -> [Q; 3] {
    let d1 = q(2) * d * d + q(2) * d * k + k * k;
    let d2 = q(6) * d * d + q(6) * d * k + k * k;
    let (d3, k3, d2k, dk2) = (d * d * d, k * k * k, d * d * k, d * k * k);
    match i {
        0 => [
            -q(12) / &d1,
            -(q(24) * k * d * (k + d)) / (&d1 * &d2),
            -(q(6) * (q(4) * &d3 - q(2) * &d2k - q(6) * &dk2 - &k3)) / (&d1 * &d2),
        ],
        1 => [q(0), -(q(12) * (q(3) * d * d + q(4) * d * k + k * k)) / &d2, q(6) * (q(4) * d * d + q(5) * d * k + k * k) / &d2],
        2 => [
            q(12) / &d1,
            q(12) * k * (q(4) * d * d + q(4) * d * k + k * k) / (&d1 * &d2),
            q(6) * (q(8) * &d3 + q(2) * &d2k - q(4) * &dk2 - &k3) / (&d1 * &d2),
        ],
        _ => [q(0), q(12) * d * (q(3) * d + q(2) * k) / &d2, -(q(6) * d * (k + q(2) * d)) / &d2],
    }
}

/// Closed forms for `B_i` (every facet but `i` measured).
fn printed_b(i: usize, d: &Q, k: &Q) -> [Q; 3] {
    let d1 = q(2) * d * d + q(2) * d * k + k * k;
    let d2 = q(6) * d * d + q(6) * d * k + k * k;
    let (d2_, k2) = (d * d, k * k);
    let (d3, k3, d4, k4) = (d * &d2_, k * &k2, &d2_ * &d2_, &k2 * &k2);
    match i {
        0 => [
            q(12) / &d1,
            -(q(12) * k * (q(4) * &d3 + q(6) * &d2_ * k + q(4) * d * &k2 + &k3 - q(4) * &d2_ - q(4) * d * k - &k2)) / (&d1 * &d2),
            q(6) * (q(4) * &d4 + q(12) * &d3 * k + q(12) * &d2_ * &k2 + q(6) * d * &k3 + &k4 + q(8) * &d3 + q(2) * &d2_ * k
                - q(4) * d * &k2
                - &k3)
                / (&d1 * &d2),
        ],
        1 => [q(0), q(12) * (q(3) * &d2_ + q(2) * d * k + k) / &d2, -(q(6) * d * (q(2) * d + k - q(2))) / &d2],
        2 => [
            -q(12) / &d1,
            -(q(12) * k * (q(4) * &d3 + q(6) * &d2_ * k + q(4) * d * &k2 + &k3 + q(2) * &d2_ + q(2) * d * k)) / (&d1 * &d2),
            q(6) * (q(4) * &d4 + q(12) * &d3 * k + q(12) * &d2_ * &k2 + q(6) * d * &k3 + &k4 - q(4) * &d3 + q(2) * &d2_ * k
                + q(6) * d * &k2
                + &k3)
                / (&d1 * &d2),
        ],
        _ => [q(0), -(q(12) * (q(3) * &d2_ + q(4) * d * k + &k2 - k)) / &d2, q(6) * (q(4) * &d2_ + q(5) * d * k + &k2 + q(2) * d) / &d2],
    }
}

fn samples() -> Vec<(Q, Q)> {
    vec![(q(1), q(1)), (q(2), q(1)), (qr(1, 2), q(2)), (qr(3, 2), q(3)), (qr(1, 3), q(1)), (q(5), q(2)), (qr(7, 4), q(4)), (qr(2, 5), q(5))]
}

fn measured_all_but(i: usize) -> Vec<usize> {
    (0..4).filter(|&j| j != i).collect()
}

fn linear(a: &[Q; 3], p: &Pt) -> Q {
    &a[0] * &p[0] + &a[1] * &p[1]
}

#[test]
fn core_matches_oracle() {
    for (d, k) in samples() {
        for i in 0..4 {
            assert_eq!(as_triple(&core(&d, &k, &[i])), oracle(&d, &k, &[i]), "A_{i} d={d} k={k}");
            let b = measured_all_but(i);
            assert_eq!(as_triple(&core(&d, &k, &b)), oracle(&d, &k, &b), "B_{i} d={d} k={k}");
        }
    }
}

#[test]
fn single_edge_functions_match_closed_forms() {
    for (d, k) in samples() {
        for i in 0..4 {
            assert_eq!(printed_a(i, &d, &k), oracle(&d, &k, &[i]), "A_{i} d={d} k={k}");
        }
    }
}

#[test]
fn complementary_functions_match_closed_forms() {
    for (d, k) in samples() {
        for i in 0..4 {
            assert_eq!(printed_b(i, &d, &k), oracle(&d, &k, &measured_all_but(i)), "B_{i} d={d} k={k}");
            let sum = (0..4).filter(|&j| j != i).fold([q(0), q(0), q(0)], |acc, j| {
                let a = printed_a(j, &d, &k);
                [&acc[0] + &a[0], &acc[1] + &a[1], &acc[2] + &a[2]]
            });
            assert_eq!(sum, printed_b(i, &d, &k));
        }
    }
}

#[test]
fn variation_along_cusp_edge() {
    for (d, k) in samples() {
        let d1 = q(2) * &d * &d + q(2) * &d * &k + &k * &k;
        let d2 = q(6) * &d * &d + q(6) * &d * &k + &k * &k;
        let poly = q(4) * &d * &d * &d + q(6) * &d * &d * &k + q(4) * &d * &k * &k + &k * &k * &k
            - q(4) * &d * &d
            - q(4) * &d * &k
            - &k * &k;
        let k1 = q(12) * &k * &poly / (&d1 * &d2);
        let expected = [k1.clone(), q(0), -k1, q(0)];
        let v = [[-d.clone(), q(0)], [k.clone(), q(0)], [q(0), q(1)], [-d.clone(), q(1)]];
        // counterclockwise traversal of each edge: (start, end)
        let ends = [(3, 0), (0, 1), (1, 2), (2, 3)];
        for i in 0..4 {
            let b = oracle(&d, &k, &measured_all_but(i));
            let (s, e) = ends[i];
            assert_eq!(linear(&b, &v[e]) - linear(&b, &v[s]), expected[i], "K_{i} d={d} k={k}");
        }
        if k >= q(1) {
            assert!(expected[0].is_positive());
        }
    }
}

#[test]
fn adjacent_pair_variation() {
    for (d, k) in samples() {
        let d1 = q(2) * &d * &d + q(2) * &d * &k + &k * &k;
        let d2 = q(6) * &d * &d + q(6) * &d * &k + &k * &k;
        let (d2_, k2) = (&d * &d, &k * &k);
        let num = q(6) * &d2_ * &d2_ + q(18) * &d2_ * &d * &k + q(19) * &d2_ * &k2 + q(8) * &d * &k2 * &k + &k2 * &k2
            + q(6) * &d2_ * &d
            + q(6) * &d2_ * &k
            + q(3) * &d * &k2
            + &k2 * &k;
        let expected = q(12) * num / ((&k + &d) * &d1 * &d2);
        let points: [Pt; 2] = [[k.clone(), q(0)], [-d.clone(), q(1) / (&k + &d)]];
        let diff = |a: &[Q; 3]| linear(a, &points[0]) - linear(a, &points[1]);
        // the closed form uses the uncorrected y coefficient of A_4
        let mut uncorrected = printed_a(2, &d, &k);
        uncorrected[1] -= q(12) * (q(3) * &d + q(2) * &k) / &d2;
        assert_eq!(diff(&uncorrected), expected, "d={d} k={k}");
        assert!(expected.is_positive());
        let exact = diff(&oracle(&d, &k, &[2, 3]));
        assert_ne!(exact, expected);
        assert!(exact.is_positive(), "d={d} k={k}");
    }
}

#[test]
fn verdicts_follow_edge_variation() {
    for (d, k) in [(q(1), q(1)), (qr(1, 2), q(2)), (q(2), q(3))] {
        let base = sloped_quadrilateral(&d, &k).unwrap();
        let verdict = |cusps: &[usize]| classify_pair(&base.with_cusps(cusps).unwrap()).unwrap().verdict;
        assert_eq!(verdict(&[1]), Final::PoincareExtremal);
        assert_eq!(verdict(&[3]), Final::PoincareExtremal);
        assert_eq!(verdict(&[0]), Final::DonaldsonOnly);
        assert_eq!(verdict(&[2]), Final::DonaldsonOnly);
        assert_eq!(verdict(&[0, 1]), Final::DonaldsonOnly);
    }
}
