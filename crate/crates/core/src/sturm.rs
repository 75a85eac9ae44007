//! Real root counting and isolation by Sturm sequences.

use crate::poly::UniPoly;
use crate::rational::{qr, sign, Q};
use num_traits::Zero;

pub fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let p = p.squarefree();
    let mut seq = vec![p.clone(), p.deriv()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

fn variations(seq: &[UniPoly], x: &Q) -> usize {
    let mut last = 0;
    let mut v = 0;
    for p in seq {
        let s = sign(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(p: &UniPoly, a: &Q, b: &Q) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let seq = sturm_sequence(p);
    variations(&seq, a).saturating_sub(variations(&seq, b))
}

/// Number of distinct real roots in the open interval `(a, b)`.
pub fn count_roots_open(p: &UniPoly, a: &Q, b: &Q) -> usize {
    let n = count_roots(p, a, b);
    if p.eval(b).is_zero() {
        n - 1
    } else {
        n
    }
}

/// Disjoint intervals `[lo, hi]`, each holding exactly one root in `(a, b]`,
/// refined until `hi - lo <= width`.
pub fn isolate_roots(p: &UniPoly, a: &Q, b: &Q, width: &Q) -> Vec<(Q, Q)> {
    let seq = sturm_sequence(p);
    let sf = seq[0].clone();
    let mut out = Vec::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let n = variations(&seq, &lo).saturating_sub(variations(&seq, &hi));
        if n == 0 {
            continue;
        }
        if n == 1 && (&hi - &lo) <= *width {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) * qr(1, 2);
        if n == 1 {
            let r = refine(&sf, &lo, &hi, width);
            out.push(r);
            continue;
        }
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Bisects a single-root bracket of a squarefree polynomial.
fn refine(p: &UniPoly, lo: &Q, hi: &Q, width: &Q) -> (Q, Q) {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    if p.eval(&hi).is_zero() {
        return (hi.clone(), hi);
    }
    let s_hi = sign(&p.eval(&hi));
    while &hi - &lo > *width {
        let mid = (&lo + &hi) * qr(1, 2);
        let s = sign(&p.eval(&mid));
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == s_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// True iff `p > 0` everywhere on the open interval `(a, b)`.
pub fn positive_on_open(p: &UniPoly, a: &Q, b: &Q) -> bool {
    if p.is_zero() {
        return false;
    }
    let mid = (a + b) * qr(1, 2);
    count_roots_open(p, a, b) == 0 && sign(&p.eval(&mid)) > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, to_f64};

    #[test]
    fn counts_distinct_roots() {
        let p = UniPoly::from_roots(&q(1), &[q(-1), q(1), q(1), q(3)]);
        assert_eq!(count_roots(&p, &q(-5), &q(5)), 3);
        assert_eq!(count_roots(&p, &q(-1), &q(1)), 1);
        assert_eq!(count_roots_open(&p, &q(-1), &q(1)), 0);
        assert_eq!(count_roots_open(&p, &q(0), &q(2)), 1);
    }

    #[test]
    fn isolates_irrational_roots() {
        // z^2 - 2
        let p = UniPoly::new(vec![q(-2), q(0), q(1)]);
        let r = isolate_roots(&p, &q(-3), &q(3), &qr(1, 1 << 30));
        assert_eq!(r.len(), 2);
        assert!((to_f64(&r[1].0) - 2f64.sqrt()).abs() < 1e-8);
        assert!((to_f64(&r[0].1) + 2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn positivity_certificate() {
        let p = UniPoly::from_roots(&q(-1), &[q(0), q(1)]);
        assert!(positive_on_open(&p, &q(0), &q(1)));
        assert!(!positive_on_open(&p, &q(0), &q(2)));
        let dbl = UniPoly::from_roots(&q(1), &[q(0), q(0)]);
        assert!(positive_on_open(&dbl, &q(0), &q(1)));
        assert!(!positive_on_open(&dbl, &q(-1), &q(1)));
    }
}
