//! Small dense exact linear algebra.

use crate::rational::Q;
use num_traits::{One, Zero};

/// Solves `m x = b` by Gaussian elimination; `None` if singular.
pub fn solve(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(b)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for k in col..=n {
            a[col][k] = &a[col][k] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=n {
                    let v = &f * &a[col][k];
                    a[r][k] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return Q::zero(),
        };
        if piv != col {
            a.swap(col, piv);
            d = -d;
        }
        let p = a[col][col].clone();
        d *= &p;
        for r in (col + 1)..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &p;
                for k in col..n {
                    let v = &f * &a[col][k];
                    a[r][k] -= v;
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn solves_and_detects_singular() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve(&m, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![qr(4, 5), qr(7, 5)]);
        assert_eq!(det(&m), q(5));
        let s = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(solve(&s, &[q(1), q(1)]).is_none());
        assert_eq!(det(&s), q(0));
    }
}
