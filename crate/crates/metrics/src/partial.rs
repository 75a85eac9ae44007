//! Partial fractions of `N(t) / D(t)` over the complex roots of `D`, with
//! first and second antiderivatives evaluated on the real line.

use num_complex::Complex64 as C;
use torex::error::{Result, TorexError};
use torex::rational::to_f64;
use torex::{UniPoly, Q};

/// Roots of `p` with multiplicities: the listed exact roots are divided out
/// first and the remaining factor (degree at most two) is solved directly.
pub fn roots_with_known(p: &UniPoly, known: &[Q]) -> Result<(f64, Vec<(C, usize)>)> {
    let mut rest = p.clone();
    let mut roots: Vec<(C, usize)> = Vec::new();
    for r in known {
        if roots.iter().any(|(z, _)| z.re == to_f64(r) && z.im == 0.0) {
            continue;
        }
        let k = rest.root_multiplicity(r);
        if k == 0 {
            continue;
        }
        for _ in 0..k {
            rest = rest.div_rem(&UniPoly::linear_root(r)).0;
        }
        roots.push((C::new(to_f64(r), 0.0), k));
    }
    match rest.degree() {
        Some(0) => {}
        Some(1) => roots.push((C::new(to_f64(&(-rest.coeff(0) / rest.coeff(1))), 0.0), 1)),
        Some(2) => {
            let a = to_f64(&rest.coeff(2));
            let b = to_f64(&rest.coeff(1));
            let c = to_f64(&rest.coeff(0));
            let disc = C::new(b * b - 4.0 * a * c, 0.0).sqrt();
            let r1 = (-b + disc) / (2.0 * a);
            let r2 = (-b - disc) / (2.0 * a);
            if (r1 - r2).norm() < 1e-14 * (1.0 + r1.norm()) {
                roots.push((r1, 2));
            } else {
                roots.push((r1, 1));
                roots.push((r2, 1));
            }
        }
        _ => return Err(TorexError::PositivityFailure(format!("cannot factor {p}"))),
    }
    Ok((to_f64(&p.lead()), roots))
}

fn shift(coeffs: &[C], rho: C, order: usize) -> Vec<C> {
    // Taylor coefficients of sum c_k t^k at t = rho, up to `order`.
    let mut out = vec![C::new(0.0, 0.0); order];
    let mut work: Vec<C> = coeffs.to_vec();
    for slot in out.iter_mut() {
        if work.is_empty() {
            break;
        }
        let mut acc = C::new(0.0, 0.0);
        for c in work.iter().rev() {
            acc = acc * rho + c;
        }
        *slot = acc;
        // derivative divided by its order, via synthetic division
        let n = work.len();
        let mut q = vec![C::new(0.0, 0.0); n.saturating_sub(1)];
        let mut carry = C::new(0.0, 0.0);
        for k in (1..n).rev() {
            carry = carry * rho + work[k];
            q[k - 1] = carry;
        }
        work = q;
    }
    out
}

fn series_mul(a: &[C], b: &[C], order: usize) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); order];
    for (i, x) in a.iter().enumerate().take(order) {
        for (j, y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_div(a: &[C], b: &[C], order: usize) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); order];
    for k in 0..order {
        let mut acc = a.get(k).copied().unwrap_or_default();
        for j in 0..k {
            acc -= out[j] * b.get(k - j).copied().unwrap_or_default();
        }
        out[k] = acc / b[0];
    }
    out
}

#[derive(Clone, Debug)]
pub struct PartialFractions {
    /// Root and coefficients of `(t - root)^-j` for `j = 1..=multiplicity`.
    terms: Vec<(C, Vec<C>)>,
}

impl PartialFractions {
    /// Requires `deg N < deg D`.
    pub fn new(num: &[f64], lead: f64, roots: &[(C, usize)]) -> Self {
        let num: Vec<C> = num.iter().map(|&x| C::new(x, 0.0)).collect();
        let mut terms = Vec::with_capacity(roots.len());
        for (k, &(rho, m)) in roots.iter().enumerate() {
            let mut rest = vec![C::new(lead, 0.0)];
            for (l, &(sigma, ml)) in roots.iter().enumerate() {
                if l == k {
                    continue;
                }
                let factor = [rho - sigma, C::new(1.0, 0.0)];
                for _ in 0..ml {
                    rest = series_mul(&rest, &factor, m);
                }
            }
            let g = series_div(&shift(&num, rho, m), &rest, m);
            // g_k multiplies (t - rho)^(k - m)
            let coeffs: Vec<C> = (1..=m).map(|j| g[m - j]).collect();
            terms.push((rho, coeffs));
        }
        PartialFractions { terms }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_order(t, 0)
    }

    /// `order` antiderivatives (0, 1 or 2), up to an affine function.
    pub fn eval_order(&self, t: f64, order: u8) -> f64 {
        let mut acc = C::new(0.0, 0.0);
        for (rho, coeffs) in &self.terms {
            let z = C::new(t, 0.0) - rho;
            for (idx, c) in coeffs.iter().enumerate() {
                let j = (idx + 1) as i32;
                let v = match (order, j) {
                    (0, _) => z.powi(-j),
                    (1, 1) => z.ln(),
                    (1, _) => z.powi(1 - j) / (1 - j) as f64,
                    (_, 1) => z * (z.ln() - 1.0),
                    (_, 2) => -z.ln(),
                    (_, _) => z.powi(2 - j) / ((1 - j) * (2 - j)) as f64,
                };
                acc += c * v;
            }
        }
        acc.re
    }
}

/// Partial fractions of `t^k / p(t)` with the given exact roots of `p`.
pub fn monomial_over(p: &UniPoly, known: &[Q], k: usize) -> Result<PartialFractions> {
    let (lead, roots) = roots_with_known(p, known)?;
    let mut num = vec![0.0; k + 1];
    num[k] = 1.0;
    Ok(PartialFractions::new(&num, lead, &roots))
}
