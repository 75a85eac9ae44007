//! Univariate and bivariate polynomials with rational coefficients.

use crate::rational::{fmt_q, pow, to_f64, Q};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Pt = [Q; 2];

pub fn pt(x: Q, y: Q) -> Pt {
    [x, y]
}

pub fn cross(a: &Pt, b: &Pt) -> Q {
    &a[0] * &b[1] - &a[1] * &b[0]
}

pub fn sub_pt(a: &Pt, b: &Pt) -> Pt {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

pub fn lerp(a: &Pt, b: &Pt, t: &Q) -> Pt {
    [&a[0] + t * (&b[0] - &a[0]), &a[1] + t * (&b[1] - &a[1])]
}

/// Polynomial in one variable, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Q>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Q) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn x() -> Self {
        UniPoly::new(vec![Q::zero(), Q::one()])
    }

    /// Linear factor `z - r`.
    pub fn linear_root(r: &Q) -> Self {
        UniPoly::new(vec![-r.clone(), Q::one()])
    }

    /// `lead * prod (z - r_i)`.
    pub fn from_roots(lead: &Q, roots: &[Q]) -> Self {
        let mut p = UniPoly::constant(lead.clone());
        for r in roots {
            p = &p * &UniPoly::linear_root(r);
        }
        p
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lead(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, z: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + to_f64(c);
        }
        acc
    }

    pub fn deriv(&self) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Q::from_integer((k as i64).into()))
                .collect(),
        )
    }

    pub fn nth_deriv(&self, n: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.deriv();
        }
        p
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Self {
        let mut c = vec![Q::zero()];
        for (k, a) in self.coeffs.iter().enumerate() {
            c.push(a / Q::from_integer(((k + 1) as i64).into()));
        }
        UniPoly::new(c)
    }

    pub fn integrate(&self, a: &Q, b: &Q) -> Q {
        let f = self.integral();
        f.eval(b) - f.eval(a)
    }

    pub fn scale(&self, s: &Q) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(a + b z)`.
    pub fn compose_affine(&self, a: &Q, b: &Q) -> Self {
        let lin = UniPoly::new(vec![a.clone(), b.clone()]);
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &UniPoly::constant(c.clone());
        }
        acc
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let dl = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); r.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(r))
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.lead()))
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree part `p / gcd(p, p')`, made monic.
    pub fn squarefree(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.deriv());
        self.div_rem(&g).0.monic()
    }

    /// Lagrange interpolation through `(xs[k], ys[k])`.
    pub fn interpolate(xs: &[Q], ys: &[Q]) -> UniPoly {
        let mut out = UniPoly::zero();
        for (k, xk) in xs.iter().enumerate() {
            let mut basis = UniPoly::constant(ys[k].clone());
            for (m, xm) in xs.iter().enumerate() {
                if m != k {
                    let f = UniPoly::linear_root(xm).scale(&(Q::one() / (xk - xm)));
                    basis = &basis * &f;
                }
            }
            out = &out + &basis;
        }
        out
    }

    /// Multiplicity of `r` as a root.
    pub fn root_multiplicity(&self, r: &Q) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let mut p = self.clone();
        let mut k = 0;
        let lin = UniPoly::linear_root(r);
        while p.eval(r).is_zero() {
            p = p.div_rem(&lin).0;
            k += 1;
        }
        k
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::new(c)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => fmt_q(c),
                1 => format!("({})*z", fmt_q(c)),
                _ => format!("({})*z^{}", fmt_q(c), k),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(fmt_q))
    }
}

/// Polynomial in `(x, y)`; dimension-one data uses `x` only.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Q) -> Self {
        MultiPoly::monomial(c, 0, 0)
    }

    pub fn monomial(c: Q, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        MultiPoly { terms }
    }

    pub fn x() -> Self {
        MultiPoly::monomial(Q::one(), 1, 0)
    }

    pub fn y() -> Self {
        MultiPoly::monomial(Q::one(), 0, 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    fn add_term(&mut self, key: (u32, u32), c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = MultiPoly::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, c * s);
        }
        out
    }

    pub fn eval(&self, p: &Pt) -> Q {
        let mut acc = Q::zero();
        for ((i, j), c) in &self.terms {
            acc += c * pow(&p[0], *i) * pow(&p[1], *j);
        }
        acc
    }

    pub fn eval_f64(&self, p: [f64; 2]) -> f64 {
        self.terms
            .iter()
            .map(|((i, j), c)| to_f64(c) * p[0].powi(*i as i32) * p[1].powi(*j as i32))
            .sum()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = MultiPoly::constant(Q::one());
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Substitutes `x -> px`, `y -> py`.
    pub fn substitute(&self, px: &MultiPoly, py: &MultiPoly) -> Self {
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let mut xp = vec![MultiPoly::constant(Q::one())];
        for k in 0..max_i {
            xp.push(&xp[k as usize] * px);
        }
        let mut yp = vec![MultiPoly::constant(Q::one())];
        for k in 0..max_j {
            yp.push(&yp[k as usize] * py);
        }
        let mut out = MultiPoly::zero();
        for ((i, j), c) in &self.terms {
            let t = (&xp[*i as usize] * &yp[*j as usize]).scale(c);
            out = &out + &t;
        }
        out
    }

    /// Restriction `t -> f(a + t d)`.
    pub fn restrict(&self, a: &Pt, d: &Pt) -> UniPoly {
        let lx = UniPoly::new(vec![a[0].clone(), d[0].clone()]);
        let ly = UniPoly::new(vec![a[1].clone(), d[1].clone()]);
        let mut out = UniPoly::zero();
        for ((i, j), c) in &self.terms {
            let mut t = UniPoly::constant(c.clone());
            for _ in 0..*i {
                t = &t * &lx;
            }
            for _ in 0..*j {
                t = &t * &ly;
            }
            out = &out + &t;
        }
        out
    }

    pub fn dx(&self) -> Self {
        let mut out = MultiPoly::zero();
        for ((i, j), c) in &self.terms {
            if *i > 0 {
                out.add_term((i - 1, *j), c * Q::from_integer((*i as i64).into()));
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = MultiPoly::zero();
        for ((i, j), c) in &self.terms {
            if *j > 0 {
                out.add_term((*i, j - 1), c * Q::from_integer((*j as i64).into()));
            }
        }
        out
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &o.terms {
                out.add_term((i + k, j + l), a * b);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|((i, j), c)| format!("({})*x^{}*y^{}", fmt_q(c), i, j))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Affine function `c + a0 x + a1 y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub a: [Q; 2],
    pub c: Q,
}

impl Affine {
    pub fn new(a0: Q, a1: Q, c: Q) -> Self {
        Affine { a: [a0, a1], c }
    }

    pub fn zero() -> Self {
        Affine::new(Q::zero(), Q::zero(), Q::zero())
    }

    pub fn constant(c: Q) -> Self {
        Affine::new(Q::zero(), Q::zero(), c)
    }

    pub fn eval(&self, p: &Pt) -> Q {
        &self.a[0] * &p[0] + &self.a[1] * &p[1] + &self.c
    }

    pub fn eval_f64(&self, p: [f64; 2]) -> f64 {
        to_f64(&self.a[0]) * p[0] + to_f64(&self.a[1]) * p[1] + to_f64(&self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.a[0].is_zero() && self.a[1].is_zero() && self.c.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.a[0].is_zero() && self.a[1].is_zero()
    }

    pub fn scale(&self, s: &Q) -> Self {
        Affine::new(&self.a[0] * s, &self.a[1] * s, &self.c * s)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn add(&self, o: &Affine) -> Self {
        Affine::new(&self.a[0] + &o.a[0], &self.a[1] + &o.a[1], &self.c + &o.c)
    }

    pub fn sub(&self, o: &Affine) -> Self {
        self.add(&o.neg())
    }

    pub fn to_poly(&self) -> MultiPoly {
        &(&MultiPoly::constant(self.c.clone()) + &MultiPoly::monomial(self.a[0].clone(), 1, 0))
            + &MultiPoly::monomial(self.a[1].clone(), 0, 1)
    }

    /// Restriction to the segment `a + t d` as `(constant, slope)`.
    pub fn restrict(&self, a: &Pt, d: &Pt) -> (Q, Q) {
        (self.eval(a), &self.a[0] * &d[0] + &self.a[1] * &d[1])
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})*x + ({})*y", fmt_q(&self.c), fmt_q(&self.a[0]), fmt_q(&self.a[1]))
    }
}

impl Serialize for Affine {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Affine", 3)?;
        st.serialize_field("constant", &fmt_q(&self.c))?;
        st.serialize_field("x", &fmt_q(&self.a[0]))?;
        st.serialize_field("y", &fmt_q(&self.a[1]))?;
        st.end()
    }
}
