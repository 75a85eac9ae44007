//! Explicit extremal solutions built from one-variable polynomials: the
//! product and Calabi ansatze, the hyperbolic ambitoric ansatz and Bryant's
//! simplex potential.
//!
//! Every solution carries the labelled polygon it solves, in that polygon's
//! own coordinates `p`, and an affine chart `xi = M p + t` to the coordinates
//! in which the ansatz is written. The inverse Hessian transforms as
//! `H_p = M^-1 H_xi M^-T`.
//!
//! Boundary derivatives point inward: `A'(alpha_0) = 2 r_alpha[0]` and
//! `A'(alpha_inf) = -2 r_alpha[1]`, likewise for `B`; `r = 0` marks a cusp side.

use crate::partial::{monomial_over, PartialFractions};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use torex::error::{Result, TorexError};
use torex::extremal::{extremal_affine, Convention};
use torex::poly::sub_pt;
use torex::polytope::{Facet, LabelledPolytope};
use torex::rational::{fmt_q, q, qr, round_bits, to_f64, Q};
use torex::sturm::{isolate_roots, positive_on_open};
use torex::{linalg, Affine, Pt, UniPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AnsatzKind {
    Product,
    Calabi,
    Hyperbolic,
    Bryant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HyperbolicCase {
    FibreOnly,
    FibrePlusSection,
}

/// What a facet of the solved polygon is in the ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FacetRole {
    AlphaLow,
    AlphaHigh,
    BetaLow,
    BetaHigh,
    Axis1,
    Axis2,
    Hypotenuse,
}

fn ser_q2<S: Serializer>(x: &[Q; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(fmt_q))
}

fn ser_q2_opt<S: Serializer>(x: &Option<[Q; 2]>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.collect_seq(v.iter().map(fmt_q)),
        None => s.serialize_none(),
    }
}

fn ser_mat<S: Serializer>(x: &[[Q; 2]; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|row| [fmt_q(&row[0]), fmt_q(&row[1])]))
}

fn ser_polytope<S: Serializer>(p: &LabelledPolytope, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.to_document().serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryData {
    #[serde(serialize_with = "ser_q2")]
    pub alpha: [Q; 2],
    #[serde(serialize_with = "ser_q2")]
    pub beta: [Q; 2],
    #[serde(serialize_with = "ser_q2")]
    pub r_alpha: [Q; 2],
    #[serde(serialize_with = "ser_q2")]
    pub r_beta: [Q; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineChart {
    #[serde(serialize_with = "ser_mat")]
    pub m: [[Q; 2]; 2],
    #[serde(serialize_with = "ser_q2")]
    pub t: Pt,
    #[serde(skip)]
    minv: [[Q; 2]; 2],
}

fn inv2(m: &[[Q; 2]; 2]) -> Option<[[Q; 2]; 2]> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return None;
    }
    Some([[&m[1][1] / &det, -&m[0][1] / &det], [-&m[1][0] / &det, &m[0][0] / &det]])
}

fn mat_f64(m: &[[Q; 2]; 2]) -> [[f64; 2]; 2] {
    [[to_f64(&m[0][0]), to_f64(&m[0][1])], [to_f64(&m[1][0]), to_f64(&m[1][1])]]
}

impl AffineChart {
    pub fn identity() -> Self {
        let m = [[q(1), q(0)], [q(0), q(1)]];
        AffineChart { minv: m.clone(), m, t: [q(0), q(0)] }
    }

    pub fn new(m: [[Q; 2]; 2], t: Pt) -> Result<Self> {
        let minv = inv2(&m).ok_or_else(|| TorexError::MalformedDocument("singular chart".into()))?;
        Ok(AffineChart { m, t, minv })
    }

    pub fn apply(&self, p: &Pt) -> Pt {
        [
            &self.m[0][0] * &p[0] + &self.m[0][1] * &p[1] + &self.t[0],
            &self.m[1][0] * &p[0] + &self.m[1][1] * &p[1] + &self.t[1],
        ]
    }

    pub fn apply_f64(&self, p: [f64; 2]) -> [f64; 2] {
        let m = mat_f64(&self.m);
        [m[0][0] * p[0] + m[0][1] * p[1] + to_f64(&self.t[0]), m[1][0] * p[0] + m[1][1] * p[1] + to_f64(&self.t[1])]
    }

    /// `M^-1 H M^-T`.
    pub fn pull_exact(&self, h: &[[Q; 2]; 2]) -> [[Q; 2]; 2] {
        let a = &self.minv;
        let mut out = [[Q::zero(), Q::zero()], [Q::zero(), Q::zero()]];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Q::zero();
                for k in 0..2 {
                    for l in 0..2 {
                        acc += &a[i][k] * &h[k][l] * &a[j][l];
                    }
                }
                out[i][j] = acc;
            }
        }
        out
    }

    /// `M^-1 v`: a chart vector seen in polygon coordinates.
    pub fn vector_to_polytope_f64(&self, v: [f64; 2]) -> [f64; 2] {
        let a = mat_f64(&self.minv);
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    /// Affine function of the chart pulled back to polygon coordinates.
    pub fn pull_affine(&self, f: &Affine) -> Affine {
        let g0 = &f.a[0] * &self.m[0][0] + &f.a[1] * &self.m[1][0];
        let g1 = &f.a[0] * &self.m[0][1] + &f.a[1] * &self.m[1][1];
        let c = &f.c + &f.a[0] * &self.t[0] + &f.a[1] * &self.t[1];
        Affine::new(g0, g1, c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicParams {
    pub m: i64,
    pub case: HyperbolicCase,
    #[serde(with = "torex::rational::qstr")]
    pub b: Q,
    #[serde(with = "torex::rational::qstr")]
    pub alpha0: Q,
    #[serde(with = "torex::rational::qstr")]
    pub alpha_inf: Q,
    #[serde(with = "torex::rational::qstr")]
    pub alpha3: Q,
    /// Constant term of the quadratic factor of `B`.
    #[serde(with = "torex::rational::qstr")]
    pub q: Q,
    #[serde(with = "torex::rational::qstr")]
    pub c: Q,
    /// Divisor of the `alpha_0` line in its label (negative).
    #[serde(with = "torex::rational::qstr")]
    pub r_alpha0: Q,
    /// Isolating interval of `alpha_0`.
    #[serde(serialize_with = "ser_q2")]
    pub bracket: [Q; 2],
    /// `c b (b^2 + q) + kappa`, zero at the exact root.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub exact: bool,
    pub holds: bool,
    pub detail: String,
}

impl IdentityCheck {
    fn exact(name: &str, holds: bool, detail: String) -> Self {
        IdentityCheck { name: name.into(), exact: true, holds, detail }
    }
}

#[derive(Clone, Debug, Default)]
struct Antiderivatives {
    a: Vec<Option<PartialFractions>>,
    b: Vec<Option<PartialFractions>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmbitoricSolution {
    pub kind: AnsatzKind,
    pub a: Option<UniPoly>,
    pub b: Option<UniPoly>,
    /// Bryant labels `(a1, a2)`.
    #[serde(serialize_with = "ser_q2_opt")]
    pub labels: Option<[Q; 2]>,
    pub boundary: Option<BoundaryData>,
    pub hyperbolic: Option<HyperbolicParams>,
    #[serde(serialize_with = "ser_polytope")]
    pub polytope: LabelledPolytope,
    pub chart: AffineChart,
    pub roles: Vec<FacetRole>,
    #[serde(skip)]
    anti: Antiderivatives,
}

fn cubic_with_roots(lo: &Q, hi: &Q, r_lo: &Q, r_hi: &Q) -> Result<UniPoly> {
    if r_lo.is_zero() && r_hi.is_zero() {
        return Err(TorexError::OppositeCusps);
    }
    let len = hi - lo;
    // (x - lo)(x - hi) l(x) with l linear, l(lo) = -2 r_lo / len, l(hi) = -2 r_hi / len
    let l_lo = -(r_lo * q(2)) / &len;
    let l_hi = -(r_hi * q(2)) / &len;
    let slope = (&l_hi - &l_lo) / &len;
    let lin = UniPoly::new(vec![&l_lo - &slope * lo, slope]);
    let p = &UniPoly::from_roots(&q(1), &[lo.clone(), hi.clone()]) * &lin;
    if !positive_on_open(&p, lo, hi) {
        return Err(TorexError::PositivityFailure(format!("{p} on ({}, {})", fmt_q(lo), fmt_q(hi))));
    }
    Ok(p)
}

fn check_order(lo: &Q, hi: &Q, what: &str) -> Result<()> {
    if lo >= hi {
        return Err(TorexError::MalformedDocument(format!("{what}: need {} < {}", fmt_q(lo), fmt_q(hi))));
    }
    Ok(())
}

fn check_r(r: &[Q; 2]) -> Result<()> {
    if r.iter().any(|x| x.is_negative()) {
        return Err(TorexError::MalformedDocument("boundary scalings must be >= 0".into()));
    }
    Ok(())
}

/// Polynomials of the product ansatz: cubics with the prescribed roots and
/// inward derivatives.
pub fn product_polys(data: &BoundaryData) -> Result<(UniPoly, UniPoly)> {
    check_order(&data.alpha[0], &data.alpha[1], "alpha")?;
    check_order(&data.beta[0], &data.beta[1], "beta")?;
    check_r(&data.r_alpha)?;
    check_r(&data.r_beta)?;
    let a = cubic_with_roots(&data.alpha[0], &data.alpha[1], &data.r_alpha[0], &data.r_alpha[1])?;
    let b = cubic_with_roots(&data.beta[0], &data.beta[1], &data.r_beta[0], &data.r_beta[1])?;
    Ok((a, b))
}

/// Polynomials of the Calabi ansatz: `B` quadratic, `A` quartic with
/// `A''(0) = -B''(0)`.
pub fn calabi_polys(data: &BoundaryData) -> Result<(UniPoly, UniPoly)> {
    let [a0, ai] = &data.alpha;
    let [b0, bi] = &data.beta;
    check_order(a0, ai, "alpha")?;
    check_order(b0, bi, "beta")?;
    check_r(&data.r_alpha)?;
    check_r(&data.r_beta)?;
    if !a0.is_positive() {
        return Err(TorexError::MalformedDocument("need alpha_0 > 0".into()));
    }
    if data.r_beta[0] != data.r_beta[1] {
        return Err(TorexError::InconsistentBeta(fmt_q(&data.r_beta[0]), fmt_q(&data.r_beta[1])));
    }
    let rho = &data.r_beta[0];
    if rho.is_zero() {
        return Err(TorexError::PositivityFailure("B vanishes identically".into()));
    }
    let width = bi - b0;
    let b = UniPoly::from_roots(&(-(rho * q(2)) / &width), &[b0.clone(), bi.clone()]);
    let row = |x: &Q, k: usize| -> Vec<Q> { (0..5).map(|j| if j < k { Q::zero() } else { falling(j, k) * x.pow((j - k) as i32) }).collect() };
    let m = vec![row(a0, 0), row(ai, 0), row(a0, 1), row(ai, 1), vec![q(0), q(0), q(2), q(0), q(0)]];
    let rhs = vec![Q::zero(), Q::zero(), &data.r_alpha[0] * q(2), -(&data.r_alpha[1] * q(2)), -b.nth_deriv(2).coeff(0)];
    let coeffs = linalg::solve(&m, &rhs).ok_or(TorexError::SingularGram)?;
    let a = UniPoly::new(coeffs);
    if !positive_on_open(&a, a0, ai) {
        return Err(TorexError::PositivityFailure(format!("A = {a} on ({}, {})", fmt_q(a0), fmt_q(ai))));
    }
    Ok((a, b))
}

fn falling(j: usize, k: usize) -> Q {
    q(((j - k + 1)..=j).product::<usize>() as i64)
}

fn antiparallel_pairs(p: &LabelledPolytope) -> Vec<(usize, usize)> {
    let n = p.n_facets();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = p.facet(i).normal;
            let b = p.facet(j).normal;
            if a[0] == -b[0] && a[1] == -b[1] {
                out.push((i, j));
            }
        }
    }
    out
}

fn qpt(n: [i64; 2]) -> Pt {
    [q(n[0]), q(n[1])]
}

fn dot(a: &Pt, b: &Pt) -> Q {
    &a[0] * &b[0] + &a[1] * &b[1]
}

/// Chart-side normal `M^-T n` and offset of facet `j` under `xi = M p + t`.
fn facet_in_chart(chart: &AffineChart, f: &Facet) -> (Pt, Q) {
    let n = qpt(f.normal);
    let a = &chart.minv;
    let nn = [&a[0][0] * &n[0] + &a[1][0] * &n[1], &a[0][1] * &n[0] + &a[1][1] * &n[1]];
    // <n, p> + c with p = M^-1 (xi - t)
    let off = &f.offset - dot(&nn, &chart.t);
    (nn, off)
}

fn line_intersection(f: &Facet, g: &Facet) -> Option<Pt> {
    let a = qpt(f.normal);
    let b = qpt(g.normal);
    let det = &a[0] * &b[1] - &a[1] * &b[0];
    if det.is_zero() {
        return None;
    }
    let ci = -f.offset.clone();
    let cj = -g.offset.clone();
    Some([(&ci * &b[1] - &cj * &a[1]) / &det, (&a[0] * &cj - &b[0] * &ci) / &det])
}

/// A trapezoid put in the frame `x1 = xi1 > 0`, `y = xi2 / xi1`: the parallel
/// sides are `x1 = alpha_k`, the other two lie on lines `y = beta_k` through
/// the origin, with `0 <= beta_0 < 1` after an integral shear.
#[derive(Clone, Debug)]
pub struct TrapezoidFrame {
    pub chart: AffineChart,
    /// Facets at `alpha_0` and `alpha_inf`.
    pub sections: (usize, usize),
    /// Facets at `beta_0` and `beta_inf`.
    pub fibres: (usize, usize),
    /// Roots and label scalings read off the facets (`r = 0` on cusps).
    pub data: BoundaryData,
}

pub fn trapezoid_frame(p: &LabelledPolytope) -> Result<Option<TrapezoidFrame>> {
    let pairs = antiparallel_pairs(p);
    if p.dim() != 2 || p.n_facets() != 4 || pairs.len() != 1 {
        return Ok(None);
    }
    let (i, j) = pairs[0];
    let others: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
    let (k, l) = (others[0], others[1]);
    let apex = match line_intersection(p.facet(k), p.facet(l)) {
        Some(a) => a,
        None => return Ok(None),
    };
    let n = p.facet(i).normal;
    let sigma = if dot(&qpt(n), &sub_pt(&p.centroid(), &apex)).is_positive() { 1 } else { -1 };
    let n1 = [n[0] * sigma, n[1] * sigma];
    let e = num_integer::Integer::extended_gcd(&n1[0], &n1[1]);
    let g = e.gcd.signum();
    let mut m = [[q(n1[0]), q(n1[1])], [q(-e.y * g), q(e.x * g)]];
    let centred = |m: &[[Q; 2]; 2]| -> Result<AffineChart> {
        let t = AffineChart::new(m.clone(), [q(0), q(0)])?.apply(&apex);
        AffineChart::new(m.clone(), [-t[0].clone(), -t[1].clone()])
    };
    let chart0 = centred(&m)?;
    let (lo, hi) = if facet_in_chart(&chart0, p.facet(k)).0[1].is_positive() { (k, l) } else { (l, k) };
    let (nlo, _) = facet_in_chart(&chart0, p.facet(lo));
    let shear = -(-&nlo[0] / &nlo[1]).floor();
    m[1] = [&m[1][0] + &shear * &m[0][0], &m[1][1] + &shear * &m[0][1]];
    let chart = centred(&m)?;
    let (sec_lo, sec_hi) = if facet_in_chart(&chart, p.facet(i)).0[0].is_positive() { (i, j) } else { (j, i) };
    let alpha0 = -facet_in_chart(&chart, p.facet(sec_lo)).1;
    let alpha_inf = facet_in_chart(&chart, p.facet(sec_hi)).1;
    let fibre = |f: usize| -> (Q, Q) {
        let (nn, _) = facet_in_chart(&chart, p.facet(f));
        (-&nn[0] / &nn[1], &p.facet(f).weight / nn[1].abs())
    };
    let (beta0, rho0) = fibre(lo);
    let (beta_inf, rho_inf) = fibre(hi);
    let data = BoundaryData {
        r_alpha: [&alpha0 * &p.facet(sec_lo).weight, &alpha_inf * &p.facet(sec_hi).weight],
        alpha: [alpha0, alpha_inf],
        beta: [beta0, beta_inf],
        r_beta: [rho0, rho_inf],
    };
    Ok(Some(TrapezoidFrame { chart, sections: (sec_lo, sec_hi), fibres: (lo, hi), data }))
}

/// Hirzebruch trapezoid recognised up to lattice equivalence and scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HirzebruchShape {
    pub m: i64,
    /// Ratio of the long to the short section.
    #[serde(with = "torex::rational::qstr")]
    pub a: Q,
    pub frame_sections: (usize, usize),
    pub frame_fibres: (usize, usize),
}

/// `Some` when the polygon is a scaled Hirzebruch trapezoid with unit
/// weights on every non-cusp facet.
pub fn hirzebruch_shape(p: &LabelledPolytope) -> Result<Option<HirzebruchShape>> {
    let frame = match trapezoid_frame(p)? {
        Some(f) => f,
        None => return Ok(None),
    };
    if p.facets().iter().any(|f| !(f.is_cusp() || f.weight == q(1))) {
        return Ok(None);
    }
    let d = &frame.data;
    let width = &d.beta[1] - &d.beta[0];
    if !d.beta[0].is_zero() || !width.is_integer() || !d.alpha[0].is_positive() {
        return Ok(None);
    }
    Ok(Some(HirzebruchShape {
        m: width.to_integer().try_into().map_err(|_| TorexError::MalformedDocument("m too large".into()))?,
        a: &d.alpha[1] / &d.alpha[0],
        frame_sections: frame.sections,
        frame_fibres: frame.fibres,
    }))
}

impl AmbitoricSolution {
    fn finish(mut self) -> Result<Self> {
        let mut anti = Antiderivatives::default();
        let roots_a: Vec<Q> = match (&self.boundary, &self.hyperbolic) {
            (_, Some(h)) => vec![h.alpha0.clone(), h.alpha_inf.clone(), h.alpha3.clone()],
            (Some(d), None) => d.alpha.to_vec(),
            _ => Vec::new(),
        };
        let roots_b: Vec<Q> = match (&self.boundary, &self.hyperbolic) {
            (_, Some(h)) => {
                let mut v = vec![h.b.clone(), -h.b.clone()];
                if h.case == HyperbolicCase::FibrePlusSection {
                    v.push(&h.q / &h.b);
                }
                v
            }
            (Some(d), None) => d.beta.to_vec(),
            _ => Vec::new(),
        };
        let ks: &[usize] = match self.kind {
            AnsatzKind::Product => &[0],
            AnsatzKind::Calabi => &[0, 1],
            AnsatzKind::Hyperbolic => &[0, 1, 2],
            AnsatzKind::Bryant => &[],
        };
        if let (Some(a), Some(b)) = (&self.a, &self.b) {
            for k in 0..3 {
                let want = ks.contains(&k);
                let fa = if want && (k == 0 || self.kind != AnsatzKind::Calabi || k == 1) && a.degree().unwrap_or(0) > k {
                    Some(monomial_over(a, &roots_a, k)?)
                } else {
                    None
                };
                let fb = if want && (self.kind != AnsatzKind::Calabi || k == 0) && b.degree().unwrap_or(0) > k {
                    Some(monomial_over(b, &roots_b, k)?)
                } else {
                    None
                };
                anti.a.push(fa);
                anti.b.push(fb);
            }
        }
        self.anti = anti;
        Ok(self)
    }

    /// Product solution on the rectangle `[alpha_0, alpha_inf] x [beta_0, beta_inf]`.
    pub fn solve_product(data: &BoundaryData) -> Result<Self> {
        let (a, b) = product_polys(data)?;
        let facets = vec![
            Facet::new([0, 1], -data.beta[0].clone(), data.r_beta[0].clone())?,
            Facet::new([-1, 0], data.alpha[1].clone(), data.r_alpha[1].clone())?,
            Facet::new([0, -1], data.beta[1].clone(), data.r_beta[1].clone())?,
            Facet::new([1, 0], -data.alpha[0].clone(), data.r_alpha[0].clone())?,
        ];
        let polytope = LabelledPolytope::new(2, facets)?;
        AmbitoricSolution {
            kind: AnsatzKind::Product,
            a: Some(a),
            b: Some(b),
            labels: None,
            boundary: Some(data.clone()),
            hyperbolic: None,
            polytope,
            chart: AffineChart::identity(),
            roles: vec![FacetRole::BetaLow, FacetRole::AlphaHigh, FacetRole::BetaHigh, FacetRole::AlphaLow],
            anti: Antiderivatives::default(),
        }
        .finish()
    }

    /// Product solution of a labelled parallelogram; `None` for other shapes.
    pub fn product_from_polytope(p: &LabelledPolytope) -> Result<Option<Self>> {
        let pairs = antiparallel_pairs(p);
        if p.dim() != 2 || p.n_facets() != 4 || pairs.len() != 2 {
            return Ok(None);
        }
        let (i1, j1) = pairs[0];
        let (i2, j2) = pairs[1];
        let n = p.facet(i1).normal;
        let m = p.facet(i2).normal;
        let chart = AffineChart::new([[q(n[0]), q(n[1])], [q(m[0]), q(m[1])]], [q(0), q(0)])?;
        let data = BoundaryData {
            alpha: [-p.facet(i1).offset.clone(), p.facet(j1).offset.clone()],
            beta: [-p.facet(i2).offset.clone(), p.facet(j2).offset.clone()],
            r_alpha: [p.facet(i1).weight.clone(), p.facet(j1).weight.clone()],
            r_beta: [p.facet(i2).weight.clone(), p.facet(j2).weight.clone()],
        };
        let (a, b) = product_polys(&data)?;
        let mut roles = vec![FacetRole::AlphaLow; 4];
        roles[j1] = FacetRole::AlphaHigh;
        roles[i2] = FacetRole::BetaLow;
        roles[j2] = FacetRole::BetaHigh;
        Ok(Some(
            AmbitoricSolution {
                kind: AnsatzKind::Product,
                a: Some(a),
                b: Some(b),
                labels: None,
                boundary: Some(data),
                hyperbolic: None,
                polytope: p.clone(),
                chart,
                roles,
                anti: Antiderivatives::default(),
            }
            .finish()?,
        ))
    }

    /// Calabi solution on the trapezoid `{alpha_0 <= x1 <= alpha_inf, beta_0 x1 <= x2 <= beta_inf x1}`.
    pub fn solve_calabi(data: &BoundaryData) -> Result<Self> {
        let (a, b) = calabi_polys(data)?;
        let rho = data.r_beta[0].clone();
        let facets = vec![
            Facet::from_raw([-data.beta[0].clone(), q(1)], q(0), rho.clone())?,
            Facet::new([-1, 0], data.alpha[1].clone(), &data.r_alpha[1] / &data.alpha[1])?,
            Facet::from_raw([data.beta[1].clone(), q(-1)], q(0), rho)?,
            Facet::new([1, 0], -data.alpha[0].clone(), &data.r_alpha[0] / &data.alpha[0])?,
        ];
        let polytope = LabelledPolytope::new(2, facets)?;
        AmbitoricSolution {
            kind: AnsatzKind::Calabi,
            a: Some(a),
            b: Some(b),
            labels: None,
            boundary: Some(data.clone()),
            hyperbolic: None,
            polytope,
            chart: AffineChart::identity(),
            roles: vec![FacetRole::BetaLow, FacetRole::AlphaHigh, FacetRole::BetaHigh, FacetRole::AlphaLow],
            anti: Antiderivatives::default(),
        }
        .finish()
    }

    /// Calabi solution of a labelled trapezoid with one parallel pair whose
    /// cusps (if any) lie on the parallel sides; `None` for other shapes.
    pub fn calabi_from_polytope(p: &LabelledPolytope) -> Result<Option<Self>> {
        let frame = match trapezoid_frame(p)? {
            Some(f) => f,
            None => return Ok(None),
        };
        let (lo, hi) = frame.fibres;
        if p.facet(lo).is_cusp() || p.facet(hi).is_cusp() {
            return Ok(None);
        }
        let (a, b) = calabi_polys(&frame.data)?;
        let mut roles = vec![FacetRole::AlphaLow; 4];
        roles[frame.sections.1] = FacetRole::AlphaHigh;
        roles[lo] = FacetRole::BetaLow;
        roles[hi] = FacetRole::BetaHigh;
        Ok(Some(
            AmbitoricSolution {
                kind: AnsatzKind::Calabi,
                a: Some(a),
                b: Some(b),
                labels: None,
                boundary: Some(frame.data),
                hyperbolic: None,
                polytope: p.clone(),
                chart: frame.chart,
                roles,
                anti: Antiderivatives::default(),
            }
            .finish()?,
        ))
    }

    /// Bryant's potential on the standard simplex with the cusp on
    /// `1 - x1 - x2 = 0` and labels `a1 x1`, `a2 x2`.
    pub fn bryant(labels: [Q; 2]) -> Result<Self> {
        if labels.iter().any(|a| !a.is_positive()) {
            return Err(TorexError::MalformedDocument("Bryant labels must be positive".into()));
        }
        let facets = vec![
            Facet::new([1, 0], q(0), Q::one() / &labels[0])?,
            Facet::new([0, 1], q(0), Q::one() / &labels[1])?,
            Facet::new([-1, -1], q(1), q(0))?,
        ];
        let polytope = LabelledPolytope::new(2, facets)?;
        Ok(AmbitoricSolution {
            kind: AnsatzKind::Bryant,
            a: None,
            b: None,
            labels: Some(labels),
            boundary: None,
            hyperbolic: None,
            polytope,
            chart: AffineChart::identity(),
            roles: vec![FacetRole::Axis1, FacetRole::Axis2, FacetRole::Hypotenuse],
            anti: Antiderivatives::default(),
        })
    }

    /// Bryant solution of a simplex already in standard position, the cusp on
    /// `1 - x1 - x2 = 0`.
    pub fn bryant_from_standard(p: &LabelledPolytope) -> Result<Self> {
        let bad = || TorexError::NotSimplexNormalized("expected x1 >= 0, x2 >= 0, 1 - x1 - x2 >= 0 with the cusp on the last".into());
        if p.dim() != 2 || p.n_facets() != 3 {
            return Err(bad());
        }
        let find = |n: [i64; 2], off: Q| p.facets().iter().position(|f| f.normal == n && f.offset == off);
        let (i, j, k) = match (find([1, 0], q(0)), find([0, 1], q(0)), find([-1, -1], q(1))) {
            (Some(i), Some(j), Some(k)) => (i, j, k),
            _ => return Err(bad()),
        };
        if !p.facet(k).is_cusp() || p.facet(i).is_cusp() || p.facet(j).is_cusp() {
            return Err(bad());
        }
        let mut s = Self::bryant([Q::one() / &p.facet(i).weight, Q::one() / &p.facet(j).weight])?;
        let mut roles = vec![FacetRole::Hypotenuse; 3];
        roles[i] = FacetRole::Axis1;
        roles[j] = FacetRole::Axis2;
        s.roles = roles;
        s.polytope = p.clone();
        Ok(s)
    }

    /// Bryant solution of a triangle with exactly one cusp facet, mapped to
    /// standard position by an affine chart; `None` for other inputs.
    pub fn bryant_from_polytope(p: &LabelledPolytope) -> Result<Option<Self>> {
        if p.dim() != 2 || p.n_facets() != 3 || p.cusps().len() != 1 {
            return Ok(None);
        }
        let k = p.cusps()[0];
        let i = p.next_facet(k);
        let j = p.next_facet(i);
        let apex = match line_intersection(p.facet(i), p.facet(j)) {
            Some(a) => a,
            None => return Ok(None),
        };
        let (ni, nj) = (qpt(p.facet(i).normal), qpt(p.facet(j).normal));
        let c0 = AffineChart::new([ni.clone(), nj.clone()], [q(0), q(0)])?;
        let t0 = c0.apply(&apex);
        let chart = AffineChart::new([ni, nj], [-t0[0].clone(), -t0[1].clone()])?;
        let (nk, off) = facet_in_chart(&chart, p.facet(k));
        if !(nk[0] == nk[1] && nk[0] == -off.clone() && off.is_positive()) {
            return Err(TorexError::NotSimplexNormalized("the cusp facet does not map to x1 + x2 = 1".into()));
        }
        let mut s = Self::bryant([Q::one() / &p.facet(i).weight, Q::one() / &p.facet(j).weight])?;
        let mut roles = vec![FacetRole::Hypotenuse; 3];
        roles[i] = FacetRole::Axis1;
        roles[j] = FacetRole::Axis2;
        s.roles = roles;
        s.polytope = p.clone();
        s.chart = chart;
        Ok(Some(s))
    }

    /// First ansatz that fits the polygon: product, Calabi or Bryant.
    pub fn from_polytope(p: &LabelledPolytope) -> Result<Option<Self>> {
        if let Some(s) = Self::product_from_polytope(p)? {
            return Ok(Some(s));
        }
        if let Some(s) = Self::calabi_from_polytope(p)? {
            return Ok(Some(s));
        }
        Self::bryant_from_polytope(p)
    }

    pub fn inside(&self, p: &Pt) -> bool {
        self.polytope.facets().iter().all(|f| f.reference_label().eval(p).is_positive())
    }

    pub fn inside_f64(&self, p: [f64; 2]) -> bool {
        self.polytope.facets().iter().all(|f| f.reference_label().eval_f64(p) > 0.0)
    }

    /// Inverse Hessian in chart coordinates, exact, without a domain check.
    fn chart_h_exact(&self, xi: &Pt) -> Option<[[Q; 2]; 2]> {
        match self.kind {
            AnsatzKind::Product => {
                let (a, b) = (self.a.as_ref()?, self.b.as_ref()?);
                Some([[a.eval(&xi[0]), Q::zero()], [Q::zero(), b.eval(&xi[1])]])
            }
            AnsatzKind::Calabi => {
                let (a, b) = (self.a.as_ref()?, self.b.as_ref()?);
                let x = &xi[0];
                let y = &xi[1] / x;
                let av = a.eval(x);
                let bv = b.eval(&y);
                let h11 = &av / x;
                let h12 = &y * &av / x;
                let h22 = (x * x * &bv + &y * &y * &av) / x;
                Some([[h11, h12.clone()], [h12, h22]])
            }
            AnsatzKind::Bryant => {
                let [a1, a2] = self.labels.as_ref()?;
                let (x1, x2) = (&xi[0], &xi[1]);
                let d = Q::one() - x1 - x2;
                let s = a1 * x1 + a2 * x2;
                let sd = &s / (&d * &d);
                let half = qr(1, 2);
                let u11 = &half * (a1 / x1 + a1 * q(2) / &d + &sd);
                let u12 = &half * ((a1 + a2) / &d + &sd);
                let u22 = &half * (a2 / x2 + a2 * q(2) / &d + &sd);
                let det = &u11 * &u22 - &u12 * &u12;
                Some([[&u22 / &det, -&u12 / &det], [-&u12 / &det, &u11 / &det]])
            }
            AnsatzKind::Hyperbolic => None,
        }
    }

    /// Exact inverse Hessian at a polygon point when the chart is rational
    /// (`None` for the hyperbolic ansatz).
    pub fn evaluate_h_exact(&self, p: &Pt) -> Result<Option<[[Q; 2]; 2]>> {
        if !self.inside(p) {
            return Err(TorexError::OutsideDomain(format!("({}, {})", fmt_q(&p[0]), fmt_q(&p[1]))));
        }
        Ok(self.evaluate_h_exact_unchecked(p))
    }

    /// As [`Self::evaluate_h_exact`] without the domain check; the formulas
    /// are rational and extend past the boundary.
    pub fn evaluate_h_exact_unchecked(&self, p: &Pt) -> Option<[[Q; 2]; 2]> {
        self.chart_h_exact(&self.chart.apply(p)).map(|h| self.chart.pull_exact(&h))
    }

    /// Hyperbolic chart: `(x, y)` from momenta, `x > y`.
    fn hyperbolic_xy(xi: [f64; 2]) -> Option<(f64, f64)> {
        let (x1, x2) = (xi[0], xi[1]);
        if x1 == 0.0 {
            return None;
        }
        let s = -1.0 / x1;
        let pr = -x2 / x1;
        let disc = s * s - 4.0 * pr;
        if disc < 0.0 {
            return None;
        }
        let r = disc.sqrt();
        let x = if s >= 0.0 { (s + r) / 2.0 } else { (s - r) / 2.0 };
        let y = if x != 0.0 { pr / x } else { s - x };
        Some((x.max(y), x.min(y)))
    }

    /// Hyperbolic `H` at a polygon point in dyadic arithmetic with 128
    /// fractional bits, the square root refined by Newton steps. Finite
    /// differences of this stay accurate at step sizes where the `f64` path
    /// loses digits.
    pub fn hyperbolic_h_precise(&self, p: &Pt) -> Option<[[Q; 2]; 2]> {
        const BITS: u32 = 128;
        let rnd = |x: &Q| round_bits(x, BITS);
        let (m, minv) = (&self.chart.m, &self.chart.minv);
        let xi: [Q; 2] = [0, 1].map(|i| rnd(&(rnd(&m[i][0]) * &p[0] + rnd(&m[i][1]) * &p[1] + &self.chart.t[i])));
        if xi[0].is_zero() {
            return None;
        }
        let s = rnd(&-xi[0].recip());
        let pr = rnd(&(-&xi[1] / &xi[0]));
        let disc = &s * &s - q(4) * &pr;
        if disc.is_negative() {
            return None;
        }
        let mut r = torex::rational::from_f64(to_f64(&disc).sqrt());
        if !r.is_zero() {
            for _ in 0..4 {
                r = rnd(&((&r + &disc / &r) / q(2)));
            }
        }
        let x = if s.is_negative() { (&s - &r) / q(2) } else { (&s + &r) / q(2) };
        let y = if x.is_zero() { &s - &x } else { rnd(&(&pr / &x)) };
        let (x, y) = if x >= y { (x, y) } else { (y, x) };
        let horner = |f: &UniPoly, z: &Q| f.coeffs().iter().rev().fold(Q::zero(), |acc, c| rnd(&(acc * z + rnd(c))));
        let a = horner(self.a.as_ref()?, &x);
        let b = horner(self.b.as_ref()?, &y);
        let den = (&x - &y) * (&x + &y).pow(3);
        let u = [q(1), &y * &y];
        let w = [q(1), &x * &x];
        let mut h: [[Q; 2]; 2] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = rnd(&((&a * &u[i] * &u[j] + &b * &w[i] * &w[j]) / &den));
            }
        }
        let a = [0, 1].map(|i| [0, 1].map(|j| rnd(&minv[i][j])));
        let mut out: [[Q; 2]; 2] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[i][j] += &a[i][k] * &h[k][l] * &a[j][l];
                    }
                }
            }
        }
        Some(out)
    }

    /// `(A(x), B(y), den, u, w)` with `H_xi = (A u u^T + B w w^T) / den`.
    fn hyperbolic_parts(&self, xi: [f64; 2]) -> Option<(f64, f64, f64, [f64; 2], [f64; 2])> {
        let (x, y) = Self::hyperbolic_xy(xi)?;
        let a = self.a.as_ref()?.eval_f64(x);
        let b = self.b.as_ref()?.eval_f64(y);
        let den = (x - y) * (x + y).powi(3);
        Some((a, b, den, [1.0, y * y], [1.0, x * x]))
    }

    /// Inverse Hessian at a polygon point.
    pub fn evaluate_h(&self, p: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        if !self.inside_f64(p) {
            return Err(TorexError::OutsideDomain(format!("({}, {})", p[0], p[1])));
        }
        self.evaluate_h_unchecked(p)
    }

    pub fn evaluate_h_unchecked(&self, p: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        if self.kind == AnsatzKind::Hyperbolic {
            let xi = self.chart.apply_f64(p);
            let (a, b, den, u, w) = self.hyperbolic_parts(xi).ok_or_else(|| TorexError::OutsideDomain(format!("({}, {})", p[0], p[1])))?;
            let tu = self.chart.vector_to_polytope_f64(u);
            let tw = self.chart.vector_to_polytope_f64(w);
            let mut h = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] = (a * tu[i] * tu[j] + b * tw[i] * tw[j]) / den;
                }
            }
            return Ok(h);
        }
        let pq = [torex::rational::from_f64(p[0]), torex::rational::from_f64(p[1])];
        let h = self.evaluate_h_exact_unchecked(&pq).ok_or(TorexError::UnknownChart(0))?;
        Ok([[to_f64(&h[0][0]), to_f64(&h[0][1])], [to_f64(&h[1][0]), to_f64(&h[1][1])]])
    }

    /// `H(v, v)` at a polygon point for a covector `v`, avoiding cancellation
    /// in the hyperbolic chart.
    pub fn h_quad(&self, p: [f64; 2], v: [f64; 2]) -> Result<f64> {
        if self.kind == AnsatzKind::Hyperbolic {
            let xi = self.chart.apply_f64(p);
            let (a, b, den, u, w) = self.hyperbolic_parts(xi).ok_or_else(|| TorexError::OutsideDomain(format!("({}, {})", p[0], p[1])))?;
            let tu = self.chart.vector_to_polytope_f64(u);
            let tw = self.chart.vector_to_polytope_f64(w);
            let pu = tu[0] * v[0] + tu[1] * v[1];
            let pw = tw[0] * v[0] + tw[1] * v[1];
            return Ok((a * pu * pu + b * pw * pw) / den);
        }
        let h = self.evaluate_h_unchecked(p)?;
        Ok(h[0][0] * v[0] * v[0] + 2.0 * h[0][1] * v[0] * v[1] + h[1][1] * v[1] * v[1])
    }

    /// Symplectic potential at a polygon point, up to an affine function.
    pub fn symplectic_potential(&self, p: [f64; 2]) -> Result<f64> {
        if !self.inside_f64(p) {
            return Err(TorexError::OutsideDomain(format!("({}, {})", p[0], p[1])));
        }
        let xi = self.chart.apply_f64(p);
        let fa = |k: usize| self.anti.a.get(k).and_then(|f| f.as_ref());
        let fb = |k: usize| self.anti.b.get(k).and_then(|f| f.as_ref());
        let missing = || TorexError::UnknownChart(0);
        match self.kind {
            AnsatzKind::Product => Ok(fa(0).ok_or_else(missing)?.eval_order(xi[0], 2) + fb(0).ok_or_else(missing)?.eval_order(xi[1], 2)),
            AnsatzKind::Calabi => {
                let x = xi[0];
                let y = xi[1] / x;
                Ok(x * fb(0).ok_or_else(missing)?.eval_order(y, 2) + fa(1).ok_or_else(missing)?.eval_order(x, 2))
            }
            AnsatzKind::Hyperbolic => {
                let (x, y) = Self::hyperbolic_xy(xi).ok_or_else(missing)?;
                let (s, pr) = (x + y, x * y);
                let int = |fs: &[Option<PartialFractions>], z: f64| -> Result<f64> {
                    let get = |k: usize| fs.get(k).and_then(|f| f.as_ref()).ok_or_else(missing);
                    Ok(get(2)?.eval_order(z, 1) - s * get(1)?.eval_order(z, 1) + pr * get(0)?.eval_order(z, 1))
                };
                Ok((-int(&self.anti.a, x)? + int(&self.anti.b, y)?) / s)
            }
            AnsatzKind::Bryant => {
                let [a1, a2] = self.labels.as_ref().ok_or_else(missing)?;
                let (a1, a2) = (to_f64(a1), to_f64(a2));
                let (x1, x2) = (xi[0], xi[1]);
                let d = 1.0 - x1 - x2;
                Ok(0.5 * (a1 * x1 * x1.ln() + a2 * x2 * x2.ln() - (a1 * x1 + a2 * x2) * d.ln()))
            }
        }
    }

    /// Closed-form scalar curvature where the ansatz provides one.
    pub fn closed_form_scalar(&self) -> Option<ScalarCurvature> {
        let (a, b) = (self.a.as_ref()?, self.b.as_ref()?);
        match self.kind {
            AnsatzKind::Product => {
                // -(A''(xi1) + B''(xi2)), affine in xi
                let a2 = a.nth_deriv(2);
                let b2 = b.nth_deriv(2);
                let s = Affine::new(-a2.coeff(1), -b2.coeff(1), -(a2.coeff(0) + b2.coeff(0)));
                Some(ScalarCurvature::Affine(self.chart.pull_affine(&s)))
            }
            AnsatzKind::Calabi => {
                // -(A''(x) + B''(y)) / x = -(A'''(0) + A''''(0) x / 2)
                let a3 = a.nth_deriv(3);
                let s = Affine::new(-(a3.coeff(1) * qr(1, 2)), q(0), -a3.coeff(0));
                Some(ScalarCurvature::Affine(self.chart.pull_affine(&s)))
            }
            _ => None,
        }
    }

    /// Exact identities and positivity certificates of the construction.
    pub fn identities(&self) -> Result<Vec<IdentityCheck>> {
        let mut out = Vec::new();
        let s_poly = extremal_affine(&self.polytope, Convention::Main)?;
        match self.kind {
            AnsatzKind::Product | AnsatzKind::Calabi => {
                let d = self.boundary.as_ref().ok_or(TorexError::UnknownChart(0))?;
                let (a, b) = (self.a.as_ref().unwrap(), self.b.as_ref().unwrap());
                let da = a.deriv();
                let db = b.deriv();
                let (ra, rb) = (d.r_alpha.clone(), d.r_beta.clone());
                out.push(IdentityCheck::exact("A(alpha_k) = 0", a.eval(&d.alpha[0]).is_zero() && a.eval(&d.alpha[1]).is_zero(), a.to_string()));
                out.push(IdentityCheck::exact("B(beta_k) = 0", b.eval(&d.beta[0]).is_zero() && b.eval(&d.beta[1]).is_zero(), b.to_string()));
                let ok_a = da.eval(&d.alpha[0]) == &ra[0] * q(2) && da.eval(&d.alpha[1]) == -(&ra[1] * q(2));
                out.push(IdentityCheck::exact("A'(alpha_k) = +-2 r_alpha", ok_a, format!("{}, {}", fmt_q(&da.eval(&d.alpha[0])), fmt_q(&da.eval(&d.alpha[1])))));
                let ok_b = db.eval(&d.beta[0]) == &rb[0] * q(2) && db.eval(&d.beta[1]) == -(&rb[1] * q(2));
                out.push(IdentityCheck::exact("B'(beta_k) = +-2 r_beta", ok_b, format!("{}, {}", fmt_q(&db.eval(&d.beta[0])), fmt_q(&db.eval(&d.beta[1])))));
                for (k, r) in ra.iter().enumerate() {
                    if r.is_zero() {
                        let m = a.root_multiplicity(&d.alpha[k]);
                        out.push(IdentityCheck::exact(&format!("double root of A at alpha_{k}"), m == 2, format!("multiplicity {m}")));
                    }
                }
                if self.kind == AnsatzKind::Calabi {
                    let v = a.nth_deriv(2).coeff(0) + b.nth_deriv(2).coeff(0);
                    out.push(IdentityCheck::exact("A''(0) + B''(0) = 0", v.is_zero(), fmt_q(&v)));
                }
                out.push(IdentityCheck::exact("A > 0 on (alpha_0, alpha_inf)", positive_on_open(a, &d.alpha[0], &d.alpha[1]), "Sturm count".into()));
                out.push(IdentityCheck::exact("B > 0 on (beta_0, beta_inf)", positive_on_open(b, &d.beta[0], &d.beta[1]), "Sturm count".into()));
                if let Some(ScalarCurvature::Affine(s)) = self.closed_form_scalar() {
                    out.push(IdentityCheck::exact("scalar curvature = extremal affine function", s == s_poly, format!("{s} vs {s_poly}")));
                }
            }
            AnsatzKind::Hyperbolic => {
                let h = self.hyperbolic.as_ref().ok_or(TorexError::UnknownChart(0))?;
                let (a, b) = (self.a.as_ref().unwrap(), self.b.as_ref().unwrap());
                for k in [0usize, 2, 4] {
                    let v = a.coeff(k) + b.coeff(k);
                    out.push(IdentityCheck::exact(&format!("a{k} + b{k} = 0"), v.is_zero(), fmt_q(&v)));
                }
                out.push(IdentityCheck::exact("A(alpha_0) = A(alpha_inf) = A'(alpha_inf) = 0", a.eval(&h.alpha0).is_zero() && a.root_multiplicity(&h.alpha_inf) == 2, a.to_string()));
                let da = a.deriv().eval(&h.alpha0);
                out.push(IdentityCheck::exact("A'(alpha_0) = -2 r_alpha0", da == -(&h.r_alpha0 * q(2)), fmt_q(&da)));
                out.push(IdentityCheck::exact("B(-b) = B(b) = 0", b.eval(&h.b).is_zero() && b.eval(&-h.b.clone()).is_zero(), b.to_string()));
                out.push(IdentityCheck::exact("alpha_3 < 0", h.alpha3.is_negative(), fmt_q(&h.alpha3)));
                if h.case == HyperbolicCase::FibrePlusSection {
                    let beta3 = &h.q / &h.b;
                    out.push(IdentityCheck::exact("beta_3 > b", beta3 > h.b, fmt_q(&beta3)));
                    out.push(IdentityCheck::exact("double root of B at b", b.root_multiplicity(&h.b) == 2, String::new()));
                }
                out.push(IdentityCheck::exact("A > 0 on (alpha_0, alpha_inf)", positive_on_open(a, &h.alpha0, &h.alpha_inf), "Sturm count".into()));
                out.push(IdentityCheck::exact("B > 0 on (-b, b)", positive_on_open(b, &-h.b.clone(), &h.b), "Sturm count".into()));
                let dbm = to_f64(&b.deriv().eval(&-h.b.clone()));
                out.push(IdentityCheck {
                    name: "B'(-b) = 2 at the isolated root".into(),
                    exact: false,
                    holds: (dbm - 2.0).abs() < 1e-12,
                    detail: format!("{dbm:e}; residual {:e}", h.residual),
                });
            }
            AnsatzKind::Bryant => {
                let [a1, a2] = self.labels.as_ref().ok_or(TorexError::UnknownChart(0))?;
                out.push(IdentityCheck::exact(
                    "labels positive (Hessian positive definite by Cauchy-Schwarz)",
                    a1.is_positive() && a2.is_positive(),
                    format!("{}, {}", fmt_q(a1), fmt_q(a2)),
                ));
                // H is a cubic polynomial, so the central stencil is exact
                let h = qr(1, 1000);
                let pts = [[qr(1, 5), qr(1, 5)], [qr(1, 2), qr(1, 4)], [qr(1, 4), qr(3, 5)]];
                let mut ok = true;
                for pt in &pts {
                    let p = [self.chart_inverse(&pt[0], &pt[1])];
                    let v = crate::verify::abreu_operator_exact(self, &p[0], &h)?.ok_or(TorexError::UnknownChart(0))?;
                    ok &= v == s_poly.eval(&p[0]);
                }
                out.push(IdentityCheck::exact("scalar curvature = extremal affine function", ok, "three points".into()));
            }
        }
        Ok(out)
    }

    /// Copy with `extra` added to `A`, keeping the polygon; used to check that
    /// the verification layer detects non-solutions.
    pub fn perturb_a(&self, extra: &UniPoly) -> Self {
        let mut s = self.clone();
        s.a = s.a.as_ref().map(|a| a + extra);
        s.anti = Antiderivatives::default();
        s
    }

    /// Polygon point whose chart image is `(x, y)`.
    pub fn chart_inverse(&self, x: &Q, y: &Q) -> Pt {
        let a = &self.chart.minv;
        let v = [x - &self.chart.t[0], y - &self.chart.t[1]];
        [&a[0][0] * &v[0] + &a[0][1] * &v[1], &a[1][0] * &v[0] + &a[1][1] * &v[1]]
    }

    /// Third derivative of `A` (alpha sides) or `B` (beta sides) at the root of
    /// a cusp facet.
    pub fn cusp_third_derivative(&self, facet: usize) -> Option<Q> {
        let d = self.boundary.as_ref()?;
        match self.roles.get(facet)? {
            FacetRole::AlphaLow => Some(self.a.as_ref()?.nth_deriv(3).eval(&d.alpha[0])),
            FacetRole::AlphaHigh => Some(self.a.as_ref()?.nth_deriv(3).eval(&d.alpha[1])),
            FacetRole::BetaLow => Some(self.b.as_ref()?.nth_deriv(3).eval(&d.beta[0])),
            FacetRole::BetaHigh => Some(self.b.as_ref()?.nth_deriv(3).eval(&d.beta[1])),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarCurvature {
    Affine(Affine),
}

/// Numerator in `alpha_0` of `c b (b^2 + q) + kappa`, with `kappa = 1` when only
/// the fibre is a cusp and `kappa = 1/2` when the section `y = b` is one too.
pub fn hyperbolic_residual_poly(m: i64, b: &Q, alpha_inf: &Q, case: HyperbolicCase) -> UniPoly {
    let kappa = match case {
        HyperbolicCase::FibreOnly => q(1),
        HyperbolicCase::FibrePlusSection => qr(1, 2),
    };
    let b2 = b * b;
    let ai = alpha_inf;
    let ai2 = ai * ai;
    let z = UniPoly::x();
    let cst = |v: Q| UniPoly::constant(v);
    // N1 = b^2 + ai^2 + 2 ai z, D1 = 2 ai + z (1 + ai^2 / b^2)
    let n1 = UniPoly::new(vec![&b2 + &ai2, ai * q(2)]);
    let d1 = UniPoly::new(vec![ai * q(2), Q::one() + &ai2 / &b2]);
    let left = &(&(&(&z * &d1) + &n1) * &UniPoly::new(vec![ai.clone(), q(-1)])) * &cst(&kappa * (&ai2 - &b2));
    let inner = &(&d1 * &cst(b2.clone())) + &(&(&z * &n1) * &cst(&ai2 / &b2));
    let right = &(&UniPoly::new(vec![ai.clone(), q(1)]) * &inner) * &cst(q(2) * b / q(m));
    &left - &right
}

/// Isolating intervals of admissible `alpha_0` in `(b, alpha_inf)`.
pub fn hyperbolic_roots(m: i64, b: &Q, alpha_inf: &Q, case: HyperbolicCase) -> Result<Vec<[Q; 2]>> {
    if m < 1 || !b.is_positive() || alpha_inf <= b {
        return Err(TorexError::MalformedDocument("need m >= 1 and 0 < b < alpha_inf".into()));
    }
    let p = hyperbolic_residual_poly(m, b, alpha_inf, case);
    let width = Q::new(1.into(), num_bigint::BigInt::one() << 110u32);
    Ok(isolate_roots(&p, b, alpha_inf, &width).into_iter().filter(|(_, hi)| hi < alpha_inf).map(|(lo, hi)| [lo, hi]).collect())
}

impl AmbitoricSolution {
    /// Hyperbolic solution for the largest admissible `alpha_0`.
    pub fn solve_hyperbolic(m: i64, b: &Q, alpha_inf: &Q, case: HyperbolicCase) -> Result<Self> {
        let roots = hyperbolic_roots(m, b, alpha_inf, case)?;
        let last = roots.last().ok_or_else(|| {
            TorexError::NoRootInInterval(format!("m = {m}, b = {}, alpha_inf = {}, {case:?}", fmt_q(b), fmt_q(alpha_inf)))
        })?;
        Self::solve_hyperbolic_bracket(m, b, alpha_inf, case, last.clone())
    }

    /// Hyperbolic solution at the midpoint of an isolating interval of `alpha_0`.
    pub fn solve_hyperbolic_bracket(m: i64, b: &Q, alpha_inf: &Q, case: HyperbolicCase, bracket: [Q; 2]) -> Result<Self> {
        let a0 = (&bracket[0] + &bracket[1]) * qr(1, 2);
        let ai = alpha_inf.clone();
        let b2 = b * b;
        let ai2 = &ai * &ai;
        let n1 = &b2 + &ai2 + &a0 * &ai * q(2);
        let d1 = &ai * q(2) + &a0 + &ai2 * &a0 / &b2;
        let alpha3 = -(&n1 / &d1);
        let qq = &ai2 * &a0 / &b2 * &n1 / &d1;
        let c = -(q(2) / q(m)) * (&ai + &a0) / ((&a0 - &alpha3) * (&ai - &a0) * (&ai2 - &b2));
        let r_alpha0 = (&a0 * &a0 - &ai2) / (&ai2 - &b2) / q(m);
        let a = UniPoly::from_roots(&-c.clone(), &[a0.clone(), ai.clone(), ai.clone(), alpha3.clone()]);
        let (bpoly, kappa) = match case {
            HyperbolicCase::FibreOnly => (
                &UniPoly::from_roots(&c, &[b.clone(), -b.clone()]) * &UniPoly::new(vec![qq.clone(), q(0), q(1)]),
                q(1),
            ),
            HyperbolicCase::FibrePlusSection => {
                let beta3 = &qq / b;
                (UniPoly::from_roots(&c, &[b.clone(), b.clone(), -b.clone(), beta3]), qr(1, 2))
            }
        };
        let residual = to_f64(&(&c * b * (&b2 + &qq) + kappa));
        // y = T x with T = [[-a0^2 / r, 1 / r], [-b^2, 1]]; chart x = T^-1 y
        let t = [[-(&a0 * &a0) / &r_alpha0, Q::one() / &r_alpha0], [-b2.clone(), q(1)]];
        let minv = inv2(&t).ok_or(TorexError::SingularGram)?;
        let chart = AffineChart::new(minv, [q(0), q(0)])?;
        // line l_g = -g^2 x1 + x2 - g, divided by its label scaling
        let line = |g: &Q, div: &Q, weight: Q| -> Result<Facet> {
            let gx = [-(g * g), q(1)];
            let m = &chart.m;
            let ny = [(&m[0][0] * &gx[0] + &m[1][0] * &gx[1]) / div, (&m[0][1] * &gx[0] + &m[1][1] * &gx[1]) / div];
            Facet::from_raw(ny, -(g / div), weight)
        };
        let section_weight = match case {
            HyperbolicCase::FibreOnly => q(1),
            HyperbolicCase::FibrePlusSection => q(0),
        };
        let facets = vec![
            line(&-b.clone(), &q(1), q(1))?,
            line(&ai, &q(1), q(0))?,
            line(b, &q(-1), section_weight.clone())?,
            line(&a0, &r_alpha0, q(1))?,
        ];
        let polytope = LabelledPolytope::new(2, facets)?;
        let params = HyperbolicParams {
            m,
            case,
            b: b.clone(),
            alpha0: a0.clone(),
            alpha_inf: ai.clone(),
            alpha3: alpha3.clone(),
            q: qq,
            c,
            r_alpha0: r_alpha0.clone(),
            bracket,
            residual,
        };
        let boundary = BoundaryData {
            alpha: [a0, ai],
            beta: [-b.clone(), b.clone()],
            r_alpha: [-r_alpha0, q(0)],
            r_beta: [q(1), section_weight],
        };
        AmbitoricSolution {
            kind: AnsatzKind::Hyperbolic,
            a: Some(a),
            b: Some(bpoly),
            labels: None,
            boundary: Some(boundary),
            hyperbolic: Some(params),
            polytope,
            chart,
            roles: vec![FacetRole::BetaLow, FacetRole::AlphaHigh, FacetRole::BetaHigh, FacetRole::AlphaLow],
            anti: Antiderivatives::default(),
        }
        .finish()
    }
}

/// Lattice-length ratio of the `y = -b` section to the `y = b` section of a
/// hyperbolic solution: the Hirzebruch parameter `a` of its polygon.
pub fn hyperbolic_section_ratio(sol: &AmbitoricSolution) -> Q {
    sol.polytope.lattice_length(0) / sol.polytope.lattice_length(2)
}

fn ratio_on_branch(m: i64, alpha_inf: &Q, case: HyperbolicCase, branch: usize, width: &Q) -> Result<Option<f64>> {
    let b = q(1);
    let p = hyperbolic_residual_poly(m, &b, alpha_inf, case);
    let roots: Vec<(Q, Q)> = isolate_roots(&p, &b, alpha_inf, width).into_iter().filter(|(_, hi)| hi < alpha_inf).collect();
    if branch >= roots.len() {
        return Ok(None);
    }
    let (lo, hi) = roots[roots.len() - 1 - branch].clone();
    match AmbitoricSolution::solve_hyperbolic_bracket(m, &b, alpha_inf, case, [lo, hi]) {
        Ok(s) => Ok(Some(to_f64(&hyperbolic_section_ratio(&s)))),
        Err(_) => Ok(None),
    }
}

/// Hyperbolic solution (with `b = 1`) whose polygon is a scaled Hirzebruch
/// trapezoid with section ratio within `tol` of `a`: `alpha_inf` is scanned on
/// a geometric grid and refined by bisection along one root branch.
pub fn hyperbolic_for_hirzebruch(m: i64, a: &Q, case: HyperbolicCase, tol: f64) -> Result<AmbitoricSolution> {
    let target = to_f64(a);
    let coarse = Q::new(1.into(), num_bigint::BigInt::one() << 60u32);
    let grid: Vec<Q> = (0..=90)
        .map(|k| {
            let x = 1.0 + 0.02 * (5e4f64).powf(k as f64 / 90.0);
            qr((x * 1000.0).round() as i64, 1000)
        })
        .collect();
    for branch in 0..2 {
        let mut pts: Vec<(Q, Option<f64>)> = Vec::new();
        for ai in &grid {
            let v = ratio_on_branch(m, ai, case, branch, &coarse)?;
            if let Some((prev, None)) = pts.last().cloned() {
                if v.is_some() {
                    // the branch appears between two grid points: locate it
                    let (mut lo, mut hi) = (prev, ai.clone());
                    let mut edge = None;
                    for _ in 0..40 {
                        let mid = (&lo + &hi) * qr(1, 2);
                        match ratio_on_branch(m, &mid, case, branch, &coarse)? {
                            Some(f) => {
                                hi = mid.clone();
                                edge = Some((mid, f));
                            }
                            None => lo = mid,
                        }
                    }
                    if let Some((x, f)) = edge {
                        pts.push((x, Some(f)));
                    }
                }
            }
            pts.push((ai.clone(), v));
        }
        for w in 0..pts.len() - 1 {
            let (Some(f0), Some(f1)) = (pts[w].1, pts[w + 1].1) else { continue };
            if (f0 - target).signum() == (f1 - target).signum() {
                continue;
            }
            let (mut lo, mut hi) = (pts[w].0.clone(), pts[w + 1].0.clone());
            let mut flo = f0 - target;
            let mut found = None;
            for _ in 0..80 {
                let mid = (&lo + &hi) * qr(1, 2);
                let Some(fm) = ratio_on_branch(m, &mid, case, branch, &coarse)? else { break };
                let fm = fm - target;
                if fm.abs() < tol {
                    found = Some(mid);
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            if let Some(ai) = found {
                let fine = Q::new(1.into(), num_bigint::BigInt::one() << 110u32);
                let p = hyperbolic_residual_poly(m, &q(1), &ai, case);
                let roots: Vec<(Q, Q)> = isolate_roots(&p, &q(1), &ai, &fine).into_iter().filter(|(_, h)| h < &ai).collect();
                let (l, h) = roots[roots.len() - 1 - branch].clone();
                return AmbitoricSolution::solve_hyperbolic_bracket(m, &q(1), &ai, case, [l, h]);
            }
        }
    }
    Err(TorexError::NoRootInInterval(format!("no hyperbolic solution with m = {m}, a = {}, {case:?}", fmt_q(a))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use torex::presets::{hirzebruch, simplex, square};

    fn data(alpha: [i64; 2], beta: [i64; 2], ra: [i64; 2], rb: [i64; 2]) -> BoundaryData {
        BoundaryData {
            alpha: [q(alpha[0]), q(alpha[1])],
            beta: [q(beta[0]), q(beta[1])],
            r_alpha: [q(ra[0]), q(ra[1])],
            r_beta: [q(rb[0]), q(rb[1])],
        }
    }

    #[test]
    fn fubini_study_square() {
        let s = AmbitoricSolution::solve_product(&data([0, 1], [0, 1], [1, 1], [1, 1])).unwrap();
        let want = UniPoly::new(vec![q(0), q(2), q(-2)]);
        assert_eq!(s.a.as_ref().unwrap(), &want);
        assert_eq!(s.b.as_ref().unwrap(), &want);
        let h = s.evaluate_h_exact(&[qr(1, 2), qr(1, 2)]).unwrap().unwrap();
        assert_eq!(h, [[qr(1, 2), q(0)], [q(0), qr(1, 2)]]);
        assert!(s.identities().unwrap().iter().all(|c| c.holds));
    }

    #[test]
    fn product_cusp_and_opposite_cusps() {
        let s = AmbitoricSolution::solve_product(&data([0, 1], [0, 1], [0, 1], [1, 1])).unwrap();
        let a = s.a.as_ref().unwrap();
        assert_eq!(a.root_multiplicity(&q(0)), 2);
        assert!(!a.nth_deriv(3).eval(&q(0)).is_zero());
        assert_eq!(
            AmbitoricSolution::solve_product(&data([0, 1], [0, 1], [0, 0], [1, 1])).unwrap_err(),
            TorexError::OppositeCusps
        );
        let p = square().with_cusps(&[0, 1]).unwrap();
        let s = AmbitoricSolution::product_from_polytope(&p).unwrap().unwrap();
        assert!(s.identities().unwrap().iter().all(|c| c.holds));
    }

    #[test]
    fn calabi_double_cusp() {
        let d = BoundaryData { alpha: [q(1), q(2)], beta: [q(0), q(1)], r_alpha: [q(0), q(0)], r_beta: [q(1), q(1)] };
        let s = AmbitoricSolution::solve_calabi(&d).unwrap();
        // B = -2 y (y - 1), A = (2/13) (x - 1)^2 (x - 2)^2
        assert_eq!(s.b.as_ref().unwrap(), &UniPoly::from_roots(&q(-2), &[q(0), q(1)]));
        assert_eq!(s.a.as_ref().unwrap(), &UniPoly::from_roots(&qr(2, 13), &[q(1), q(1), q(2), q(2)]));
        let p = hirzebruch(1, &q(2)).unwrap().with_cusps(&[1, 3]).unwrap();
        let t = AmbitoricSolution::calabi_from_polytope(&p).unwrap().unwrap();
        assert_eq!(t.a, s.a);
        assert!(t.identities().unwrap().iter().all(|c| c.holds), "{:?}", t.identities());
    }

    #[test]
    fn calabi_inconsistent_beta() {
        let d = BoundaryData { alpha: [q(1), q(2)], beta: [q(0), q(1)], r_alpha: [q(0), q(0)], r_beta: [q(1), q(2)] };
        assert!(matches!(AmbitoricSolution::solve_calabi(&d), Err(TorexError::InconsistentBeta(_, _))));
    }

    #[test]
    fn bryant_barycentre_positive() {
        let s = AmbitoricSolution::bryant([q(1), q(1)]).unwrap();
        let h = s.evaluate_h_exact(&[qr(1, 3), qr(1, 3)]).unwrap().unwrap();
        assert_eq!(h[0][1], h[1][0]);
        assert!(h[0][0].is_positive() && (&h[0][0] * &h[1][1] - &h[0][1] * &h[1][0]).is_positive());
        let wrong = simplex().with_cusps(&[0]).unwrap();
        assert!(matches!(AmbitoricSolution::bryant_from_standard(&wrong), Err(TorexError::NotSimplexNormalized(_))));
        let right = simplex().with_cusps(&[1]).unwrap();
        assert!(AmbitoricSolution::bryant_from_standard(&right).is_ok());
    }

    #[test]
    fn hyperbolic_fibre_only() {
        let s = AmbitoricSolution::solve_hyperbolic(2, &q(1), &q(12), HyperbolicCase::FibreOnly).unwrap();
        let h = s.hyperbolic.as_ref().unwrap();
        assert!((to_f64(&h.alpha0) - 6.44238134349315).abs() < 1e-10);
        assert!(h.alpha3.is_negative());
        assert!(h.residual.abs() < 1e-25);
        assert!(s.identities().unwrap().iter().all(|c| c.holds), "{:?}", s.identities());
        assert_eq!(s.polytope.facet(1).normal, [-1, -2]);
    }

    #[test]
    fn hyperbolic_matches_hirzebruch_ratio() {
        for (m, a) in [(1, q(2)), (2, qr(3, 2))] {
            let s = hyperbolic_for_hirzebruch(m, &a, HyperbolicCase::FibreOnly, 1e-9).unwrap();
            assert!((to_f64(&hyperbolic_section_ratio(&s)) - to_f64(&a)).abs() < 1e-8);
            let shape = hirzebruch_shape(&s.polytope).unwrap().unwrap();
            assert_eq!(shape.m, m);
        }
    }

    #[test]
    fn hyperbolic_without_root() {
        let e = AmbitoricSolution::solve_hyperbolic(1, &q(1), &q(2), HyperbolicCase::FibreOnly).unwrap_err();
        assert!(matches!(e, TorexError::NoRootInInterval(_)));
    }
}
