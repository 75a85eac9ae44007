//! Stability decisions for intervals, triangles and quadrilaterals, plus a
//! crease scan for arbitrary polygons and the weighted-stability cone.

use crate::error::{Result, TorexError};
use crate::extremal::{interval_crease_profile, simple_crease, Crease, DfContext, Side};
use crate::poly::UniPoly;
use crate::polytope::{IntervalProblem, LabelledPolytope};
use crate::rational::{fmt_q, q, qr, Q};
use crate::sturm;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Polynomial of bidegree at most (3, 3) in `(s, t)`; `c[i][j]` multiplies `s^i t^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly33 {
    pub c: [[Q; 4]; 4],
}

pub fn interpolation_nodes() -> [Q; 4] {
    [q(0), qr(1, 3), qr(2, 3), q(1)]
}

impl BiPoly33 {
    /// Tensor-product interpolation from samples `values[a][b]` at `(nodes[a], nodes[b])`.
    pub fn interpolate(values: &[[Q; 4]; 4]) -> Self {
        let nodes = interpolation_nodes();
        // interpolate in s for each t node, then in t for each s power
        let in_s: Vec<UniPoly> = (0..4)
            .map(|b| UniPoly::interpolate(&nodes, &(0..4).map(|a| values[a][b].clone()).collect::<Vec<_>>()))
            .collect();
        let mut c: [[Q; 4]; 4] = Default::default();
        for (i, row) in c.iter_mut().enumerate() {
            let ys: Vec<Q> = in_s.iter().map(|p| p.coeff(i)).collect();
            let pt = UniPoly::interpolate(&nodes, &ys);
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = pt.coeff(j);
            }
        }
        BiPoly33 { c }
    }

    pub fn eval(&self, s: &Q, t: &Q) -> Q {
        let mut acc = Q::zero();
        for i in (0..4).rev() {
            let mut row = Q::zero();
            for j in (0..4).rev() {
                row = row * t + &self.c[i][j];
            }
            acc = acc * s + row;
        }
        acc
    }

    fn coeff_deriv(&self, ds: usize, dt: usize, s: &Q, t: &Q) -> Q {
        let fall = |k: usize, d: usize| -> i64 { (0..d).map(|m| k as i64 - m as i64).product() };
        let mut acc = Q::zero();
        for i in ds..4 {
            for j in dt..4 {
                if self.c[i][j].is_zero() {
                    continue;
                }
                let f = q(fall(i, ds) * fall(j, dt));
                acc += &self.c[i][j] * f * crate::rational::pow(s, (i - ds) as u32) * crate::rational::pow(t, (j - dt) as u32);
            }
        }
        acc
    }

    pub fn gradient(&self, s: &Q, t: &Q) -> [Q; 2] {
        [self.coeff_deriv(1, 0, s, t), self.coeff_deriv(0, 1, s, t)]
    }

    pub fn hessian(&self, s: &Q, t: &Q) -> [[Q; 2]; 2] {
        let st = self.coeff_deriv(1, 1, s, t);
        [[self.coeff_deriv(2, 0, s, t), st.clone()], [st, self.coeff_deriv(0, 2, s, t)]]
    }

    pub fn hessian_det(&self, s: &Q, t: &Q) -> Q {
        let h = self.hessian(s, t);
        &h[0][0] * &h[1][1] - &h[0][1] * &h[1][0]
    }
}

impl Serialize for BiPoly33 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.c.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
        rows.serialize(s)
    }
}

/// `(s, t) -> L(max(0, h_{s,t}))` for creases joining edges `i` and `j`, recovered
/// from 16 exact samples.
pub fn phi_for_pair(ctx: &DfContext, i: usize, j: usize) -> Result<BiPoly33> {
    let p = &ctx.polytope;
    if p.dim() != 2 || i == j || i >= p.n_facets() || j >= p.n_facets() {
        return Err(TorexError::BadIndex(format!("edge pair ({i}, {j})")));
    }
    let nodes = interpolation_nodes();
    let mut values: [[Q; 4]; 4] = Default::default();
    for (a, s) in nodes.iter().enumerate() {
        for (b, t) in nodes.iter().enumerate() {
            values[a][b] = ctx.crease_value(i, j, s, t);
        }
    }
    Ok(BiPoly33::interpolate(&values))
}

/// `phi` for an opposite pair of a quadrilateral.
pub fn phi_polynomial(ctx: &DfContext, pair: (usize, usize)) -> Result<BiPoly33> {
    let p = &ctx.polytope;
    if p.dim() != 2 || p.n_facets() != 4 {
        return Err(TorexError::NotQuadrilateral(p.n_facets()));
    }
    let (i, j) = pair;
    if i >= 4 || j >= 4 || p.next_facet(p.next_facet(i)) != j {
        return Err(TorexError::BadIndex(format!("({i}, {j}) is not an opposite pair")));
    }
    phi_for_pair(ctx, i, j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Stable,
    StrictlySemistable,
    Unstable,
    Undecided,
}

/// A crease together with its location and value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CreaseWitness {
    pub pair: (usize, usize),
    #[serde(with = "crate::rational::qstr")]
    pub s: Q,
    #[serde(with = "crate::rational::qstr")]
    pub t: Q,
    pub crease: Crease,
    #[serde(with = "crate::rational::qstr")]
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CornerDeterminant {
    pub cusp: usize,
    pub pair: (usize, usize),
    #[serde(with = "crate::rational::qstr")]
    pub determinant: Q,
    #[serde(with = "crate::rational::qvec")]
    pub gradient: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Witness {
    Crease(CreaseWitness),
    /// `max(0, c - l)` for the primitive label `l` of a facet (or of the
    /// interval coordinate when `facet` is `None`).
    Level {
        facet: Option<usize>,
        #[serde(with = "crate::rational::qstr")]
        c: Q,
        #[serde(with = "crate::rational::qstr")]
        value: Q,
    },
    Determinants(Vec<CornerDeterminant>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl StabilityVerdict {
    pub fn new(status: Status) -> Self {
        StabilityVerdict { status, witness: None, notes: Vec::new() }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

/// Stability of an interval problem via the cubic `c -> L(max(0, c - z))`.
pub fn interval_stability(i: &IntervalProblem) -> StabilityVerdict {
    let f = interval_crease_profile(i);
    let zero = Q::zero();
    if sturm::positive_on_open(&f, &zero, &i.length) {
        return StabilityVerdict::new(Status::Stable);
    }
    // f = c (l - c) g(c) with g linear, so f is negative near an interior critical point or f == 0
    let mid = &i.length * qr(1, 2);
    let mut best = (mid.clone(), f.eval(&mid));
    for (lo, hi) in sturm::isolate_roots(&f.deriv(), &zero, &i.length, &qr(1, 1 << 20)) {
        let m = (lo + hi) * qr(1, 2);
        let v = f.eval(&m);
        if v < best.1 {
            best = (m, v);
        }
    }
    let c = best.0;
    let value = f.eval(&c);
    StabilityVerdict::new(Status::Unstable).with_witness(Witness::Level { facet: None, c, value })
}

/// Hessian determinant of the crease value at the corner of the two edges
/// adjacent to a cusp edge.
pub fn corner_determinant(ctx: &DfContext, cusp: usize) -> Result<CornerDeterminant> {
    let p = &ctx.polytope;
    let pair = (p.prev_facet(cusp), p.next_facet(cusp));
    let phi = phi_for_pair(ctx, pair.0, pair.1)?;
    let z = Q::zero();
    Ok(CornerDeterminant {
        cusp,
        pair,
        determinant: phi.hessian_det(&z, &z),
        gradient: phi.gradient(&z, &z).to_vec(),
    })
}

/// Decision for a quadrilateral with any cusp set.
pub fn quadrilateral_stability(p: &LabelledPolytope) -> Result<StabilityVerdict> {
    if p.dim() != 2 || p.n_facets() != 4 {
        return Err(TorexError::NotQuadrilateral(p.n_facets()));
    }
    let cusps = p.cusps();
    match cusps.len() {
        2 => {
            let ctx = DfContext::new(p)?;
            let dets: Vec<CornerDeterminant> =
                cusps.iter().map(|&c| corner_determinant(&ctx, c)).collect::<Result<_>>()?;
            let adjacent = p.next_facet(cusps[0]) == cusps[1] || p.next_facet(cusps[1]) == cusps[0];
            let any_neg = dets.iter().any(|d| d.determinant.is_negative());
            let any_zero = dets.iter().any(|d| d.determinant.is_zero());
            let w = Witness::Determinants(dets);
            if any_neg {
                let mut v = StabilityVerdict::new(Status::Unstable);
                let scan = crease_scan(p, 24, 12)?;
                v.witness = scan.verdict.witness.or(Some(w));
                return Ok(v.note("negative Hessian determinant at a cusp corner"));
            }
            if adjacent {
                let v = StabilityVerdict::new(Status::Stable).with_witness(w);
                Ok(if any_zero { v.note("zero determinant at an adjacent cusp corner") } else { v })
            } else if any_zero {
                Ok(StabilityVerdict::new(Status::StrictlySemistable).with_witness(w))
            } else {
                Ok(StabilityVerdict::new(Status::Stable).with_witness(w))
            }
        }
        1 => {
            let c = cusps[0];
            let w = p.weights();
            let others: Vec<usize> = (0..4).filter(|&j| j != c).collect();
            let mut parts = Vec::new();
            for &o in &others {
                let mut wo = w.clone();
                wo[o] = Q::zero();
                let sub = p.with_weights(&wo)?;
                parts.push((wo, quadrilateral_stability(&sub)?));
            }
            cone_or_scan(p, parts, qr(1, 2))
        }
        0 => {
            let w = p.weights();
            let mut parts = Vec::new();
            for j in 0..4 {
                let mut wo = w.clone();
                wo[j] = Q::zero();
                let sub = p.with_weights(&wo)?;
                parts.push((wo, quadrilateral_stability(&sub)?));
            }
            cone_or_scan(p, parts, qr(1, 3))
        }
        _ => unstable_by_scan(p, "three or more cusp edges"),
    }
}

fn cone_or_scan(p: &LabelledPolytope, parts: Vec<(Vec<Q>, StabilityVerdict)>, coef: Q) -> Result<StabilityVerdict> {
    let coefs = vec![coef; parts.len()];
    match combine_weights(&parts, &coefs) {
        Ok(v) => Ok(v.note("weighted-cone decomposition")),
        Err(TorexError::MixedUnstable(_)) => {
            let scan = crease_scan(p, 24, 12)?;
            Ok(scan.verdict.note("cone decomposition has an unstable summand"))
        }
        Err(e) => Err(e),
    }
}

fn unstable_by_scan(p: &LabelledPolytope, why: &str) -> Result<StabilityVerdict> {
    let scan = crease_scan(p, 8, 4)?;
    let mut v = StabilityVerdict::new(Status::Unstable).note(why);
    v.witness = scan.verdict.witness;
    Ok(v)
}

/// Decision for a triangle with any cusp set.
pub fn triangle_stability(p: &LabelledPolytope) -> Result<StabilityVerdict> {
    if p.dim() != 2 || p.n_facets() != 3 {
        return Err(TorexError::NotTriangle(p.n_facets()));
    }
    let cusps = p.cusps();
    match cusps.len() {
        1 => Ok(StabilityVerdict::new(Status::Stable)),
        2 => {
            // median from the vertex shared by the two cusp edges to the midpoint of the third
            let e = (0..3).find(|j| !cusps.contains(j)).expect("one regular edge");
            let (a, b) = p.edge(e);
            let apex = p
                .vertices()
                .iter()
                .find(|v| cusps.contains(&v.facets.0) && cusps.contains(&v.facets.1))
                .expect("cusp corner")
                .point
                .clone();
            let mid = crate::poly::lerp(&a, &b, &qr(1, 2));
            let ctx = DfContext::new(p)?;
            let crease = Crease::new(crate::extremal::crease_through(&apex, &mid));
            let value = ctx.df_crease(&crease);
            let w = CreaseWitness { pair: (e, e), s: qr(1, 2), t: qr(1, 2), crease, value };
            Ok(StabilityVerdict::new(Status::Unstable).with_witness(Witness::Crease(w)))
        }
        0 => {
            let w = p.weights();
            let mut parts = Vec::new();
            for j in 0..3 {
                let mut wo = w.clone();
                wo[j] = Q::zero();
                let sub = p.with_weights(&wo)?;
                parts.push((wo, triangle_stability(&sub)?));
            }
            cone_or_scan(p, parts, qr(1, 2))
        }
        _ => unstable_by_scan(p, "every edge is a cusp edge"),
    }
}

/// Dispatch on the shape: interval, triangle, quadrilateral, or scan.
pub fn polytope_stability(p: &LabelledPolytope) -> Result<StabilityVerdict> {
    match (p.dim(), p.n_facets()) {
        (1, _) => {
            let a = &p.vertices()[0].point[0];
            let b = &p.vertices()[1].point[0];
            let m = |j: usize| p.facet(j).weight.clone();
            let lo = p.vertices()[0].facets.0;
            let hi = p.vertices()[1].facets.0;
            Ok(interval_stability(&IntervalProblem::new(b - a, [m(lo), m(hi)])?))
        }
        (2, 3) => triangle_stability(p),
        (2, 4) => quadrilateral_stability(p),
        _ => Ok(crease_scan(p, 24, 8)?.verdict),
    }
}

/// Positive combination of weighted verdicts.
pub fn combine_weights(verdicts: &[(Vec<Q>, StabilityVerdict)], coefficients: &[Q]) -> Result<StabilityVerdict> {
    if verdicts.len() != coefficients.len() || coefficients.iter().any(|c| !c.is_positive()) {
        return Err(TorexError::BadIndex("coefficients must be positive and match the verdicts".into()));
    }
    if let Some(k) = verdicts.iter().position(|(_, v)| !matches!(v.status, Status::Stable | Status::StrictlySemistable)) {
        return Err(TorexError::MixedUnstable(k));
    }
    if verdicts.iter().any(|(_, v)| v.status == Status::Stable) {
        Ok(StabilityVerdict::new(Status::Stable))
    } else {
        Ok(StabilityVerdict::new(Status::StrictlySemistable))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    /// Smallest value over non-affine creases, if any were sampled.
    #[serde(with = "crate::rational::qopt")]
    pub min_value: Option<Q>,
    pub argmin: Option<CreaseWitness>,
    pub verdict: StabilityVerdict,
}

/// All unordered edge pairs of a polygon.
pub fn edge_pairs(p: &LabelledPolytope) -> Vec<(usize, usize)> {
    let n = p.n_facets();
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

/// Exact evaluation of `L` on a `grid_n x grid_n` lattice of simple creases
/// for every edge pair, with local refinement around the smallest value.
pub fn crease_scan(p: &LabelledPolytope, grid_n: usize, refine_depth: usize) -> Result<ScanResult> {
    if p.dim() != 2 || grid_n < 2 {
        return Ok(ScanResult {
            min_value: None,
            argmin: None,
            verdict: StabilityVerdict::new(Status::Undecided).note("grid too coarse"),
        });
    }
    let ctx = DfContext::new(p)?;
    let g = grid_n as i64;
    let mut best: Option<CreaseWitness> = None;
    let consider = |pair: (usize, usize), s: Q, t: Q, val: Q, best: &mut Option<CreaseWitness>| {
        if best.as_ref().is_some_and(|b| b.value <= val) {
            return;
        }
        if let Ok(c) = simple_crease(p, pair, &s, &t, Side::Arc) {
            if !c.is_affine_on(p) {
                *best = Some(CreaseWitness { pair, s, t, crease: c, value: val });
            }
        }
    };
    let mut phis = Vec::new();
    for pair in edge_pairs(p) {
        let phi = phi_for_pair(&ctx, pair.0, pair.1)?;
        for a in 0..=g {
            for b in 0..=g {
                let (s, t) = (qr(a, g), qr(b, g));
                let v = phi.eval(&s, &t);
                consider(pair, s, t, v, &mut best);
            }
        }
        phis.push((pair, phi));
    }
    if let Some(b0) = best.clone() {
        let phi = &phis.iter().find(|(pr, _)| *pr == b0.pair).expect("pair").1;
        let mut step = qr(1, g);
        let (mut s, mut t) = (b0.s.clone(), b0.t.clone());
        for _ in 0..refine_depth {
            step *= qr(1, 2);
            for ds in -1..=1 {
                for dt in -1..=1 {
                    let ss = &s + &step * q(ds);
                    let tt = &t + &step * q(dt);
                    if ss.is_negative() || tt.is_negative() || ss > Q::one() || tt > Q::one() {
                        continue;
                    }
                    let v = phi.eval(&ss, &tt);
                    consider(b0.pair, ss, tt, v, &mut best);
                }
            }
            let cur = best.as_ref().expect("best");
            s = cur.s.clone();
            t = cur.t.clone();
        }
    }
    let verdict = match &best {
        Some(b) if !b.value.is_positive() => {
            let exact = ctx.df_crease(&b.crease);
            debug_assert_eq!(exact, b.value);
            StabilityVerdict::new(Status::Unstable).with_witness(Witness::Crease(b.clone()))
        }
        _ => StabilityVerdict::new(Status::Undecided).note("no non-positive crease found"),
    };
    Ok(ScanResult { min_value: best.as_ref().map(|b| b.value.clone()), argmin: best, verdict })
}

/// Looks for a non-affine crease with `L = 0`: first in the families
/// `max(0, c - l_j)` over all facets via rational double roots of each piece,
/// then on an exact grid of simple creases.
pub fn zero_crease_witness(ctx: &DfContext) -> Result<Option<Witness>> {
    let p = &ctx.polytope;
    for j in 0..p.n_facets() {
        let fam = crate::extremal::normal_cone_family(ctx, j)?;
        for (k, piece) in fam.pieces.iter().enumerate() {
            let (a, b) = (&fam.breakpoints[k], &fam.breakpoints[k + 1]);
            let g = piece.gcd(&piece.deriv());
            if g.degree() != Some(1) {
                continue;
            }
            let c = -g.coeff(0) / g.coeff(1);
            if &c > a && &c < b && piece.eval(&c).is_zero() {
                return Ok(Some(Witness::Level { facet: Some(j), c, value: Q::zero() }));
            }
        }
    }
    let scan = crease_scan(p, 12, 0)?;
    Ok(match scan.argmin {
        Some(w) if w.value.is_zero() => Some(Witness::Crease(w)),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Facet;

    fn square() -> LabelledPolytope {
        LabelledPolytope::new(
            2,
            vec![
                Facet::new([0, 1], q(0), q(1)).unwrap(),
                Facet::new([-1, 0], q(1), q(1)).unwrap(),
                Facet::new([0, -1], q(1), q(1)).unwrap(),
                Facet::new([1, 0], q(0), q(1)).unwrap(),
            ],
        )
        .unwrap()
    }

    fn simplex() -> LabelledPolytope {
        LabelledPolytope::new(
            2,
            vec![
                Facet::new([0, 1], q(0), q(1)).unwrap(),
                Facet::new([-1, -1], q(1), q(1)).unwrap(),
                Facet::new([1, 0], q(0), q(1)).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bipoly_reproduces_a_known_polynomial() {
        let f = |s: &Q, t: &Q| s * s * t - q(3) * t * t * t + s * qr(1, 2) + q(7);
        let nodes = interpolation_nodes();
        let mut vals: [[Q; 4]; 4] = Default::default();
        for a in 0..4 {
            for b in 0..4 {
                vals[a][b] = f(&nodes[a], &nodes[b]);
            }
        }
        let p = BiPoly33::interpolate(&vals);
        let (s, t) = (qr(5, 7), qr(-2, 11));
        assert_eq!(p.eval(&s, &t), f(&s, &t));
        assert_eq!(p.hessian(&s, &t)[0][1], q(2) * &s);
        assert_eq!(p.hessian(&s, &t)[1][1], q(-18) * &t);
    }

    #[test]
    fn phi_matches_direct_evaluation() {
        let p = square().with_cusps(&[1, 2]).unwrap();
        let ctx = DfContext::new(&p).unwrap();
        let phi = phi_polynomial(&ctx, (0, 2)).unwrap();
        let (s, t) = (qr(3, 17), qr(12, 13));
        assert_eq!(phi.eval(&s, &t), ctx.crease_value(0, 2, &s, &t));
    }

    #[test]
    fn cusp_corner_is_critical() {
        let p = square().with_cusps(&[1, 2]).unwrap();
        let ctx = DfContext::new(&p).unwrap();
        let d = corner_determinant(&ctx, 1).unwrap();
        assert!(d.gradient.iter().all(|g| g.is_zero()));
    }

    #[test]
    fn interval_cases() {
        let st = |m0, m1| interval_stability(&IntervalProblem::new(q(1), [q(m0), q(m1)]).unwrap()).status;
        assert_eq!(st(1, 1), Status::Stable);
        assert_eq!(st(0, 1), Status::Stable);
        assert_eq!(st(0, 0), Status::Unstable);
    }

    #[test]
    fn square_verdicts() {
        let s = square();
        assert_eq!(quadrilateral_stability(&s.with_cusps(&[1, 3]).unwrap()).unwrap().status, Status::StrictlySemistable);
        assert_eq!(quadrilateral_stability(&s.with_cusps(&[0, 1]).unwrap()).unwrap().status, Status::Stable);
        assert_eq!(quadrilateral_stability(&s.with_cusps(&[0]).unwrap()).unwrap().status, Status::Stable);
        assert_eq!(quadrilateral_stability(&s).unwrap().status, Status::Stable);
        assert_eq!(quadrilateral_stability(&s.with_cusps(&[0, 1, 2]).unwrap()).unwrap().status, Status::Unstable);
    }

    #[test]
    fn triangle_verdicts() {
        let t = simplex();
        assert_eq!(triangle_stability(&t.with_cusps(&[1]).unwrap()).unwrap().status, Status::Stable);
        assert_eq!(triangle_stability(&t).unwrap().status, Status::Stable);
        let v = triangle_stability(&t.with_cusps(&[0, 2]).unwrap()).unwrap();
        assert_eq!(v.status, Status::Unstable);
        match v.witness {
            Some(Witness::Crease(w)) => assert!(w.value.is_zero()),
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn scan_finds_opposite_cusp_zero() {
        let p = square().with_cusps(&[1, 3]).unwrap();
        let r = crease_scan(&p, 4, 0).unwrap();
        assert_eq!(r.verdict.status, Status::Unstable);
        assert_eq!(r.min_value, Some(q(0)));
        assert_eq!(crease_scan(&p, 1, 0).unwrap().verdict.status, Status::Undecided);
    }

    #[test]
    fn combine_rejects_unstable() {
        let st = StabilityVerdict::new(Status::Stable);
        let un = StabilityVerdict::new(Status::Unstable);
        let w = vec![q(1); 4];
        assert_eq!(
            combine_weights(&[(w.clone(), st.clone()), (w.clone(), un)], &[q(1), q(1)]),
            Err(TorexError::MixedUnstable(1))
        );
        let ss = StabilityVerdict::new(Status::StrictlySemistable);
        assert_eq!(combine_weights(&[(w.clone(), ss.clone())], &[q(1)]).unwrap().status, Status::StrictlySemistable);
        assert_eq!(combine_weights(&[(w.clone(), ss), (w, st)], &[q(1), q(2)]).unwrap().status, Status::Stable);
    }
}
