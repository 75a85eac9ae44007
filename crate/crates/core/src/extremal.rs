//! Extremal affine functions, the stability functional and its crease families.
//!
//! The main convention solves `int_{dP} f dnu = 1/2 int_P f s dmu` for affine
//! `f`; the appendix convention drops the one half, returning `s / 2`.

use crate::error::{Result, TorexError};
use crate::linalg;
use crate::moments::{self, basis, gram_matrix};
use crate::poly::{cross, lerp, sub_pt, Affine, MultiPoly, Pt, UniPoly};
use crate::polytope::{IntervalProblem, LabelledPolytope, Measure};
use crate::rational::{fmt_q, q, qr, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Main,
    Appendix,
}

pub fn extremal_affine(p: &LabelledPolytope, conv: Convention) -> Result<Affine> {
    let b = basis(p.dim());
    let rhs: Vec<Q> = b
        .iter()
        .map(|f| moments::integrate_boundary(p, f, Measure::Df))
        .collect::<Result<_>>()?;
    let m = gram_matrix(p);
    let sol = linalg::solve(&m, &rhs).ok_or(TorexError::SingularGram)?;
    let scale = match conv {
        Convention::Main => q(2),
        Convention::Appendix => q(1),
    };
    let y = if sol.len() > 2 { sol[2].clone() } else { Q::zero() };
    Ok(Affine::new(&sol[1] * &scale, y * &scale, &sol[0] * &scale))
}

/// Extremal affine function of an interval problem, in its arclength parameter.
pub fn interval_extremal(i: &IntervalProblem, conv: Convention) -> UniPoly {
    let l = &i.length;
    let m = vec![
        vec![l.clone(), l * l * qr(1, 2)],
        vec![l * l * qr(1, 2), l * l * l * qr(1, 3)],
    ];
    let rhs = vec![&i.masses[0] + &i.masses[1], &i.masses[1] * l];
    let sol = linalg::solve(&m, &rhs).expect("interval Gram matrix is regular");
    let scale = match conv {
        Convention::Main => q(2),
        Convention::Appendix => q(1),
    };
    UniPoly::new(vec![&sol[0] * &scale, &sol[1] * &scale])
}

/// `c -> L(max(0, c - z))` on an interval problem (a cubic, main convention).
pub fn interval_crease_profile(i: &IntervalProblem) -> UniPoly {
    let s = interval_extremal(i, Convention::Main);
    // int_0^c (c - z) s(z) dz with s = s0 + s1 z equals s0 c^2 / 2 + s1 c^3 / 6
    let s0 = s.coeff(0);
    let s1 = s.coeff(1);
    UniPoly::new(vec![
        Q::zero(),
        i.masses[0].clone(),
        -s0 * qr(1, 4),
        -s1 * qr(1, 12),
    ])
}

/// A simple crease function `max(0, h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crease {
    pub h: Affine,
}

impl Serialize for Crease {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq([fmt_q(&self.h.a[0]), fmt_q(&self.h.a[1]), fmt_q(&self.h.c)])
    }
}

impl Crease {
    pub fn new(h: Affine) -> Self {
        Crease { h }
    }

    pub fn eval(&self, x: &Pt) -> Q {
        let v = self.h.eval(x);
        if v.is_positive() {
            v
        } else {
            Q::zero()
        }
    }

    /// True when `max(0, h)` is affine on the polytope.
    pub fn is_affine_on(&self, p: &LabelledPolytope) -> bool {
        let vals: Vec<Q> = p.vertices().iter().map(|v| self.h.eval(&v.point)).collect();
        vals.iter().all(|v| !v.is_negative()) || vals.iter().all(|v| !v.is_positive())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Side {
    /// Positive on the boundary arc running counterclockwise from the first
    /// edge to the second.
    #[default]
    Arc,
    Complement,
}

/// Crease endpoints on edges `i` and `j`: `v_s` runs from the end of edge `i`
/// back to its start, `w_t` from the start of edge `j` to its end.
pub fn crease_endpoints(p: &LabelledPolytope, i: usize, j: usize, s: &Q, t: &Q) -> (Pt, Pt) {
    let (ai, bi) = p.edge(i);
    let (aj, bj) = p.edge(j);
    (lerp(&bi, &ai, s), lerp(&aj, &bj, t))
}

/// Affine function vanishing on the line through `v` and `w`.
pub fn crease_through(v: &Pt, w: &Pt) -> Affine {
    // h(x) = (x - v) ^ (w - v)
    let d = sub_pt(w, v);
    Affine::new(d[1].clone(), -d[0].clone(), cross(&d, v))
}

pub fn simple_crease(p: &LabelledPolytope, pair: (usize, usize), s: &Q, t: &Q, side: Side) -> Result<Crease> {
    let (i, j) = pair;
    if i == j || i >= p.n_facets() || j >= p.n_facets() {
        return Err(TorexError::BadIndex(format!("edge pair ({i}, {j})")));
    }
    let (v, w) = crease_endpoints(p, i, j, s, t);
    if v == w {
        return Err(TorexError::DegenerateCrease);
    }
    let h = crease_through(&v, &w);
    Ok(Crease::new(match side {
        Side::Arc => h,
        Side::Complement => h.neg(),
    }))
}

/// A polytope with its cached main-convention extremal function.
#[derive(Clone, Debug)]
pub struct DfContext {
    pub polytope: LabelledPolytope,
    pub s: Affine,
}

impl DfContext {
    pub fn new(p: &LabelledPolytope) -> Result<Self> {
        let s = extremal_affine(p, Convention::Main)?;
        Ok(DfContext { polytope: p.clone(), s })
    }

    /// `L(f) = int_{dP} f dnu - 1/2 int_P f s dmu` for affine `f`.
    pub fn df_affine(&self, f: &Affine) -> Q {
        let fp = f.to_poly();
        let b = moments::integrate_boundary(&self.polytope, &fp, Measure::Df).expect("degree 1");
        let i = moments::integrate_interior(&self.polytope, &(&fp * &self.s.to_poly())).expect("degree 2");
        b - i * qr(1, 2)
    }

    pub fn df_crease(&self, c: &Crease) -> Q {
        let hp = c.h.to_poly();
        let b = moments::integrate_boundary_truncated(&self.polytope, &c.h, &hp, Measure::Df).expect("degree 1");
        let i = moments::integrate_truncated(&self.polytope, &c.h, &(&hp * &self.s.to_poly())).expect("degree 2");
        b - i * qr(1, 2)
    }

    /// `L` at the crease through `v_s` on edge `i` and `w_t` on edge `j`;
    /// coincident endpoints give the zero function.
    pub fn crease_value(&self, i: usize, j: usize, s: &Q, t: &Q) -> Q {
        let (v, w) = crease_endpoints(&self.polytope, i, j, s, t);
        if v == w {
            return Q::zero();
        }
        self.df_crease(&Crease::new(crease_through(&v, &w)))
    }
}

/// Piecewise polynomial on `[breakpoints[0], breakpoints.last()]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly1D {
    pub breakpoints: Vec<Q>,
    pub pieces: Vec<UniPoly>,
}

impl PiecewisePoly1D {
    pub fn eval(&self, c: &Q) -> Q {
        let k = (0..self.pieces.len())
            .find(|&k| c <= &self.breakpoints[k + 1])
            .unwrap_or(self.pieces.len() - 1);
        self.pieces[k].eval(c)
    }

    pub fn is_continuous(&self) -> bool {
        (0..self.pieces.len().saturating_sub(1))
            .all(|k| self.pieces[k].eval(&self.breakpoints[k + 1]) == self.pieces[k + 1].eval(&self.breakpoints[k + 1]))
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(|p| p.degree().unwrap_or(0)).max().unwrap_or(0)
    }

    pub fn c_max(&self) -> Q {
        self.breakpoints.last().cloned().unwrap_or_else(Q::zero)
    }
}

impl Serialize for PiecewisePoly1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PiecewisePoly1D", 2)?;
        let bp: Vec<String> = self.breakpoints.iter().map(fmt_q).collect();
        st.serialize_field("breakpoints", &bp)?;
        st.serialize_field("pieces", &self.pieces)?;
        st.end()
    }
}

/// `c -> L(max(0, c - l_i))` with `l_i` the primitive label of facet `i`,
/// one polynomial per chamber between vertex levels. Level sets have length
/// affine in `c` inside a chamber, so pieces have degree at most four.
pub fn normal_cone_family(ctx: &DfContext, i: usize) -> Result<PiecewisePoly1D> {
    let p = &ctx.polytope;
    if p.dim() != 2 || i >= p.n_facets() {
        return Err(TorexError::BadIndex(format!("facet {i}")));
    }
    let l = p.facet(i).reference_label();
    let mut levels: Vec<Q> = p.vertices().iter().map(|v| l.eval(&v.point)).collect();
    levels.sort();
    levels.dedup();
    let mut pieces = Vec::new();
    for k in 0..levels.len() - 1 {
        let a = &levels[k];
        let b = &levels[k + 1];
        let xs: Vec<Q> = (0..5).map(|j| a + (b - a) * qr(j, 4)).collect();
        let ys: Vec<Q> = xs
            .iter()
            .map(|c| ctx.df_crease(&Crease::new(Affine::constant(c.clone()).sub(&l))))
            .collect();
        pieces.push(UniPoly::interpolate(&xs, &ys));
    }
    Ok(PiecewisePoly1D { breakpoints: levels, pieces })
}

/// `(1/2) int_F (s_F - s) dnu_F` on facet `i` with the reference measure.
pub fn szekelyhidi_constraint(ctx: &DfContext, i: usize) -> Q {
    let p = &ctx.polytope;
    let sub = p.facet_subproblem(i);
    let s_f = interval_extremal(&sub, Convention::Main);
    let (a, b) = p.edge(i);
    let (c0, slope) = ctx.s.restrict(&a, &sub_pt(&b, &a));
    let restricted = UniPoly::new(vec![c0, slope / &sub.length]);
    (&s_f - &restricted).integrate(&Q::zero(), &sub.length) * qr(1, 2)
}

/// Restriction of `s` to facet `i` as a polynomial in lattice arclength.
pub fn restrict_to_facet(p: &LabelledPolytope, s: &Affine, i: usize) -> UniPoly {
    let len = p.lattice_length(i);
    let (a, b) = p.edge(i);
    let (c0, slope) = s.restrict(&a, &sub_pt(&b, &a));
    UniPoly::new(vec![c0, slope / len])
}

/// Boundary mass of the stability measure.
pub fn boundary_mass(p: &LabelledPolytope) -> Q {
    moments::integrate_boundary(p, &MultiPoly::constant(Q::one()), Measure::Df).expect("degree 0")
}

/// Average of `s` with respect to the area measure.
pub fn average(p: &LabelledPolytope, s: &Affine) -> Q {
    let area = moments::integrate_interior(p, &MultiPoly::constant(Q::one())).expect("degree 0");
    moments::integrate_interior(p, &s.to_poly()).expect("degree 1") / area
}

pub fn is_one(x: &Q) -> bool {
    x.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Facet;

    #[test]
    fn normal_cone_family_is_exact_between_nodes() {
        // trapezoid whose level sets parallel to the left edge change length
        let p = LabelledPolytope::new(
            2,
            vec![
                Facet::new([0, 1], q(0), q(1)).unwrap(),
                Facet::new([-1, 0], q(3), q(1)).unwrap(),
                Facet::new([2, -1], q(0), q(1)).unwrap(),
                Facet::new([1, 0], q(-1), q(0)).unwrap(),
            ],
        )
        .unwrap();
        let ctx = DfContext::new(&p).unwrap();
        let fam = normal_cone_family(&ctx, 3).unwrap();
        assert_eq!(fam.max_degree(), 4);
        let l = p.facet(3).reference_label();
        for c in [qr(1, 7), qr(5, 3), qr(13, 11)] {
            let direct = ctx.df_crease(&Crease::new(Affine::constant(c.clone()).sub(&l)));
            assert_eq!(fam.eval(&c), direct);
        }
        let f = &fam.pieces[0];
        assert!(f.coeff(0).is_zero() && f.coeff(1).is_zero());
        assert_eq!(f.coeff(2) * q(2), szekelyhidi_constraint(&ctx, 3));
    }

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

    #[test]
    fn square_has_constant_extremal_function() {
        let s = extremal_affine(&square(), Convention::Main).unwrap();
        assert_eq!(s, Affine::constant(q(8)));
        let t = extremal_affine(&square(), Convention::Appendix).unwrap();
        assert_eq!(t, Affine::constant(q(4)));
    }

    #[test]
    fn interval_with_one_cusp_end() {
        for l in [q(1), q(2), qr(5, 3)] {
            let i = IntervalProblem::new(l.clone(), [q(0), q(1)]).unwrap();
            let s = interval_extremal(&i, Convention::Appendix);
            assert_eq!(s, UniPoly::new(vec![-q(2) / &l, q(6) / (&l * &l)]));
        }
    }

    #[test]
    fn interval_profile_matches_direct_formula() {
        let i = IntervalProblem::new(q(1), [q(1), q(1)]).unwrap();
        // s = 4 so the profile is c - c^2
        assert_eq!(interval_crease_profile(&i), UniPoly::new(vec![q(0), q(1), q(-1)]));
    }

    #[test]
    fn horizontal_midline_crease() {
        let p = square();
        let c = simple_crease(&p, (1, 3), &qr(1, 2), &qr(1, 2), Side::Arc).unwrap();
        assert!(c.h.a[0].is_zero());
        assert_eq!(c.h.eval(&[q(0), qr(1, 2)]), q(0));
        assert!(c.h.eval(&[qr(1, 2), q(1)]).is_positive());
    }

    #[test]
    fn crease_sign_does_not_change_value() {
        let p = square().with_cusps(&[0]).unwrap();
        let ctx = DfContext::new(&p).unwrap();
        let c = simple_crease(&p, (0, 2), &qr(1, 3), &qr(3, 4), Side::Arc).unwrap();
        let d = simple_crease(&p, (0, 2), &qr(1, 3), &qr(3, 4), Side::Complement).unwrap();
        assert_eq!(ctx.df_crease(&c), ctx.df_crease(&d));
    }
}
