//! Three-condition classification of a labelled polygon with cusp facets and
//! the Poincare parameters `(alpha, beta)` of each cusp facet.

use crate::error::{Result, TorexError};
use crate::extremal::{interval_extremal, restrict_to_facet, szekelyhidi_constraint, Convention, DfContext};
use crate::poly::{Affine, UniPoly};
use crate::polytope::LabelledPolytope;
use crate::rational::{q, qr, Q};
use crate::stability::{interval_stability, polytope_stability, zero_crease_witness, StabilityVerdict, Status};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionIii {
    pub constant: bool,
    /// `s_F - s` at the start of the facet (the constant difference when `constant`).
    #[serde(with = "crate::rational::qstr")]
    pub value: Q,
    pub positive: bool,
    /// Slopes of `s_F` and of `s` along the facet, per unit lattice length.
    #[serde(with = "crate::rational::qvec")]
    pub slopes: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoincareParams {
    #[serde(with = "crate::rational::qstr")]
    pub alpha: Q,
    #[serde(with = "crate::rational::qstr")]
    pub beta: Q,
    /// The same `alpha` from the facet average of `s_F - s`.
    #[serde(with = "crate::rational::qstr")]
    pub alpha_integral: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetReport {
    pub facet: usize,
    pub condition_ii: StabilityVerdict,
    pub condition_iii: ConditionIii,
    #[serde(with = "crate::rational::qstr")]
    pub szekelyhidi: Q,
    pub params: Option<PoincareParams>,
    pub params_error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Final {
    Unstable,
    DonaldsonOnly,
    PoincareExtremal,
    SemistableBoundary,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub condition_i: StabilityVerdict,
    pub facets: Vec<FacetReport>,
    #[serde(rename = "final")]
    pub verdict: Final,
    pub notes: Vec<String>,
}

fn require_polygon(p: &LabelledPolytope, i: usize) -> Result<()> {
    if p.dim() != 2 || i >= p.n_facets() {
        return Err(TorexError::BadIndex(format!("facet {i}")));
    }
    Ok(())
}

/// `s_F` of the facet problem and the restriction of `s`, both in lattice arclength.
fn facet_pair(ctx: &DfContext, i: usize) -> (UniPoly, UniPoly) {
    let p = &ctx.polytope;
    let s_f = interval_extremal(&p.facet_subproblem(i), Convention::Main);
    (s_f, restrict_to_facet(p, &ctx.s, i))
}

pub fn condition_iii(ctx: &DfContext, i: usize) -> Result<ConditionIii> {
    require_polygon(&ctx.polytope, i)?;
    let (s_f, s) = facet_pair(ctx, i);
    let value = s_f.coeff(0) - s.coeff(0);
    let constant = s_f.coeff(1) == s.coeff(1);
    Ok(ConditionIii { constant, positive: constant && value.is_positive(), value, slopes: vec![s_f.coeff(1), s.coeff(1)] })
}

/// `alpha = 2 / mean_F (s_F - s)`.
pub fn alpha_from_integral(ctx: &DfContext, i: usize) -> Result<Q> {
    require_polygon(&ctx.polytope, i)?;
    let (s_f, s) = facet_pair(ctx, i);
    let len = ctx.polytope.lattice_length(i);
    let mean = (&s_f - &s).integrate(&Q::zero(), &len) / &len;
    if !mean.is_positive() {
        return Err(TorexError::NonPositiveAlpha(crate::rational::fmt_q(&mean)));
    }
    Ok(q(2) / mean)
}

/// Normalized data of a cusp facet: `s = a0 + a1 x1 + a2 x2` in coordinates
/// where the facet is `x1 = 0` and its neighbours are `x2 = 0` and
/// `l - x2 - lambda x1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemarkFrame {
    #[serde(with = "crate::rational::qvec")]
    pub a: Vec<Q>,
    #[serde(with = "crate::rational::qstr")]
    pub ell: Q,
    #[serde(with = "crate::rational::qstr")]
    pub lambda: Q,
}

pub fn remark_frame(ctx: &DfContext, i: usize) -> Result<RemarkFrame> {
    let p = &ctx.polytope;
    require_polygon(p, i)?;
    let ni = p.facet(i).normal;
    let li = p.facet(i).reference_label();
    for (a, b) in [(p.prev_facet(i), p.next_facet(i)), (p.next_facet(i), p.prev_facet(i))] {
        let fa = p.facet(a);
        let fb = p.facet(b);
        if fa.is_cusp() || fb.is_cusp() || !fa.weight.is_one() {
            continue;
        }
        let na = fa.normal;
        let det = ni[0] * na[1] - ni[1] * na[0];
        if det.abs() != 1 {
            continue;
        }
        // y = N x + c with rows n_i, n_a; x = N^-1 (y - c)
        let la = fa.reference_label();
        let inv = [[q(na[1] * det), q(-ni[1] * det)], [q(-na[0] * det), q(ni[0] * det)]];
        let pull = |f: &Affine| -> Affine {
            // f(x) = <g, x> + e with x = inv (y - c)
            let g0 = &f.a[0] * &inv[0][0] + &f.a[1] * &inv[1][0];
            let g1 = &f.a[0] * &inv[0][1] + &f.a[1] * &inv[1][1];
            let e = &f.c - &g0 * &li.c - &g1 * &la.c;
            Affine::new(g0, g1, e)
        };
        let lb = pull(&fb.reference_label()).scale(&(Q::one() / &fb.weight));
        if lb.a[1] != -Q::one() {
            continue;
        }
        let s = pull(&ctx.s);
        return Ok(RemarkFrame { a: vec![s.c.clone(), s.a[0].clone(), s.a[1].clone()], ell: lb.c.clone(), lambda: -lb.a[0].clone() });
    }
    Err(TorexError::NoAdmissibleNormalization(format!("facet {i}")))
}

/// `alpha = 2 l / (4 - a0 l)`, `beta = alpha^2 / 6 (a1 + 2 lambda a0 / l - 12 lambda / l^2)`.
pub fn remark_formula(a0: &Q, a1: &Q, ell: &Q, lambda: &Q) -> Result<(Q, Q)> {
    let den = q(4) - a0 * ell;
    if den.is_zero() {
        return Err(TorexError::FormulaPole);
    }
    let alpha = ell * q(2) / den;
    let beta = &alpha * &alpha * qr(1, 6) * (a1 + lambda * a0 * q(2) / ell - lambda * q(12) / (ell * ell));
    Ok((alpha, beta))
}

pub fn remark_alpha_beta(ctx: &DfContext, i: usize) -> Result<(Q, Q)> {
    let f = remark_frame(ctx, i)?;
    remark_formula(&f.a[0], &f.a[1], &f.ell, &f.lambda)
}

pub fn beta_from_remark(ctx: &DfContext, i: usize) -> Result<Q> {
    Ok(remark_alpha_beta(ctx, i)?.1)
}

fn facet_report(ctx: &DfContext, i: usize) -> Result<FacetReport> {
    let p = &ctx.polytope;
    let condition_ii = interval_stability(&p.facet_subproblem(i));
    let c3 = condition_iii(ctx, i)?;
    let szekelyhidi = szekelyhidi_constraint(ctx, i);
    let (mut params, mut params_error) = (None, None);
    if c3.positive {
        match (remark_alpha_beta(ctx, i), alpha_from_integral(ctx, i)) {
            (Ok((alpha, beta)), Ok(ai)) => params = Some(PoincareParams { alpha, beta, alpha_integral: ai }),
            (Err(e), _) | (_, Err(e)) => params_error = Some(e.to_string()),
        }
    }
    Ok(FacetReport { facet: i, condition_ii, condition_iii: c3, szekelyhidi, params, params_error })
}

/// Runs conditions (i), (ii), (iii) and combines them into a final verdict.
pub fn classify_pair(p: &LabelledPolytope) -> Result<ClassificationReport> {
    let mut notes = Vec::new();
    let condition_i = polytope_stability(p)?;
    if p.dim() != 2 {
        let verdict = match condition_i.status {
            Status::Stable => Final::PoincareExtremal,
            Status::Unstable => Final::Unstable,
            Status::StrictlySemistable => Final::SemistableBoundary,
            Status::Undecided => Final::Undecided,
        };
        return Ok(ClassificationReport { condition_i, facets: Vec::new(), verdict, notes });
    }
    let ctx = DfContext::new(p)?;
    let facets: Vec<FacetReport> = p.cusps().into_iter().map(|i| facet_report(&ctx, i)).collect::<Result<_>>()?;
    let shape_covered = matches!(p.n_facets(), 3 | 4);
    let verdict = match condition_i.status {
        Status::Unstable => Final::Unstable,
        Status::Undecided => Final::Undecided,
        Status::StrictlySemistable => match zero_crease_witness(&ctx)? {
            Some(_) => {
                notes.push("strictly semistable with a non-affine crease of zero value".into());
                Final::Unstable
            }
            None => Final::SemistableBoundary,
        },
        Status::Stable if !shape_covered => {
            notes.push("stable by scan only; no constructive result for this shape".into());
            Final::Undecided
        }
        Status::Stable => {
            let all = facets.iter().all(|f| f.condition_ii.status == Status::Stable && f.condition_iii.positive);
            if all {
                Final::PoincareExtremal
            } else {
                Final::DonaldsonOnly
            }
        }
    };
    if p.cusps().is_empty() {
        notes.push("no cusp facets".into());
    }
    Ok(ClassificationReport { condition_i, facets, verdict, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{hirzebruch, square};

    #[test]
    fn square_one_cusp_is_constant() {
        let p = square().with_cusps(&[0]).unwrap();
        let ctx = DfContext::new(&p).unwrap();
        let c = condition_iii(&ctx, 0).unwrap();
        assert!(c.constant && c.positive);
        let (alpha, _) = remark_alpha_beta(&ctx, 0).unwrap();
        assert_eq!(alpha, alpha_from_integral(&ctx, 0).unwrap());
        assert!(szekelyhidi_constraint(&ctx, 0).is_positive());
    }

    #[test]
    fn hirzebruch_fibre_is_not_constant() {
        let p = hirzebruch(1, &q(2)).unwrap().with_cusps(&[0]).unwrap();
        let ctx = DfContext::new(&p).unwrap();
        assert!(!condition_iii(&ctx, 0).unwrap().constant);
    }

    #[test]
    fn pole_guard() {
        assert_eq!(remark_formula(&q(2), &q(0), &q(2), &q(1)), Err(TorexError::FormulaPole));
    }

    #[test]
    fn main_theorem_cases_m1_a2() {
        let h = hirzebruch(1, &q(2)).unwrap();
        let v = |c: &[usize]| classify_pair(&h.with_cusps(c).unwrap()).unwrap().verdict;
        assert_eq!(v(&[3]), Final::PoincareExtremal);
        assert_eq!(v(&[1]), Final::PoincareExtremal);
        assert_eq!(v(&[1, 3]), Final::PoincareExtremal);
        assert_eq!(v(&[0]), Final::DonaldsonOnly);
        assert_eq!(v(&[0, 3]), Final::DonaldsonOnly);
        assert_eq!(v(&[0, 1]), Final::DonaldsonOnly);
        assert_eq!(v(&[0, 2]), Final::Unstable);
        assert_eq!(v(&[0, 1, 2]), Final::Unstable);
    }
}
