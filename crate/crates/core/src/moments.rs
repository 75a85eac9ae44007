//! Exact integration of polynomials over polygons, edges and half-plane truncations.

use crate::error::{Result, TorexError};
use crate::poly::{cross, lerp, sub_pt, Affine, MultiPoly, Pt};
use crate::polytope::{LabelledPolytope, Measure};
use crate::rational::Q;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub const MAX_DEGREE: u32 = 8;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn check_degree(f: &MultiPoly) -> Result<()> {
    let d = f.degree();
    if d > MAX_DEGREE {
        Err(TorexError::DegreeTooHigh(d))
    } else {
        Ok(())
    }
}

/// `int_T f` over the triangle `(a, b, c)`, signed by orientation.
pub fn integrate_triangle(f: &MultiPoly, a: &Pt, b: &Pt, c: &Pt) -> Q {
    let e1 = sub_pt(b, a);
    let e2 = sub_pt(c, a);
    let jac = cross(&e1, &e2);
    if jac.is_zero() {
        return Q::zero();
    }
    let u = MultiPoly::x();
    let v = MultiPoly::y();
    let px = &(&MultiPoly::constant(a[0].clone()) + &u.scale(&e1[0])) + &v.scale(&e2[0]);
    let py = &(&MultiPoly::constant(a[1].clone()) + &u.scale(&e1[1])) + &v.scale(&e2[1]);
    let g = f.substitute(&px, &py);
    let mut acc = Q::zero();
    for ((i, j), coef) in g.terms() {
        // int over the standard simplex of u^i v^j = i! j! / (i + j + 2)!
        let w = Q::new(factorial(*i) * factorial(*j), factorial(i + j + 2));
        acc += coef * w;
    }
    acc * jac
}

/// `int_P f` for a counterclockwise polygon given by its vertices, via a fan
/// from the first vertex.
pub fn integrate_polygon(f: &MultiPoly, verts: &[Pt]) -> Q {
    if verts.len() < 3 {
        return Q::zero();
    }
    let mut acc = Q::zero();
    for k in 1..verts.len() - 1 {
        acc += integrate_triangle(f, &verts[0], &verts[k], &verts[k + 1]);
    }
    acc
}

/// `int_0^1 f(a + t (b - a)) dt`.
pub fn integrate_segment(f: &MultiPoly, a: &Pt, b: &Pt) -> Q {
    f.restrict(a, &sub_pt(b, a)).integrate(&Q::zero(), &Q::one())
}

pub fn integrate_interior(p: &LabelledPolytope, f: &MultiPoly) -> Result<Q> {
    check_degree(f)?;
    if p.dim() == 1 {
        let a = &p.vertices()[0].point[0];
        let b = &p.vertices()[1].point[0];
        let g = f.restrict(&[Q::zero(), Q::zero()], &[Q::one(), Q::zero()]);
        return Ok(g.integrate(a, b));
    }
    Ok(integrate_polygon(f, &p.vertex_points()))
}

pub fn integrate_facet(p: &LabelledPolytope, j: usize, f: &MultiPoly, measure: Measure) -> Result<Q> {
    check_degree(f)?;
    let dens = p.facet_nu_density(j, measure);
    if dens.is_zero() {
        return Ok(Q::zero());
    }
    if p.dim() == 1 {
        let (a, _) = p.edge(j);
        return Ok(dens * f.eval(&a));
    }
    let (a, b) = p.edge(j);
    Ok(dens * integrate_segment(f, &a, &b))
}

/// Sum of `integrate_facet` over all facets.
pub fn integrate_boundary(p: &LabelledPolytope, f: &MultiPoly, measure: Measure) -> Result<Q> {
    let mut acc = Q::zero();
    for j in 0..p.n_facets() {
        acc += integrate_facet(p, j, f, measure)?;
    }
    Ok(acc)
}

/// Sutherland-Hodgman clip of a convex polygon to `h >= 0`. Zero-length edges
/// are kept.
pub fn clip_polygon(verts: &[Pt], h: &Affine) -> Vec<Pt> {
    let n = verts.len();
    let mut out = Vec::new();
    for k in 0..n {
        let cur = &verts[k];
        let nxt = &verts[(k + 1) % n];
        let hc = h.eval(cur);
        let hn = h.eval(nxt);
        if !hc.is_negative() {
            out.push(cur.clone());
        }
        if (hc.is_positive() && hn.is_negative()) || (hc.is_negative() && hn.is_positive()) {
            let t = &hc / (&hc - &hn);
            out.push(lerp(cur, nxt, &t));
        }
    }
    out
}

/// Parameter sub-interval of `[0, 1]` on which `h(a + t (b - a)) >= 0`.
pub fn clip_segment(a: &Pt, b: &Pt, h: &Affine) -> Option<(Q, Q)> {
    let ha = h.eval(a);
    let hb = h.eval(b);
    match (ha.is_negative(), hb.is_negative()) {
        (false, false) => Some((Q::zero(), Q::one())),
        (true, true) => None,
        (false, true) => Some((Q::zero(), &ha / (&ha - &hb))),
        (true, false) => Some((&ha / (&ha - &hb), Q::one())),
    }
}

pub fn integrate_truncated(p: &LabelledPolytope, h: &Affine, f: &MultiPoly) -> Result<Q> {
    check_degree(f)?;
    if p.dim() == 1 {
        let a = &p.vertices()[0].point;
        let b = &p.vertices()[1].point;
        return Ok(match clip_segment(a, b, h) {
            None => Q::zero(),
            Some((t0, t1)) => {
                let g = f.restrict(a, &sub_pt(b, a));
                g.integrate(&t0, &t1) * (&b[0] - &a[0])
            }
        });
    }
    Ok(integrate_polygon(f, &clip_polygon(&p.vertex_points(), h)))
}

/// Boundary integral of `f` over `{h >= 0}`.
pub fn integrate_boundary_truncated(p: &LabelledPolytope, h: &Affine, f: &MultiPoly, measure: Measure) -> Result<Q> {
    check_degree(f)?;
    let mut acc = Q::zero();
    for j in 0..p.n_facets() {
        let dens = p.facet_nu_density(j, measure);
        if dens.is_zero() {
            continue;
        }
        let (a, b) = p.edge(j);
        if p.dim() == 1 {
            if !h.eval(&a).is_negative() {
                acc += dens * f.eval(&a);
            }
            continue;
        }
        if let Some((t0, t1)) = clip_segment(&a, &b, h) {
            let g = f.restrict(&a, &sub_pt(&b, &a));
            acc += dens * g.integrate(&t0, &t1);
        }
    }
    Ok(acc)
}

/// Moments `int f_i f_j` for the basis `{1, x, y}` (`{1, x}` in dimension one).
pub fn gram_matrix(p: &LabelledPolytope) -> Vec<Vec<Q>> {
    let basis = basis(p.dim());
    let n = basis.len();
    let mut m = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = integrate_interior(p, &(&basis[i] * &basis[j])).expect("degree 2");
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    m
}

pub fn basis(dim: usize) -> Vec<MultiPoly> {
    let mut b = vec![MultiPoly::constant(Q::one()), MultiPoly::x()];
    if dim == 2 {
        b.push(MultiPoly::y());
    }
    b
}

/// Leading principal minors by exact elimination.
pub fn leading_minors(m: &[Vec<Q>]) -> Vec<Q> {
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<Q>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
            crate::linalg::det(&sub)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Facet;
    use crate::rational::{q, qr};

    fn simplex() -> LabelledPolytope {
        LabelledPolytope::new(
            2,
            vec![
                Facet::new([1, 0], q(0), q(1)).unwrap(),
                Facet::new([0, 1], q(0), q(1)).unwrap(),
                Facet::new([-1, -1], q(1), q(1)).unwrap(),
            ],
        )
        .unwrap()
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
    fn simplex_moments() {
        let p = simplex();
        assert_eq!(integrate_interior(&p, &MultiPoly::constant(q(1))).unwrap(), qr(1, 2));
        assert_eq!(integrate_interior(&p, &MultiPoly::x()).unwrap(), qr(1, 6));
        // x^2 y over the simplex: 2! 1! / 5! = 1/60
        assert_eq!(integrate_interior(&p, &MultiPoly::monomial(q(1), 2, 1)).unwrap(), qr(1, 60));
    }

    #[test]
    fn truncations() {
        let s = square();
        let one = MultiPoly::constant(q(1));
        assert_eq!(integrate_truncated(&s, &Affine::new(q(1), q(0), qr(-1, 2)), &one).unwrap(), qr(1, 2));
        assert_eq!(integrate_truncated(&s, &Affine::constant(q(-1)), &one).unwrap(), q(0));
        let t = simplex();
        assert_eq!(integrate_truncated(&t, &Affine::new(q(1), q(-1), q(0)), &one).unwrap(), qr(1, 4));
    }

    #[test]
    fn square_gram() {
        let m = gram_matrix(&square());
        let want = [[q(1), qr(1, 2), qr(1, 2)], [qr(1, 2), qr(1, 3), qr(1, 4)], [qr(1, 2), qr(1, 4), qr(1, 3)]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j], want[i][j]);
            }
        }
        assert!(leading_minors(&m).iter().all(|d| d.is_positive()));
    }

    #[test]
    fn facet_integrals() {
        let s = square();
        assert_eq!(integrate_facet(&s, 0, &MultiPoly::x(), Measure::Df).unwrap(), qr(1, 2));
        let c = s.with_cusps(&[0]).unwrap();
        assert_eq!(integrate_facet(&c, 0, &MultiPoly::x(), Measure::Df).unwrap(), q(0));
        assert_eq!(integrate_facet(&c, 0, &MultiPoly::x(), Measure::Reference).unwrap(), qr(1, 2));
    }

    #[test]
    fn degree_cap() {
        let f = MultiPoly::monomial(q(1), 5, 4);
        assert_eq!(integrate_interior(&square(), &f), Err(TorexError::DegreeTooHigh(9)));
    }
}
