//! Standard labelled polytopes: Hirzebruch trapezoids in two charts, the
//! simplex, the square and the sloped quadrilateral family `(d, k)`.

use crate::error::{Result, TorexError};
use crate::polytope::{Facet, LabelledPolytope};
use crate::rational::{q, Q};
use num_traits::{One, Signed, Zero};

/// Facet order: fibre `x2 = 0`, section `x1 = a`, fibre `x2 = m x1`, section `x1 = 1`.
pub const HIRZEBRUCH_NAMES: [&str; 4] = ["fibre", "s-infinity", "fibre2", "s0"];

/// Hirzebruch surface `F_m` with Kahler class parameter `a > 1`: vertices
/// `(1, 0), (a, 0), (a, m a), (1, m)`.
pub fn hirzebruch(m: i64, a: &Q) -> Result<LabelledPolytope> {
    if m < 1 || a <= &Q::one() {
        return Err(TorexError::MalformedDocument("need m >= 1 and a > 1".into()));
    }
    LabelledPolytope::new(
        2,
        vec![
            Facet::new([0, 1], q(0), q(1))?,
            Facet::new([-1, 0], a.clone(), q(1))?,
            Facet::new([m, -1], q(0), q(1))?,
            Facet::new([1, 0], q(-1), q(1))?,
        ],
    )
}

/// Facet index for a cusp name of the Hirzebruch chart.
pub fn hirzebruch_facet(name: &str) -> Option<usize> {
    match name.trim().to_ascii_lowercase().as_str() {
        "fibre" | "fiber" | "fibre1" | "f1" => Some(0),
        "s-infinity" | "sinf" | "s_inf" | "s-inf" | "sinfinity" => Some(1),
        "fibre2" | "fiber2" | "f2" => Some(2),
        "s0" | "s-zero" | "s_0" => Some(3),
        _ => None,
    }
}

/// Quadrilateral `y >= 0, 1 - x >= 0, (q - k) x - y + k >= 0, x >= 0`.
pub fn hirzebruch_qk(qq: &Q, k: &Q) -> Result<LabelledPolytope> {
    if !qq.is_positive() || !k.is_positive() {
        return Err(TorexError::MalformedDocument("need q > 0 and k > 0".into()));
    }
    LabelledPolytope::new(
        2,
        vec![
            Facet::new([0, 1], q(0), q(1))?,
            Facet::new([-1, 0], q(1), q(1))?,
            Facet::from_raw([qq - k, q(-1)], k.clone(), q(1))?,
            Facet::new([1, 0], q(0), q(1))?,
        ],
    )
}

/// Quadrilateral with vertices `(-d, 0), (k, 0), (0, 1), (-d, 1)`; facets in
/// the order left, bottom, slanted, top.
pub fn sloped_quadrilateral(d: &Q, k: &Q) -> Result<LabelledPolytope> {
    if !d.is_positive() || k.is_negative() {
        return Err(TorexError::MalformedDocument("need d > 0 and k >= 0".into()));
    }
    let slanted = if k.is_zero() {
        Facet::new([-1, 0], q(0), q(1))?
    } else {
        Facet::from_raw([q(-1), -k.clone()], k.clone(), q(1))?
    };
    LabelledPolytope::new(
        2,
        vec![Facet::new([1, 0], d.clone(), q(1))?, Facet::new([0, 1], q(0), q(1))?, slanted, Facet::new([0, -1], q(1), q(1))?],
    )
}

/// Standard simplex; facets `x2 >= 0`, `1 - x1 - x2 >= 0`, `x1 >= 0`.
pub fn simplex() -> LabelledPolytope {
    LabelledPolytope::new(
        2,
        vec![
            Facet::new([0, 1], q(0), q(1)).expect("facet"),
            Facet::new([-1, -1], q(1), q(1)).expect("facet"),
            Facet::new([1, 0], q(0), q(1)).expect("facet"),
        ],
    )
    .expect("simplex")
}

/// Unit square; facets bottom, right, top, left.
pub fn square() -> LabelledPolytope {
    LabelledPolytope::new(
        2,
        vec![
            Facet::new([0, 1], q(0), q(1)).expect("facet"),
            Facet::new([-1, 0], q(1), q(1)).expect("facet"),
            Facet::new([0, -1], q(1), q(1)).expect("facet"),
            Facet::new([1, 0], q(0), q(1)).expect("facet"),
        ],
    )
    .expect("square")
}

/// Interval `[0, length]` with endpoint weights.
pub fn interval(length: &Q, w0: &Q, w1: &Q) -> Result<LabelledPolytope> {
    LabelledPolytope::new(1, vec![Facet::new([1, 0], q(0), w0.clone())?, Facet::new([-1, 0], length.clone(), w1.clone())?])
}
