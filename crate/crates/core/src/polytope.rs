//! Labelled polygons and intervals with cusp facets.
//!
//! A facet stores a primitive inward integer normal `n`, an offset `c` and a
//! weight `w >= 0`. Its label is `L = (<n, x> + c) / w`; weight zero marks a
//! cusp facet, whose primitive label `<n, x> + c` still serves as reference.

use crate::error::{Result, TorexError};
use crate::poly::{cross, sub_pt, Affine, Pt};
use crate::rational::{fmt_q, parse_q, q, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: [i64; 2],
    pub offset: Q,
    pub weight: Q,
}

impl Facet {
    /// Builds a facet from a possibly non-primitive rational normal, folding
    /// the scale into offset and weight.
    pub fn from_raw(normal: [Q; 2], offset: Q, weight: Q) -> Result<Facet> {
        if normal[0].is_zero() && normal[1].is_zero() {
            return Err(TorexError::MalformedDocument("zero normal".into()));
        }
        if weight.is_negative() {
            return Err(TorexError::MalformedDocument("negative weight".into()));
        }
        let l = normal[0].denom().lcm(normal[1].denom());
        let a: BigInt = (&normal[0] * Q::from_integer(l.clone())).to_integer();
        let b: BigInt = (&normal[1] * Q::from_integer(l.clone())).to_integer();
        let g = a.gcd(&b);
        let kappa = Q::new(l, g.clone());
        let na = (a / &g).to_i64().ok_or_else(|| TorexError::MalformedDocument("normal too large".into()))?;
        let nb = (b / &g).to_i64().ok_or_else(|| TorexError::MalformedDocument("normal too large".into()))?;
        Ok(Facet { normal: [na, nb], offset: offset * &kappa, weight: weight * kappa })
    }

    pub fn new(normal: [i64; 2], offset: Q, weight: Q) -> Result<Facet> {
        Facet::from_raw([q(normal[0]), q(normal[1])], offset, weight)
    }

    pub fn is_cusp(&self) -> bool {
        self.weight.is_zero()
    }

    pub fn normal_q(&self) -> Pt {
        [q(self.normal[0]), q(self.normal[1])]
    }

    /// Primitive label `<n, x> + c`.
    pub fn reference_label(&self) -> Affine {
        Affine::new(q(self.normal[0]), q(self.normal[1]), self.offset.clone())
    }

    /// Effective label `L = reference / weight`; `None` for cusp facets.
    pub fn label(&self) -> Option<Affine> {
        if self.is_cusp() {
            None
        } else {
            Some(self.reference_label().scale(&(Q::one() / &self.weight)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub point: Pt,
    /// Facet of the edge arriving at this vertex and of the edge leaving it,
    /// in counterclockwise order.
    pub facets: (usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// Boundary measure of the stability functional; zero on cusp facets.
    Df,
    /// Lattice measure with unit weight, defined on every facet.
    Reference,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalProblem {
    #[serde(with = "crate::rational::qstr")]
    pub length: Q,
    #[serde(serialize_with = "ser_pair")]
    pub masses: [Q; 2],
}

fn ser_pair<S: serde::Serializer>(x: &[Q; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(fmt_q))
}

impl IntervalProblem {
    pub fn new(length: Q, masses: [Q; 2]) -> Result<Self> {
        if !length.is_positive() || masses.iter().any(|m| m.is_negative()) {
            return Err(TorexError::MalformedDocument("interval needs length > 0 and masses >= 0".into()));
        }
        Ok(IntervalProblem { length, masses })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DelzantStatus {
    Delzant,
    /// Vertex index whose normals fail to span the lattice, or facet with non-unit weight.
    LabelledOnly { vertex: Option<usize>, facet: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledPolytope {
    dim: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vertex>,
    /// Per facet: indices of its start and end vertex in counterclockwise order.
    edges: Vec<(usize, usize)>,
}

fn angle_cmp(a: &Pt, b: &Pt) -> Ordering {
    let half = |p: &Pt| -> u8 {
        if p[1].is_positive() || (p[1].is_zero() && p[0].is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let c = cross(a, b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

impl LabelledPolytope {
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        match dim {
            1 => Self::new_interval(facets),
            2 => Self::new_polygon(facets),
            _ => Err(TorexError::MalformedDocument(format!("unsupported dimension {dim}"))),
        }
    }

    fn new_interval(facets: Vec<Facet>) -> Result<Self> {
        if facets.iter().any(|f| f.normal[1] != 0) {
            return Err(TorexError::MalformedDocument("interval normals must be one-dimensional".into()));
        }
        if facets.len() != 2 {
            return Err(TorexError::MalformedDocument("an interval has exactly two facets".into()));
        }
        let lo = facets.iter().position(|f| f.normal[0] == 1);
        let hi = facets.iter().position(|f| f.normal[0] == -1);
        let (lo, hi) = match (lo, hi) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(TorexError::UnboundedPolytope("both interval normals point the same way".into())),
        };
        let left = -facets[lo].offset.clone();
        let right = facets[hi].offset.clone();
        if right <= left {
            return Err(TorexError::EmptyInterior("interval endpoints out of order".into()));
        }
        let vertices = vec![
            Vertex { point: [left, Q::zero()], facets: (lo, lo) },
            Vertex { point: [right, Q::zero()], facets: (hi, hi) },
        ];
        let mut edges = vec![(0, 0); 2];
        edges[lo] = (0, 0);
        edges[hi] = (1, 1);
        Ok(LabelledPolytope { dim: 1, facets, vertices, edges })
    }

    fn new_polygon(facets: Vec<Facet>) -> Result<Self> {
        let n = facets.len();
        if n < 3 {
            return Err(TorexError::UnboundedPolytope(format!("{n} facets cannot bound a polygon")));
        }
        let mut normals: Vec<Pt> = facets.iter().map(|f| f.normal_q()).collect();
        normals.sort_by(angle_cmp);
        normals.dedup_by(|a, b| angle_cmp(a, b) == Ordering::Equal);
        let d = normals.len();
        let spans = d >= 3 && (0..d).all(|k| cross(&normals[k], &normals[(k + 1) % d]).is_positive());
        if !spans {
            return Err(TorexError::UnboundedPolytope("normals do not positively span the plane".into()));
        }
        let labels: Vec<Affine> = facets.iter().map(|f| f.reference_label()).collect();
        let mut pts: Vec<Pt> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = facets[i].normal_q();
                let b = facets[j].normal_q();
                let det = cross(&a, &b);
                if det.is_zero() {
                    continue;
                }
                let ci = -facets[i].offset.clone();
                let cj = -facets[j].offset.clone();
                let x = (&ci * &b[1] - &cj * &a[1]) / &det;
                let y = (&a[0] * &cj - &b[0] * &ci) / &det;
                let p = [x, y];
                if labels.iter().all(|l| !l.eval(&p).is_negative()) && !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        if pts.len() < 3 {
            return Err(TorexError::EmptyInterior(format!("only {} feasible corner(s)", pts.len())));
        }
        let cnt = Q::from_integer(BigInt::from(pts.len() as i64));
        let centre = [
            pts.iter().fold(Q::zero(), |s, p| s + &p[0]) / &cnt,
            pts.iter().fold(Q::zero(), |s, p| s + &p[1]) / &cnt,
        ];
        if labels.iter().any(|l| !l.eval(&centre).is_positive()) {
            return Err(TorexError::EmptyInterior("a label vanishes at the centroid".into()));
        }
        pts.sort_by(|a, b| angle_cmp(&sub_pt(a, &centre), &sub_pt(b, &centre)));
        let m = pts.len();
        let mut on: Vec<Vec<usize>> = Vec::with_capacity(m);
        for (k, p) in pts.iter().enumerate() {
            let inc: Vec<usize> = (0..n).filter(|&j| labels[j].eval(p).is_zero()).collect();
            if inc.len() != 2 {
                return Err(TorexError::NotSimple(format!("{} facets meet at vertex {k}", inc.len())));
            }
            on.push(inc);
        }
        let mut edges: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut edge_facet = vec![0usize; m];
        for k in 0..m {
            let k1 = (k + 1) % m;
            let shared: Vec<usize> = on[k].iter().filter(|j| on[k1].contains(j)).cloned().collect();
            if shared.len() != 1 {
                return Err(TorexError::NotSimple(format!("no unique facet between vertices {k} and {k1}")));
            }
            let j = shared[0];
            if edges[j].is_some() {
                return Err(TorexError::NotSimple(format!("facet {j} supports two edges")));
            }
            edges[j] = Some((k, k1));
            edge_facet[k] = j;
        }
        let mut e = Vec::with_capacity(n);
        for (j, ed) in edges.into_iter().enumerate() {
            match ed {
                Some(x) => e.push(x),
                None => return Err(TorexError::MalformedDocument(format!("facet {j} supports no edge"))),
            }
        }
        let vertices = pts
            .into_iter()
            .enumerate()
            .map(|(k, p)| Vertex { point: p, facets: (edge_facet[(k + m - 1) % m], edge_facet[k]) })
            .collect();
        Ok(LabelledPolytope { dim: 2, facets, vertices, edges: e })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet(&self, j: usize) -> &Facet {
        &self.facets[j]
    }

    pub fn n_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_points(&self) -> Vec<Pt> {
        self.vertices.iter().map(|v| v.point.clone()).collect()
    }

    /// Start and end of facet `j` in counterclockwise order.
    pub fn edge(&self, j: usize) -> (Pt, Pt) {
        let (a, b) = self.edges[j];
        (self.vertices[a].point.clone(), self.vertices[b].point.clone())
    }

    pub fn edge_vertices(&self, j: usize) -> (usize, usize) {
        self.edges[j]
    }

    /// Facets in counterclockwise boundary order.
    pub fn ccw_facets(&self) -> Vec<usize> {
        if self.dim == 1 {
            return vec![self.vertices[0].facets.0, self.vertices[1].facets.0];
        }
        self.vertices.iter().map(|v| v.facets.1).collect()
    }

    /// Facet following `j` counterclockwise.
    pub fn next_facet(&self, j: usize) -> usize {
        let (_, b) = self.edges[j];
        self.vertices[b].facets.1
    }

    pub fn prev_facet(&self, j: usize) -> usize {
        let (a, _) = self.edges[j];
        self.vertices[a].facets.0
    }

    pub fn cusps(&self) -> Vec<usize> {
        (0..self.facets.len()).filter(|&j| self.facets[j].is_cusp()).collect()
    }

    pub fn centroid(&self) -> Pt {
        let n = Q::from_integer(BigInt::from(self.vertices.len() as i64));
        [
            self.vertices.iter().fold(Q::zero(), |s, v| s + &v.point[0]) / &n,
            self.vertices.iter().fold(Q::zero(), |s, v| s + &v.point[1]) / &n,
        ]
    }

    /// Copy with new weights (zero marks a cusp).
    pub fn with_weights(&self, weights: &[Q]) -> Result<Self> {
        if weights.len() != self.facets.len() || weights.iter().any(|w| w.is_negative()) {
            return Err(TorexError::MalformedDocument("weight vector mismatch".into()));
        }
        let mut p = self.clone();
        for (f, w) in p.facets.iter_mut().zip(weights) {
            f.weight = w.clone();
        }
        Ok(p)
    }

    /// Copy with the listed facets turned into cusps.
    pub fn with_cusps(&self, cusps: &[usize]) -> Result<Self> {
        let mut p = self.clone();
        for &j in cusps {
            if j >= p.facets.len() {
                return Err(TorexError::BadIndex(format!("facet {j}")));
            }
            p.facets[j].weight = Q::zero();
        }
        Ok(p)
    }

    pub fn weights(&self) -> Vec<Q> {
        self.facets.iter().map(|f| f.weight.clone()).collect()
    }

    /// Lattice length of facet `j`: `|det(u, w)|` for `w` the edge vector and
    /// any `u` with `<n, u> = 1`.
    pub fn lattice_length(&self, j: usize) -> Q {
        if self.dim == 1 {
            return Q::one();
        }
        let (a, b) = self.edge(j);
        let u = unit_dual(self.facets[j].normal);
        cross(&u, &sub_pt(&b, &a)).abs()
    }

    /// Constant `c` with `int_F f dnu = c * int_0^1 f(v0 + t w) dt`.
    pub fn facet_nu_density(&self, j: usize, measure: Measure) -> Q {
        let w = match measure {
            Measure::Df => self.facets[j].weight.clone(),
            Measure::Reference => Q::one(),
        };
        w * self.lattice_length(j)
    }

    pub fn delzant_check(&self) -> DelzantStatus {
        for (j, f) in self.facets.iter().enumerate() {
            if !f.is_cusp() && !f.weight.is_one() {
                return DelzantStatus::LabelledOnly { vertex: None, facet: Some(j) };
            }
        }
        for (k, v) in self.vertices.iter().enumerate() {
            let a = self.facets[v.facets.0].normal;
            let b = self.facets[v.facets.1].normal;
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() != 1 {
                return DelzantStatus::LabelledOnly { vertex: Some(k), facet: None };
            }
        }
        DelzantStatus::Delzant
    }

    /// The induced problem on facet `i`, parametrised by its lattice arclength.
    pub fn facet_subproblem(&self, i: usize) -> IntervalProblem {
        let len = self.lattice_length(i);
        let (a, b) = self.edge(i);
        let dir = sub_pt(&b, &a);
        let mass = |j: usize| -> Q {
            let f = &self.facets[j];
            if f.is_cusp() {
                return Q::zero();
            }
            let slope = (q(f.normal[0]) * &dir[0] + q(f.normal[1]) * &dir[1]) / &len;
            &f.weight / slope.abs()
        };
        let masses = [mass(self.prev_facet(i)), mass(self.next_facet(i))];
        IntervalProblem { length: len, masses }
    }

    /// Image under `x -> M x + t` with `det M = +-1`.
    pub fn unimodular_transform(&self, m: [[i64; 2]; 2], t: &Pt) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(TorexError::NotUnimodular(det.to_string()));
        }
        // (M^-1)^T
        let inv_t = [[m[1][1] * det, -m[1][0] * det], [-m[0][1] * det, m[0][0] * det]];
        let mut facets = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let n = [
                inv_t[0][0] * f.normal[0] + inv_t[0][1] * f.normal[1],
                inv_t[1][0] * f.normal[0] + inv_t[1][1] * f.normal[1],
            ];
            let off = &f.offset - (q(n[0]) * &t[0] + q(n[1]) * &t[1]);
            facets.push(Facet::new(n, off, f.weight.clone())?);
        }
        LabelledPolytope::new(self.dim, facets)
    }

    pub fn to_document(&self) -> PolytopeDocument {
        PolytopeDocument {
            dimension: self.dim,
            facets: self
                .facets
                .iter()
                .map(|f| FacetDocument {
                    normal: if self.dim == 1 {
                        vec![serde_json::json!(f.normal[0])]
                    } else {
                        vec![serde_json::json!(f.normal[0]), serde_json::json!(f.normal[1])]
                    },
                    offset: serde_json::json!(fmt_q(&f.offset)),
                    weight: serde_json::json!(fmt_q(&f.weight)),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }
}

/// Some `u` with `<n, u> = 1` for a primitive `n`.
pub fn unit_dual(n: [i64; 2]) -> Pt {
    let e = n[0].extended_gcd(&n[1]);
    let s = if e.gcd < 0 { -1 } else { 1 };
    [q(e.x * s), q(e.y * s)]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetDocument {
    pub normal: Vec<serde_json::Value>,
    pub offset: serde_json::Value,
    pub weight: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeDocument {
    pub dimension: usize,
    pub facets: Vec<FacetDocument>,
}

fn value_q(v: &serde_json::Value, what: &str) -> Result<Q> {
    let parsed = match v {
        serde_json::Value::String(s) => parse_q(s),
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => parse_q(&n.to_string()),
        _ => None,
    };
    parsed.ok_or_else(|| TorexError::MalformedDocument(format!("{what}: expected an integer or \"p/q\" string, got {v}")))
}

pub fn parse_polytope(document: &str) -> Result<LabelledPolytope> {
    let doc: PolytopeDocument =
        serde_json::from_str(document).map_err(|e| TorexError::MalformedDocument(e.to_string()))?;
    polytope_from_document(&doc)
}

pub fn polytope_from_document(doc: &PolytopeDocument) -> Result<LabelledPolytope> {
    let mut facets = Vec::with_capacity(doc.facets.len());
    for (j, f) in doc.facets.iter().enumerate() {
        if f.normal.len() != doc.dimension {
            return Err(TorexError::MalformedDocument(format!("facet {j}: normal has {} entries", f.normal.len())));
        }
        let n0 = value_q(&f.normal[0], "normal")?;
        let n1 = if doc.dimension == 2 { value_q(&f.normal[1], "normal")? } else { Q::zero() };
        let off = value_q(&f.offset, "offset")?;
        let w = value_q(&f.weight, "weight")?;
        facets.push(Facet::from_raw([n0, n1], off, w)?);
    }
    LabelledPolytope::new(doc.dimension, facets)
}
