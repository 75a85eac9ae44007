//! Checks of an explicit solution: the Abreu residual on an interior grid,
//! boundary behaviour of `H` on each facet, and a Legendre round trip of the
//! symplectic potential.

use crate::ansatz::{AmbitoricSolution, AnsatzKind, ScalarCurvature};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use torex::error::{Result, TorexError};
use torex::extremal::{extremal_affine, Convention};
use torex::poly::lerp;
use torex::rational::{fmt_q, from_f64, q, qr, to_f64};
use torex::{Affine, Pt, UniPoly, Q};

trait Field: Clone + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<Output = Self> + std::ops::Div<Output = Self> {
    fn int(k: i32) -> Self;
}

impl Field for f64 {
    fn int(k: i32) -> Self {
        k as f64
    }
}

impl Field for Q {
    fn int(k: i32) -> Self {
        q(k as i64)
    }
}

fn stencil<T, F>(f: F, p: &[T; 2], h: &T) -> Result<T>
where
    T: Field,
    F: Fn(&[T; 2]) -> Result<[[T; 2]; 2]>,
{
    let at = |dx: i32, dy: i32| -> Result<[[T; 2]; 2]> {
        f(&[p[0].clone() + T::int(dx) * h.clone(), p[1].clone() + T::int(dy) * h.clone()])
    };
    let c = at(0, 0)?;
    let (xp, xm, yp, ym) = (at(1, 0)?, at(-1, 0)?, at(0, 1)?, at(0, -1)?);
    let (pp, pm, mp, mm) = (at(1, 1)?, at(1, -1)?, at(-1, 1)?, at(-1, -1)?);
    let h2 = h.clone() * h.clone();
    let two = T::int(2);
    let d11 = (xp[0][0].clone() + xm[0][0].clone() - two.clone() * c[0][0].clone()) / h2.clone();
    let d22 = (yp[1][1].clone() + ym[1][1].clone() - two.clone() * c[1][1].clone()) / h2.clone();
    let d12 = (pp[0][1].clone() - pm[0][1].clone() - mp[0][1].clone() + mm[0][1].clone()) / (T::int(4) * h2);
    Ok(T::int(0) - (d11 + two * d12 + d22))
}

/// `-(H11,11 + 2 H12,12 + H22,22)` by central differences, in exact arithmetic.
/// `None` when the chart is not rational.
pub fn abreu_operator_exact(sol: &AmbitoricSolution, p: &Pt, h: &Q) -> Result<Option<Q>> {
    if sol.kind == AnsatzKind::Hyperbolic {
        return Ok(None);
    }
    let f = |x: &Pt| sol.evaluate_h_exact_unchecked(x).ok_or(TorexError::UnknownChart(0));
    stencil(f, p, h).map(Some)
}

pub fn abreu_operator(sol: &AmbitoricSolution, p: [f64; 2], h: f64) -> Result<f64> {
    if sol.kind == AnsatzKind::Hyperbolic {
        let f = |x: &Pt| sol.hyperbolic_h_precise(x).ok_or_else(|| TorexError::OutsideDomain(format!("({}, {})", to_f64(&x[0]), to_f64(&x[1]))));
        return stencil(f, &[from_f64(p[0]), from_f64(p[1])], &from_f64(h)).map(|v| to_f64(&v));
    }
    stencil(|x: &[f64; 2]| sol.evaluate_h_unchecked(*x), &p, &h)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub grid: usize,
    pub h: f64,
    pub points: usize,
    pub max_abs: f64,
    pub rms: f64,
    /// Largest residuals with their points, worst first.
    pub worst: Vec<([f64; 2], f64)>,
    /// Whether the stencil was evaluated in exact rational arithmetic.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualSample {
    pub x: [f64; 2],
    pub s: f64,
    pub residual: f64,
}

fn distance_to_facets(sol: &AmbitoricSolution, p: [f64; 2]) -> f64 {
    sol.polytope
        .facets()
        .iter()
        .map(|f| {
            let n = [f.normal[0] as f64, f.normal[1] as f64];
            f.reference_label().eval_f64(p) / (n[0] * n[0] + n[1] * n[1]).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Interior sample points of a `grid x grid` lattice over the bounding box,
/// at distance at least `margin` from every facet.
pub fn interior_grid(sol: &AmbitoricSolution, grid: usize, margin: f64) -> Vec<Pt> {
    let verts = sol.polytope.vertex_points();
    let lo = [0, 1].map(|k| verts.iter().map(|v| v[k].clone()).min().unwrap());
    let hi = [0, 1].map(|k| verts.iter().map(|v| v[k].clone()).max().unwrap());
    let n = grid as i64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let p = [
                &lo[0] + (&hi[0] - &lo[0]) * qr(2 * i + 1, 2 * n),
                &lo[1] + (&hi[1] - &lo[1]) * qr(2 * j + 1, 2 * n),
            ];
            let pf = [to_f64(&p[0]), to_f64(&p[1])];
            if sol.inside(&p) && distance_to_facets(sol, pf) >= margin {
                out.push(p);
            }
        }
    }
    out
}

/// Abreu residual `S(H) - s` at the given points, where `s` is the extremal
/// affine function of the labelled polygon.
pub fn residual_samples(sol: &AmbitoricSolution, pts: &[Pt], h: f64) -> Result<Vec<ResidualSample>> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(TorexError::GridTooCoarse(format!("h {h}")));
    }
    let s = extremal_affine(&sol.polytope, Convention::Main)?;
    let exact = sol.kind != AnsatzKind::Hyperbolic;
    let hq = from_f64(h);
    pts.par_iter()
        .map(|p| -> Result<ResidualSample> {
            let pf = [to_f64(&p[0]), to_f64(&p[1])];
            let sv = s.eval(p);
            let residual = if exact {
                let v = abreu_operator_exact(sol, p, &hq)?.ok_or(TorexError::UnknownChart(0))?;
                to_f64(&(v - &sv))
            } else {
                abreu_operator(sol, pf, h)? - s.eval_f64(pf)
            };
            Ok(ResidualSample { x: pf, s: to_f64(&sv), residual })
        })
        .collect()
}

/// Residual summary over a fixed point set.
pub fn abreu_residual_on(sol: &AmbitoricSolution, pts: &[Pt], grid: usize, h: f64) -> Result<ResidualReport> {
    if pts.is_empty() {
        return Err(TorexError::GridTooCoarse("no interior points at this step".into()));
    }
    let samples = residual_samples(sol, pts, h)?;
    let max_abs = samples.iter().fold(0.0f64, |m, r| m.max(r.residual.abs()));
    let rms = (samples.iter().map(|r| r.residual * r.residual).sum::<f64>() / samples.len() as f64).sqrt();
    let mut order: Vec<&ResidualSample> = samples.iter().collect();
    order.sort_by(|a, b| b.residual.abs().total_cmp(&a.residual.abs()));
    let worst = order.iter().take(5).map(|r| (r.x, r.residual)).collect();
    Ok(ResidualReport { grid, h, points: samples.len(), max_abs, rms, worst, exact: sol.kind != AnsatzKind::Hyperbolic })
}

/// Abreu residual over interior points of a `grid x grid` lattice at
/// distance at least `4 h` from the boundary.
pub fn abreu_residual(sol: &AmbitoricSolution, grid: usize, h: f64) -> Result<ResidualReport> {
    if grid < 8 || !(h > 0.0 && h <= 0.1) {
        return Err(TorexError::GridTooCoarse(format!("grid {grid}, h {h}")));
    }
    abreu_residual_on(sol, &interior_grid(sol, grid, 4.0 * h), grid, h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Behaviour {
    /// `H(dL, dL) = 2 L + O(L^2)` with the facet label `L`.
    Regular,
    /// `H(n, n) = L^2 / alpha + O(L^3)` with `alpha` constant along the facet.
    Poincare,
    /// Quadratic vanishing whose coefficient varies along the facet.
    CuspNonPoincare,
    /// Neither of the above at the given tolerances.
    Irregular,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicBoundary {
    /// Taylor coefficients `c0..c3` of `H(n, n)` in the reference label, per station.
    pub coefficients: Vec<[String; 4]>,
    pub behaviour: Behaviour,
    #[serde(with = "torex::rational::qopt")]
    pub slope: Option<Q>,
    #[serde(with = "torex::rational::qopt")]
    pub alpha_hat: Option<Q>,
    #[serde(with = "torex::rational::qopt")]
    pub beta_hat: Option<Q>,
    /// Third derivative of the one-variable function at its double root.
    #[serde(with = "torex::rational::qopt")]
    pub third_derivative: Option<Q>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericBoundary {
    pub behaviour: Behaviour,
    pub slopes: Vec<f64>,
    pub k2: Vec<f64>,
    pub k3: Vec<f64>,
    pub alpha_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    /// Coefficient of `-log L` in the potential, per station.
    pub log_coefficients: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryFit {
    pub facet: usize,
    pub cusp: bool,
    pub symbolic: Option<SymbolicBoundary>,
    pub numeric: NumericBoundary,
}

impl BoundaryFit {
    pub fn behaviour(&self) -> Behaviour {
        self.symbolic.as_ref().map(|s| s.behaviour).unwrap_or(self.numeric.behaviour)
    }
}

const STATIONS: i64 = 6;

fn stations(sol: &AmbitoricSolution, j: usize) -> Vec<Pt> {
    let (a, b) = sol.polytope.edge(j);
    (1..STATIONS).map(|k| lerp(&a, &b, &qr(k, STATIONS))).collect()
}

/// Inward direction along which the reference label grows at unit rate.
fn inward(n: [i64; 2]) -> Pt {
    let nn = q(n[0] * n[0] + n[1] * n[1]);
    [q(n[0]) / &nn, q(n[1]) / &nn]
}

/// Taylor coefficients `c0..c3` of `L -> H(n, n)(p0 + L d)` from exact
/// interpolation of `den(L) H(n, n)`, where `den` clears the chart's poles.
fn ray_series(sol: &AmbitoricSolution, p0: &Pt, n: [i64; 2]) -> Option<[Q; 4]> {
    let d = inward(n);
    let nq = [q(n[0]), q(n[1])];
    let point = |l: &Q| [&p0[0] + l * &d[0], &p0[1] + l * &d[1]];
    let den = |l: &Q| -> Q {
        match sol.kind {
            AnsatzKind::Calabi => {
                let x = sol.chart.apply(&point(l))[0].clone();
                &x * &x * &x
            }
            _ => q(1),
        }
    };
    let hnn = |l: &Q| -> Option<Q> {
        let h = sol.evaluate_h_exact_unchecked(&point(l))?;
        Some(&h[0][0] * &nq[0] * &nq[0] + &h[0][1] * &nq[0] * &nq[1] * q(2) + &h[1][1] * &nq[1] * &nq[1])
    };
    let xs: Vec<Q> = (1..=10).map(|k| qr(k, 1000)).collect();
    let ys: Vec<Q> = xs.iter().map(|l| Some(hnn(l)? * den(l))).collect::<Option<_>>()?;
    let num = UniPoly::interpolate(&xs, &ys);
    let dens: Vec<Q> = xs.iter().map(den).collect();
    let dpoly = UniPoly::interpolate(&xs[..4], &dens[..4]);
    // series division num / dpoly at L = 0
    let mut c: Vec<Q> = Vec::with_capacity(4);
    let d0 = dpoly.coeff(0);
    if d0.is_zero() {
        return None;
    }
    for k in 0..4 {
        let mut acc = num.coeff(k);
        for (j, cj) in c.iter().enumerate() {
            acc -= cj * dpoly.coeff(k - j);
        }
        c.push(acc / &d0);
    }
    Some([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
}

fn symbolic_boundary(sol: &AmbitoricSolution, j: usize) -> Option<SymbolicBoundary> {
    if sol.kind == AnsatzKind::Hyperbolic {
        return None;
    }
    let f = sol.polytope.facet(j);
    let series: Vec<[Q; 4]> = stations(sol, j).iter().map(|p| ray_series(sol, p, f.normal)).collect::<Option<_>>()?;
    let coefficients = series.iter().map(|c| [fmt_q(&c[0]), fmt_q(&c[1]), fmt_q(&c[2]), fmt_q(&c[3])]).collect();
    let all = |pred: &dyn Fn(&[Q; 4]) -> bool| series.iter().all(pred);
    let mut out = SymbolicBoundary {
        coefficients,
        behaviour: Behaviour::Irregular,
        slope: None,
        alpha_hat: None,
        beta_hat: None,
        third_derivative: None,
    };
    if !f.is_cusp() {
        let slope = &series[0][1] / &f.weight;
        if all(&|c| c[0].is_zero() && c[1] == series[0][1]) {
            out.behaviour = if slope == q(2) { Behaviour::Regular } else { Behaviour::Irregular };
        }
        out.slope = Some(slope);
        return Some(out);
    }
    if all(&|c| c[0].is_zero() && c[1].is_zero()) {
        let c2 = &series[0][2];
        if !c2.is_positive() {
            out.behaviour = Behaviour::Irregular;
        } else if all(&|c| &c[2] == c2) {
            out.behaviour = Behaviour::Poincare;
            let alpha = q(1) / c2;
            let c3s: Vec<&Q> = series.iter().map(|c| &c[3]).collect();
            if c3s.iter().all(|c| *c == c3s[0]) {
                out.beta_hat = Some(-(c3s[0] * &alpha * &alpha));
            }
            out.alpha_hat = Some(alpha);
        } else {
            out.behaviour = Behaviour::CuspNonPoincare;
        }
    }
    out.third_derivative = sol.cusp_third_derivative(j);
    Some(out)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn numeric_boundary(sol: &AmbitoricSolution, j: usize) -> Result<NumericBoundary> {
    let f = sol.polytope.facet(j);
    let d = inward(f.normal).map(|x| to_f64(&x));
    let n = [f.normal[0] as f64, f.normal[1] as f64];
    let pts: Vec<[f64; 2]> = stations(sol, j).iter().map(|p| [to_f64(&p[0]), to_f64(&p[1])]).collect();
    let at = |p: [f64; 2], l: f64| [p[0] + l * d[0], p[1] + l * d[1]];
    let hnn = |p: [f64; 2], l: f64| sol.h_quad(at(p, l), n);
    let mut out = NumericBoundary {
        behaviour: Behaviour::Irregular,
        slopes: Vec::new(),
        k2: Vec::new(),
        k3: Vec::new(),
        alpha_hat: None,
        beta_hat: None,
        log_coefficients: Vec::new(),
    };
    if !f.is_cusp() {
        let w = to_f64(&f.weight);
        let delta = 1e-4;
        for &p in &pts {
            let g = |l: f64| -> Result<f64> { Ok(hnn(p, l)? / (w * l)) };
            out.slopes.push(2.0 * g(delta / 2.0)? - g(delta)?);
        }
        if out.slopes.iter().all(|s| (s - 2.0).abs() <= 1e-6) {
            out.behaviour = Behaviour::Regular;
        }
        return Ok(out);
    }
    let fit = |p: [f64; 2], delta: f64| -> Result<(f64, f64)> {
        let v1 = hnn(p, delta)?;
        let v2 = hnn(p, 2.0 * delta)?;
        Ok(((8.0 * v1 - v2) / (4.0 * delta * delta), (v2 - 4.0 * v1) / (4.0 * delta.powi(3))))
    };
    let mut stable = true;
    for &p in &pts {
        let (a2, a3) = fit(p, 1e-3)?;
        let (b2, b3) = fit(p, 5e-4)?;
        stable &= rel_close(a2, b2, 1e-3);
        out.k2.push(b2);
        out.k3.push(2.0 * b3 - a3);
        let u = |l: f64| sol.symplectic_potential(at(p, l));
        let (d1, d2) = (1e-4, 1e-6);
        // the linear part of u is negligible at these scales
        out.log_coefficients.push((u(d2)? - u(d1)?) / (d1.ln() - d2.ln()));
    }
    let k2 = out.k2[0];
    let spread = out.k2.iter().all(|&k| rel_close(k, k2, 1e-3));
    if stable && k2 > 0.0 {
        if spread {
            out.behaviour = Behaviour::Poincare;
            let alpha = 1.0 / k2;
            let k3 = out.k3.iter().sum::<f64>() / out.k3.len() as f64;
            out.alpha_hat = Some(alpha);
            out.beta_hat = Some(-k3 * alpha * alpha);
        } else {
            out.behaviour = Behaviour::CuspNonPoincare;
        }
    }
    Ok(out)
}

/// Boundary behaviour of `H` on facet `j`.
pub fn boundary_report(sol: &AmbitoricSolution, j: usize) -> Result<BoundaryFit> {
    if j >= sol.polytope.n_facets() {
        return Err(TorexError::BadIndex(format!("facet {j}")));
    }
    Ok(BoundaryFit {
        facet: j,
        cusp: sol.polytope.facet(j).is_cusp(),
        symbolic: symbolic_boundary(sol, j),
        numeric: numeric_boundary(sol, j)?,
    })
}

pub fn boundary_reports(sol: &AmbitoricSolution) -> Result<Vec<BoundaryFit>> {
    (0..sol.polytope.n_facets()).map(|j| boundary_report(sol, j)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LegendreSample {
    pub x: [f64; 2],
    pub y: [f64; 2],
    /// Dual potential at `y`, computed from the point recovered by Newton's method.
    pub phi: f64,
    /// `phi(y) + u(x) - <x, y>`.
    pub duality_residual: f64,
    /// Distance between the recovered point and `x`.
    pub recovery_error: f64,
}

const GRAD_STEP: f64 = 1e-5;
const HESS_STEP: f64 = 1e-4;

fn grad(u: &dyn Fn([f64; 2]) -> Option<f64>, p: [f64; 2], h: f64) -> Option<[f64; 2]> {
    let at = |a: f64, b: f64| u([p[0] + a, p[1] + b]);
    Some([(at(h, 0.0)? - at(-h, 0.0)?) / (2.0 * h), (at(0.0, h)? - at(0.0, -h)?) / (2.0 * h)])
}

fn hess(u: &dyn Fn([f64; 2]) -> Option<f64>, p: [f64; 2], h: f64) -> Option<[[f64; 2]; 2]> {
    let at = |a: f64, b: f64| u([p[0] + a, p[1] + b]);
    let c = at(0.0, 0.0)?;
    let u11 = (at(h, 0.0)? - 2.0 * c + at(-h, 0.0)?) / (h * h);
    let u22 = (at(0.0, h)? - 2.0 * c + at(0.0, -h)?) / (h * h);
    let u12 = (at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h);
    Some([[u11, u12], [u12, u22]])
}

/// Finite-difference Hessian of a potential.
pub fn potential_hessian(u: &dyn Fn([f64; 2]) -> Option<f64>, p: [f64; 2]) -> Option<[[f64; 2]; 2]> {
    hess(u, p, HESS_STEP)
}

/// Legendre dual of a strictly convex potential `u` (returning `None` off its
/// domain) at the gradient images of `points`, each inverted by damped
/// Newton iteration from `start`.
pub fn legendre_table(u: &dyn Fn([f64; 2]) -> Option<f64>, start: [f64; 2], points: &[[f64; 2]]) -> Vec<LegendreSample> {
    points
        .iter()
        .filter_map(|&x| {
            let y = grad(u, x, GRAD_STEP)?;
            let mut z = start;
            for _ in 0..200 {
                let g = grad(u, z, GRAD_STEP)?;
                let r = [g[0] - y[0], g[1] - y[1]];
                if r[0].abs().max(r[1].abs()) < 1e-13 {
                    break;
                }
                let hm = hess(u, z, HESS_STEP)?;
                let det = hm[0][0] * hm[1][1] - hm[0][1] * hm[1][0];
                let step = [(hm[1][1] * r[0] - hm[0][1] * r[1]) / det, (hm[0][0] * r[1] - hm[1][0] * r[0]) / det];
                let mut t = 1.0;
                while t > 1e-12 && u([z[0] - t * step[0], z[1] - t * step[1]]).is_none() {
                    t *= 0.5;
                }
                z = [z[0] - t * step[0], z[1] - t * step[1]];
            }
            let phi = z[0] * y[0] + z[1] * y[1] - u(z)?;
            Some(LegendreSample {
                x,
                y,
                phi,
                duality_residual: phi + u(x)? - (x[0] * y[0] + x[1] * y[1]),
                recovery_error: ((z[0] - x[0]).powi(2) + (z[1] - x[1]).powi(2)).sqrt(),
            })
        })
        .collect()
}

/// Legendre samples of a solution's potential on interior grid points.
pub fn legendre_sample(sol: &AmbitoricSolution, grid: usize) -> Vec<LegendreSample> {
    let pts: Vec<[f64; 2]> = interior_grid(sol, grid, 0.05).iter().map(|p| [to_f64(&p[0]), to_f64(&p[1])]).collect();
    let c = sol.polytope.centroid();
    let u = |p: [f64; 2]| sol.symplectic_potential(p).ok();
    legendre_table(&u, [to_f64(&c[0]), to_f64(&c[1])], &pts)
}

/// `max |Hess(u) H - I|` at `x`, with the potential Hessian by finite differences.
pub fn inverse_error(sol: &AmbitoricSolution, x: [f64; 2]) -> Result<f64> {
    let u = |p: [f64; 2]| sol.symplectic_potential(p).ok();
    let hu = hess(&u, x, HESS_STEP).ok_or_else(|| TorexError::OutsideDomain(format!("({}, {})", x[0], x[1])))?;
    let h = sol.evaluate_h(x)?;
    let mut err = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let v = hu[i][0] * h[0][j] + hu[i][1] * h[1][j] - if i == j { 1.0 } else { 0.0 };
            err = err.max(v.abs());
        }
    }
    Ok(err)
}

/// Scalar curvature at an interior point: closed form for the product and
/// Calabi ansatze, the Abreu operator on `H` otherwise.
pub fn scalar_curvature(sol: &AmbitoricSolution, p: [f64; 2], h: f64) -> Result<f64> {
    if !sol.inside_f64(p) {
        return Err(TorexError::OutsideDomain(format!("({}, {})", p[0], p[1])));
    }
    match sol.closed_form_scalar() {
        Some(ScalarCurvature::Affine(s)) => Ok(s.eval_f64(p)),
        None => abreu_operator(sol, p, h),
    }
}

/// Extremal affine function of the solved polygon.
pub fn extremal_function(sol: &AmbitoricSolution) -> Result<Affine> {
    extremal_affine(&sol.polytope, Convention::Main)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{BoundaryData, HyperbolicCase};
    use torex::presets::{hirzebruch, square};

    #[test]
    fn product_residual_is_exactly_zero() {
        let s = AmbitoricSolution::product_from_polytope(&square().with_cusps(&[0]).unwrap()).unwrap().unwrap();
        let r = abreu_residual(&s, 12, 0.01).unwrap();
        assert!(r.exact);
        assert_eq!(r.max_abs, 0.0);
    }

    #[test]
    fn calabi_residual_shrinks_quadratically() {
        let p = hirzebruch(1, &q(2)).unwrap().with_cusps(&[1]).unwrap();
        let s = AmbitoricSolution::calabi_from_polytope(&p).unwrap().unwrap();
        let pts = interior_grid(&s, 10, 0.08);
        let a = abreu_residual_on(&s, &pts, 10, 0.02).unwrap().max_abs;
        let b = abreu_residual_on(&s, &pts, 10, 0.01).unwrap().max_abs;
        assert!((3.5..4.5).contains(&(a / b)), "{a} {b}");
    }

    #[test]
    fn perturbation_is_detected() {
        let p = hirzebruch(1, &q(2)).unwrap().with_cusps(&[1, 3]).unwrap();
        let s = AmbitoricSolution::calabi_from_polytope(&p).unwrap().unwrap();
        let bad = s.perturb_a(&UniPoly::new(vec![q(0), q(0), q(0), q(0), qr(1, 100)]));
        assert!(abreu_residual(&bad, 16, 1e-3).unwrap().max_abs > 0.1);
    }

    #[test]
    fn grid_too_coarse() {
        let s = AmbitoricSolution::solve_product(&BoundaryData {
            alpha: [q(0), q(1)],
            beta: [q(0), q(1)],
            r_alpha: [q(1), q(1)],
            r_beta: [q(1), q(1)],
        })
        .unwrap();
        assert!(matches!(abreu_residual(&s, 4, 0.01), Err(TorexError::GridTooCoarse(_))));
        assert!(matches!(abreu_residual(&s, 16, 0.5), Err(TorexError::GridTooCoarse(_))));
    }

    #[test]
    fn square_boundary_fits() {
        let s = AmbitoricSolution::product_from_polytope(&square().with_cusps(&[0]).unwrap()).unwrap().unwrap();
        let fits = boundary_reports(&s).unwrap();
        assert_eq!(fits[0].behaviour(), Behaviour::Poincare);
        for f in &fits[1..] {
            assert_eq!(f.behaviour(), Behaviour::Regular);
            assert_eq!(f.numeric.behaviour, Behaviour::Regular);
        }
        let sym = fits[0].symbolic.as_ref().unwrap();
        let num = fits[0].numeric.alpha_hat.unwrap();
        assert!((to_f64(sym.alpha_hat.as_ref().unwrap()) - num).abs() < 1e-6);
    }

    #[test]
    fn hyperbolic_boundary_and_residual() {
        let s = AmbitoricSolution::solve_hyperbolic(2, &q(1), &q(12), HyperbolicCase::FibreOnly).unwrap();
        let fits = boundary_reports(&s).unwrap();
        for f in &fits {
            if f.cusp {
                assert_eq!(f.numeric.behaviour, Behaviour::CuspNonPoincare, "{f:?}");
                let l = &f.numeric.log_coefficients;
                assert!((l[0] - l[4]).abs() > 0.1 * l[0].abs());
            } else {
                assert_eq!(f.numeric.behaviour, Behaviour::Regular, "{f:?}");
            }
        }
        let r = abreu_residual(&s, 16, 1e-3).unwrap();
        assert!(r.max_abs < 1e-5, "{r:?}");
    }

    #[test]
    fn potential_inverts_metric() {
        let s = AmbitoricSolution::solve_hyperbolic(2, &q(1), &q(12), HyperbolicCase::FibreOnly).unwrap();
        let c = s.polytope.centroid();
        assert!(inverse_error(&s, [to_f64(&c[0]), to_f64(&c[1])]).unwrap() < 1e-5);
        let p = hirzebruch(1, &q(2)).unwrap().with_cusps(&[1]).unwrap();
        let s = AmbitoricSolution::calabi_from_polytope(&p).unwrap().unwrap();
        assert!(inverse_error(&s, [1.4, 0.5]).unwrap() < 1e-6);
        let b = AmbitoricSolution::bryant([q(1), q(2)]).unwrap();
        assert!(inverse_error(&b, [0.3, 0.2]).unwrap() < 1e-6);
    }

    #[test]
    fn legendre_duality() {
        let quad = |p: [f64; 2]| Some(0.5 * (p[0] * p[0] + p[1] * p[1]));
        let t = legendre_table(&quad, [0.0, 0.0], &[[0.3, -0.2], [1.0, 2.0]]);
        for s in &t {
            assert!((s.phi - 0.5 * (s.y[0] * s.y[0] + s.y[1] * s.y[1])).abs() < 1e-9);
        }
        let p = hirzebruch(1, &q(2)).unwrap().with_cusps(&[1]).unwrap();
        let s = AmbitoricSolution::calabi_from_polytope(&p).unwrap().unwrap();
        let t = legendre_sample(&s, 8);
        assert!(!t.is_empty());
        assert!(t.iter().all(|x| x.duality_residual.abs() < 1e-9), "{t:?}");
    }

    #[test]
    fn fubini_study_potential_is_guillemin() {
        let s = AmbitoricSolution::product_from_polytope(&square()).unwrap().unwrap();
        let g = |p: [f64; 2]| {
            0.5 * (p[0] * p[0].ln() + (1.0 - p[0]) * (1.0 - p[0]).ln() + p[1] * p[1].ln() + (1.0 - p[1]) * (1.0 - p[1]).ln())
        };
        let h = 1e-3;
        for k in 1..=10 {
            let p = [k as f64 / 11.0, 1.0 - k as f64 / 12.0];
            let diff = |a: f64, b: f64| s.symplectic_potential([p[0] + a, p[1] + b]).unwrap() - g([p[0] + a, p[1] + b]);
            let d11 = (diff(h, 0.0) - 2.0 * diff(0.0, 0.0) + diff(-h, 0.0)) / (h * h);
            let d12 = (diff(h, h) - diff(h, -h) - diff(-h, h) + diff(-h, -h)) / (4.0 * h * h);
            assert!(d11.abs() < 1e-4 && d12.abs() < 1e-4);
        }
    }

    #[test]
    fn closed_form_scalar_matches_extremal() {
        let p = hirzebruch(2, &q(2)).unwrap().with_cusps(&[1, 3]).unwrap();
        let s = AmbitoricSolution::calabi_from_polytope(&p).unwrap().unwrap();
        let e = extremal_function(&s).unwrap();
        for x in [[1.5, 0.5], [1.2, 1.0]] {
            assert!((scalar_curvature(&s, x, 1e-3).unwrap() - e.eval_f64(x)).abs() < 1e-8);
        }
    }
}
