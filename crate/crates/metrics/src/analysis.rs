//! Full pipeline for one labelled polygon: stability and classification,
//! the explicit solution when an ansatz applies, and cross-checks between
//! the two.

use crate::ansatz::{hirzebruch_shape, hyperbolic_for_hirzebruch, AmbitoricSolution, HyperbolicCase, IdentityCheck};
use crate::verify::{abreu_residual, abreu_residual_on, boundary_reports, interior_grid, Behaviour, BoundaryFit, ResidualReport};
use serde::Serialize;
use torex::classify::{classify_pair, ClassificationReport, Final};
use torex::error::Result;
use torex::rational::{fmt_q, to_f64};
use torex::stability::{crease_scan, Status};
use torex::LabelledPolytope;

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub grid: usize,
    pub h: f64,
    /// Look for a hyperbolic solution on Hirzebruch trapezoids with a cusp fibre.
    pub hyperbolic_match: bool,
    /// Grid of the crease scan used to cross-check polygon stability.
    pub scan_grid: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { grid: 32, h: 1e-3, hyperbolic_match: true, scan_grid: 50 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CrossCheck {
    CrossCheck { name: name.into(), passed, detail: detail.into() }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    pub solution: AmbitoricSolution,
    /// Whether the solution lives on the input polygon itself rather than on
    /// a numerically matched representative of its class.
    pub on_input: bool,
    /// Solution facet for each input facet.
    pub facet_map: Vec<usize>,
    pub note: Option<String>,
    pub identities: Vec<IdentityCheck>,
    pub residual: Option<ResidualReport>,
    /// Same points at half the step.
    pub residual_half: Option<ResidualReport>,
    pub residual_error: Option<String>,
    pub boundary: Vec<BoundaryFit>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub classification: ClassificationReport,
    pub solution: Option<SolutionReport>,
    pub solution_error: Option<String>,
    pub checks: Vec<CrossCheck>,
    pub notes: Vec<String>,
}

impl Analysis {
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Solution for the polygon itself, or for the Hirzebruch class of a
/// trapezoid with a cusp fibre.
fn find_solution(p: &LabelledPolytope, opts: &AnalysisOptions) -> Result<Option<(AmbitoricSolution, bool, Vec<usize>, Option<String>)>> {
    if let Some(s) = AmbitoricSolution::from_polytope(p)? {
        return Ok(Some((s, true, (0..p.n_facets()).collect(), None)));
    }
    if !opts.hyperbolic_match {
        return Ok(None);
    }
    let shape = match hirzebruch_shape(p)? {
        Some(s) => s,
        None => return Ok(None),
    };
    let (short, long) = shape.frame_sections;
    let (f0, f1) = shape.frame_fibres;
    let cusp = |j: usize| p.facet(j).is_cusp();
    let (fibre, other) = match (cusp(f0), cusp(f1)) {
        (true, false) => (f0, f1),
        (false, true) => (f1, f0),
        _ => return Ok(None),
    };
    let case = match (cusp(short), cusp(long)) {
        (false, false) => HyperbolicCase::FibreOnly,
        (true, false) => HyperbolicCase::FibrePlusSection,
        _ => return Ok(None),
    };
    let sol = hyperbolic_for_hirzebruch(shape.m, &shape.a, case, 1e-9)?;
    let mut map = vec![0; 4];
    map[long] = 0;
    map[fibre] = 1;
    map[short] = 2;
    map[other] = 3;
    let ratio = crate::ansatz::hyperbolic_section_ratio(&sol);
    let note = format!(
        "solution on a Hirzebruch trapezoid m = {}, a = {} (target {}), equal to the input up to scale and lattice equivalence",
        shape.m,
        to_f64(&ratio),
        fmt_q(&shape.a)
    );
    Ok(Some((sol, false, map, Some(note))))
}

fn residual_pair(sol: &AmbitoricSolution, opts: &AnalysisOptions) -> Result<(ResidualReport, ResidualReport)> {
    let first = abreu_residual(sol, opts.grid, opts.h)?;
    let pts = interior_grid(sol, opts.grid, 4.0 * opts.h);
    Ok((first, abreu_residual_on(sol, &pts, opts.grid, opts.h / 2.0)?))
}

pub fn analyze(p: &LabelledPolytope, opts: &AnalysisOptions) -> Result<Analysis> {
    let classification = classify_pair(p)?;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    if p.dim() == 2 && matches!(p.n_facets(), 3 | 4) && !p.cusps().is_empty() {
        let scan = crease_scan(p, opts.scan_grid, 2)?;
        let status = classification.condition_i.status;
        let min = scan.min_value.clone();
        let ok = match (status, &min) {
            (Status::Unstable, Some(v)) => *v <= torex::rational::zero(),
            (Status::Stable, Some(v)) => *v > torex::rational::zero(),
            _ => true,
        };
        checks.push(check(
            "criterion agrees with crease scan",
            ok,
            format!("{status:?}; scan minimum {}", min.as_ref().map(fmt_q).unwrap_or_else(|| "none".into())),
        ));
    }
    if p.dim() != 2 {
        return Ok(Analysis { classification, solution: None, solution_error: None, checks, notes });
    }
    let (solution, solution_error) = match find_solution(p, opts) {
        Ok(Some((sol, on_input, facet_map, note))) => {
            let identities = sol.identities()?;
            let (residual, residual_half, residual_error) = match residual_pair(&sol, opts) {
                Ok((a, b)) => (Some(a), Some(b), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            let boundary = boundary_reports(&sol)?;
            (Some(SolutionReport { solution: sol, on_input, facet_map, note, identities, residual, residual_half, residual_error, boundary }), None)
        }
        Ok(None) => (None, None),
        Err(e) => (None, Some(e.to_string())),
    };
    if let Some(s) = &solution {
        let failed: Vec<&str> = s.identities.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
        checks.push(check("solution identities", failed.is_empty(), failed.join("; ")));
        if let (Some(r), Some(r2)) = (&s.residual, &s.residual_half) {
            let ratio = r.max_abs / r2.max_abs;
            checks.push(check(
                "Abreu residual is below 1e-5 or shrinks at second order",
                r.max_abs < 1e-5 || (3.5..=4.5).contains(&ratio),
                format!("{:e} at h = {}, {:e} at h / 2", r.max_abs, r.h, r2.max_abs),
            ));
        }
        for f in &s.boundary {
            if let Some(sym) = &f.symbolic {
                checks.push(check(
                    &format!("facet {}: symbolic and numeric boundary behaviour agree", f.facet),
                    sym.behaviour == f.numeric.behaviour,
                    format!("{:?} vs {:?}", sym.behaviour, f.numeric.behaviour),
                ));
            }
        }
        let by_input = |j: usize| &s.boundary[s.facet_map[j]];
        if classification.verdict == Final::PoincareExtremal && s.on_input {
            let bad: Vec<String> = (0..p.n_facets())
                .filter(|&j| {
                    let want = if p.facet(j).is_cusp() { Behaviour::Poincare } else { Behaviour::Regular };
                    by_input(j).behaviour() != want
                })
                .map(|j| j.to_string())
                .collect();
            checks.push(check("Poincare verdict matches boundary behaviour", bad.is_empty(), bad.join(", ")));
            for fr in &classification.facets {
                if let (Some(params), Some(alpha_hat)) = (&fr.params, by_input(fr.facet).symbolic.as_ref().and_then(|x| x.alpha_hat.clone())) {
                    let (a, b) = (to_f64(&params.alpha), to_f64(&alpha_hat));
                    checks.push(check(
                        &format!("facet {}: fitted alpha matches classification", fr.facet),
                        (a - b).abs() <= 0.01 * a.abs(),
                        format!("{b} vs {a}"),
                    ));
                }
            }
        }
        if classification.verdict == Final::DonaldsonOnly {
            for fr in &classification.facets {
                if !fr.condition_iii.constant {
                    let got = by_input(fr.facet).behaviour();
                    checks.push(check(
                        &format!("facet {}: non-constant facet difference gives a non-Poincare cusp", fr.facet),
                        got == Behaviour::CuspNonPoincare,
                        format!("{got:?}"),
                    ));
                }
            }
            notes.push("condition (iii) fails: not Poincare type (proved for this ansatz)".into());
        }
    } else if classification.verdict == Final::DonaldsonOnly {
        notes.push("condition (iii) fails: conjecturally not Poincare type".into());
    }
    Ok(Analysis { classification, solution, solution_error, checks, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use torex::presets::hirzebruch;
    use torex::rational::q;

    #[test]
    fn section_cusp_is_poincare() {
        let p = hirzebruch(1, &q(2)).unwrap().with_cusps(&[1]).unwrap();
        let a = analyze(&p, &AnalysisOptions { grid: 16, ..Default::default() }).unwrap();
        assert_eq!(a.classification.verdict, Final::PoincareExtremal);
        assert!(a.solution.as_ref().unwrap().on_input);
        assert!(a.consistent(), "{:#?}", a.checks);
    }

    #[test]
    fn fibre_cusp_is_not_poincare() {
        let p = hirzebruch(2, &q(2)).unwrap().with_cusps(&[0]).unwrap();
        let a = analyze(&p, &AnalysisOptions { grid: 16, ..Default::default() }).unwrap();
        assert_eq!(a.classification.verdict, Final::DonaldsonOnly);
        let s = a.solution.as_ref().unwrap();
        assert!(!s.on_input);
        assert!(a.consistent(), "{:#?}", a.checks);
    }
}
