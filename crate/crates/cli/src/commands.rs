use crate::input::{rational, rational_list, InputEcho, Preset, Source};
use crate::{AnalyzeArgs, AnsatzArg, CaseArg, ConstructArgs, FchiArgs, Format, Numerics, PlotArgs, SweepArgs};
use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;
use torex::classify::{classify_pair, Final};
use torex::extremal::{extremal_affine, normal_cone_family, szekelyhidi_constraint, Convention, DfContext};
use torex::presets::{hirzebruch, hirzebruch_qk, sloped_quadrilateral};
use torex::rational::{fmt_q, q, to_f64};
use torex::stability::{corner_determinant, Status};
use torex::{Affine, LabelledPolytope, UniPoly, Q};
use torex_metrics::analysis::{analyze as run_analysis, AnalysisOptions};
use torex_metrics::ansatz::{hyperbolic_for_hirzebruch, AmbitoricSolution, BoundaryData, HyperbolicCase, IdentityCheck};
use torex_metrics::verify::{abreu_residual, abreu_residual_on, boundary_reports, interior_grid, scalar_curvature, BoundaryFit, ResidualReport};

pub const SCHEMA: &str = "torex/1";

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

const TOOL: Tool = Tool { name: "torex", version: env!("CARGO_PKG_VERSION") };

#[derive(Serialize)]
struct Config {
    convention: Convention,
    grid: usize,
    fd_step: f64,
}

impl From<&Numerics> for Config {
    fn from(n: &Numerics) -> Self {
        Config { convention: n.convention.into(), grid: n.grid, fd_step: n.fd_step }
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema: &'static str,
    tool: &'a Tool,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<&'a InputEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<Config>,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(command: &'static str, input: Option<&InputEcho>, config: Option<Config>, body: T, out: Option<&Path>) -> Result<()> {
    let report = Report { schema: SCHEMA, tool: &TOOL, command, input, config, body };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeBody {
    extremal: Affine,
    #[serde(flatten)]
    analysis: torex_metrics::analysis::Analysis,
    consistent: bool,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<bool> {
    let (p, echo) = args.source.load()?;
    let opts = AnalysisOptions { grid: args.numerics.grid, h: args.numerics.fd_step, ..Default::default() };
    let analysis = run_analysis(&p, &opts)?;
    let consistent = analysis.consistent();
    let extremal = extremal_affine(&p, args.numerics.convention.into())?;
    let body = AnalyzeBody { extremal, analysis, consistent };
    emit("analyze", Some(&echo), Some((&args.numerics).into()), body, args.out.as_deref())?;
    Ok(consistent)
}

#[derive(Serialize)]
struct FchiFacet {
    facet: usize,
    cusp: bool,
    #[serde(flatten)]
    family: torex::extremal::PiecewisePoly1D,
    max_degree: usize,
    c_max: String,
    /// Largest value of the facet label over the polygon.
    label_max: String,
    value_at_zero: String,
    slope_at_zero: String,
    second_derivative_at_zero: String,
    szekelyhidi: String,
    second_derivative_matches: bool,
}

fn taylor_at_start(piece: &UniPoly, c0: &Q) -> [Q; 3] {
    let d1 = piece.deriv();
    let d2 = d1.deriv();
    [piece.eval(c0), d1.eval(c0), d2.eval(c0)]
}

fn fchi_facet(p: &LabelledPolytope, ctx: &DfContext, i: usize) -> Result<FchiFacet> {
    let family = normal_cone_family(ctx, i)?;
    let start = family.breakpoints[0].clone();
    let [f0, f1, f2] = taylor_at_start(&family.pieces[0], &start);
    let label = p.facet(i).reference_label();
    let label_max = p.vertices().iter().map(|v| label.eval(&v.point)).max().expect("vertices");
    let sz = szekelyhidi_constraint(ctx, i);
    Ok(FchiFacet {
        facet: i,
        cusp: p.facet(i).is_cusp(),
        max_degree: family.max_degree(),
        c_max: fmt_q(&family.c_max()),
        label_max: fmt_q(&label_max),
        value_at_zero: fmt_q(&f0),
        slope_at_zero: fmt_q(&f1),
        second_derivative_at_zero: fmt_q(&f2),
        second_derivative_matches: f2 == sz,
        szekelyhidi: fmt_q(&sz),
        family,
    })
}

fn facet_arg(source: &Source, p: &LabelledPolytope, name: &str) -> Result<usize> {
    let probe = Source { cusp: vec![name.to_string()], ..source.clone() };
    // resolve the name against the preset without touching the cusp set of `p`
    let (resolved, _) = probe.load()?;
    let extra: Vec<usize> = resolved.cusps().into_iter().filter(|j| !p.cusps().contains(j)).collect();
    match extra.as_slice() {
        [j] => Ok(*j),
        _ => name.trim().parse::<usize>().ok().filter(|&j| j < p.n_facets()).ok_or_else(|| anyhow!("bad facet {name:?}")),
    }
}

pub fn fchi(args: &FchiArgs) -> Result<bool> {
    let (p, echo) = args.source.load()?;
    if p.dim() != 2 {
        bail!("fchi needs a polygon");
    }
    let facets: Vec<usize> = match &args.facet {
        Some(name) => vec![facet_arg(&args.source, &p, name)?],
        None if p.cusps().is_empty() => (0..p.n_facets()).collect(),
        None => p.cusps(),
    };
    let ctx = DfContext::new(&p)?;
    let rows: Vec<FchiFacet> = facets.iter().map(|&i| fchi_facet(&p, &ctx, i)).collect::<Result<_>>()?;
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["facet", "c", "value", "value_exact"])?;
        for r in &rows {
            let (lo, hi) = (r.family.breakpoints[0].clone(), r.family.c_max());
            let n = args.samples.max(2);
            for k in 0..n {
                let c = &lo + (&hi - &lo) * Q::new((k as i64).into(), ((n - 1) as i64).into());
                let v = r.family.eval(&c);
                w.write_record([r.facet.to_string(), to_f64(&c).to_string(), to_f64(&v).to_string(), fmt_q(&v)])?;
            }
        }
        w.flush()?;
    }
    #[derive(Serialize)]
    struct Body {
        facets: Vec<FchiFacet>,
    }
    emit("fchi", Some(&echo), None, Body { facets: rows }, args.out.as_deref())?;
    Ok(true)
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<usize> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    let mut n = 0;
    for r in rows {
        w.write_record(&r)?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

fn outline_rows(p: &LabelledPolytope) -> Vec<Vec<String>> {
    let pts = p.vertex_points();
    (0..=pts.len())
        .map(|k| {
            let v = &pts[k % pts.len()];
            vec![(k % pts.len()).to_string(), to_f64(&v[0]).to_string(), to_f64(&v[1]).to_string()]
        })
        .collect()
}

fn cusp_rows(p: &LabelledPolytope) -> Vec<Vec<String>> {
    p.cusps()
        .into_iter()
        .map(|j| {
            let (a, b) = p.edge(j);
            vec![j.to_string(), to_f64(&a[0]).to_string(), to_f64(&a[1]).to_string(), to_f64(&b[0]).to_string(), to_f64(&b[1]).to_string()]
        })
        .collect()
}

#[derive(Serialize)]
struct FileSummary {
    file: String,
    rows: usize,
}

#[derive(Serialize)]
struct Panel {
    panel: usize,
    case: &'static str,
    cusps: Vec<&'static str>,
    verdict: Final,
    files: Vec<FileSummary>,
}

/// Cusp sets of the three theorem cases, two per case.
const PANELS: [(&str, &[&str]); 6] = [
    ("a", &["s0"]),
    ("a", &["s-infinity"]),
    ("b", &["fibre"]),
    ("b", &["s0", "fibre"]),
    ("c", &["fibre", "fibre2"]),
    ("c", &["fibre", "fibre2", "s0"]),
];

fn bounding_box(p: &LabelledPolytope) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in p.vertex_points() {
        for k in 0..2 {
            lo[k] = lo[k].min(to_f64(&v[k]));
            hi[k] = hi[k].max(to_f64(&v[k]));
        }
    }
    (lo, hi)
}

fn scalar_rows(p: &LabelledPolytope, sol: Option<&AmbitoricSolution>, s: &Affine, grid: usize, h: f64) -> Vec<Vec<String>> {
    let (lo, hi) = bounding_box(p);
    let cells: Vec<(usize, usize)> = (0..grid).flat_map(|i| (0..grid).map(move |j| (i, j))).collect();
    cells
        .par_iter()
        .map(|&(i, j)| {
            let x = [
                lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / grid as f64,
                lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / grid as f64,
            ];
            let inside = p.facets().iter().all(|f| f.reference_label().eval_f64(x) > 0.0);
            let extremal = if inside { s.eval_f64(x).to_string() } else { String::new() };
            let metric = match (inside, sol) {
                (true, Some(sol)) => scalar_curvature(sol, x, h).map(|v| v.to_string()).unwrap_or_default(),
                _ => String::new(),
            };
            vec![i.to_string(), j.to_string(), x[0].to_string(), x[1].to_string(), inside.to_string(), extremal, metric]
        })
        .collect()
}

/// `H(n, n)` along the inward ray from each facet midpoint, against the
/// smooth model `2 L`.
fn boundary_rows(sol: &AmbitoricSolution) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (j, f) in sol.polytope.facets().iter().enumerate() {
        let (a, b) = sol.polytope.edge(j);
        let mid = [(to_f64(&a[0]) + to_f64(&b[0])) / 2.0, (to_f64(&a[1]) + to_f64(&b[1])) / 2.0];
        let n = [f.normal[0] as f64, f.normal[1] as f64];
        let nn = n[0] * n[0] + n[1] * n[1];
        for k in 0..=24 {
            let l = 10f64.powf(-4.0 + 3.0 * k as f64 / 24.0);
            let x = [mid[0] + l * n[0] / nn, mid[1] + l * n[1] / nn];
            let hnn = sol.h_quad(x, n).map(|v| v.to_string()).unwrap_or_default();
            rows.push(vec![j.to_string(), f.is_cusp().to_string(), l.to_string(), hnn, (2.0 * l).to_string()]);
        }
    }
    rows
}

pub fn plot(args: &PlotArgs) -> Result<bool> {
    let (p, echo) = args.source.load()?;
    if p.dim() != 2 {
        bail!("plot needs a polygon");
    }
    let dir = &args.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    let mut put = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<()> {
        let rows = write_csv(&dir.join(name), header, rows)?;
        files.push(FileSummary { file: name.to_string(), rows });
        Ok(())
    };
    put("outline.csv", &["vertex", "x", "y"], outline_rows(&p))?;
    put("cusps.csv", &["facet", "x0", "y0", "x1", "y1"], cusp_rows(&p))?;
    let s = extremal_affine(&p, args.numerics.convention.into())?;
    let sol = AmbitoricSolution::from_polytope(&p)?;
    put(
        "scalar.csv",
        &["i", "j", "x", "y", "inside", "extremal", "metric"],
        scalar_rows(&p, sol.as_ref(), &s, args.numerics.grid, args.numerics.fd_step),
    )?;
    if let Some(sol) = &sol {
        put("boundary.csv", &["facet", "cusp", "label", "h_nn", "smooth_model"], boundary_rows(sol))?;
    }
    let mut panels = Vec::new();
    if args.panels {
        if args.source.preset != Some(Preset::Hirzebruch) {
            bail!("--panels needs --preset hirzebruch");
        }
        for (k, (case, names)) in PANELS.iter().enumerate() {
            let src = Source { cusp: names.iter().map(|s| s.to_string()).collect(), ..args.source.clone() };
            let (pp, _) = src.load()?;
            let sub = format!("panel-{}", k + 1);
            fs::create_dir_all(dir.join(&sub))?;
            let verdict = classify_pair(&pp)?.verdict;
            let mut pf = Vec::new();
            for (name, header, rows) in [
                ("outline.csv", &["vertex", "x", "y"][..], outline_rows(&pp)),
                ("cusps.csv", &["facet", "x0", "y0", "x1", "y1"][..], cusp_rows(&pp)),
            ] {
                let file = format!("{sub}/{name}");
                let n = write_csv(&dir.join(&file), header, rows)?;
                pf.push(FileSummary { file, rows: n });
            }
            panels.push(Panel { panel: k + 1, case, cusps: names.to_vec(), verdict, files: pf });
        }
        write_csv(
            &dir.join("panels.csv"),
            &["panel", "case", "cusps", "verdict"],
            panels.iter().map(|p| vec![p.panel.to_string(), p.case.to_string(), p.cusps.join("+"), format!("{:?}", p.verdict)]),
        )?;
    }
    #[derive(Serialize)]
    struct Body {
        directory: String,
        solution: Option<torex_metrics::ansatz::AnsatzKind>,
        files: Vec<FileSummary>,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        panels: Vec<Panel>,
    }
    let body = Body { directory: dir.display().to_string(), solution: sol.as_ref().map(|s| s.kind), files, panels };
    emit("plot", Some(&echo), Some((&args.numerics).into()), body, None)?;
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub cell: usize,
    pub family: &'static str,
    pub p1: String,
    pub p2: String,
    pub cusps: Vec<usize>,
    pub condition_i: Status,
    pub verdict: Final,
    /// Hessian determinant at the corner of the edges adjacent to each cusp.
    pub determinants: Vec<String>,
    pub signs: Vec<i32>,
}

fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n)).map(|mask| (0..n).filter(|&j| mask & (1 << j) != 0).collect()).collect()
}

fn sweep_cell(cell: usize, family: &'static str, p1: &Q, p2: &Q, base: &LabelledPolytope, cusps: &[usize]) -> Result<SweepRow> {
    let p = base.with_cusps(cusps)?;
    let report = classify_pair(&p)?;
    let ctx = DfContext::new(&p)?;
    let mut determinants = Vec::new();
    let mut signs = Vec::new();
    for &c in cusps {
        let d = corner_determinant(&ctx, c)?.determinant;
        signs.push(torex::rational::sign(&d));
        determinants.push(fmt_q(&d));
    }
    Ok(SweepRow {
        cell,
        family,
        p1: fmt_q(p1),
        p2: fmt_q(p2),
        cusps: cusps.to_vec(),
        condition_i: report.condition_i.status,
        verdict: report.verdict,
        determinants,
        signs,
    })
}

type Builder = fn(&Q, &Q) -> torex::Result<LabelledPolytope>;

pub fn sweep_rows(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    let list = |name: &str, v: &Option<String>| -> Result<Vec<Q>> {
        rational_list(name, v.as_deref().ok_or_else(|| anyhow!("sweep needs --{name}"))?)
    };
    let (family, xs, ys, build): (&'static str, Vec<Q>, Vec<Q>, Builder) = match args.preset {
        Preset::Hirzebruch => {
            if args.m.is_empty() {
                bail!("sweep needs --m");
            }
            let ms = args.m.iter().map(|&m| q(m)).collect();
            let hz: Builder = |m, a| hirzebruch(m.to_integer().try_into().unwrap_or(i64::MAX), a);
            ("hirzebruch", ms, list("a", &args.a)?, hz)
        }
        Preset::Qk => ("qk", list("q", &args.q)?, list("k", &args.k)?, hirzebruch_qk),
        Preset::Dk => ("dk", list("d", &args.d)?, list("k", &args.k)?, sloped_quadrilateral),
        _ => bail!("sweep supports the hirzebruch, qk and dk presets"),
    };
    let mut jobs = Vec::new();
    for x in &xs {
        for y in &ys {
            let base = build(x, y)?;
            let configs: Vec<Vec<usize>> = if args.cusp.is_empty() {
                match args.preset {
                    Preset::Hirzebruch => nonempty_subsets(4),
                    _ => nonempty_subsets(4).into_iter().filter(|c| c.len() == 2).collect(),
                }
            } else {
                let src = Source {
                    input: None,
                    preset: Some(args.preset),
                    m: None,
                    a: None,
                    q: None,
                    k: None,
                    d: None,
                    cusp: args.cusp.clone(),
                };
                let mut v = Vec::new();
                for c in &src.cusp {
                    let j = match args.preset {
                        Preset::Hirzebruch => torex::presets::hirzebruch_facet(c.trim()).or_else(|| c.trim().parse().ok()),
                        _ => c.trim().parse().ok(),
                    }
                    .filter(|&j| j < 4)
                    .ok_or_else(|| anyhow!("unknown cusp facet {c:?}"))?;
                    if !v.contains(&j) {
                        v.push(j);
                    }
                }
                vec![v]
            };
            for c in configs {
                jobs.push((x.clone(), y.clone(), base.clone(), c));
            }
        }
    }
    let rows: Vec<Result<SweepRow>> = jobs
        .par_iter()
        .enumerate()
        .map(|(cell, (x, y, base, c))| sweep_cell(cell, family, x, y, base, c))
        .collect();
    rows.into_iter().collect()
}

pub fn sweep(args: &SweepArgs) -> Result<bool> {
    let rows = sweep_rows(args)?;
    match args.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body {
                rows: Vec<SweepRow>,
            }
            emit("sweep", None, None, Body { rows }, args.out.as_deref())?;
        }
        Format::Csv => {
            let sink: Box<dyn Write> = match &args.out {
                Some(path) => Box::new(fs::File::create(path).with_context(|| format!("writing {}", path.display()))?),
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(["cell", "family", "p1", "p2", "cusps", "condition_i", "verdict", "determinants", "signs"])?;
            for r in &rows {
                let join = |v: Vec<String>| v.join(";");
                w.write_record([
                    r.cell.to_string(),
                    r.family.to_string(),
                    r.p1.clone(),
                    r.p2.clone(),
                    join(r.cusps.iter().map(|c| c.to_string()).collect()),
                    format!("{:?}", r.condition_i),
                    format!("{:?}", r.verdict),
                    join(r.determinants.clone()),
                    join(r.signs.iter().map(|s| s.to_string()).collect()),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(true)
}

fn pair(name: &str, v: &Option<String>) -> Result<[Q; 2]> {
    let xs = rational_list(name, v.as_deref().ok_or_else(|| anyhow!("this ansatz needs --{name}"))?)?;
    match <[Q; 2]>::try_from(xs) {
        Ok(p) => Ok(p),
        Err(_) => bail!("--{name} takes two values"),
    }
}

#[derive(Serialize)]
struct ConstructBody {
    solution: AmbitoricSolution,
    extremal: Affine,
    identities: Vec<IdentityCheck>,
    residual: Option<ResidualReport>,
    residual_half: Option<ResidualReport>,
    residual_error: Option<String>,
    boundary: Vec<BoundaryFit>,
    consistent: bool,
}

fn build_solution(args: &ConstructArgs) -> Result<(AmbitoricSolution, Option<InputEcho>)> {
    let data = || -> Result<BoundaryData> {
        Ok(BoundaryData {
            alpha: pair("alpha", &args.alpha)?,
            beta: pair("beta", &args.beta)?,
            r_alpha: pair("r-alpha", &args.r_alpha)?,
            r_beta: pair("r-beta", &args.r_beta)?,
        })
    };
    let sol = match args.ansatz {
        None => {
            let (p, echo) = args.source.load()?;
            let sol = AmbitoricSolution::from_polytope(&p)?.ok_or_else(|| anyhow!("no explicit solution is known for this polygon"))?;
            return Ok((sol, Some(echo)));
        }
        Some(AnsatzArg::Product) => AmbitoricSolution::solve_product(&data()?)?,
        Some(AnsatzArg::Calabi) => AmbitoricSolution::solve_calabi(&data()?)?,
        Some(AnsatzArg::Bryant) => AmbitoricSolution::bryant(pair("labels", &args.labels)?)?,
        Some(AnsatzArg::Hyperbolic) => {
            let m = args.source.m.ok_or_else(|| anyhow!("the hyperbolic ansatz needs --m"))?;
            let case = match args.case {
                CaseArg::Fibre => HyperbolicCase::FibreOnly,
                CaseArg::FibreSection => HyperbolicCase::FibrePlusSection,
            };
            match (&args.alpha_inf, &args.source.a) {
                (Some(ai), _) => AmbitoricSolution::solve_hyperbolic(m, &rational("b", &args.b)?, &rational("alpha-inf", ai)?, case)?,
                (None, Some(a)) => hyperbolic_for_hirzebruch(m, &rational("a", a)?, case, 1e-9)?,
                (None, None) => bail!("the hyperbolic ansatz needs --alpha-inf or --a"),
            }
        }
    };
    Ok((sol, None))
}

pub fn construct(args: &ConstructArgs) -> Result<bool> {
    let (solution, echo) = build_solution(args)?;
    let identities = solution.identities()?;
    let (grid, h) = (args.numerics.grid, args.numerics.fd_step);
    let (residual, residual_half, residual_error) = match abreu_residual(&solution, grid, h) {
        Ok(r) => {
            let pts = interior_grid(&solution, grid, 4.0 * h);
            let half = abreu_residual_on(&solution, &pts, grid, h / 2.0).ok();
            (Some(r), half, None)
        }
        Err(e) => (None, None, Some(e.to_string())),
    };
    let boundary = boundary_reports(&solution)?;
    let consistent = identities.iter().all(|c| c.holds);
    let extremal = extremal_affine(&solution.polytope, args.numerics.convention.into())?;
    let body = ConstructBody { solution, extremal, identities, residual, residual_half, residual_error, boundary, consistent };
    emit("construct", echo.as_ref(), Some((&args.numerics).into()), body, args.out.as_deref())?;
    Ok(consistent)
}
