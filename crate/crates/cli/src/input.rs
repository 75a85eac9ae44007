use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use torex::polytope::{parse_polytope, PolytopeDocument};
use torex::presets::{hirzebruch, hirzebruch_facet, hirzebruch_qk, simplex, sloped_quadrilateral, square};
use torex::rational::{fmt_q, parse_q};
use torex::{LabelledPolytope, Q};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Hirzebruch trapezoid, needs --m and --a
    Hirzebruch,
    /// Standard simplex
    Simplex,
    /// Unit square
    Square,
    /// Quadrilateral with slanted side through (0, k) and (1, q), needs --q and --k
    Qk,
    /// Quadrilateral with vertices (-d, 0), (k, 0), (0, 1), (-d, 1), needs --d and --k
    Dk,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Polytope document (JSON)
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub m: Option<i64>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    /// Cusp facets: indices or names (fibre, s-infinity, fibre2, s0 for Hirzebruch)
    #[arg(long, value_delimiter = ',')]
    pub cusp: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
    pub cusps: Vec<usize>,
    pub polytope: PolytopeDocument,
}

pub fn rational(name: &str, text: &str) -> Result<Q> {
    parse_q(text.trim()).ok_or_else(|| anyhow!("--{name}: expected a rational such as 3/2, got {text:?}"))
}

pub fn rational_list(name: &str, text: &str) -> Result<Vec<Q>> {
    text.split(',').map(|t| rational(name, t)).collect()
}

fn required<'a>(name: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| anyhow!("this preset needs --{name}"))
}

fn facet_index(preset: Option<Preset>, name: &str, n: usize) -> Result<usize> {
    let name = name.trim();
    if let Ok(j) = name.parse::<usize>() {
        if j >= n {
            bail!("cusp facet {j} out of range (polytope has {n} facets)");
        }
        return Ok(j);
    }
    let named = match preset {
        Some(Preset::Hirzebruch) => hirzebruch_facet(name),
        Some(Preset::Square) => ["bottom", "right", "top", "left"].iter().position(|s| *s == name),
        Some(Preset::Simplex) => ["bottom", "hypotenuse", "left"].iter().position(|s| *s == name),
        Some(Preset::Qk) => ["bottom", "right", "slanted", "left"].iter().position(|s| *s == name),
        Some(Preset::Dk) => ["left", "bottom", "slanted", "top"].iter().position(|s| *s == name),
        _ => None,
    };
    named.ok_or_else(|| anyhow!("unknown cusp facet {name:?}"))
}

impl Source {
    pub fn load(&self) -> Result<(LabelledPolytope, InputEcho)> {
        let mut parameters = BTreeMap::new();
        let base = match (&self.input, self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                parse_polytope(&text)?
            }
            (None, Some(Preset::Hirzebruch)) => {
                let m = self.m.ok_or_else(|| anyhow!("this preset needs --m"))?;
                let a = rational("a", required("a", &self.a)?)?;
                parameters.insert("m".into(), m.to_string());
                parameters.insert("a".into(), fmt_q(&a));
                hirzebruch(m, &a)?
            }
            (None, Some(Preset::Simplex)) => simplex(),
            (None, Some(Preset::Square)) => square(),
            (None, Some(Preset::Qk)) => {
                let q = rational("q", required("q", &self.q)?)?;
                let k = rational("k", required("k", &self.k)?)?;
                parameters.insert("q".into(), fmt_q(&q));
                parameters.insert("k".into(), fmt_q(&k));
                hirzebruch_qk(&q, &k)?
            }
            (None, Some(Preset::Dk)) => {
                let d = rational("d", required("d", &self.d)?)?;
                let k = rational("k", required("k", &self.k)?)?;
                parameters.insert("d".into(), fmt_q(&d));
                parameters.insert("k".into(), fmt_q(&k));
                sloped_quadrilateral(&d, &k)?
            }
            (None, None) => bail!("give --input PATH or --preset"),
        };
        let mut cusps = Vec::new();
        for c in &self.cusp {
            let j = facet_index(self.preset, c, base.n_facets())?;
            if !cusps.contains(&j) {
                cusps.push(j);
            }
        }
        let p = if cusps.is_empty() { base } else { base.with_cusps(&cusps)? };
        let echo = InputEcho {
            preset: if self.input.is_some() { None } else { self.preset },
            path: self.input.as_ref().map(|p| p.display().to_string()),
            parameters,
            cusps: p.cusps(),
            polytope: p.to_document(),
        };
        Ok((p, echo))
    }
}
