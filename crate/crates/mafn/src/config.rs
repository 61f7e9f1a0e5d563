//! Experiment configuration files: flat `key = value` lines, `#` comments.
//!
//! ```text
//! name = weak-quadratic
//! domain = box:-1,-1,1,1
//! function = quadratic
//! density = unit
//! h = 1/8, 1/16, 1/32, 1/64
//! regions = box:-0.25,-0.25,0.25,0.25 | ball:0,0,0.5
//! threshold = 0.05
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use mafn_core::{ConvexDomain, Shape};

use crate::builtins::{Builtin, Harmonic};
use crate::parse::{self, DensityName};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    WeakConvergence,
    BoundaryLimit,
    LaplaceConvergence,
    MassSweep,
}

impl FromStr for ExperimentKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "weak-convergence" => ExperimentKind::WeakConvergence,
            "boundary-limit" => ExperimentKind::BoundaryLimit,
            "laplace-convergence" => ExperimentKind::LaplaceConvergence,
            "mass-sweep" => ExperimentKind::MassSweep,
            other => bail!("unknown experiment kind {other:?}"),
        })
    }
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::WeakConvergence => "weak-convergence",
            ExperimentKind::BoundaryLimit => "boundary-limit",
            ExperimentKind::LaplaceConvergence => "laplace-convergence",
            ExperimentKind::MassSweep => "mass-sweep",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub domain: ConvexDomain,
    pub function: Builtin,
    pub density: DensityName,
    /// Strictly decreasing mesh lengths.
    pub hs: Vec<f64>,
    pub stencil: u32,
    /// Query regions with their labels.
    pub regions: Vec<(String, ConvexDomain)>,
    /// Relative error bound at the finest `h` (weak convergence), or the
    /// final gap bound as a fraction of the boundary oscillation.
    pub threshold: f64,
    /// Also require errors to decrease along the sweep.
    pub monotone: bool,
    /// Boundary data of the Laplace experiment.
    pub harmonic: Harmonic,
    /// Nodes where the Laplace error is measured; the whole domain if unset.
    pub compact: Option<ConvexDomain>,
    /// Absolute error bound for every `h` of the Laplace sweep. Without it
    /// the errors must decrease strictly.
    pub max_error: Option<f64>,
    /// Probe band of the boundary-limit experiment, in multiples of `h`.
    pub probe_band: f64,
    /// Allowed growth of the ABP ratio over its value at the coarsest `h`.
    pub growth: f64,
    pub svg: bool,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, domain: ConvexDomain, hs: Vec<f64>) -> Self {
        Self {
            name: kind.name().to_string(),
            kind,
            domain,
            function: Builtin::Quadratic,
            density: DensityName::Unit,
            hs,
            stencil: if kind == ExperimentKind::LaplaceConvergence { 1 } else { 2 },
            regions: Vec::new(),
            threshold: 0.05,
            monotone: false,
            harmonic: Harmonic::Saddle,
            compact: None,
            max_error: None,
            probe_band: 2.0,
            growth: 2.0,
            svg: false,
            out_dir: PathBuf::from("."),
        }
    }

    pub fn parse(text: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                bail!("line {}: duplicate key {:?}", i + 1, k.trim());
            }
        }
        let mut take = |k: &str| map.remove(k);

        let file_kind = take("kind").map(|s| s.parse::<ExperimentKind>()).transpose()?;
        let kind = match (kind, file_kind) {
            (Some(a), Some(b)) if a != b => bail!("config is for {}, not {}", b.name(), a.name()),
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => bail!("experiment kind missing"),
        };
        let domain = parse::domain(&take("domain").ok_or_else(|| anyhow!("config lacks domain"))?)?;
        let hs = take("h")
            .ok_or_else(|| anyhow!("config lacks h"))?
            .split(',')
            .map(parse::length)
            .collect::<Result<Vec<_>>>()?;
        let mut cfg = Self::new(kind, domain, hs);
        if let Some(v) = take("name") {
            cfg.name = v;
        }
        if let Some(v) = take("function") {
            cfg.function = Builtin::parse(&v)?;
        }
        if let Some(v) = take("density") {
            cfg.density = DensityName::parse(&v)?;
        }
        if let Some(v) = take("stencil") {
            cfg.stencil = v.parse().context("bad stencil")?;
        }
        if let Some(v) = take("regions") {
            cfg.regions = v
                .split('|')
                .map(|r| Ok((r.trim().to_string(), parse::domain(r.trim())?)))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = take("threshold") {
            cfg.threshold = v.parse().context("bad threshold")?;
        }
        if let Some(v) = take("monotone") {
            cfg.monotone = v.parse().context("monotone must be true or false")?;
        }
        if let Some(v) = take("harmonic") {
            cfg.harmonic = Harmonic::parse(&v)?;
        }
        if let Some(v) = take("compact") {
            cfg.compact = Some(parse::domain(&v)?);
        }
        if let Some(v) = take("max_error") {
            cfg.max_error = Some(v.parse().context("bad max_error")?);
        }
        if let Some(v) = take("probe_band") {
            cfg.probe_band = v.parse().context("bad probe_band")?;
        }
        if let Some(v) = take("growth") {
            cfg.growth = v.parse().context("bad growth")?;
        }
        if let Some(v) = take("svg") {
            cfg.svg = v.parse().context("svg must be true or false")?;
        }
        if let Some(v) = take("out_dir") {
            cfg.out_dir = PathBuf::from(v);
        }
        if let Some(k) = map.keys().next() {
            bail!("unknown config key {k:?}");
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hs.is_empty() {
            bail!("the h list is empty");
        }
        if self.hs.iter().any(|h| !(*h > 0.0)) || self.hs.windows(2).any(|w| w[1] >= w[0]) {
            bail!("the h list must be positive and strictly decreasing");
        }
        for (label, r) in self.regions.iter().map(|(l, r)| (l, r)).chain(self.compact.iter().map(|c| (&self.name, c))) {
            if r.dim() != self.domain.dim() {
                bail!("region {label} has the wrong dimension");
            }
            if !within_closure(r, &self.domain) {
                bail!("region {label} is not contained in the closed domain");
            }
        }
        if self.kind == ExperimentKind::WeakConvergence && self.regions.is_empty() {
            bail!("weak-convergence needs at least one region");
        }
        Ok(())
    }
}

/// Checks extreme points of `r` against the closure of the convex set `d`.
fn within_closure(r: &ConvexDomain, d: &ConvexDomain) -> bool {
    let tol = 1e-12 * d.diameter();
    let inside = |p| d.signed_distance(p) <= tol;
    match r.shape() {
        Shape::Ball { center, radius } if r.dim() == 2 => (0..720).all(|k| {
            let t = std::f64::consts::TAU * k as f64 / 720.0;
            inside([center[0] + radius * t.cos(), center[1] + radius * t.sin()])
        }),
        Shape::Ball { center, radius } => inside([center[0] - radius, 0.0]) && inside([center[0] + radius, 0.0]),
        _ => r.corners().into_iter().all(inside),
    }
}
