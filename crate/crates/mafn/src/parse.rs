//! Text forms of domains, densities, points and mesh lengths.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use mafn_core::{ConvexDomain, Point, Shape};

/// Parses a comma separated list of floats.
pub fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().with_context(|| format!("not a number: {t:?}"))
        })
        .collect()
}

/// A float or a fraction `p/q`.
pub fn length(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
        let q: f64 = q.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
        return Ok(p / q);
    }
    s.parse().with_context(|| format!("not a length: {s:?}"))
}

/// `x` or `x,y`; one-dimensional points get `y = 0`.
pub fn point(s: &str) -> Result<Point> {
    match floats(s)?.as_slice() {
        [x] => Ok([*x, 0.0]),
        [x, y] => Ok([*x, *y]),
        _ => bail!("expected x or x,y, got {s:?}"),
    }
}

/// Reads `box:lo..,hi..`, `ball:c..,r`, `interval:a,b` or
/// `polygon:x,y;x,y;...` (or `polygon:<file>` with one `x y` pair per line).
pub fn domain(s: &str) -> Result<ConvexDomain> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("domain {s:?} lacks a kind prefix"))?;
    let d = match kind.trim() {
        "interval" => match floats(rest)?.as_slice() {
            [a, b] => ConvexDomain::interval(*a, *b)?,
            _ => bail!("interval needs a,b"),
        },
        "box" => match floats(rest)?.as_slice() {
            [a, b] => ConvexDomain::interval(*a, *b)?,
            [x0, y0, x1, y1] => ConvexDomain::rectangle([*x0, *y0], [*x1, *y1])?,
            _ => bail!("box needs x0,x1 or x0,y0,x1,y1"),
        },
        "ball" => match floats(rest)?.as_slice() {
            [c, r] => ConvexDomain::ball(1, [*c, 0.0], *r)?,
            [cx, cy, r] => ConvexDomain::ball(2, [*cx, *cy], *r)?,
            _ => bail!("ball needs c,r or cx,cy,r"),
        },
        "polygon" => ConvexDomain::polygon(polygon_vertices(rest)?)?,
        other => bail!("unknown domain kind {other:?}"),
    };
    Ok(d)
}

fn polygon_vertices(rest: &str) -> Result<Vec<Point>> {
    let inline: Result<Vec<Point>> = rest.split(';').map(point).collect();
    if let Ok(v) = inline {
        if v.len() >= 3 {
            return Ok(v);
        }
    }
    let text = std::fs::read_to_string(Path::new(rest.trim()))
        .with_context(|| format!("reading polygon vertices from {rest:?}"))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| point(&l.split_whitespace().collect::<Vec<_>>().join(",")))
        .collect()
}

/// Inverse of [`domain`], with inline polygon vertices.
pub fn domain_string(d: &ConvexDomain) -> String {
    match d.shape() {
        Shape::Box { lo, hi } if d.dim() == 1 => format!("box:{},{}", lo[0], hi[0]),
        Shape::Box { lo, hi } => format!("box:{},{},{},{}", lo[0], lo[1], hi[0], hi[1]),
        Shape::Ball { center, radius } if d.dim() == 1 => format!("ball:{},{}", center[0], radius),
        Shape::Ball { center, radius } => format!("ball:{},{},{}", center[0], center[1], radius),
        Shape::Polygon { vertices } => {
            let mut s = String::from("polygon:");
            for (i, v) in vertices.iter().enumerate() {
                if i > 0 {
                    s.push(';');
                }
                write!(s, "{},{}", v[0], v[1]).unwrap();
            }
            s
        }
    }
}

/// Density names: `unit` or `rq:<c>` for `1 / (1 + c‖p‖²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityName {
    Unit,
    RationalQuadratic(f64),
}

impl DensityName {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "unit" {
            return Ok(DensityName::Unit);
        }
        if let Some(c) = s.strip_prefix("rq:") {
            let c: f64 = c.parse().with_context(|| format!("bad density constant in {s:?}"))?;
            if !(c >= 0.0) {
                bail!("rational-quadratic density needs c >= 0");
            }
            return Ok(DensityName::RationalQuadratic(c));
        }
        bail!("unknown density {s:?} (expected unit or rq:<c>)")
    }

    pub fn density(self) -> mafn_core::Density<'static> {
        match self {
            DensityName::Unit => mafn_core::Density::Unit,
            DensityName::RationalQuadratic(c) => mafn_core::Density::RationalQuadratic { c },
        }
    }
}
