//! Text formats: node dumps, mesh-function files, hull dumps, cell dumps and
//! measure CSV.
//!
//! Mesh-function files start with
//! `mafn v1 d=<1|2> h=<h> domain=<domain> stencil=<r>` and list one
//! `id x [y] value` line per node. The domain and stencil tokens let the
//! lattice be rebuilt when the file is read back.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use mafn_core::envelope::LowerHull;
use mafn_core::measure::AtomicMeasure;
use mafn_core::{DirectionSet, Face, LatticeDomain, MeshFunction, Point, SlopeCell};

use crate::parse;

/// Seventeen significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn coords(p: Point, dim: usize) -> String {
    if dim == 1 {
        num(p[0])
    } else {
        format!("{} {}", num(p[0]), num(p[1]))
    }
}

/// `I x y` for interior nodes and `B x y` for boundary nodes, in id order.
pub fn node_dump(dom: &LatticeDomain) -> String {
    let mut s = String::new();
    for (id, p) in dom.nodes().iter().enumerate() {
        let tag = if dom.is_interior(id) { 'I' } else { 'B' };
        writeln!(s, "{tag} {}", coords(*p, dom.dim())).unwrap();
    }
    s
}

pub fn write_mesh_function(u: &MeshFunction<'_>) -> String {
    let dom = u.domain();
    let mut s = format!(
        "mafn v1 d={} h={} domain={} stencil={}\n",
        dom.dim(),
        dom.h(),
        parse::domain_string(dom.domain()),
        dom.directions().radius()
    );
    for (id, p) in dom.nodes().iter().enumerate() {
        writeln!(s, "{id} {} {}", coords(*p, dom.dim()), num(u.value(id))).unwrap();
    }
    s
}

/// Header fields and node lines of a mesh-function file.
#[derive(Debug, Clone)]
pub struct MeshFile {
    pub dom: LatticeDomain,
    pub values: Vec<f64>,
}

impl MeshFile {
    pub fn function(&self) -> Result<MeshFunction<'_>> {
        Ok(MeshFunction::from_values(&self.dom, self.values.clone())?)
    }
}

pub fn read_mesh_function(text: &str) -> Result<MeshFile> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| anyhow!("empty mesh-function file"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("mafn") || tokens.next() != Some("v1") {
        bail!("missing `mafn v1` header");
    }
    let (mut dim, mut h, mut domain, mut stencil) = (None, None, None, 1u32);
    for t in tokens {
        let (k, v) = t.split_once('=').ok_or_else(|| anyhow!("bad header token {t:?}"))?;
        match k {
            "d" => dim = Some(v.parse::<usize>().context("bad dimension")?),
            "h" => h = Some(parse::length(v)?),
            "domain" => domain = Some(parse::domain(v)?),
            "stencil" => stencil = v.parse().context("bad stencil radius")?,
            _ => {}
        }
    }
    let dim = dim.ok_or_else(|| anyhow!("header lacks d="))?;
    let h = h.ok_or_else(|| anyhow!("header lacks h="))?;
    let domain = domain.ok_or_else(|| anyhow!("header lacks domain="))?;
    if domain.dim() != dim {
        bail!("header dimension {dim} differs from the domain dimension {}", domain.dim());
    }
    let dom = LatticeDomain::build(domain, h, DirectionSet::new(dim, stencil)?)?;
    let mut values = vec![f64::NAN; dom.num_nodes()];
    let mut seen = 0;
    for (lineno, line) in lines.enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != dim + 2 {
            bail!("line {}: expected {} fields", lineno + 2, dim + 2);
        }
        let id: usize = f[0].parse().with_context(|| format!("line {}: bad id", lineno + 2))?;
        let nums: Vec<f64> = f[1..]
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {}: bad number", lineno + 2))?;
        if id >= dom.num_nodes() {
            bail!("line {}: node {id} does not exist on this lattice", lineno + 2);
        }
        let p = dom.node(id);
        let q = if dim == 1 { [nums[0], 0.0] } else { [nums[0], nums[1]] };
        if (p[0] - q[0]).abs().max((p[1] - q[1]).abs()) > 1e-9 * h {
            bail!("line {}: node {id} is at {p:?} on the rebuilt lattice, not {q:?}", lineno + 2);
        }
        values[id] = nums[dim];
        seen += 1;
    }
    if seen != dom.num_nodes() || values.iter().any(|v| v.is_nan()) {
        bail!("file lists {seen} nodes, the lattice has {}", dom.num_nodes());
    }
    Ok(MeshFile { dom, values })
}

/// `V id x [y] value` per hull vertex, then `F p1 [p2] b v1 v2 [v3]` per
/// face.
pub fn write_hull(hull: &LowerHull) -> String {
    let dim = hull.dim();
    let mut s = format!("hull v1 d={dim}\n");
    for v in hull.vertices() {
        writeln!(s, "V {} {} {}", v.node, coords(v.point, dim), num(v.value)).unwrap();
    }
    for f in hull.faces() {
        let ids: Vec<String> = f.vertices[..dim + 1].iter().map(|v| v.to_string()).collect();
        writeln!(s, "F {} {} {}", coords(f.slope, dim), num(f.offset), ids.join(" ")).unwrap();
    }
    s
}

pub fn read_hull(text: &str) -> Result<LowerHull> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| anyhow!("empty hull file"))?;
    let dim: usize = header
        .split_whitespace()
        .find_map(|t| t.strip_prefix("d="))
        .ok_or_else(|| anyhow!("hull header lacks d="))?
        .parse()?;
    let mut points = std::collections::HashMap::new();
    let mut raw_faces = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let nums = |s: &[&str]| -> Result<Vec<f64>> { s.iter().map(|t| Ok(t.parse::<f64>()?)).collect() };
        match f.first() {
            Some(&"V") if f.len() == dim + 3 => {
                let id: usize = f[1].parse()?;
                let c = nums(&f[2..2 + dim])?;
                let value: f64 = f[2 + dim].parse()?;
                points.insert(id, (if dim == 1 { [c[0], 0.0] } else { [c[0], c[1]] }, value));
            }
            Some(&"F") if f.len() == 2 * dim + 3 => {
                let n = nums(&f[1..dim + 2])?;
                let ids: Vec<usize> = f[dim + 2..]
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()?;
                let slope = if dim == 1 { [n[0], 0.0] } else { [n[0], n[1]] };
                raw_faces.push((slope, n[dim], ids));
            }
            _ => bail!("unrecognized hull line {line:?}"),
        }
    }
    let faces = raw_faces
        .into_iter()
        .map(|(slope, offset, ids)| {
            let mut vertices = [usize::MAX; 3];
            let mut corners = [[0.0; 2]; 3];
            let mut values = [0.0; 3];
            for (k, id) in ids.iter().enumerate() {
                vertices[k] = *id;
                (corners[k], values[k]) = *points.get(id).ok_or_else(|| anyhow!("face refers to unknown vertex {id}"))?;
            }
            Ok(Face {
                slope,
                offset,
                vertices,
                corners,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LowerHull::from_faces(dim, faces)?)
}

/// `C nodeid k p1 q1 … pk qk`; one-dimensional cells list `lo hi`.
pub fn cell_line(node: usize, cell: &SlopeCell) -> String {
    let v = cell.vertices();
    let mut s = format!("C {node} {}", v.len());
    for p in v {
        match cell {
            SlopeCell::Interval { .. } => write!(s, " {}", num(p[0])).unwrap(),
            _ => write!(s, " {} {}", num(p[0]), num(p[1])).unwrap(),
        }
    }
    s
}

/// `node_id,x,[y,]weight` rows with a header.
pub fn measure_csv(m: &AtomicMeasure<'_>) -> String {
    let dom = m.domain();
    let mut s = String::from(if dom.dim() == 1 { "node_id,x,weight\n" } else { "node_id,x,y,weight\n" });
    for x in dom.interior_ids() {
        let p = dom.node(x);
        if dom.dim() == 1 {
            writeln!(s, "{x},{},{}", num(p[0]), num(m.weight(x))).unwrap();
        } else {
            writeln!(s, "{x},{},{},{}", num(p[0]), num(p[1]), num(m.weight(x))).unwrap();
        }
    }
    s
}
