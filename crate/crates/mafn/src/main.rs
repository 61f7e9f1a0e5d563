use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mafn::builtins::{Builtin, Harmonic};
use mafn::config::{ExperimentConfig, ExperimentKind};
use mafn::core::envelope::{lower_hull, LowerHull};
use mafn::core::laplace::{barrier_constants, check_max_principle, solve_dirichlet_with, Solver};
use mafn::core::measure::{measure_of_region, total_mass, AtomicMeasure, QueryRegion};
use mafn::core::subdiff::{equivalence_check_with, hull_normal_cell, DirectCells};
use mafn::core::{DirectionSet, LatticeDomain, MeshFunction};
use mafn::experiments;
use mafn::io::{self, num};
use mafn::parse::{self, DensityName};

#[derive(Parser)]
#[command(name = "mafn", version, about = "Discrete Monge-Ampere measures on lattices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct LatticeArgs {
    /// `interval:a,b`, `box:x0,y0,x1,y1`, `ball:cx,cy,r` or `polygon:x,y;x,y;...`
    #[arg(long)]
    domain: String,
    /// Mesh length; fractions like 1/16 are accepted.
    #[arg(long)]
    h: String,
    /// Stencil radius of the direction set.
    #[arg(long, default_value_t = 1)]
    stencil: u32,
}

impl LatticeArgs {
    fn build(&self) -> Result<LatticeDomain> {
        let domain = parse::domain(&self.domain)?;
        let dim = domain.dim();
        Ok(LatticeDomain::build(domain, parse::length(&self.h)?, DirectionSet::new(dim, self.stencil)?)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print interior (I) and boundary (B) nodes.
    Lattice(LatticeArgs),
    /// Sample a built-in function into a mesh-function file.
    Sample {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// quadratic, anisotropic-quadratic, abs1norm, cone, affine or random-convex(seed)
        #[arg(long)]
        function: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report discrete convexity of a mesh function; exits 1 if it fails.
    CheckConvex { file: PathBuf },
    /// Second difference at a node along a lattice direction.
    Delta {
        file: PathBuf,
        #[arg(long, conflicts_with = "at", required_unless_present = "at")]
        node: Option<usize>,
        /// Node coordinates `x` or `x,y` instead of an id.
        #[arg(long)]
        at: Option<String>,
        /// Integer direction `a` or `a,b`.
        #[arg(long)]
        dir: String,
    },
    #[command(subcommand)]
    Envelope(EnvelopeCmd),
    #[command(subcommand)]
    Subdiff(SubdiffCmd),
    #[command(subcommand)]
    Measure(MeasureCmd),
    #[command(subcommand)]
    Laplace(LaplaceCmd),
    /// Run a refinement experiment; exits 0 iff every check passes.
    Run {
        kind: String,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory of the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EnvelopeCmd {
    /// Write the lower hull of a mesh function.
    Build {
        file: PathBuf,
        #[arg(short, long, alias = "out")]
        output: Option<PathBuf>,
    },
    /// Evaluate a hull at a point.
    Eval {
        hull: PathBuf,
        #[arg(long)]
        at: String,
        /// Use the maximum of the affine pieces outside the hull's domain.
        #[arg(long)]
        extend: bool,
    },
    /// List the contact nodes of a mesh function.
    Contact { file: PathBuf },
}

#[derive(Subcommand)]
enum SubdiffCmd {
    /// Print the subdifferential cell of interior nodes.
    Cell {
        file: PathBuf,
        /// A single node; all interior nodes if neither this nor `--at` is given.
        #[arg(long, conflicts_with = "at")]
        node: Option<usize>,
        /// Node coordinates `x` or `x,y`.
        #[arg(long)]
        at: Option<String>,
        /// Print the hull normal cell instead of the direct one.
        #[arg(long)]
        hull: bool,
    },
    /// Compare direct and hull cells at every interior node.
    CheckEquiv { file: PathBuf },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Per-node weights as CSV.
    Weights {
        file: PathBuf,
        /// `unit` or `rq:c`
        #[arg(long, default_value = "unit")]
        density: String,
    },
    /// Total mass with unit density.
    Total { file: PathBuf },
    /// Measure of a closed convex region.
    Region {
        file: PathBuf,
        /// Any domain spec, e.g. `ball:0,0,0.5`.
        #[arg(long, conflicts_with = "bbox", required_unless_present = "bbox")]
        region: Option<String>,
        /// Shorthand for `--region box:x0,y0,x1,y1`.
        #[arg(long = "box", id = "bbox")]
        bbox: Option<String>,
        #[arg(long, default_value = "unit")]
        density: String,
    },
}

#[derive(Subcommand)]
enum LaplaceCmd {
    /// Solve the discrete Dirichlet problem with harmonic boundary data.
    Solve {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// constant, affine, x1x2, x1^2-x2^2 or exp-cos
        #[arg(long, alias = "g")]
        data: String,
        #[arg(long)]
        gauss_seidel: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Barrier constants as CSV.
    Barrier {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<io::MeshFile> {
    io::read_mesh_function(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// A node given by id or by its coordinates.
fn pick_node(mf: &io::MeshFile, node: Option<usize>, at: Option<&str>) -> Result<usize> {
    if let Some(x) = node {
        if x >= mf.dom.num_nodes() {
            bail!("node {x} out of range");
        }
        return Ok(x);
    }
    let at = parse::floats(at.unwrap_or_default())?;
    let mut p = [0.0; 2];
    if at.len() != mf.dom.dim() {
        bail!("--at needs {} coordinates", mf.dom.dim());
    }
    p[..at.len()].copy_from_slice(&at);
    let (id, d) = mf
        .dom
        .nodes()
        .iter()
        .map(|q| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| anyhow::anyhow!("empty lattice"))?;
    if d > 1e-9 * (1.0 + p[0].abs() + p[1].abs()) {
        bail!("no node at {at:?}");
    }
    Ok(id)
}

fn hull_of(u: &MeshFunction<'_>) -> Result<LowerHull> {
    Ok(lower_hull(u)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Lattice(l) => emit(&io::node_dump(&l.build()?), None)?,
        Cmd::Sample {
            lattice,
            function,
            output,
        } => {
            let dom = lattice.build()?;
            let u = Builtin::parse(&function)?.sample(&dom)?;
            emit(&io::write_mesh_function(&u), output.as_deref())?;
        }
        Cmd::CheckConvex { file } => {
            let mf = load(&file)?;
            let rep = mf.function()?.convexity_report();
            println!(
                "convex {} min_delta {} tolerance {}",
                rep.is_discrete_convex,
                num(rep.min_delta),
                num(rep.tolerance)
            );
            for v in &rep.violations {
                println!("violation node {} dir {:?} delta {}", v.node, v.dir, num(v.delta));
            }
            return Ok(rep.is_discrete_convex);
        }
        Cmd::Delta { file, node, at, dir } => {
            let mf = load(&file)?;
            let node = pick_node(&mf, node, at.as_deref())?;
            let e = parse::floats(&dir)?;
            let e = match e.as_slice() {
                [a] => [*a as i64, 0],
                [a, b] => [*a as i64, *b as i64],
                _ => bail!("direction must be a or a,b"),
            };
            println!("{}", num(mf.function()?.delta_e(node, e)?));
        }
        Cmd::Envelope(c) => envelope(c)?,
        Cmd::Subdiff(c) => return subdiff(c),
        Cmd::Measure(c) => measure(c)?,
        Cmd::Laplace(c) => laplace(c)?,
        Cmd::Run { kind, config, out_dir } => {
            let kind: ExperimentKind = kind.parse()?;
            let mut cfg = ExperimentConfig::parse(&read(&config)?, Some(kind))?;
            if let Some(d) = out_dir {
                cfg.out_dir = d;
            }
            let report = experiments::run_and_write(&cfg)?;
            print!("{}", report.summary());
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn envelope(c: EnvelopeCmd) -> Result<()> {
    match c {
        EnvelopeCmd::Build { file, output } => {
            let mf = load(&file)?;
            let hull = hull_of(&mf.function()?)?;
            emit(&io::write_hull(&hull), output.as_deref())
        }
        EnvelopeCmd::Eval { hull, at, extend } => {
            let hull = io::read_hull(&read(&hull)?)?;
            let p = parse::point(&at)?;
            let v = if extend { hull.gamma_extension_eval(p) } else { hull.gamma_eval(p)? };
            println!("{}", num(v));
            Ok(())
        }
        EnvelopeCmd::Contact { file } => {
            let mf = load(&file)?;
            let u = mf.function()?;
            let contact = hull_of(&u)?.contact_set(&u);
            let mut s = String::new();
            for x in mf.dom.interior_ids().filter(|&x| contact.contains(x)) {
                writeln!(s, "{x}").unwrap();
            }
            emit(&s, None)
        }
    }
}

fn subdiff(c: SubdiffCmd) -> Result<bool> {
    match c {
        SubdiffCmd::Cell { file, node, at, hull } => {
            let mf = load(&file)?;
            let u = mf.function()?;
            let nodes: Vec<usize> = if node.is_none() && at.is_none() {
                mf.dom.interior_ids().collect()
            } else {
                vec![pick_node(&mf, node, at.as_deref())?]
            };
            let mut s = String::new();
            if hull {
                let h = hull_of(&u)?;
                for x in nodes {
                    writeln!(s, "{}", io::cell_line(x, &hull_normal_cell(&h, &u, x))).unwrap();
                }
            } else {
                let cells = DirectCells::new(&u);
                for x in nodes {
                    writeln!(s, "{}", io::cell_line(x, &cells.cell(x)?)).unwrap();
                }
            }
            emit(&s, None)?;
            Ok(true)
        }
        SubdiffCmd::CheckEquiv { file } => {
            let mf = load(&file)?;
            let u = mf.function()?;
            let h = hull_of(&u)?;
            let cells = DirectCells::new(&u);
            let (mut ok, mut worst) = (true, 0.0f64);
            for x in mf.dom.interior_ids() {
                match equivalence_check_with(&cells, &h, x) {
                    Ok(pair) => worst = worst.max(pair.hausdorff),
                    Err(e) => {
                        println!("node {x}: {e}");
                        ok = false;
                    }
                }
            }
            println!("equivalent {ok} max_hausdorff {}", num(worst));
            Ok(ok)
        }
    }
}

fn measure(c: MeasureCmd) -> Result<()> {
    match c {
        MeasureCmd::Weights { file, density } => {
            let mf = load(&file)?;
            let u = mf.function()?;
            let r = DensityName::parse(&density)?.density();
            let m = AtomicMeasure::compute(&u, &hull_of(&u)?, &r)?;
            emit(&io::measure_csv(&m), None)
        }
        MeasureCmd::Total { file } => {
            let mf = load(&file)?;
            let u = mf.function()?;
            println!("{}", num(total_mass(&u, &hull_of(&u)?)));
            Ok(())
        }
        MeasureCmd::Region { file, region, bbox, density } => {
            let region = region.unwrap_or_else(|| format!("box:{}", bbox.unwrap_or_default()));
            let mf = load(&file)?;
            let u = mf.function()?;
            let r = DensityName::parse(&density)?.density();
            let m = AtomicMeasure::compute(&u, &hull_of(&u)?, &r)?;
            println!("{}", num(measure_of_region(&m, &QueryRegion(parse::domain(&region)?))));
            Ok(())
        }
    }
}

fn laplace(c: LaplaceCmd) -> Result<()> {
    match c {
        LaplaceCmd::Solve {
            lattice,
            data,
            gauss_seidel,
            output,
        } => {
            let dom = lattice.build()?;
            let g = Harmonic::parse(&data)?;
            let solver = if gauss_seidel { Solver::GaussSeidel } else { Solver::Direct };
            let w = solve_dirichlet_with(&dom, |p| g.eval(p), solver)?;
            if !check_max_principle(&w) {
                eprintln!("warning: discrete maximum principle fails");
            }
            emit(&io::write_mesh_function(&w), output.as_deref())
        }
        LaplaceCmd::Barrier { mu, d, eta } => {
            let b = barrier_constants(mu, d, eta)?;
            println!("mu,d,eta,xi,theta,a,b,a_prime,b_prime,gamma");
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                num(b.mu),
                b.d,
                num(b.eta),
                b.xi,
                num(b.theta),
                num(b.a),
                num(b.b),
                num(b.a_prime),
                num(b.b_prime),
                num(b.gamma)
            );
            Ok(())
        }
    }
}
