//! Discrete Monge-Ampère measures of mesh functions on lattice discretizations
//! of convex domains in one and two dimensions.
//!
//! The crate is `no_std` (it needs `alloc`). The main pieces:
//!
//! - [`lattice`]: interior nodes, boundary nodes obtained by directional ray hits,
//!   boundary-fitted step lengths and direction stencils.
//! - [`meshfn`]: mesh functions, directional second differences and convexity
//!   diagnostics.
//! - [`envelope`]: convex envelopes through lower hulls of the lifted node set,
//!   contact sets and the convex envelope of boundary data.
//! - [`subdiff`]: discrete subdifferentials by halfplane intersection and normal
//!   cells of the lower hull.
//! - [`measure`]: per-node Monge-Ampère weights, region measures, total mass, the
//!   ABP diagnostic and the wide-stencil operator of Oberman.
//! - [`laplace`]: the boundary-fitted discrete Laplace Dirichlet scheme and the
//!   ring-barrier constants.
#![no_std]

extern crate alloc;

pub mod envelope;
pub mod error;
pub mod geom;
mod hull3;
pub mod laplace;
pub mod lattice;
pub mod lp;
mod math;
pub mod measure;
pub mod meshfn;
pub mod subdiff;

pub use envelope::{ContactSet, Face, LowerHull};
pub use error::{Error, Result};
pub use lattice::{ConvexDomain, DirectionSet, LatticeDomain, Shape};
pub use measure::{AtomicMeasure, Density, QueryRegion};
pub use meshfn::{ConvexityReport, MeshFunction};
pub use subdiff::{CellPair, SlopeCell};

/// A point of the plane. One-dimensional data uses the first coordinate and
/// keeps the second at zero.
pub type Point = [f64; 2];

/// An integer lattice direction. In one dimension the second component is zero.
pub type Direction = [i64; 2];
