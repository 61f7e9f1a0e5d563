use alloc::boxed::Box;

use crate::subdiff::CellPair;
use crate::Direction;

/// Errors raised by the lattice, envelope, measure and Laplace routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(&'static str),
    #[error("invalid mesh length h = {0}")]
    InvalidMeshLength(f64),
    #[error("invalid direction set: {0}")]
    InvalidDirections(&'static str),
    #[error("no interior lattice nodes at h = {h}; the mesh is too coarse")]
    EmptyInterior { h: f64 },
    #[error("mesh function has {found} values but the lattice has {expected} nodes")]
    SizeMismatch { expected: usize, found: usize },
    #[error("non-finite value at node {node}")]
    NonFiniteValue { node: usize },
    #[error("node {0} is not an interior node")]
    NotInterior(usize),
    #[error("no node available along direction {dir:?} from node {node}")]
    MissingNode { node: usize, dir: Direction },
    #[error("the lattice line through node {node} has fewer than 3 nodes")]
    DegenerateLine { node: usize },
    #[error("degenerate input: the nodes are affinely dependent")]
    DegenerateInput,
    #[error("point ({}, {}) lies outside the convex hull of the nodes", .0[0], .0[1])]
    OutsideHull([f64; 2]),
    #[error("the boundary envelope is unbounded at ({}, {}): point outside the sample hull", .0[0], .0[1])]
    UnboundedEnvelope([f64; 2]),
    #[error("subdifferential mismatch at node {}: hausdorff distance {}", .0.node, .0.hausdorff)]
    EquivalenceViolation(Box<CellPair>),
    #[error("quadrature not converged: successive refinements differ by {change:e} (relative)")]
    QuadratureNotConverged { estimate: f64, change: f64 },
    #[error("boundary value {value} at node {node} is negative")]
    BoundaryNotNonnegative { node: usize, value: f64 },
    #[error("singular linear system at row {row}")]
    SingularSystem { row: usize },
    #[error("iterative solver stalled with residual {residual:e}")]
    SolverNotConverged { residual: f64 },
    #[error("comparison hypothesis violated at node {node}: {what}")]
    HypothesisViolated { node: usize, what: &'static str },
    #[error("parameter out of range: {0}")]
    DomainError(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
