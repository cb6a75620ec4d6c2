//! Error types shared across the crate.

use thiserror::Error;

/// Structural violations of the ribbon-graph invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("pairing has a fixed point at half-edge {0}")]
    InvolutionFixedPoint(usize),
    #[error("permutation table is not a bijection on the half-edge set")]
    NotAPermutation,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("internal vertex {0} has valency {1} < 3")]
    LowValencyInternal(usize, usize),
    #[error("leg slot {0} does not point at a univalent vertex")]
    LegNotUnivalent(usize),
    #[error("half-edge {0} is univalent but not registered as a leg")]
    UnregisteredUnivalent(usize),
    #[error("leg slot {0} repeats half-edge {1}")]
    DuplicateLeg(usize, usize),
    #[error("edge {0} is a loop and cannot be collapsed")]
    LoopCollapse(usize),
    #[error("edge {0} is external and cannot be collapsed")]
    ExternalCollapse(usize),
    #[error("no edge with index {0}")]
    NoSuchEdge(usize),
    #[error("no vertex with index {0}")]
    NoSuchVertex(usize),
    #[error("expansion of a vertex of valency {0} >= 5 is not supported")]
    UnsupportedValency(usize),
    #[error("vertex {0} is not internal")]
    NotInternal(usize),
    #[error("surface type admits no ribbon graph: {0}")]
    EmptySurfaceType(String),
    #[error("gluing mismatch: {0}")]
    GluingMismatch(String),
    #[error("orientation data does not match the graph: {0}")]
    OrientationMismatch(String),
    #[error("vertex {0} has even valency {1}; no natural orientation")]
    EvenValency(usize, usize),
    #[error("malformed graph literal: {0}")]
    Parse(String),
    #[error("metric structure invalid: {0}")]
    BadMetric(String),
}

/// Failures of the numerical Morse engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorseError {
    #[error("function is not Morse: degenerate critical point near {0:?} (|det Hess| = {1:.3e})")]
    NonMorse(Vec<f64>, f64),
    #[error("critical point search did not stabilise; refinement exhausted at grid {0}")]
    MissedRoots(usize),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("dimension {0} unsupported; only tori of dimension 1..=3")]
    BadDimension(usize),
    #[error("index precondition violated: ind(q) - ind(p) = {0}, expected 1")]
    IndexGap(i64),
    #[error("non-transverse configuration: {0}")]
    NonTransverse(String),
    #[error("unresolved trajectory cluster at separation {0:.3e}")]
    Cluster(f64),
    #[error("resonance in invariant-manifold chart near eigenvalue sum {0:.6e}")]
    Resonance(f64),
    #[error("malformed Morse function spec: {0}")]
    Parse(String),
}

/// Failures of the rigid flow-graph solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("arity mismatch: graph has {found} {kind} legs, tuple has {given}")]
    Arity {
        kind: &'static str,
        found: usize,
        given: usize,
    },
    #[error("expected dimension {0} does not cut a rigid fiber (|E| = {1})")]
    NotRigid(i64, usize),
    #[error("singular Jacobian at a reported solution (cond = {0:.3e}); try another seed")]
    SingularJacobian(f64),
    #[error("unresolved solution cluster at separation {0:.3e}")]
    Cluster(f64),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
