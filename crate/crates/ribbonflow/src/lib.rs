//! Combinatorial moduli cells of bordered surfaces (as metric ribbon graphs),
//! Morse theory on flat tori, and the flow-graph counts that assemble surface
//! operations on Morse cochains.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] — half-edge ribbon graphs, surface invariants, collapse and
//!   expansion moves, canonical forms and isomorphisms.
//! * [`enumerate`] — exhaustive enumeration of isomorphism classes realising a
//!   given surface type.
//! * [`orientation`] — the sign calculus: orientation data per cell, relabel
//!   signs at the trivialization and flow-space levels, Conant–Vogtmann
//!   orientations, and boundary attachment signs.
//! * [`complex`] — the cellular model of the moduli space with its boundary
//!   operator, gluing of graphs and the transfer map to product complexes.
//! * [`morse`] — Fourier Morse functions on `T^d` (`d ≤ 3`), critical points,
//!   gradient trajectories, the Morse cochain complex and continuation maps.
//! * [`solver`] — perturbation data and the Newton machinery that finds and
//!   signs rigid flow graphs.
//! * [`ops`] — assembly of operation chains, the cochain-map and gluing
//!   verifications, and the cup product.
//! * [`simplicial`] — a brute-force simplicial cohomology oracle used to
//!   cross-check the Morse-theoretic cup product.

pub mod complex;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod graph;
pub mod morse;
pub mod ops;
pub mod orientation;
pub mod simplicial;
pub mod solver;

pub use error::{GraphError, MorseError, SolveError};
pub use graph::{Direction, RibbonGraph, SurfaceType};
