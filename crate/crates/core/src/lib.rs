//! Combinatorics of edge-colored graphs and the maps they are in bijection with.
//!
//! The library is organised around one carrier type, [`ColoredGraph`]: a
//! bipartite regular graph whose edges carry colors `0..=d`. Graphs with
//! colors `1..=d` only are *bubbles*; adding a perfect set of color-0 edges
//! glues bubbles into closed graphs. On top of that sit:
//!
//! * [`graph`] — faces, Gurau degree, boundary bubbles, canonical forms;
//! * [`bubbles`] — constructors for melonic and necklace bubble families,
//!   melonicity testing and pairing search;
//! * [`gluing`] — exhaustive enumeration of gluings at fixed bubble count,
//!   face maximizers, empirical enhancements and the melonic 2-point series;
//! * [`enhance`] — closed-form enhancement calculus (inherited, color-slice
//!   and pairing-formula enhancements);
//! * [`maps`] — dart-based combinatorial maps, the bijection between gluings
//!   and stuffed Walsh maps, projected maps and the tree face-count formula;
//! * [`series`] — truncated power series over exact rationals;
//! * [`quartic`] — dominant-map characterisation at `d = 4`, the exact
//!   generating function `f_k(t, λ)`, a rooted-map enumeration oracle,
//!   critical points and singular exponents.
//!
//! All combinatorial counts are exact; numerical refinement (critical points,
//! exponent fits) is done with controlled-precision rational bisection, never
//! floating-point root finding.

pub mod bubbles;
pub mod enhance;
pub mod error;
pub mod gluing;
pub mod graph;
pub mod maps;
pub mod quartic;
pub mod series;

mod canon;

pub use bubbles::{BubbleFamily, BubbleSpec, Pairing};
pub use enhance::{EnhancementRecord, PairingStatus, Provenance};
pub use error::Error;
pub use gluing::{
    EmpiricalEnhancement, GluingEnumeration, GluingMode, GluingOutcome, MelonicSeries,
};
pub use graph::{ColoredGraph, Edge, FaceCensus, GraphPower, Shade, ValidationReport};
pub use maps::{CombinatorialMap, StuffedWalshMap, VertexKind};
pub use quartic::{CriticalPoint, DominantMapCheck, EdgeType, QuarticMap, Regime};
pub use series::PowerSeries;

/// Exact rational scalar used throughout.
pub type Rat = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    use num_bigint::BigInt;
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Result alias for fallible library operations.
pub type Result<T> = std::result::Result<T, Error>;
