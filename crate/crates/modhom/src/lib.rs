//! Counting graph homomorphisms exactly and modulo a prime, with the
//! reductions that make the modular count tractable: automorphism-based
//! graph reduction, inversion over partition lattices, gadget
//! normalization, product factorization, and a tractability classifier
//! for the modular counting problem.
//!
//! Graphs are undirected with loops, at most 64 vertices, stored as
//! bitmask adjacency rows. Bipartite graphs may carry a two-sorting that
//! counting respects. Exact counts are arbitrary precision; modular
//! counts reduce eagerly.
//!
//! The `parallel` feature (on by default) fans the counting search out
//! over its root branches with rayon; disabling it makes every sum run
//! sequentially. The exact counter also keeps an always-sequential twin
//! as the benchmark baseline.

pub mod csp;
pub mod dichotomy;
pub mod error;
mod exec;
pub mod graph;
pub mod hom;
pub mod iso;
pub mod json;
pub mod mobius;
pub mod modp;
pub mod partition;
pub mod products;
pub mod reduction;

pub use error::{Error, Result};
pub use graph::{Graph, PinnedGraph, Sort, StructuralClass};
pub use hom::HomCount;
pub use modp::{Prime, Residue};
pub use partition::Partition;
