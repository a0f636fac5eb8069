//! Z_{p²}-lattices in a hermitian space: canonical forms, duals, membership, sums,
//! intersections, elementary divisors and vertex certification.

mod fast;
mod lattice;
pub mod linalg;
pub mod modular;
mod space;

pub use fast::{Anchor, FastSpace, LatticeKey, Probe, Transform};
pub use lattice::{canonicalize, Lattice};
pub use space::HermSpace;
