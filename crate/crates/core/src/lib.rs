//! Exact computation of local topological zeta functions, monodromy zeta
//! functions and monodromy eigenvalues of plane curve singularities.
//!
//! The input is either an equisingularity tree (a rooted tree of bamboos
//! with Newton pairs and branch classes) or a polynomial that is
//! nondegenerate with respect to its Newton polygon. Every closed-form
//! result has an independent counterpart computed from the full resolution
//! graph in [`oracle`].

pub mod error;
pub mod lattice;
pub mod equitree;
pub mod zeta;
pub mod monodromy;
pub mod oracle;
pub mod frontend;
pub mod report;
pub mod fuzz;

pub use error::{Error, Result};
pub use lattice::{PrimitiveVector, Subdivision};
pub use equitree::{AnnotatedBamboo, AnnotatedTree, Bamboo, BranchClass, Face};
pub use zeta::{Pole, RationalFunction};
pub use monodromy::{CharPoly, CycloProduct};
pub use oracle::ResolutionGraph;
