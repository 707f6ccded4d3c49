//! Exact first cohomology `H^1(G, M)` and its local subgroup for finite
//! subgroups `G <= GL2(Z/p^nZ)` acting on `M = (Z/p^nZ)^2`, together with the
//! structural checks (triangular decompositions, diagonal lifts, commutator
//! shapes, annihilation by central elements) used to test the vanishing of
//! local cohomology.

pub mod classify;
pub mod cohomology;
pub mod enumerate;
pub mod error;
pub mod group;
pub mod hensel;
pub mod linalg;
pub mod mat2;
pub mod residue;
pub mod structure;
pub mod verifier;

pub use error::{Error, Result};
pub use group::Group;
pub use linalg::{HowellBasis, ModMatrix, QuotientInvariants};
pub use mat2::Mat2;
pub use residue::{PrimePowerModulus, Residue};
