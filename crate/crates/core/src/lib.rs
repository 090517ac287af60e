//! Finite-truncation models of weighted symmetric Fock spaces and the Hardy
//! spaces built on them, with Haar sampling over unitary groups.

pub mod error;
pub mod fock;
pub mod hardy_chi;
pub mod hardy_w;
pub mod heisenberg;
pub mod operators;
pub mod mc;
pub mod par;
pub mod partitions;
pub mod poly;
pub mod semigroups;
pub mod unitary;

pub use error::{Error, Result};
pub use fock::{EVector, FockVector, Pairing, TruncationSpec};
pub use operators::{AnnihilationVariant, OperatorMatrix};
pub use partitions::{BasisKey, IndexTuple, YoungDiagram};
pub use poly::Polynomial;
