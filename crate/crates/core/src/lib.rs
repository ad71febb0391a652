//! Separability analysis for multipartite identical-boson states.
//!
//! States live on the symmetric subspace of `(C^n)^⊗k`. The crate builds
//! such states, tests positivity of their partial transposes, classifies
//! them with rank thresholds, extracts explicit separable decompositions
//! `ρ = Σ p_i (|f_i⟩⟨f_i|)^⊗k`, and searches for PPT states in the rank
//! windows where bound entanglement is not excluded.

pub mod bosonic;
pub mod error;
pub mod exec;
pub mod format;
pub mod hunt;
pub mod limits;
pub mod linalg;
pub mod rng;
pub mod separability;
pub mod shape;
pub mod states;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{ComplexMatrix, C64};
pub use shape::SystemShape;
