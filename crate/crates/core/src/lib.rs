//! Numerical toolkit for lagrangian subspaces of ε-hermitian spaces.
//!
//! The crate covers subspace arithmetic, lagrangian validation and
//! normalization, explicit homotopies that make families of lagrangians
//! mutually transversal, the Leray–Kashiwara quadratic form of a triple with
//! its transversality criterion and integer invariants, and the Maslov index
//! of sampled loops.

pub mod deformation;
pub mod error;
pub mod forms;
pub mod kashiwara;
mod linalg;
pub mod loops;
pub mod phase_space;
pub mod subspace;

pub use error::{Error, Result};
pub use forms::{BilinearFormMatrix, Sign, Signature, Tolerance};
pub use phase_space::{EpsSpace, GraphMap, Lagrangian};
pub use subspace::Subspace;
