//! Entanglement certification from violations of local sum-uncertainty
//! relations for pairs of N-level systems.
//!
//! The pieces, bottom-up:
//! - [`linalg`]: dense complex matrices and a Jacobi eigensolver.
//! - [`spin_ops`]: spin and Stokes operator sets in the descending-m basis.
//! - [`states`]: validated density matrices and the model state families.
//! - [`uncertainty`]: variances, sum uncertainties and the bound catalog.
//! - [`bound_search`]: numerical certification of bounds by global search.
//! - [`lur`]: joint relations, certificates and the 2x2 concurrence oracle.
//! - [`family`]: parameter scans over the noise families.
//! - [`io`]: JSON state and operator files.

pub mod bound_search;
pub mod error;
pub mod family;
pub mod io;
pub mod linalg;
pub mod lur;
pub mod random;
pub mod spin_ops;
pub mod states;
pub mod tolerance;
pub mod uncertainty;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexScalar};
pub use num_complex::Complex64;
pub use spin_ops::{OperatorSet, SpinQuantum};
pub use states::{DensityMatrix, PureState};
pub use tolerance::Tolerances;
pub use uncertainty::{Provenance, RelationKind, UncertaintyRelation};
