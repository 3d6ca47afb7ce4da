//! Exact jet-level symplectic normal forms.
//!
//! The crate works in truncated polynomial rings with rational coefficients
//! and provides differential forms, Hamiltonian machinery, constructive
//! Darboux reductions, normal forms for diffeomorphisms under
//! symplectomorphisms and for glancing Hamiltonian systems with constraints,
//! and exact moduli-dimension counts.

pub mod acceptance;
mod basis;
pub mod error;
pub mod forms;
pub mod ideal;
pub mod jobs;
pub mod jet;
pub mod linalg;
pub mod map;
pub mod moduli;
pub mod normal_forms;
pub mod random;
pub mod serial;
pub mod space;
pub mod symplectic;

pub use error::{Error, Result};
pub use forms::{FormJet, VectorFieldJet};
pub use ideal::IdealSpec;
pub use jet::{Jet, Scalar};
pub use map::MapJet;
pub use space::{SpaceKind, VariableSpace};
