//! Decision procedures and constructions for simultaneous orthogonal
//! embeddings of planar graphs that share a common subgraph.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel drivers live in the `orthosefe` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod constraints;
pub mod cyclesolver;
pub mod drawing;
pub mod gadgets;
pub mod instance;
pub mod naesat;
pub mod planarity;
pub mod rotation;
pub mod spqr;

pub use constraints::{
    check_assignment, check_sefe_orthogonality, oracle, oracle_with_cap, Side, SideAssignment,
    Verdict, Violation,
};
pub use instance::{CycleInstance, Edge, Instance, InstanceError, RawInstance, SunflowerInstance, VertexId};
pub use naesat::{nae_eval, nae_solve, Literal, NaeAssignment, NaeFormula};
pub use rotation::RotationSystem;
