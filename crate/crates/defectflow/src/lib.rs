//! Discrete defect models on planar complexes.
//!
//! The crate provides the combinatorial machinery for studying vortex-type
//! defects in lattice spin systems (XY and screw-dislocation energies):
//!
//! * [`complex`]: planar complexes built from straight-line embedded graphs,
//!   with faces recovered from the rotation system.
//! * [`forms`]: discrete functions and antisymmetric 1-forms, differential,
//!   curl, divergence, flux, and the nearest-integer projection.
//! * [`dual`]: the oriented dual graph and the curl/divergence transfer
//!   identities.
//! * [`flow`]: deterministic max-flow / min-cut on bidirectional graphs with
//!   symmetric capacities, plus path decomposition of flow forms.
//! * [`removal`]: dipole-removal transforms that replace a 1-form by a flow
//!   form with the same boundary values and prescribed singularities.
//! * [`reconstruct`]: rebuilding a vertex function from a (almost) curl-free
//!   form with exact boundary values.
//! * [`lattice`]: square-lattice discretization of planar domains, boundary
//!   data, bond energies, vorticity, and local relaxation.
//! * [`pipeline`]: the end-to-end defect-removal pipeline on lattice fields.
//! * [`oracle`]: small brute-force oracles used to cross-check the engines.
//! * [`instances`]: seeded random instance generators for tests and the
//!   built-in verification suite.

pub mod complex;
pub mod dual;
pub mod error;
pub mod flow;
pub mod forms;
pub mod instances;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod pipeline;
pub mod reconstruct;
pub mod removal;
pub mod tol;

pub use error::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
