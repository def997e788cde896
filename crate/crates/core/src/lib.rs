//! Discrete potential theory on a Cartesian grid.
//!
//! Solves the Dirichlet problem for Laplace's equation on a smooth domain
//! embedded in a regular grid.  The boundary data lives on the cut points
//! `Γ_h⁰`; the solver finds a discrete double-layer density by fixed-point
//! iteration and returns the Shortley-Weller-accurate harmonic field on the
//! interior grid points.
//!
//! Modules follow the pipeline:
//! - [`geometry`]: grid classification, cut intervals, boundary point sets
//! - [`fields`]: extended grid functions, traces, differences, Green identities
//! - [`solvers`]: single-layer / interface / Shortley-Weller linear solves
//! - [`operators`]: the boundary operators, their norms and spectra
//! - [`driver`]: the end-to-end Dirichlet solve
//! - [`harness`]: convergence studies, property suites, reports

pub mod driver;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod solvers;

pub use error::Error;
