//! Discontinuous Galerkin spectral element solver for the 3D compressible
//! Euler equations on fully periodic Cartesian meshes.
//!
//! Supports Gauss and Gauss-Lobatto collocation, standard and split-form
//! (flux differencing) volume integrals, a family of interface Riemann
//! solvers and convergence studies on smooth test problems.

pub mod config;
pub mod dg;
pub mod error;
pub mod flux;
pub mod mesh;
pub mod physics;
pub mod presets;
pub mod report;
pub mod selftest;
pub mod spectral;
pub mod time;
pub mod verification;

pub use error::DgError;
