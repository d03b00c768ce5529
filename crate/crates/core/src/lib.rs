//! Diffuse domain finite element solver for semilinear parabolic problems
//! with Neumann boundary conditions on irregular planar domains.
//!
//! The physical domain is described by a signed distance; the problem is
//! re-posed on a covering rectangle with the phase-field weight
//! `omega = (1 - tanh(3 d / eps)) / 2`, discretized with bilinear elements on
//! a uniform grid and integrated in time with semi-implicit BDF2.

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod problems;
pub mod timestepper;

pub use error::{DdmError, Result};
