#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Cubic focusing NLS on star graphs with a Kirchhoff vertex.
//!
//! The crate discretizes `i dPsi/dt = -Laplacian Psi - |Psi|^2 Psi` on `E`
//! half-lines joined at one vertex and provides the tools to study the
//! energy at fixed mass on the Y junction: soliton and sesquisoliton
//! profiles, the discrete energy with its exact gradient, a Crank-Nicolson
//! propagator, mass-constrained gradient flow and curvature probes.

pub mod arrowhead;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod landscape;
pub mod operators;
pub mod profiles;
pub mod sampling;
pub mod verify;

pub use error::{GraphError, Result};
pub use graph::{GraphSpec, GraphState, LineSamples};
pub use operators::{energy, EnergyReport};
