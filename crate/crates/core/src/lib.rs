//! Asymptotic invariants of manifolds with a noncompact boundary.
//!
//! The crate evaluates the mass and center of mass of asymptotically flat
//! half-spaces, and the mass functional of asymptotically hyperbolic
//! half-spaces, both through the classical charge flux of the perturbation
//! `e = g − reference` and through fluxes of the Einstein tensor of `g` and
//! the Newton tensor of the boundary. Limits `r → ∞` are taken numerically by
//! quadrature on a ladder of radii followed by extrapolation.

pub mod asym;
pub mod boundary;
pub mod catalog;
pub mod error;
pub mod field;
pub mod geom;
pub mod invariants;
pub mod jet;
pub mod quad;
pub mod run;
pub mod verify;

pub use error::{Error, Result};
