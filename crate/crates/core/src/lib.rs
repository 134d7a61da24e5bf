//! Scenery analysis on small finite groups.
//!
//! A scenery is a {0,1}-labelling of a finite group's elements, observed
//! through a random walk v(t+1) = Z_t v(t) with i.i.d. steps and uniform
//! start. This crate provides the pieces needed to study when the walk's
//! observations pin the scenery down up to a right shift: explicit group
//! tables and verified irreducible representations, the group Fourier
//! transform with the Plancherel pairing, spatial/temporal correlation
//! statistics along independent routes, the rank test for the
//! reconstructivity condition with null-space witnesses, reconstruction of a
//! scenery from its full-order multispectrum, and an exhaustive pair
//! explorer for small non-abelian groups.

pub mod caps;
pub mod condition;
pub mod error;
pub mod explore;
pub mod fourier;
pub mod group;
pub mod linalg;
pub mod repr;
pub mod rng;
pub mod scenery;
pub mod walk;

pub use caps::Caps;
pub use error::{Error, Result};
