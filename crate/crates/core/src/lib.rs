//! Singularities of quiver quotients and toric quiver moduli.
//!
//! * [`quiver`]: marked quiver settings, the Euler form, canonical keys and representations
//! * [`reduction`]: the three reduction moves and normalization to the reduced setting
//! * [`classification`]: defects, the smooth list, the counting bound and enumeration by dimension
//! * [`local`]: local quiver settings at semisimple points
//! * [`hilbert`] and [`toric`]: lattice semigroups, semi-invariants, stability and proj charts
//! * [`conifold`]: normal-form arithmetic in the conifold algebra

pub mod classification;
pub mod conifold;
pub mod error;
pub mod fixtures;
pub mod hilbert;
pub mod linalg;
pub mod local;
pub mod quiver;
pub mod reduction;
pub mod sampling;
pub mod toric;

pub use error::{Error, Result};
pub use quiver::{CanonicalKey, DimVector, MarkedQuiverSetting, Path, Representation};
