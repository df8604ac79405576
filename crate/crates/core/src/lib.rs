//! One-dimensional quantum tunneling races.
//!
//! This crate computes scattering amplitudes for compactly supported
//! barriers, propagates wave packets under free and tunneled dynamics,
//! evaluates covariant arrival-time and localization measurements, and
//! numerically certifies that the cumulative detection probability of the
//! tunneled particle never exceeds that of the free one.

pub mod config;
pub mod dynamics;
pub mod emit;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod observables;
pub mod opcheck;
pub mod potential;
pub mod race;
pub mod scattering;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
pub use grid::{build_grid, SpatialGrid};
pub use potential::{sample_function, square_barrier, validate_tunnel, PotentialSpec};
pub use state::{gaussian_packet, mask_left_of, MomentumSign, QuantumState, Representation};
