//! Light scattering at absorbing multilayer dielectric barriers and the
//! two-photon coincidence signature of photon tunneling.

pub mod config;
pub mod error;
pub mod experiment;
pub mod materials;
pub mod pulses;
pub mod transfer;
pub mod twophoton;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
