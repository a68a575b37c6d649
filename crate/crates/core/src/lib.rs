//! Simulation and analysis toolkit for repeated finite-duration
//! premeasurements of a tight-binding chain coupled to a two-state
//! pointer apparatus. Units: ħ = 1, energies in units of the hopping
//! strength γ, times in ħ/γ.

pub mod analytic2;
pub mod check;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod model;
pub mod output;
pub mod qla;

pub use error::{Error, Result};
