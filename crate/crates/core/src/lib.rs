//! Exact generation of the distance from square pyramidal numbers to the
//! nearest square, and numerical checks of its averages, twisted sums,
//! equidistribution and Dirichlet series.

pub mod ap;
pub mod cache;
pub mod characters;
pub mod config;
pub mod consts;
pub mod equi;
pub mod error;
pub mod exact;
pub mod fit;
pub mod output;
pub mod parallel;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
