//! Deterministic swarm simulator for orbital construction: differential-drive
//! robots circle a target shape encoded as a scalar field and shepherd pucks
//! onto its zero-valued goal region.

pub mod controller;
pub mod distance;
pub mod error;
pub mod field;
pub mod geom;
pub mod io;
pub mod pnm;
pub mod sensors;
pub mod world;

pub use error::{Error, Result};
pub mod experiments;
pub mod render;
