//! Square-bit and regular even-polygon operational theories: states, effects,
//! channel polytopes, Birkhoff violation, restricted random access codes and
//! state convertibility.

pub mod channels;
pub mod error;
pub mod geometry;
pub mod models;
pub mod rac;
pub mod resource;
pub mod verify;

pub use error::{Error, Result};
