//! Cluster exchange graphs and braid groups of finite Coxeter type, built by
//! folding simply-laced quivers.

pub mod algebra;
pub mod coxeter;
pub mod folding;
pub mod quiver;
pub mod exchange;
pub mod braid;
pub mod garside;
pub mod verify;
pub mod cli;
mod error;

pub use error::{Error, Result};
