//! Fusion systems, centric linking systems and their nerves, computed
//! exactly for finite groups and checked against the axioms.
//!
//! The entry points are [`fusion::fusion_from_group`],
//! [`linking::linking_from_group`] and [`prune::verify_theorem`].

pub mod catkit;
pub mod config;
pub mod error;
pub mod fusion;
pub mod group;
pub mod linking;
pub mod normalizer;
pub mod prune;
pub mod report;
pub mod ptilde;
pub mod tower;

pub use config::Caps;
pub use error::{Error, Result};
