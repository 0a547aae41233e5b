//! Conjugacy decision experiments: group arithmetic for BS(1,2), GMBS(2,3),
//! SL(2,Z) and polycyclic presentations, feature extraction, dataset
//! generation, tree/forest and n-tuple classifiers, and evaluation.

pub mod abelian;
pub mod config;
pub mod error;
pub mod eval;
pub mod group;
pub mod learn;
pub mod rewriting;
pub mod snf;
pub mod word;

pub mod datagen;
pub mod features;
pub use error::{Error, Result};
