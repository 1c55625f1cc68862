//! Relative Heffter arrays, crazy knight's tours, and the orientable
//! biembeddings they induce.

pub mod bounds;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod heffter;
pub mod iso;
pub mod knight;
pub mod perm;
pub mod pfarray;

pub use error::{Error, Result};
