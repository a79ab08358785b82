//! Exact Minkowskian branching structures and detection of funny business.

pub mod catalog;
pub mod error;
pub mod family;
pub mod format;
pub mod funny_business;
pub mod geometry;
pub mod histories;
pub mod indexset;
pub mod model;
#[cfg(any(test, feature = "oracles"))]
pub mod oracle;
pub mod sites;
pub mod structure;

pub use error::{Error, Result};
