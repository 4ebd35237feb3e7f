//! Rough-fuzzy MLP rule mining for daily stock-movement prediction.

pub mod discretize;
pub mod error;
pub mod evolution;
pub mod extract;
pub mod features;
pub mod fuzzy;
pub mod literal;
pub mod metrics;
pub mod network;
pub mod pipeline;
pub mod rough;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
