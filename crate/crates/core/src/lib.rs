//! Numerics for self-similar measures on the line.

pub mod census;
pub mod error;
pub mod finescale;
pub mod ifs;
pub mod interval;
pub mod measure;
pub mod oscillatory;
pub mod poly;
pub mod rational;
pub mod stats;

pub use error::{Error, Result};
pub use interval::Interval;
