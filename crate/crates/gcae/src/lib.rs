pub mod cli;
pub mod data;
pub mod error;
pub mod model;
pub mod numeric;
pub mod train;

pub use error::{Error, Result};
