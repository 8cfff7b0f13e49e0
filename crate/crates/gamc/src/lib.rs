//! File formats, configuration, pipeline and command line for the G-AMC
//! modulation classifier. The numerical work lives in `gamc-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;

pub use config::RunConfig;
pub use error::{GamcError, Result};
