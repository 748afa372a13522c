//! Command-line front end, experiment configuration, CSV/JSON persistence,
//! and SVG figure emission for the perpetuity tail toolkit.

pub mod csvio;
pub mod exec;
pub mod model_io;
pub mod runner;
pub mod svg;

pub use exec::ThreadExecutor;
pub use runner::{CliError, Ctx, ErrorKind, ExperimentSpec, Outcome};
