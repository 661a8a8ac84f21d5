pub mod classify;
pub mod equations;
pub mod error;
pub mod fixtures;
pub mod groups;
pub mod inverse;
pub mod lattice;
pub mod maps;
pub mod oracle;
pub mod report;
pub mod serial;
pub mod shioda;
pub mod wps;

pub use error::{Error, Result, WeightKind};
