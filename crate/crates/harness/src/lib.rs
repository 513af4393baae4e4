//! Named, seeded experiments over `strichartz-core` with self-checking
//! JSON and CSV reports.

pub mod catalog;
pub mod config;
pub mod error;
pub mod experiments;
pub mod pinned;
pub mod report;
pub mod run;

pub use catalog::{list_experiments, CatalogEntry};
pub use config::{ExperimentConfig, ExperimentName};
pub use error::HarnessError;
pub use report::Report;
pub use run::{execute, run};
