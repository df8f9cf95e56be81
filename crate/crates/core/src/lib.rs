//! Ingest, indexed store, indicator pipeline and fixture generator.

pub mod indicators;
pub mod ingest;
pub mod store;
pub mod synth;

pub use indicators::{evaluate, evaluate_many, select_cohort};
pub use ingest::{load_dataset, validate_links, write_dataset, DatasetManifest, IngestError};
pub use store::{IndexedStore, StoreError};
