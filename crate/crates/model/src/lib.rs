//! Typed model of register (`reg*`) and core (`tls*`) patent tables.
//!
//! Everything here is plain data plus construction-time validation. The
//! indexed store, the indicator pipeline and the naive reference evaluator
//! all build on these types and on nothing else in common.

pub mod dataset;
pub mod ids;
pub mod results;
pub mod tables;
pub mod validate;

pub use dataset::{Dataset, Table};
pub use ids::{ApplnId, PublnId, RegId};
pub use results::*;
pub use tables::*;
pub use validate::{
    Issue, KeyRegistry, RowCheck, RowCounts, RowKey, ValidationMode, ValidationReport, Violation,
    ViolationKind, Warning,
};
