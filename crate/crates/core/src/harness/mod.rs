//! Instance documents, generators, the exact-rank oracle and check reports.

pub mod diagnostics;
pub mod doc;
pub mod exact;
pub mod generate;
pub mod report;
