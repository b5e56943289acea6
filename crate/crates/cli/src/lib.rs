//! Command-line surface for the bound/proof/evaluation engine: query-file
//! parsing, CSV ingestion, instance generators, and structured-text
//! reports.

pub mod commands;
pub mod gen;
pub mod ingest;
pub mod query_file;
