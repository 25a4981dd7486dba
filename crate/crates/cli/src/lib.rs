//! Manifest parsing, command dispatch and reports for the `econtact` binary.

pub mod manifest;
pub mod report;
pub mod run;
