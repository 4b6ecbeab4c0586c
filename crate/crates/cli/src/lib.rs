//! Command-line front end: problem bundles, example runs and region scans.

pub mod bundle;
pub mod examples;
pub mod region;
pub mod report;
