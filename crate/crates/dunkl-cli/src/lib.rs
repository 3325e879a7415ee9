pub mod commands;
pub mod config;
pub mod inputs;
pub mod report;
pub mod suites;
