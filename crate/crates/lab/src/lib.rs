pub mod cli;
pub mod config;
pub mod criteria;
pub mod error;
pub mod report;
pub mod suites;
pub mod table;
