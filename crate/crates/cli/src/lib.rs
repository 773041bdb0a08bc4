pub mod config;
pub mod dump;
pub mod render;
pub mod report;
pub mod suites;
