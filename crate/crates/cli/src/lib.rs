//! Library surface of the experiment runner, shared with the binary and the
//! integration tests.

pub mod config;
pub mod runner;
