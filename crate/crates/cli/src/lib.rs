//! Shared pieces of the command-line crate: deterministic test-instance
//! generation used by both the binary and the acceptance suite.

pub mod gen;
