//! Command implementations behind the `doeblin-occupancy` binary, exposed as
//! a library so the integration and acceptance suites can drive them
//! directly.

pub mod commands;
pub mod config;
pub mod construct;
pub mod error;
pub mod format;
