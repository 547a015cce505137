//! Command-line pipeline and live steering service.

pub mod commands;
pub mod service;
pub mod wire;
