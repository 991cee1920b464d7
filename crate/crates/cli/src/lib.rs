//! Command-line tool and HTTP service for the code-to-comic engine.

pub mod commands;
pub mod server;
pub mod store;
