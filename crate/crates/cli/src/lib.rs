//! Command line and HTTP front ends for the `hazalloc` library.

pub mod api;
pub mod cli;
pub mod server;
