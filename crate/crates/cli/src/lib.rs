//! Command line, JSON formats, SVG rendering and the HTTP session service.

pub mod commands;
pub mod json;
pub mod render;
pub mod service;
pub mod session;
