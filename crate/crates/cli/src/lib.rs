//! IO layer of the `logwave` binary: file formats and the threaded
//! scalogram engine. Split out as a library so the format round-trips are
//! testable directly.

pub mod engine;
pub mod formats;
