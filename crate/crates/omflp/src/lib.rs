//! File formats, the experiment harness and CLI support for the
//! online multi-commodity facility location workbench.

pub mod bench;
pub mod format;

pub use omflp_core as core;
