//! File formats, reports and the `zeronorm` command line built on
//! [`zeronorm_core`].

pub mod cli;
pub mod format;
pub mod pipeline;
pub mod report;

pub use zeronorm_core as core;
