//! File formats, run manifests and the command-line front end for
//! `twoview-core`.

pub mod cli;
pub mod io;
pub mod manifest;

pub use twoview_core as core;
