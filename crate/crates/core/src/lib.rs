//! Two-view correlation clustering.
//!
//! Canonical least squares (CLS) components and CLS clustering, together with
//! canonical correlation analysis, CCA clustering, k-means and cluster-wise
//! linear regression baselines, evaluation metrics, a planted-structure data
//! generator and stock-return feature extraction.
//!
//! The crate is `no_std` (it needs `alloc`); IO lives in the `twoview` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cca;
pub mod cls;
pub mod cluster;
pub mod datagen;
mod error;
pub mod features;
pub mod linalg;
pub mod metrics;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use linalg::{ColumnStats, EigenPairs, Matrix};
