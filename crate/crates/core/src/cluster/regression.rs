//! Cluster-wise linear regression with a single response column.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{alternate, check_pair, initial_labels, multi_restart, rng_for, ClusterResult, FitConfig, LocalModel};
use crate::error::{Error, Result};
use crate::linalg::{least_squares_solve, Matrix};

/// `y ≈ xᵀ coefficients (+ intercept)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    /// One entry per column of `X`, then the intercept when enabled.
    pub coefficients: Vec<f64>,
    pub intercept: bool,
}

impl RegressionModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut s: f64 = x.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum();
        if self.intercept {
            s += self.coefficients[x.len()];
        }
        s
    }
}

impl LocalModel for RegressionModel {
    fn fit(x: &Matrix, y: &Matrix, cfg: &FitConfig) -> Result<Self> {
        let design = if cfg.intercept { x.with_ones_column() } else { x.clone() };
        let beta = least_squares_solve(&design, y)?;
        Ok(RegressionModel {
            coefficients: beta.column(0),
            intercept: cfg.intercept,
        })
    }

    fn point_error(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = y[0] - self.predict(x);
        d * d
    }
}

fn check_response(x: &Matrix, y: &Matrix, cfg: &FitConfig) -> Result<usize> {
    check_pair(x, y)?;
    if y.cols() != 1 {
        return Err(Error::mismatch("cluster-wise regression response columns", 1, y.cols()));
    }
    // the response view is univariate, so only m = 1 is meaningful
    FitConfig { m: 1, ..cfg.clone() }.validate(x.rows(), x.cols(), 1)
}

/// Cluster-wise regression of `y` on `X` into `k` clusters, best of
/// `cfg.n_init` restarts. `k` overrides `cfg.k`.
pub fn clusterwise_regression(
    x: &Matrix,
    y: &Matrix,
    k: usize,
    cfg: &FitConfig,
) -> Result<ClusterResult<RegressionModel>> {
    let cfg = FitConfig { k, m: 1, ..cfg.clone() };
    let min_size = check_response(x, y, &cfg)?;
    multi_restart(&cfg, |index, seed| {
        let init = initial_labels(x.rows(), k, min_size, &mut rng_for(seed))?;
        let mut r = alternate::<RegressionModel>(x, y, &cfg, init, min_size, &mut |_| {})?;
        r.seed_used = seed;
        r.restart_index = index;
        Ok(r)
    })
}

/// Single run from the given labels.
pub fn clusterwise_regression_from_labels(
    x: &Matrix,
    y: &Matrix,
    cfg: &FitConfig,
    init: Vec<usize>,
    observer: &mut dyn FnMut(&[usize]),
) -> Result<ClusterResult<RegressionModel>> {
    let cfg = FitConfig { m: 1, ..cfg.clone() };
    let min_size = check_response(x, y, &cfg)?;
    alternate(x, y, &cfg, init, min_size, observer)
}
