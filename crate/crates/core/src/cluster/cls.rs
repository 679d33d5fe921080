use alloc::vec::Vec;

use super::{alternate, check_pair, initial_labels, multi_restart, rng_for, ClusterResult, ErrorTable, FitConfig, LocalModel};
use crate::cls::{fit_cls, ClsComponents};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

impl LocalModel for ClsComponents {
    fn fit(x: &Matrix, y: &Matrix, cfg: &FitConfig) -> Result<Self> {
        fit_cls(x, y, cfg.m, cfg.intercept).map(|(c, _)| c)
    }

    fn point_error(&self, x: &[f64], y: &[f64]) -> f64 {
        self.error_unchecked(x, y)
    }
}

/// CLS clustering with `cfg.n_init` random restarts; the restart with the
/// lowest final objective wins.
pub fn cls_cluster(x: &Matrix, y: &Matrix, cfg: &FitConfig) -> Result<ClusterResult<ClsComponents>> {
    check_pair(x, y)?;
    let min_size = cfg.validate(x.rows(), x.cols(), y.cols())?;
    multi_restart(cfg, |index, seed| {
        let init = initial_labels(x.rows(), cfg.k, min_size, &mut rng_for(seed))?;
        let mut r = alternate::<ClsComponents>(x, y, cfg, init, min_size, &mut |_| {})?;
        r.seed_used = seed;
        r.restart_index = index;
        Ok(r)
    })
}

/// Single CLS clustering run from the given labels.
pub fn cls_cluster_from_labels(
    x: &Matrix,
    y: &Matrix,
    cfg: &FitConfig,
    init: Vec<usize>,
    observer: &mut dyn FnMut(&[usize]),
) -> Result<ClusterResult<ClsComponents>> {
    check_pair(x, y)?;
    let min_size = cfg.validate(x.rows(), x.cols(), y.cols())?;
    alternate(x, y, cfg, init, min_size, observer)
}

/// Assigns every observation to the model with the smallest score distance;
/// ties go to the lowest index.
pub fn cls_label_step(models: &[ClsComponents], x: &Matrix, y: &Matrix) -> Result<Vec<usize>> {
    let first = models.first().ok_or(Error::Empty("cls_label_step needs a model"))?;
    check_pair(x, y)?;
    for c in models {
        if c.n_components() != first.n_components() || c.intercept != first.intercept {
            return Err(Error::InvalidParameter(
                "models must share component count and intercept".into(),
            ));
        }
        if c.x_dim() != x.cols() {
            return Err(Error::mismatch("X columns vs U", c.x_dim(), x.cols()));
        }
        if c.y_dim() != y.cols() {
            return Err(Error::mismatch("Y columns vs V", c.y_dim(), y.cols()));
        }
    }
    let table = ErrorTable::build(x.rows(), models.len(), |l, i| {
        models[i].error_unchecked(x.row(l), y.row(l))
    });
    Ok(table.argmin())
}

/// Summed point errors of `labels` under `models`.
pub fn cls_objective(models: &[ClsComponents], x: &Matrix, y: &Matrix, labels: &[usize]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(l, &i)| models[i].error_unchecked(x.row(l), y.row(l)))
        .sum()
}
