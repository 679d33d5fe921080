//! Evaluation and model selection: R², label agreement, elbow tables.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cls::{cls_transform, ClsComponents};
use crate::cluster::{cls_cluster, members, FitConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Largest cluster count accepted by [`label_agreement`].
pub const MAX_AGREEMENT_K: usize = 8;

/// Squared Pearson correlation of `a` and `b`; 0 when either is constant.
pub fn r_squared(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::mismatch("r_squared lengths", a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData("r_squared needs at least 2 values".into()));
    }
    if !a.iter().chain(b).all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(linalg::pearson(a, b).map_or(0.0, |r| r * r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementScore {
    /// Fraction of observations whose aligned predicted label matches.
    pub accuracy: f64,
    /// Pearson correlation of the aligned binary label vectors; only for `k = 2`.
    pub pearson: Option<f64>,
    /// `permutation[predicted] = truth` label used for alignment.
    pub permutation: Vec<usize>,
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Best-permutation agreement between two labelings with `k` clusters.
///
/// All `k!` relabelings of `pred` are tried in lexicographic order; the first
/// one reaching the highest accuracy is kept.
pub fn label_agreement(truth: &[usize], pred: &[usize], k: usize) -> Result<AgreementScore> {
    if truth.len() != pred.len() {
        return Err(Error::mismatch("label_agreement lengths", truth.len(), pred.len()));
    }
    if k == 0 || k > MAX_AGREEMENT_K {
        return Err(Error::InvalidParameter(alloc::format!(
            "label_agreement supports 1..={MAX_AGREEMENT_K} clusters, got {k}"
        )));
    }
    if truth.is_empty() {
        return Err(Error::Empty("label_agreement needs labels"));
    }
    if truth.iter().chain(pred).any(|&l| l >= k) {
        return Err(Error::InvalidParameter(alloc::format!("label outside 0..{k}")));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&t, &p) in truth.iter().zip(pred) {
        confusion[p][t] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = (0usize, perm.clone());
    loop {
        let hits: usize = (0..k).map(|p| confusion[p][perm[p]]).sum();
        if hits > best.0 {
            best = (hits, perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (hits, permutation) = best;
    let pearson = (k == 2)
        .then(|| {
            let t: Vec<f64> = truth.iter().map(|&l| l as f64).collect();
            let p: Vec<f64> = pred.iter().map(|&l| permutation[l] as f64).collect();
            linalg::pearson(&t, &p)
        })
        .flatten();
    Ok(AgreementScore {
        accuracy: hits as f64 / truth.len() as f64,
        pearson,
        permutation,
    })
}

/// Mean R² between paired component scores over every cluster and component.
pub fn average_component_r2(models: &[ClsComponents], x: &Matrix, y: &Matrix, labels: &[usize]) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for (i, rows) in members(labels, models.len()).into_iter().enumerate() {
        let (xs, ys) = cls_transform(&models[i], &x.select_rows(&rows), &y.select_rows(&rows))?;
        for j in 0..xs.cols() {
            total += r_squared(&xs.column(j), &ys.column(j))?;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Empty("no components to average"));
    }
    Ok(total / count as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElbowRow {
    pub k: usize,
    pub m: usize,
    /// `None` when the grid point could not be fitted; see `error`.
    pub avg_r2: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElbowTable {
    pub rows: Vec<ElbowRow>,
}

/// Runs CLS clustering for every `(k, m)` pair and records the training
/// average component R². Infeasible grid points are recorded, not fatal.
pub fn elbow_table(
    x: &Matrix,
    y: &Matrix,
    k_values: &[usize],
    m_values: &[usize],
    cfg: &FitConfig,
) -> Result<ElbowTable> {
    if k_values.is_empty() || m_values.is_empty() {
        return Err(Error::Empty("elbow grid must be non-empty"));
    }
    let mut rows = Vec::with_capacity(k_values.len() * m_values.len());
    for &k in k_values {
        for &m in m_values {
            let point_cfg = FitConfig { k, m, ..cfg.clone() };
            let outcome = cls_cluster(x, y, &point_cfg)
                .and_then(|r| average_component_r2(&r.models, x, y, &r.labels));
            rows.push(match outcome {
                Ok(v) => ElbowRow { k, m, avg_r2: Some(v), error: None },
                Err(e) => ElbowRow { k, m, avg_r2: None, error: Some(e.to_string()) },
            });
        }
    }
    Ok(ElbowTable { rows })
}
