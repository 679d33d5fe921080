//! CCA clustering: per-cluster CCA plus canonical regressions, then
//! relabeling by correlation-weighted squared regression residuals.
//!
//! The two steps optimize different criteria, so the loop may cycle. The
//! returned labeling is the best one seen by weighted prediction error.

use alloc::string::String;
use alloc::vec::Vec;

use super::{check_pair, initial_labels, members, multi_restart, rng_for, ClusterResult, ErrorTable, FitConfig, StopReason};
use crate::cca::{fit_canonical_regressions, fit_cca, CcaComponents};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `Σⱼ (rⱼ / r₁) (yᵀvⱼ − αⱼ − βⱼ xᵀuⱼ)²`; unweighted when `r₁ = 0`.
pub fn cca_weighted_error(c: &CcaComponents, x: &[f64], y: &[f64]) -> f64 {
    let lead = c.correlations.first().copied().unwrap_or(0.0);
    (0..c.n_components())
        .map(|j| {
            let reg = c.regressions[j];
            let w = if lead > 0.0 { c.correlations[j] / lead } else { 1.0 };
            let r = c.y_score(y, j) - reg.alpha - reg.beta * c.x_score(x, j);
            w * r * r
        })
        .sum()
}

fn validate(x: &Matrix, y: &Matrix, cfg: &FitConfig) -> Result<usize> {
    check_pair(x, y)?;
    let min_size = cfg.validate(x.rows(), x.cols(), y.cols())?;
    let need = x.cols().max(y.cols()) + 1;
    if min_size < need {
        return Err(Error::InvalidParameter(alloc::format!(
            "CCA clustering needs min_cluster_size of at least {need}"
        )));
    }
    Ok(min_size)
}

fn fit_all(x: &Matrix, y: &Matrix, labels: &[usize], cfg: &FitConfig, notes: &mut Vec<String>) -> Result<Vec<CcaComponents>> {
    members(labels, cfg.k)
        .into_iter()
        .enumerate()
        .map(|(i, rows)| {
            let xi = x.select_rows(&rows);
            let yi = y.select_rows(&rows);
            let c = fit_canonical_regressions(&fit_cca(&xi, &yi, cfg.m)?, &xi, &yi)?;
            if c.correlations[0] <= 0.0 {
                notes.push(alloc::format!("cluster {i}: zero leading correlation, unweighted residuals"));
            }
            Ok(c)
        })
        .collect()
}

/// CCA clustering with `cfg.n_init` restarts, best by weighted prediction error.
pub fn cca_cluster(x: &Matrix, y: &Matrix, cfg: &FitConfig) -> Result<ClusterResult<CcaComponents>> {
    let min_size = validate(x, y, cfg)?;
    multi_restart(cfg, |index, seed| {
        let init = initial_labels(x.rows(), cfg.k, min_size, &mut rng_for(seed))?;
        let mut r = run(x, y, cfg, init, min_size)?;
        r.seed_used = seed;
        r.restart_index = index;
        Ok(r)
    })
}

/// Single run from the given labels.
pub fn cca_cluster_from_labels(
    x: &Matrix,
    y: &Matrix,
    cfg: &FitConfig,
    init: Vec<usize>,
) -> Result<ClusterResult<CcaComponents>> {
    let min_size = validate(x, y, cfg)?;
    if init.len() != x.rows() || init.iter().any(|&l| l >= cfg.k) {
        return Err(Error::InvalidParameter("initial labels do not match the data".into()));
    }
    run(x, y, cfg, init, min_size)
}

fn run(x: &Matrix, y: &Matrix, cfg: &FitConfig, init: Vec<usize>, min_size: usize) -> Result<ClusterResult<CcaComponents>> {
    let mut notes = Vec::new();
    let mut labels = init;
    let mut trace = Vec::new();
    let mut best: Option<(Vec<usize>, Vec<CcaComponents>, f64)> = None;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=cfg.max_iter {
        iterations = it;
        let models = fit_all(x, y, &labels, cfg, &mut notes)?;
        let table = ErrorTable::build(x.rows(), cfg.k, |l, i| {
            cca_weighted_error(&models[i], x.row(l), y.row(l))
        });
        let fitted = table.total(&labels);
        trace.push(fitted);
        if best.as_ref().is_none_or(|b| fitted < b.2) {
            best = Some((labels.clone(), models.clone(), fitted));
        }
        let mut next = table.argmin();
        table.repair(&mut next, min_size);
        trace.push(table.total(&next));
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
    }
    notes.dedup();
    let (labels, models, objective) = best.expect("max_iter >= 1");
    Ok(ClusterResult {
        labels,
        models,
        objective_trace: trace,
        objective,
        converged,
        stop_reason: if converged { StopReason::LabelsStable } else { StopReason::MaxIterations },
        iterations,
        seed_used: 0,
        restart_index: 0,
        notes,
    })
}
