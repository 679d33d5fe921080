//! Lloyd's k-means with k-means++ seeding.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{multi_restart, rng_for, FitConfig, Scored};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Matrix,
    /// Within-cluster sum of squares after every centroid update.
    pub objective_trace: Vec<f64>,
    pub inertia: f64,
    pub converged: bool,
    pub iterations: usize,
    pub seed_used: u64,
    pub restart_index: usize,
}

impl Scored for KMeansResult {
    fn final_objective(&self) -> f64 {
        self.inertia
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, sq_dist(point, centroids.row(0)));
    for c in 1..centroids.rows() {
        let d = sq_dist(point, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn seed_centroids(data: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = data.rows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(data.row(i), data.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        chosen.push(next);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(data.row(i), data.row(next)));
        }
    }
    data.select_rows(&chosen)
}

fn lloyd(data: &Matrix, k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> KMeansResult {
    let (n, d) = data.shape();
    let mut centroids = seed_centroids(data, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        let mut next = Vec::with_capacity(n);
        let mut dists = Vec::with_capacity(n);
        for i in 0..n {
            let (c, dd) = nearest(data.row(i), &centroids);
            next.push(c);
            dists.push(dd);
        }
        // reseed empty clusters from the farthest points
        let mut counts = vec![0usize; k];
        next.iter().for_each(|&c| counts[c] += 1);
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| counts[next[i]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
            if let Some(i) = far {
                counts[next[i]] -= 1;
                counts[c] += 1;
                next[i] = c;
                dists[i] = 0.0;
            }
        }
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
        let mut sums = Matrix::zeros(k, d);
        for i in 0..n {
            for j in 0..d {
                sums[(labels[i], j)] += data[(i, j)];
            }
        }
        for c in 0..k {
            for j in 0..d {
                sums[(c, j)] /= counts[c].max(1) as f64;
            }
        }
        centroids = sums;
        trace.push(inertia(data, &labels, &centroids));
    }
    KMeansResult {
        inertia: inertia(data, &labels, &centroids),
        labels,
        centroids,
        objective_trace: trace,
        converged,
        iterations,
        seed_used: 0,
        restart_index: 0,
    }
}

fn inertia(data: &Matrix, labels: &[usize], centroids: &Matrix) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(data.row(i), centroids.row(c)))
        .sum()
}

/// k-means on the rows of `data`, best inertia over `cfg.n_init` restarts.
/// Only `n_init`, `max_iter` and `seed` are read from `cfg`.
pub fn kmeans(data: &Matrix, k: usize, cfg: &FitConfig) -> Result<KMeansResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > data.rows() {
        return Err(Error::Infeasible(alloc::format!(
            "k = {k} exceeds the {} observations",
            data.rows()
        )));
    }
    if !data.is_finite() {
        return Err(Error::NonFinite);
    }
    if cfg.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
    }
    multi_restart(cfg, |index, seed| {
        let mut r = lloyd(data, k, cfg.max_iter, &mut rng_for(seed));
        r.seed_used = seed;
        r.restart_index = index;
        Ok(r)
    })
}
