//! Synthetic two-view data with planted spatial and correlation clusters.
//!
//! Each row draws, in this order from one `ChaCha8Rng` seeded with
//! `seed_from_u64(cfg.seed)`: the spatial label (fair coin), the correlation
//! label (`map_prob` for map 0), two standard normals for `x`, two standard
//! normals for the noise on `y`. Then `x = μ_s + L z` with `L` the Cholesky
//! factor of the shared covariance and `y = A_c x + noise_sd · e`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cluster::rng_for;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub type Mat2 = [[f64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    /// Rows of the held-out split drawn after the training rows.
    pub n_test: usize,
    pub spatial_means: [[f64; 2]; 2],
    pub spatial_cov: Mat2,
    pub maps: [Mat2; 2],
    pub noise_sd: f64,
    /// Probability of map 0.
    pub map_prob: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 500,
            n_test: 500,
            spatial_means: [[-2.0, 0.0], [2.0, 0.0]],
            spatial_cov: [[1.0, 0.0], [0.0, 1.0]],
            maps: [[[1.0, 0.5], [0.5, 1.0]], [[1.0, -0.5], [-0.5, -1.0]]],
            noise_sd: 0.2,
            map_prob: 0.5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthDataset {
    pub x: Matrix,
    pub y: Matrix,
    pub spatial_labels: Vec<usize>,
    pub corr_labels: Vec<usize>,
}

fn cholesky(c: &Mat2) -> Result<Mat2> {
    let sym = (c[0][1] - c[1][0]).abs() <= 1e-12 * c[0][1].abs().max(1.0);
    if !sym || !(c[0][0] > 0.0) {
        return Err(Error::InvalidParameter("spatial covariance must be symmetric positive definite".into()));
    }
    let l00 = libm::sqrt(c[0][0]);
    let l10 = c[1][0] / l00;
    let rest = c[1][1] - l10 * l10;
    if !(rest > 0.0) {
        return Err(Error::InvalidParameter("spatial covariance must be symmetric positive definite".into()));
    }
    Ok([[l00, 0.0], [l10, libm::sqrt(rest)]])
}

impl SynthConfig {
    pub fn validate(&self) -> Result<Mat2> {
        let finite = self
            .spatial_means
            .iter()
            .flatten()
            .chain(self.spatial_cov.iter().flatten())
            .chain(self.maps.iter().flatten().flatten())
            .chain([&self.noise_sd, &self.map_prob])
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite);
        }
        if !(self.noise_sd >= 0.0) {
            return Err(Error::InvalidParameter("noise_sd must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.map_prob) {
            return Err(Error::InvalidParameter("map_prob must lie in [0, 1]".into()));
        }
        let diff: f64 = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| { let d = self.maps[0][i][j] - self.maps[1][i][j]; d * d })
            .sum();
        if diff == 0.0 {
            return Err(Error::InvalidParameter("the two maps must differ".into()));
        }
        cholesky(&self.spatial_cov)
    }
}

fn draw<R: Rng>(cfg: &SynthConfig, chol: &Mat2, n: usize, rng: &mut R) -> SynthDataset {
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut spatial_labels = Vec::with_capacity(n);
    let mut corr_labels = Vec::with_capacity(n);
    for _ in 0..n {
        let s = usize::from(!rng.random_bool(0.5));
        let c = usize::from(!rng.random_bool(cfg.map_prob));
        let z: [f64; 2] = [StandardNormal.sample(rng), StandardNormal.sample(rng)];
        let e: [f64; 2] = [StandardNormal.sample(rng), StandardNormal.sample(rng)];
        let mu = cfg.spatial_means[s];
        let x = [
            mu[0] + chol[0][0] * z[0],
            mu[1] + chol[1][0] * z[0] + chol[1][1] * z[1],
        ];
        let a = cfg.maps[c];
        let y = [
            a[0][0] * x[0] + a[0][1] * x[1] + cfg.noise_sd * e[0],
            a[1][0] * x[0] + a[1][1] * x[1] + cfg.noise_sd * e[1],
        ];
        xs.push(x);
        ys.push(y);
        spatial_labels.push(s);
        corr_labels.push(c);
    }
    SynthDataset {
        x: Matrix::from_rows(&xs).expect("finite draws"),
        y: Matrix::from_rows(&ys).expect("finite draws"),
        spatial_labels,
        corr_labels,
    }
}

/// `cfg.n` rows.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SynthDataset> {
    let chol = cfg.validate()?;
    Ok(draw(cfg, &chol, cfg.n, &mut rng_for(cfg.seed)))
}

/// Training rows (identical to [`generate_synthetic`]) followed by
/// `cfg.n_test` test rows from the same stream.
pub fn generate_train_test(cfg: &SynthConfig) -> Result<(SynthDataset, SynthDataset)> {
    let chol = cfg.validate()?;
    let mut rng = rng_for(cfg.seed);
    let train = draw(cfg, &chol, cfg.n, &mut rng);
    let test = draw(cfg, &chol, cfg.n_test, &mut rng);
    Ok((train, test))
}

/// Joint normal mixture over `(x, y)`; each component draws
/// `μ + L z` with `z` standard normal and `L` its `factor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub n: usize,
    /// Leading coordinates of each draw that form `x`; the rest form `y`.
    pub x_dim: usize,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    /// Square factors with `factor · factorᵀ` the component covariance.
    pub factors: Vec<Matrix>,
    pub seed: u64,
}

impl MixtureConfig {
    /// Two 4-dimensional normals, split into 2-dimensional views, on which
    /// CCA clustering tends to cycle between labelings.
    pub fn oscillating(n: usize, seed: u64) -> Self {
        let l0 = [
            [1.3, 0.0, 0.0, 0.0],
            [-0.4, 0.5, 0.0, 0.0],
            [0.9, -0.8, 0.6, 0.0],
            [-0.6, -0.8, 0.1, 1.2],
        ];
        let l1 = [
            [1.3, 0.0, 0.0, 0.0],
            [0.2, 1.3, 0.0, 0.0],
            [-0.7, -0.5, 0.6, 0.0],
            [0.8, 0.9, 0.2, 0.9],
        ];
        MixtureConfig {
            n,
            x_dim: 2,
            weights: alloc::vec![0.5, 0.5],
            means: alloc::vec![alloc::vec![-0.4, 1.2, -0.1, -1.5], alloc::vec![2.0, 0.6, 0.9, 1.7]],
            factors: alloc::vec![Matrix::from_rows(&l0).expect("finite"), Matrix::from_rows(&l1).expect("finite")],
            seed,
        }
    }

    fn validate(&self) -> Result<usize> {
        let k = self.weights.len();
        if k == 0 {
            return Err(Error::Empty("mixture needs at least one component"));
        }
        if self.means.len() != k || self.factors.len() != k {
            return Err(Error::mismatch("mixture components", k, self.means.len().min(self.factors.len())));
        }
        let dim = self.means[0].len();
        if self.x_dim == 0 || self.x_dim >= dim {
            return Err(Error::InvalidParameter(alloc::format!("x_dim must lie in 1..{dim}")));
        }
        for (mu, l) in self.means.iter().zip(&self.factors) {
            if mu.len() != dim || l.shape() != (dim, dim) {
                return Err(Error::mismatch("mixture component dimension", dim, mu.len()));
            }
            if !mu.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        if !self.weights.iter().all(|w| w.is_finite() && *w >= 0.0) || !(self.weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::InvalidParameter("mixture weights must be non-negative with a positive sum".into()));
        }
        Ok(dim)
    }
}

/// `(x, y, component)` per row. Each row draws a uniform for the component,
/// then the standard normals in coordinate order.
pub fn generate_mixture(cfg: &MixtureConfig) -> Result<(Matrix, Matrix, Vec<usize>)> {
    let dim = cfg.validate()?;
    let total: f64 = cfg.weights.iter().sum();
    let mut rng = rng_for(cfg.seed);
    let mut xs = Vec::with_capacity(cfg.n);
    let mut ys = Vec::with_capacity(cfg.n);
    let mut labels = Vec::with_capacity(cfg.n);
    let mut z = alloc::vec![0.0; dim];
    for _ in 0..cfg.n {
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut c = cfg.weights.len() - 1;
        for (i, w) in cfg.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                c = i;
                break;
            }
        }
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let l = &cfg.factors[c];
        let p: Vec<f64> = (0..dim)
            .map(|i| cfg.means[c][i] + (0..dim).map(|j| l[(i, j)] * z[j]).sum::<f64>())
            .collect();
        xs.push(p[..cfg.x_dim].to_vec());
        ys.push(p[cfg.x_dim..].to_vec());
        labels.push(c);
    }
    Ok((Matrix::from_rows(&xs)?, Matrix::from_rows(&ys)?, labels))
}
