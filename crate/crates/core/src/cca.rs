//! Canonical correlation analysis and per-component canonical regressions.
//!
//! Solved through the whitened cross-covariance `Σxx^{-1/2} Σxy Σyy^{-1/2}`:
//! its singular vectors, mapped back through the whitening transforms, are
//! the eigenvectors of `Σxx⁻¹ Σxy Σyy⁻¹ Σxyᵀ` and its symmetric counterpart,
//! and its singular values are the canonical correlations.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Relative eigenvalue / singular-value cutoff for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Largest transform condition number accepted by the invariance check.
pub const MAX_TRANSFORM_CONDITION: f64 = 1e6;

/// `Y vⱼ ≈ α + β X uⱼ`, fitted by ordinary least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalRegression {
    pub alpha: f64,
    pub beta: f64,
    /// `X uⱼ` had zero variance; `beta` was set to 0.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcaComponents {
    /// `d₁ × m`, normalized so each canonical variable has unit variance.
    pub u: Matrix,
    /// `d₂ × m`.
    pub v: Matrix,
    /// Descending, clamped to `[0, 1]`.
    pub correlations: Vec<f64>,
    /// Filled by [`fit_canonical_regressions`]; empty until then.
    pub regressions: Vec<CanonicalRegression>,
    /// A view covariance was singular and was pseudo-inverted.
    pub singular_covariance: bool,
}

impl CcaComponents {
    pub fn n_components(&self) -> usize {
        self.u.cols()
    }

    pub(crate) fn x_score(&self, x: &[f64], j: usize) -> f64 {
        x.iter().enumerate().map(|(i, xi)| xi * self.u[(i, j)]).sum()
    }

    pub(crate) fn y_score(&self, y: &[f64], j: usize) -> f64 {
        y.iter().enumerate().map(|(i, yi)| yi * self.v[(i, j)]).sum()
    }
}

/// Symmetric `S^{-1/2}` restricted to the numerically non-null eigenspace.
fn inverse_sqrt(s: &Matrix) -> Result<(Matrix, bool)> {
    let eig = linalg::sym_eig(s)?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    let d = s.rows();
    let mut out = Matrix::zeros(d, d);
    let mut singular = false;
    for (k, &lam) in eig.values.iter().enumerate() {
        if top <= 0.0 || lam <= RANK_TOL * top {
            singular = true;
            continue;
        }
        let w = 1.0 / libm::sqrt(lam);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += w * eig.vectors[(i, k)] * eig.vectors[(j, k)];
            }
        }
    }
    Ok((out, singular))
}

struct Whitened {
    wx: Matrix,
    wy: Matrix,
    svd: linalg::Svd,
    singular: bool,
}

fn whiten(x: &Matrix, y: &Matrix) -> Result<Whitened> {
    if x.rows() != y.rows() {
        return Err(Error::mismatch("CCA rows", x.rows(), y.rows()));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = x.rows();
    let dmax = x.cols().max(y.cols());
    if n <= dmax {
        return Err(Error::InsufficientData(alloc::format!(
            "CCA needs more than {dmax} rows, got {n}"
        )));
    }
    let (wx, sx) = inverse_sqrt(&linalg::cross_covariance(x, x))?;
    let (wy, sy) = inverse_sqrt(&linalg::cross_covariance(y, y))?;
    let k = wx.matmul(&linalg::cross_covariance(x, y)).matmul(&wy);
    Ok(Whitened {
        wx,
        wy,
        svd: linalg::svd(&k),
        singular: sx || sy,
    })
}

/// All `min(d₁, d₂)` canonical correlations, descending.
pub fn canonical_correlations(x: &Matrix, y: &Matrix) -> Result<Vec<f64>> {
    let w = whiten(x, y)?;
    Ok(w.svd
        .singular_values
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect())
}

/// Fits the first `m` canonical pairs.
///
/// Covariances are taken about the sample means, so uncentered input is
/// accepted; the canonical regressions then carry the offset in `alpha`.
pub fn fit_cca(x: &Matrix, y: &Matrix, m: usize) -> Result<CcaComponents> {
    let w = whiten(x, y)?;
    let rank = w.svd.rank(RANK_TOL);
    let bound = x.cols().min(y.cols()).min(rank);
    if m == 0 || m > bound {
        return Err(Error::InvalidParameter(alloc::format!(
            "component count m = {m} must lie in 1..={bound} (min(d1, d2, rank Σxy))"
        )));
    }
    let mut u = Matrix::zeros(x.cols(), m);
    let mut v = Matrix::zeros(y.cols(), m);
    for j in 0..m {
        let mut a = w.wx.matmul(&Matrix::from_column(&w.svd.u.column(j))?).column(0);
        let mut b = w.wy.matmul(&Matrix::from_column(&w.svd.v.column(j))?).column(0);
        let before = a.clone();
        linalg::orient(&mut a);
        if a != before {
            b.iter_mut().for_each(|t| *t = -*t);
        }
        for (i, t) in a.into_iter().enumerate() {
            u[(i, j)] = t;
        }
        for (i, t) in b.into_iter().enumerate() {
            v[(i, j)] = t;
        }
    }
    Ok(CcaComponents {
        u,
        v,
        correlations: w.svd.singular_values[..m]
            .iter()
            .map(|s| s.clamp(0.0, 1.0))
            .collect(),
        regressions: Vec::new(),
        singular_covariance: w.singular,
    })
}

/// Fits `Y vⱼ = αⱼ + βⱼ X uⱼ` for every component of `c` on `(X, Y)`.
pub fn fit_canonical_regressions(c: &CcaComponents, x: &Matrix, y: &Matrix) -> Result<CcaComponents> {
    if x.cols() != c.u.rows() {
        return Err(Error::mismatch("X columns vs U", c.u.rows(), x.cols()));
    }
    if y.cols() != c.v.rows() {
        return Err(Error::mismatch("Y columns vs V", c.v.rows(), y.cols()));
    }
    if x.rows() != y.rows() {
        return Err(Error::mismatch("CCA rows", x.rows(), y.rows()));
    }
    if x.rows() == 0 {
        return Err(Error::Empty("canonical regressions need data"));
    }
    let xs = x.matmul(&c.u);
    let ys = y.matmul(&c.v);
    let regressions = (0..c.n_components())
        .map(|j| simple_ols(&xs.column(j), &ys.column(j)))
        .collect();
    Ok(CcaComponents {
        regressions,
        ..c.clone()
    })
}

fn simple_ols(a: &[f64], b: &[f64]) -> CanonicalRegression {
    let ma = linalg::mean(a);
    let mb = linalg::mean(b);
    let (mut sab, mut saa) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if saa <= 1e-24 * scale * scale * a.len() as f64 {
        return CanonicalRegression {
            alpha: mb,
            beta: 0.0,
            degenerate: true,
        };
    }
    let beta = sab / saa;
    CanonicalRegression {
        alpha: mb - beta * ma,
        beta,
        degenerate: false,
    }
}

fn condition_number(t: &Matrix) -> f64 {
    let s = linalg::svd(t).singular_values;
    let lo = s.last().copied().unwrap_or(0.0);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        s[0] / lo
    }
}

/// Largest absolute change of the canonical correlation spectrum when the
/// views are replaced by `X Tx` and `Y Ty`.
pub fn cca_affine_invariance_check(x: &Matrix, y: &Matrix, tx: &Matrix, ty: &Matrix) -> Result<f64> {
    for (t, d) in [(tx, x.cols()), (ty, y.cols())] {
        if t.rows() != d || t.cols() != d {
            return Err(Error::mismatch("transform dimension", d, t.rows().max(t.cols())));
        }
        let cond = condition_number(t);
        if cond >= MAX_TRANSFORM_CONDITION {
            return Err(Error::IllConditioned(cond));
        }
    }
    let base = canonical_correlations(x, y)?;
    let moved = canonical_correlations(&x.matmul(tx), &y.matmul(ty))?;
    Ok(base
        .iter()
        .zip(&moved)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
}
