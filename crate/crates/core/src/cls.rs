//! Canonical least squares components for a single data pair.
//!
//! For fixed `v`, the best `u` is the least-squares regression of `Y v` on
//! `X`; substituting it back leaves `min ‖H Y v‖²` subject to `vᵀv = 1`,
//! which is solved by the eigenvectors of `Yᵀ H Y` with the smallest
//! eigenvalues. Multiple components are taken greedily (the `m` smallest
//! eigenvectors), which is not the jointly optimal solution.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClsComponents {
    /// `d₁ × m` (`(d₁ + 1) × m` with intercept; the intercept row is last).
    pub u: Matrix,
    /// `d₂ × m`, orthonormal columns.
    pub v: Matrix,
    /// The `m` smallest eigenvalues of `Yᵀ H Y`, ascending, clamped at zero.
    pub eigenvalues: Vec<f64>,
    pub intercept: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClsFitReport {
    /// `‖X U − Y V‖_F²` on the training data.
    pub objective: f64,
    /// R² between `X uⱼ` and `Y vⱼ`.
    pub per_component_r2: Vec<f64>,
    /// The design matrix had numerical rank below its column count; `U` is
    /// the minimum-norm solution.
    pub rank_deficient: bool,
}

impl ClsComponents {
    pub fn n_components(&self) -> usize {
        self.v.cols()
    }

    /// Column count of the un-augmented `X` view.
    pub fn x_dim(&self) -> usize {
        self.u.rows() - usize::from(self.intercept)
    }

    pub fn y_dim(&self) -> usize {
        self.v.rows()
    }

    pub(crate) fn x_score(&self, x: &[f64], j: usize) -> f64 {
        let mut s: f64 = x.iter().enumerate().map(|(i, xi)| xi * self.u[(i, j)]).sum();
        if self.intercept {
            s += self.u[(x.len(), j)];
        }
        s
    }

    pub(crate) fn y_score(&self, y: &[f64], j: usize) -> f64 {
        y.iter().enumerate().map(|(i, yi)| yi * self.v[(i, j)]).sum()
    }

    /// Squared distance between score vectors; dimensions are not checked.
    pub(crate) fn error_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n_components())
            .map(|j| {
                let d = self.y_score(y, j) - self.x_score(x, j);
                d * d
            })
            .sum()
    }
}

/// Fits `m` CLS components of `(X, Y)`.
///
/// With `intercept`, a ones column is appended to `X` before solving.
pub fn fit_cls(
    x: &Matrix,
    y: &Matrix,
    m: usize,
    intercept: bool,
) -> Result<(ClsComponents, ClsFitReport)> {
    let (n, d1, d2) = (x.rows(), x.cols(), y.cols());
    if y.rows() != n {
        return Err(Error::mismatch("fit_cls rows", n, y.rows()));
    }
    if m == 0 || m > d1.min(d2) {
        return Err(Error::InvalidParameter(alloc::format!(
            "component count m = {m} must lie in 1..={}",
            d1.min(d2)
        )));
    }
    if n < m {
        return Err(Error::InsufficientData(alloc::format!(
            "{n} rows cannot support {m} components"
        )));
    }
    let design = if intercept { x.with_ones_column() } else { x.clone() };
    let fit = linalg::residual_fit(&design, y)?;
    let gram = fit.residuals.gram();
    let eig = linalg::sym_eig(&gram)?;
    let keep: Vec<usize> = (0..m).collect();
    let v = eig.vectors.select_columns(&keep);
    let u = fit.coefficients.matmul(&v);
    let eigenvalues = eig.values[..m].iter().map(|l| l.max(0.0)).collect();

    let components = ClsComponents {
        u,
        v,
        eigenvalues,
        intercept,
    };
    let xs = design.matmul(&components.u);
    let ys = y.matmul(&components.v);
    let objective = xs.sub(&ys).as_slice().iter().map(|d| d * d).sum();
    let per_component_r2 = (0..m)
        .map(|j| {
            linalg::pearson(&xs.column(j), &ys.column(j)).map_or(0.0, |r| r * r)
        })
        .collect();
    let report = ClsFitReport {
        objective,
        per_component_r2,
        rank_deficient: fit.rank < design.cols(),
    };
    Ok((components, report))
}

fn check_dims(c: &ClsComponents, x_cols: usize, y_cols: usize) -> Result<()> {
    if x_cols != c.x_dim() {
        return Err(Error::mismatch("X columns vs U", c.x_dim(), x_cols));
    }
    if y_cols != c.y_dim() {
        return Err(Error::mismatch("Y columns vs V", c.y_dim(), y_cols));
    }
    Ok(())
}

/// Component scores `(X U, Y V)`, each `n × m`.
pub fn cls_transform(c: &ClsComponents, x: &Matrix, y: &Matrix) -> Result<(Matrix, Matrix)> {
    check_dims(c, x.cols(), y.cols())?;
    if x.rows() != y.rows() {
        return Err(Error::mismatch("cls_transform rows", x.rows(), y.rows()));
    }
    let xs = if c.intercept {
        x.with_ones_column().matmul(&c.u)
    } else {
        x.matmul(&c.u)
    };
    Ok((xs, y.matmul(&c.v)))
}

/// `‖yᵀV − xᵀU‖²` for a single observation.
pub fn cls_point_error(c: &ClsComponents, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(c, x.len(), y.len())?;
    Ok(c.error_unchecked(x, y))
}
