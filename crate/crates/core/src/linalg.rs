//! Dense linear algebra shared by every fitting routine.
//!
//! Everything here is small-dimension and deterministic: a cyclic Jacobi
//! eigensolver for symmetric matrices and a one-sided (Hestenes) Jacobi SVD
//! for least squares. Both are accurate to a few ulps relative to the matrix
//! norm, which the eigenvalue identities downstream rely on.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative singular-value cutoff for pseudo-solutions.
pub const LSTSQ_RCOND: f64 = 1e-12;

/// Relative asymmetry tolerated by [`sym_eig`].
pub const SYMMETRY_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major matrix of finite `f64` values.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::mismatch("row-major data length", rows * cols, data.len()));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::mismatch("row length", cols, r.len()));
            }
            data.extend_from_slice(r);
        }
        Matrix::from_row_major(rows.len(), cols, data)
    }

    /// Single-column matrix.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Matrix::from_row_major(values.len(), 1, values.to_vec())
    }

    /// Matrix whose columns are the given slices, all of equal length.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::mismatch("column length", rows, c.len()));
            }
            for (i, &v) in c.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product. Panics if the inner dimensions differ.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let o = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &aik) in a.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                for (oj, &bkj) in o.iter_mut().zip(other.row(k)) {
                    *oj += aik * bkj;
                }
            }
        }
        out
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn tr_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "tr_matmul row count");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            let a = self.row(r);
            let b = other.row(r);
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0.0 {
                    continue;
                }
                let o = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (oj, &bj) in o.iter_mut().zip(b) {
                    *oj += ai * bj;
                }
            }
        }
        out
    }

    /// `selfᵀ · self`, exactly symmetric.
    pub fn gram(&self) -> Matrix {
        let d = self.cols;
        let mut g = Matrix::zeros(d, d);
        for r in 0..self.rows {
            let a = self.row(r);
            for i in 0..d {
                for j in i..d {
                    g.data[i * d + j] += a[i] * a[j];
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                g.data[i * d + j] = g.data[j * d + i];
            }
        }
        g
    }

    /// Element-wise difference. Panics on shape mismatch.
    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "sub shape");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, indices.len());
        for i in 0..self.rows {
            for (jj, &j) in indices.iter().enumerate() {
                out[(i, jj)] = self[(i, j)];
            }
        }
        out
    }

    /// Appends a trailing column of ones.
    pub fn with_ones_column(&self) -> Matrix {
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.push(1.0);
        }
        Matrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Serialized as an array of rows.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(deserializer)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Per-column preprocessing record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub means: Vec<f64>,
    /// Population standard deviations; 1 for untouched columns.
    pub scales: Vec<f64>,
    /// Columns with zero variance, passed through unscaled.
    pub constant: Vec<bool>,
}

impl ColumnStats {
    fn identity(cols: usize) -> Self {
        ColumnStats {
            means: vec![0.0; cols],
            scales: vec![1.0; cols],
            constant: vec![false; cols],
        }
    }
}

fn column_mean(m: &Matrix, j: usize) -> f64 {
    let n = m.rows() as f64;
    let mean = (0..m.rows()).map(|i| m[(i, j)]).sum::<f64>() / n;
    // second pass removes most of the rounding left by the first
    let correction = (0..m.rows()).map(|i| m[(i, j)] - mean).sum::<f64>() / n;
    mean + correction
}

/// Subtracts each column's mean.
pub fn center_columns(m: &Matrix) -> Result<(Matrix, ColumnStats)> {
    if m.rows() == 0 {
        return Err(Error::Empty("center_columns needs at least one row"));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut stats = ColumnStats::identity(m.cols());
    let mut out = m.clone();
    for j in 0..m.cols() {
        let mean = column_mean(m, j);
        stats.means[j] = mean;
        for i in 0..m.rows() {
            out[(i, j)] -= mean;
        }
    }
    Ok((out, stats))
}

/// Divides each non-constant column by its population standard deviation.
///
/// Columns are not centered; `means` records the column means used for the
/// deviation. Constant columns keep scale 1 and are flagged.
pub fn scale_unit_variance(m: &Matrix) -> Result<(Matrix, ColumnStats)> {
    if m.rows() < 2 {
        return Err(Error::InsufficientData(alloc::format!(
            "scale_unit_variance needs at least 2 rows, got {}",
            m.rows()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.rows() as f64;
    let mut stats = ColumnStats::identity(m.cols());
    let mut out = m.clone();
    for j in 0..m.cols() {
        let mean = column_mean(m, j);
        let var = (0..m.rows()).map(|i| { let d = m[(i, j)] - mean; d * d }).sum::<f64>() / n;
        let sd = libm::sqrt(var);
        stats.means[j] = mean;
        if sd <= 1e-12 * mean.abs().max(1.0) {
            stats.constant[j] = true;
            continue;
        }
        stats.scales[j] = sd;
        for i in 0..m.rows() {
            out[(i, j)] /= sd;
        }
    }
    Ok((out, stats))
}

/// Centers every column, then scales it to unit population variance.
pub fn standardize(m: &Matrix) -> Result<(Matrix, ColumnStats)> {
    let (centered, c) = center_columns(m)?;
    let (scaled, s) = scale_unit_variance(&centered)?;
    Ok((
        scaled,
        ColumnStats {
            means: c.means,
            scales: s.scales,
            constant: s.constant,
        },
    ))
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: Matrix,
}

/// Flips `v` so its largest-magnitude entry is non-negative.
pub(crate) fn orient(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Values come back ascending; each vector is oriented so that its
/// largest-magnitude entry is non-negative.
pub fn sym_eig(s: &Matrix) -> Result<EigenPairs> {
    let n = s.rows();
    if s.cols() != n {
        return Err(Error::mismatch("sym_eig square matrix", n, s.cols()));
    }
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = s.max_abs();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = s.clone();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = Matrix::identity(n);
    jacobi_sweeps(&mut a, &mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| a[(p, p)].total_cmp(&a[(q, q)]));
    let values = order.iter().map(|&p| a[(p, p)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        let mut col = v.column(j);
        orient(&mut col);
        for (i, x) in col.into_iter().enumerate() {
            vectors[(i, jj)] = x;
        }
    }
    Ok(EigenPairs { values, vectors })
}

fn jacobi_sweeps(a: &mut Matrix, v: &mut Matrix) {
    let n = a.rows();
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return;
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if libm::sqrt(off) <= 1e-17 * norm {
            return;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if apq.abs() <= 1e-18 * libm::sqrt(app.abs() * aqq.abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let (c, s) = jacobi_rotation(app, aqq, apq);
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
}

/// Rotation `(c, s)` zeroing the off-diagonal of `[[app, apq], [apq, aqq]]`.
#[inline]
fn jacobi_rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    (c, t * c)
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Svd {
    /// `rows × p` with `p = min(rows, cols)`; columns for zero singular values are zero.
    pub u: Matrix,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `cols × p`.
    pub v: Matrix,
}

impl Svd {
    /// Number of singular values above `rcond` times the largest.
    pub fn rank(&self, rcond: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > rcond * top && s > 0.0)
            .count()
    }
}

/// One-sided Jacobi SVD.
pub fn svd(a: &Matrix) -> Svd {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (m, n) = a.shape();
    // column-major working copy
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let (c, s) = jacobi_rotation(alpha, beta, gamma);
                let (wp, wq) = split_pair(&mut w, p, q);
                rotate(wp, wq, c, s);
                let (vp, vq) = split_pair(&mut v, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = w
        .iter()
        .map(|c| libm::sqrt(c.iter().map(|x| x * x).sum()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| norms[q].total_cmp(&norms[p]));
    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (jj, &j) in order.iter().enumerate() {
        let s = norms[j];
        singular_values.push(s);
        if s > 0.0 {
            for i in 0..m {
                u[(i, jj)] = w[j][i] / s;
            }
        }
        for i in 0..n {
            vm[(i, jj)] = v[j][i];
        }
    }
    Svd {
        u,
        singular_values,
        v: vm,
    }
}

fn split_pair(cols: &mut [Vec<f64>], p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (lo, hi) = cols.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

#[inline]
fn rotate(p: &mut [f64], q: &mut [f64], c: f64, s: f64) {
    for (x, y) in p.iter_mut().zip(q.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Least-squares solution together with the numerical rank used.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    pub solution: Matrix,
    pub rank: usize,
}

/// Minimum-norm solution of `min ‖X C − B‖_F` with singular values below
/// [`LSTSQ_RCOND`] times the largest treated as zero.
pub fn least_squares(x: &Matrix, b: &Matrix) -> Result<LeastSquares> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::Empty("least_squares_solve needs a non-empty design matrix"));
    }
    if x.rows() != b.rows() {
        return Err(Error::mismatch("least_squares_solve rows", x.rows(), b.rows()));
    }
    if !x.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite);
    }
    let dec = svd(x);
    let rank = dec.rank(LSTSQ_RCOND);
    // C = V_r diag(1/s_r) U_rᵀ B
    let utb = dec.u.tr_matmul(b);
    let mut scaled = Matrix::zeros(rank, b.cols());
    for i in 0..rank {
        let inv = 1.0 / dec.singular_values[i];
        for j in 0..b.cols() {
            scaled[(i, j)] = utb[(i, j)] * inv;
        }
    }
    let v_r = dec.v.select_columns(&(0..rank).collect::<Vec<_>>());
    Ok(LeastSquares {
        solution: v_r.matmul(&scaled),
        rank,
    })
}

/// Solution matrix of [`least_squares`].
pub fn least_squares_solve(x: &Matrix, b: &Matrix) -> Result<Matrix> {
    least_squares(x, b).map(|ls| ls.solution)
}

/// Regression of `Y` on `X`: coefficients `C`, residuals `Y − X C` and rank.
#[derive(Clone, Debug)]
pub(crate) struct ResidualFit {
    pub coefficients: Matrix,
    pub residuals: Matrix,
    pub rank: usize,
}

pub(crate) fn residual_fit(x: &Matrix, y: &Matrix) -> Result<ResidualFit> {
    if x.rows() != y.rows() {
        return Err(Error::mismatch("residual_gram rows", x.rows(), y.rows()));
    }
    if x.cols() == 0 || x.rows() == 0 {
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        return Ok(ResidualFit {
            coefficients: Matrix::zeros(x.cols(), y.cols()),
            residuals: y.clone(),
            rank: 0,
        });
    }
    let ls = least_squares(x, y)?;
    let residuals = y.sub(&x.matmul(&ls.solution));
    Ok(ResidualFit {
        coefficients: ls.solution,
        residuals,
        rank: ls.rank,
    })
}

/// `Yᵀ H Y` with `H = I − X (XᵀX)⁺ Xᵀ`, never forming the `n × n` projector.
///
/// Computed as `RᵀR` with `R = Y − X C` the least-squares residual; this equals
/// `YᵀY − (XᵀY)ᵀ C` because `C` satisfies the normal equations, and it is
/// symmetric positive semidefinite by construction.
pub fn residual_gram(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    residual_fit(x, y).map(|f| f.residuals.gram())
}

/// Population (divisor `n`) cross-covariance `cov(A, B)` of the columns.
pub fn cross_covariance(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.rows(), b.rows(), "cross_covariance rows");
    let n = a.rows() as f64;
    let ma: Vec<f64> = (0..a.cols()).map(|j| column_mean(a, j)).collect();
    let mb: Vec<f64> = (0..b.cols()).map(|j| column_mean(b, j)).collect();
    let mut out = Matrix::zeros(a.cols(), b.cols());
    for r in 0..a.rows() {
        let ra = a.row(r);
        let rb = b.row(r);
        for i in 0..a.cols() {
            let da = ra[i] - ma[i];
            for j in 0..b.cols() {
                out[(i, j)] += da * (rb[j] - mb[j]);
            }
        }
    }
    out.scaled(1.0 / n)
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population Pearson correlation; `None` when either input is constant.
pub(crate) fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    debug_assert_eq!(a.len(), b.len());
    let ma = mean(a);
    let mb = mean(b);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}
