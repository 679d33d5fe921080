//! Shared helpers for unit tests. Kept independent of the solvers they check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    Matrix::from_row_major(rows, cols, data).unwrap()
}

/// Explicit inverse via Gauss-Jordan with partial pivoting.
pub fn inverse(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[(i, c)].abs().total_cmp(&m[(j, c)].abs()))
            .unwrap();
        for j in 0..n {
            let t = m[(c, j)];
            m[(c, j)] = m[(p, j)];
            m[(p, j)] = t;
            let t = inv[(c, j)];
            inv[(c, j)] = inv[(p, j)];
            inv[(p, j)] = t;
        }
        let d = m[(c, c)];
        for j in 0..n {
            m[(c, j)] /= d;
            inv[(c, j)] /= d;
        }
        for i in 0..n {
            if i != c {
                let f = m[(i, c)];
                for j in 0..n {
                    m[(i, j)] -= f * m[(c, j)];
                    inv[(i, j)] -= f * inv[(c, j)];
                }
            }
        }
    }
    inv
}

/// `‖X u − Y v‖²` with `u` from explicit normal equations.
pub fn objective_for_v(x: &Matrix, y: &Matrix, v: &[f64]) -> f64 {
    let yv: alloc::vec::Vec<f64> = (0..y.rows())
        .map(|i| y.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect();
    let yv_m = Matrix::from_column(&yv).unwrap();
    let u = inverse(&x.gram()).matmul(&x.tr_matmul(&yv_m));
    let xu = x.matmul(&u);
    (0..x.rows()).map(|i| (xu[(i, 0)] - yv[i]).powi(2)).sum()
}
