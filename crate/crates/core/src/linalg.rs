//! Small dense complex linear algebra: LU with partial pivoting, products,
//! norms and equilibration.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular (zero pivot in column {0})")]
    Singular(usize),
    #[error("dimension mismatch: {0}")]
    Shape(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows<const C: usize>(rows: &[[Complex64; C]]) -> Self {
        let mut m = Self::zeros(rows.len(), C);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale_rows(&mut self, s: &[f64]) {
        for i in 0..self.rows {
            for j in 0..self.cols {
                self[(i, j)] *= s[i];
            }
        }
    }

    pub fn scale_cols(&mut self, s: &[f64]) {
        for i in 0..self.rows {
            for j in 0..self.cols {
                self[(i, j)] *= s[j];
            }
        }
    }

    pub fn lu(&self) -> Result<Lu, LinalgError> {
        Lu::new(self.clone())
    }

    pub fn inverse(&self) -> Result<CMatrix, LinalgError> {
        self.lu()?.solve_matrix(&CMatrix::identity(self.rows))
    }

    /// 1-norm condition number.
    pub fn cond1(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.norm1() * inv.norm1(),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Row then column scaling factors that bring every row and column maximum
/// to one (powers of two, so the scaling is exact).
pub fn equilibrate(m: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let pow2 = |x: f64| if x > 0.0 && x.is_finite() { (2.0f64).powi(-(x.log2().round() as i32)) } else { 1.0 };
    let row: Vec<f64> = (0..m.rows)
        .map(|i| pow2(m.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max)))
        .collect();
    let col: Vec<f64> = (0..m.cols)
        .map(|j| pow2((0..m.rows).map(|i| m[(i, j)].norm() * row[i]).fold(0.0, f64::max)))
        .collect();
    (row, col)
}

#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn new(mut a: CMatrix) -> Result<Self, LinalgError> {
        if a.rows != a.cols {
            return Err(LinalgError::Shape("LU requires a square matrix"));
        }
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm()))
                .unwrap_or(k);
            if a[(p, k)].norm() == 0.0 || !a[(p, k)].norm().is_finite() {
                return Err(LinalgError::Singular(k));
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                a[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        let n = self.lu.rows;
        if b.len() != n {
            return Err(LinalgError::Shape("right-hand side length"));
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> Result<CMatrix, LinalgError> {
        if b.rows != self.lu.rows {
            return Err(LinalgError::Shape("right-hand side rows"));
        }
        let mut out = CMatrix::zeros(b.rows, b.cols);
        let mut col = vec![Complex64::zero(); b.rows];
        for j in 0..b.cols {
            for i in 0..b.rows {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col)?;
            for i in 0..b.rows {
                out[(i, j)] = x[i];
            }
        }
        Ok(out)
    }
}
