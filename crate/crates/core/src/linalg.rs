//! Dense complex matrix kernels: product, power, Kronecker product, trace,
//! and tolerance-based rank / null-space extraction.
//!
//! Everything here is straight loops over row-major storage. The matrices in
//! this crate top out at a few hundred rows, so no BLAS, no blocking, no
//! cleverness.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds from nested rows; panics on ragged input (test convenience).
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ComplexMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_real_rows(rows: Vec<Vec<f64>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|row| row.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.shape_check("add", other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.shape_check("sub", other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    fn shape_check(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                op,
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Largest entry modulus; the residual norm used throughout.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// tr(A B) without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::ShapeMismatch {
                op: "trace_of_product",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        Ok(acc)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// A^exp by repeated squaring, exp >= 1.
    pub fn mat_power(&self, exp: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch {
                op: "mat_power",
                left: (self.rows, self.cols),
                right: (self.rows, self.cols),
            });
        }
        if exp == 0 {
            return Err(Error::Validation("matrix power requires exponent >= 1".into()));
        }
        let mut base = self.clone();
        let mut result: Option<ComplexMatrix> = None;
        let mut e = exp;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.matmul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.matmul(&base)?;
        }
        Ok(result.expect("exp >= 1"))
    }

    /// Kronecker product with the usual block layout: block (i,j) of the
    /// result is self[i][j] * other.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out.set(i * other.rows + p, j * other.cols + q, a * other.get(p, q));
                    }
                }
            }
        }
        out
    }

    /// Numerical rank and a basis of the numerical null space.
    ///
    /// Gauss-Jordan elimination with complete pivoting; a pivot counts while
    /// its modulus exceeds `tol` times the largest initial pivot (the largest
    /// entry of the input). Returns the pivot count and one null vector per
    /// free column, each with a 1 in its free coordinate.
    pub fn rank_nullspace(&self, tol: f64) -> (usize, Vec<Vec<Complex64>>) {
        assert!(tol > 0.0, "tolerance must be positive");
        let (rows, cols) = (self.rows, self.cols);
        let mut r = self.entries.clone();
        let mut perm: Vec<usize> = (0..cols).collect();
        let at = |r: &[Complex64], i: usize, j: usize| r[i * cols + j];

        let scale = self.max_abs();
        if scale == 0.0 {
            // Zero matrix: every column is free.
            let basis = (0..cols)
                .map(|q| {
                    let mut v = vec![Complex64::new(0.0, 0.0); cols];
                    v[q] = Complex64::new(1.0, 0.0);
                    v
                })
                .collect();
            return (0, basis);
        }
        let threshold = tol * scale;

        let mut rank = 0;
        for step in 0..rows.min(cols) {
            // Complete pivoting: largest modulus in the trailing block.
            let (mut pi, mut pj, mut pmax) = (step, step, 0.0f64);
            for i in step..rows {
                for j in step..cols {
                    let m = at(&r, i, j).norm();
                    if m > pmax {
                        (pi, pj, pmax) = (i, j, m);
                    }
                }
            }
            if pmax <= threshold {
                break;
            }
            // Swap into position.
            if pi != step {
                for j in 0..cols {
                    r.swap(step * cols + j, pi * cols + j);
                }
            }
            if pj != step {
                for i in 0..rows {
                    r.swap(i * cols + step, i * cols + pj);
                }
                perm.swap(step, pj);
            }
            // Normalize the pivot row, then clear the pivot column everywhere
            // else (full reduced form, so back-substitution is a read-off).
            let piv = at(&r, step, step);
            for j in step..cols {
                r[step * cols + j] /= piv;
            }
            for i in 0..rows {
                if i == step {
                    continue;
                }
                let factor = at(&r, i, step);
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in step..cols {
                    let v = at(&r, step, j);
                    r[i * cols + j] -= factor * v;
                }
            }
            rank += 1;
        }

        // One basis vector per free (permuted) column q: x_q = 1 and the
        // pivot coordinates read off the reduced rows.
        let mut basis = Vec::with_capacity(cols - rank);
        for q in rank..cols {
            let mut v = vec![Complex64::new(0.0, 0.0); cols];
            v[perm[q]] = Complex64::new(1.0, 0.0);
            for p in 0..rank {
                v[perm[p]] = -at(&r, p, q);
            }
            basis.push(v);
        }
        (rank, basis)
    }

    /// Max modulus of M v, for null-vector residual audits.
    pub fn apply_max_abs(&self, v: &[Complex64]) -> f64 {
        assert_eq!(v.len(), self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}
