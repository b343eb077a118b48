//! Diagonally pivoted Cholesky factorization of Hermitian Gram matrices.

use num_complex::Complex64;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest accepted condition estimate of a Gram matrix.
pub const MAX_CONDITION: f64 = 1e12;

const PARALLEL_THRESHOLD: usize = 192;

/// `P G Pᵀ = L L*` with `L` lower triangular, stored row-major.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    n: usize,
    factor: Vec<Complex64>,
    /// `perm[k]` is the original index of pivot row `k`.
    perm: Vec<usize>,
    condition: f64,
}

impl PivotedCholesky {
    /// Factors a Hermitian positive definite matrix given row-major.
    ///
    /// The condition estimate is `(max Lₖₖ / min Lₖₖ)²`; factorization fails
    /// on a non-positive pivot or when the estimate exceeds [`MAX_CONDITION`].
    pub fn factor(n: usize, gram: &[Complex64]) -> Result<Self> {
        assert_eq!(gram.len(), n * n, "Gram matrix must be n × n");
        let mut a = gram.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let (mut dmax, mut dmin) = (0.0_f64, f64::INFINITY);

        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re))
                .expect("non-empty pivot range");
            if p != k {
                swap_symmetric(&mut a, n, k, p);
                perm.swap(k, p);
            }
            let pivot = a[k * n + k].re;
            if !(pivot > 0.0) {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            let lkk = pivot.sqrt();
            dmax = dmax.max(lkk);
            dmin = dmin.min(lkk);
            a[k * n + k] = Complex64::new(lkk, 0.0);
            let col: Vec<Complex64> = (k + 1..n)
                .map(|i| {
                    let v = a[i * n + k] / lkk;
                    a[i * n + k] = v;
                    v
                })
                .collect();
            // full Hermitian update of the trailing block, row by row
            let update = |(offset, row): (usize, &mut [Complex64])| {
                let lik = col[offset];
                for (x, ljk) in row[k + 1..].iter_mut().zip(&col) {
                    *x -= lik * ljk.conj();
                }
                let d = &mut row[k + 1 + offset];
                *d = Complex64::new(d.re, 0.0);
            };
            let trailing = &mut a[(k + 1) * n..];
            if (n - k) >= PARALLEL_THRESHOLD {
                trailing.par_chunks_mut(n).enumerate().for_each(update);
            } else {
                trailing.chunks_mut(n).enumerate().for_each(update);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                a[i * n + j] = Complex64::new(0.0, 0.0);
            }
        }
        let condition = (dmax / dmin).powi(2);
        if condition > MAX_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        Ok(Self {
            n,
            factor: a,
            perm,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Solves `L y = P b` in place of a fresh vector.
    pub fn forward_solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.factor[i * n..i * n + i];
            let mut s = y[i];
            for (l, yj) in row.iter().zip(&y[..i]) {
                s -= l * yj;
            }
            y[i] = s / self.factor[i * n + i].re;
        }
        y
    }
}

fn swap_symmetric(a: &mut [Complex64], n: usize, k: usize, p: usize) {
    for j in 0..n {
        a.swap(k * n + j, p * n + j);
    }
    for i in 0..n {
        a.swap(i * n + k, i * n + p);
    }
}
