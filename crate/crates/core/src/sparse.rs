//! Minimal sparse/banded linear algebra used by the solvers.
//!
//! Everything here is deliberately small: a real CSR matrix for the
//! regulariser and stiffness assembly, a complex banded LU with partial
//! pivoting for the Helmholtz system, and real Cholesky factorisations
//! (dense and banded) for the preconditioners.

use crate::error::{FwiError, Result};
use num_complex::Complex64;

/// Compressed sparse row matrix with real entries.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Assemble from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            by_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut by_row {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for &(c, v) in row.iter() {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[idx] * x[self.col_idx[idx]];
            }
            y[r] = acc;
        }
        y
    }

    /// y = A x for complex x (A real).
    pub fn mul_vec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = vec![Complex64::ZERO; self.nrows];
        for r in 0..self.nrows {
            let mut acc = Complex64::ZERO;
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[idx] * x[self.col_idx[idx]];
            }
            y[r] = acc;
        }
        y
    }

    /// y = A^T x
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for r in 0..self.nrows {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.col_idx[idx]] += self.values[idx] * x[r];
            }
        }
        y
    }

    /// C = A^T A, assembled densely per row pair of A. Only suitable for
    /// matrices with few entries per row (difference operators).
    pub fn transpose_times_self(&self) -> CsrMatrix {
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            let lo = self.row_ptr[r];
            let hi = self.row_ptr[r + 1];
            for a in lo..hi {
                for b in lo..hi {
                    triplets.push((
                        self.col_idx[a],
                        self.col_idx[b],
                        self.values[a] * self.values[b],
                    ));
                }
            }
        }
        CsrMatrix::from_triplets(self.ncols, self.ncols, triplets)
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
            if self.col_idx[idx] == c {
                return self.values[idx];
            }
        }
        0.0
    }
}

/// Complex banded matrix in LAPACK-style band storage with room for the
/// fill-in produced by partial pivoting.
///
/// Entry (r, c) with |r - c| <= bw is stored at `data[row_offset(r, c)]`;
/// rows `0..bw` of the storage hold the pivoting fill.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub bw: usize,
    /// (3 bw + 1) x n column-major band storage.
    data: Vec<Complex64>,
    ld: usize,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let ld = 3 * bw + 1;
        BandMatrix {
            n,
            bw,
            data: vec![Complex64::ZERO; ld * n],
            ld,
        }
    }

    #[inline]
    fn offset(&self, r: usize, c: usize) -> usize {
        // storage row bw + bw + r - c within column c
        c * self.ld + (2 * self.bw + r) - c
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        if r.abs_diff(c) > self.bw {
            Complex64::ZERO
        } else {
            self.data[self.offset(r, c)]
        }
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: Complex64) {
        debug_assert!(r.abs_diff(c) <= self.bw, "entry outside band");
        let o = self.offset(r, c);
        self.data[o] += v;
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        let o = self.offset(r, c);
        self.data[o] = v;
    }

    /// y = A x using only the stored band.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::ZERO; self.n];
        for c in 0..self.n {
            let rlo = c.saturating_sub(self.bw);
            let rhi = (c + self.bw).min(self.n - 1);
            let xc = x[c];
            for r in rlo..=rhi {
                y[r] += self.data[self.offset(r, c)] * xc;
            }
        }
        y
    }

    /// LU factorisation with partial pivoting (row interchanges confined to
    /// the band). Consumes the matrix; fill-in goes into the reserved rows.
    pub fn factorize(mut self) -> Result<BandLu> {
        let n = self.n;
        let bw = self.bw;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            // pivot search over rows k..=k+bw
            let rmax = (k + bw).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.offset(k, k)].norm_sqr();
            for r in (k + 1)..=rmax {
                let cand = self.data[self.offset(r, k)].norm_sqr();
                if cand > best {
                    best = cand;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(FwiError::SingularFactorization { row: k });
            }
            pivots[k] = p;
            let chi = (k + 2 * bw).min(n - 1);
            if p != k {
                for c in k..=chi {
                    let ok = self.offset(k, c);
                    let op = self.offset(p, c);
                    self.data.swap(ok, op);
                }
            }
            let inv_piv = Complex64::new(1.0, 0.0) / self.data[self.offset(k, k)];
            for r in (k + 1)..=rmax {
                let o_rk = self.offset(r, k);
                let mult = self.data[o_rk] * inv_piv;
                self.data[o_rk] = mult;
                if mult != Complex64::ZERO {
                    for c in (k + 1)..=chi {
                        let o_kc = self.offset(k, c);
                        let o_rc = self.offset(r, c);
                        let ukc = self.data[o_kc];
                        self.data[o_rc] -= mult * ukc;
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            bw,
            data: self.data,
            ld: self.ld,
            pivots,
        })
    }
}

/// Factorised banded system; solves A x = b and conj(A) x = b.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    bw: usize,
    data: Vec<Complex64>,
    ld: usize,
    pivots: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn offset(&self, r: usize, c: usize) -> usize {
        c * self.ld + (2 * self.bw + r) - c
    }

    /// Solve A x = b.
    pub fn solve_complex(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let bw = self.bw;
        let mut x = b.to_vec();
        // forward: apply pivots and L
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let rmax = (k + bw).min(n - 1);
            let xk = x[k];
            if xk != Complex64::ZERO {
                for r in (k + 1)..=rmax {
                    let l = self.data[self.offset(r, k)];
                    x[r] -= l * xk;
                }
            }
        }
        // back substitution with U (bandwidth up to 2 bw)
        for k in (0..n).rev() {
            let chi = (k + 2 * bw).min(n - 1);
            let mut acc = x[k];
            for c in (k + 1)..=chi {
                acc -= self.data[self.offset(k, c)] * x[c];
            }
            x[k] = acc / self.data[self.offset(k, k)];
        }
        x
    }

    /// Solve conj(A) x = b via conj(A) x = b  <=>  A conj(x) = conj(b).
    pub fn solve_conjugate(&self, b: &[Complex64]) -> Vec<Complex64> {
        let conj_b: Vec<Complex64> = b.iter().map(|v| v.conj()).collect();
        let y = self.solve_complex(&conj_b);
        y.into_iter().map(|v| v.conj()).collect()
    }
}

/// Dense symmetric positive definite Cholesky (lower triangular, row major).
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    n: usize,
    l: Vec<f64>,
}

impl DenseCholesky {
    /// Factor a dense symmetric matrix given in row-major order.
    pub fn new(n: usize, a: &[f64]) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(FwiError::SingularFactorization { row: i });
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(DenseCholesky { n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut acc = x[i];
            for k in 0..i {
                acc -= self.l[i * n + k] * x[k];
            }
            x[i] = acc / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in (i + 1)..n {
                acc -= self.l[k * n + i] * x[k];
            }
            x[i] = acc / self.l[i * n + i];
        }
        x
    }
}

/// Banded symmetric positive definite Cholesky for real matrices.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    /// l[(bw + 1) * c + (r - c)] holds L(r, c) for r in c..=c+bw.
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factor a symmetric banded matrix given via CSR (only entries within
    /// the band are read).
    pub fn from_csr(a: &CsrMatrix, bw: usize) -> Result<Self> {
        let n = a.nrows;
        let ld = bw + 1;
        let mut band = vec![0.0; ld * n];
        for r in 0..n {
            for idx in a.row_ptr[r]..a.row_ptr[r + 1] {
                let c = a.col_idx[idx];
                if r >= c {
                    assert!(r - c <= bw, "matrix bandwidth exceeds {bw}");
                    band[ld * c + (r - c)] = a.values[idx];
                }
            }
        }
        // in-place banded Cholesky
        for j in 0..n {
            let mut diag = band[ld * j];
            let klo = j.saturating_sub(bw);
            for k in klo..j {
                let ljk = band[ld * k + (j - k)];
                diag -= ljk * ljk;
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(FwiError::SingularFactorization { row: j });
            }
            let dsqrt = diag.sqrt();
            band[ld * j] = dsqrt;
            let imax = (j + bw).min(n - 1);
            for i in (j + 1)..=imax {
                let mut sum = band[ld * j + (i - j)];
                let klo = i.saturating_sub(bw).max(j.saturating_sub(bw));
                for k in klo..j {
                    if i - k <= bw {
                        sum -= band[ld * k + (i - k)] * band[ld * k + (j - k)];
                    }
                }
                band[ld * j + (i - j)] = sum / dsqrt;
            }
        }
        Ok(BandCholesky { n, bw, l: band })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bw = self.bw;
        let ld = bw + 1;
        let mut x = b.to_vec();
        for i in 0..n {
            let klo = i.saturating_sub(bw);
            let mut acc = x[i];
            for k in klo..i {
                acc -= self.l[ld * k + (i - k)] * x[k];
            }
            x[i] = acc / self.l[ld * i];
        }
        for i in (0..n).rev() {
            let kmax = (i + bw).min(n - 1);
            let mut acc = x[i];
            for k in (i + 1)..=kmax {
                acc -= self.l[ld * i + (k - i)] * x[k];
            }
            x[i] = acc / self.l[ld * i];
        }
        x
    }
}
