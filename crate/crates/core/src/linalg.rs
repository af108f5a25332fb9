//! Dense symmetric linear algebra: covariance matrices, Cholesky factors
//! and the triangular solves built on them.
//!
//! Matrices are stored as full row-major buffers. For a [`SymmetricMatrix`]
//! only the lower triangle is authoritative; the factorization works in place
//! on the lower triangle and keeps the strict upper triangle as a pristine copy
//! of the input so that a failed attempt can be retried with jitter without a
//! second allocation.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense symmetric matrix, row-major, symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds the matrix from a function of the lower-triangle indices `(i, j)`, `j <= i`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        check_order(n)?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                data[i * n + j] = f(i, j);
            }
        }
        Self::finish(n, data)
    }

    /// Parallel variant of [`from_fn`](Self::from_fn); rows are filled
    /// independently so the result does not depend on the thread count.
    pub fn par_from_fn(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Result<Self> {
        check_order(n)?;
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate().take(i + 1) {
                *slot = f(i, j);
            }
        });
        Self::finish(n, data)
    }

    /// Builds from nested rows, rejecting asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        check_order(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for j in 0..i {
                if row[j] != rows[j][i] {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    fn finish(n: usize, mut data: Vec<f64>) -> Result<Self> {
        for i in 0..n {
            for j in 0..i {
                let v = data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!("non-finite entry at ({i}, {j})")));
                }
                data[j * n + i] = v;
            }
            if !data[i * n + i].is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite entry at ({i}, {i})")));
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.data[i * self.n + j]
        } else {
            self.data[j * self.n + i]
        }
    }

    pub fn mean_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum::<f64>() / self.n as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `A·x`, reading only the lower triangle.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    /// Factors the matrix in place, consuming it.
    pub fn into_cholesky(self, policy: &JitterSchedule) -> Result<CholeskyFactor> {
        factor_in_place(self.n, self.data, policy)
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Ridge values tried, in order, when a matrix does not factor directly.
/// Each multiplier is scaled by the mean of the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JitterSchedule {
    pub multipliers: Vec<f64>,
}

impl Default for JitterSchedule {
    fn default() -> Self {
        Self { multipliers: vec![1e-12, 1e-10, 1e-8, 1e-6] }
    }
}

impl JitterSchedule {
    /// Direct factorization only.
    pub fn none() -> Self {
        Self { multipliers: Vec::new() }
    }
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = A + jitter·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
    jitter: f64,
}

impl CholeskyFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Absolute ridge added to the diagonal before factoring (0 if none).
    pub fn jitter_applied(&self) -> f64 {
        self.jitter
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.l[i * self.n..i * self.n + i + 1]
    }

    /// Forward substitution `L·x = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_len(b.len())?;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let row = &self.l[i * self.n..i * self.n + i];
            let s = x[i] - dot(row, &x[..i]);
            x[i] = s / self.l[i * self.n + i];
        }
        Ok(x)
    }

    /// Back substitution `Lᵀ·x = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_len(b.len())?;
        let n = self.n;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            x[i] /= self.l[i * n + i];
            let xi = x[i];
            let row = &self.l[i * n..i * n + i];
            for (xk, lk) in x[..i].iter_mut().zip(row) {
                *xk -= lk * xi;
            }
        }
        Ok(x)
    }

    /// `L·x`, rows computed in parallel.
    pub fn mul_lower(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok((0..self.n).into_par_iter().map(|i| dot(self.row(i), &x[..=i])).collect())
    }

    /// `A⁻¹·b` via the two triangular solves.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let y = self.solve_lower(b)?;
        self.solve_upper(&y)
    }

    /// `log |A|` from the diagonal of the factor.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.l[i * self.n + i].ln()).sum::<f64>()
    }

    /// `zᵀ A⁻¹ z`.
    pub fn quadratic_form(&self, z: &[f64]) -> Result<f64> {
        let y = self.solve_lower(z)?;
        Ok(dot(&y, &y))
    }

    /// `L·Lᵀ` as a dense row-major buffer; used for checks.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let k = j + 1;
                let v = dot(&self.l[i * n..i * n + k], &self.l[j * n..j * n + k]);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got });
        }
        Ok(())
    }
}

/// Factors `a` under the given jitter escalation schedule.
pub fn cholesky(a: &SymmetricMatrix, policy: &JitterSchedule) -> Result<CholeskyFactor> {
    factor_in_place(a.n, a.data.clone(), policy)
}

pub fn solve_lower(f: &CholeskyFactor, b: &[f64]) -> Result<Vec<f64>> {
    f.solve_lower(b)
}

pub fn log_det(f: &CholeskyFactor) -> f64 {
    f.log_det()
}

pub fn quadratic_form(f: &CholeskyFactor, z: &[f64]) -> Result<f64> {
    f.quadratic_form(z)
}

fn factor_in_place(n: usize, mut data: Vec<f64>, policy: &JitterSchedule) -> Result<CholeskyFactor> {
    let diag: Vec<f64> = (0..n).map(|i| data[i * n + i]).collect();
    let mean_diag = diag.iter().sum::<f64>() / n as f64;

    let mut attempt = crout_rows(n, &mut data, 0.0);
    let mut jitter = 0.0;
    let mut schedule = policy.multipliers.iter();
    while let Err(pivot) = attempt {
        let Some(mult) = schedule.next() else {
            return Err(Error::NotPositiveDefinite { pivot });
        };
        // restore the lower triangle from the untouched upper copy
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
            data[i * n + i] = diag[i];
        }
        jitter = mult * mean_diag.abs();
        attempt = crout_rows(n, &mut data, jitter);
    }
    for i in 0..n {
        for j in i + 1..n {
            data[i * n + j] = 0.0;
        }
    }
    Ok(CholeskyFactor { n, l: data, jitter })
}

/// Row-by-row Cholesky on the lower triangle. Returns the failing pivot.
fn crout_rows(n: usize, data: &mut [f64], ridge: f64) -> std::result::Result<(), usize> {
    for i in 0..n {
        let (done, rest) = data.split_at_mut(i * n);
        let row_i = &mut rest[..n];
        for j in 0..i {
            let row_j = &done[j * n..j * n + j + 1];
            let s = row_i[j] - dot(&row_i[..j], &row_j[..j]);
            row_i[j] = s / row_j[j];
        }
        let s = row_i[i] + ridge - dot(&row_i[..i], &row_i[..i]);
        if !(s > 0.0) || !s.is_finite() {
            return Err(i);
        }
        row_i[i] = s.sqrt();
    }
    Ok(())
}

/// Dot product with four independent accumulators; the summation order is
/// fixed, so results are reproducible.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
