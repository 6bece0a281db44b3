use crate::densmat::eigen::{self, EigenDecomposition};
use crate::densmat::vector::UnitVector;
use crate::error::{Error, Result};

/// Largest asymmetry accepted from callers before rejecting a matrix.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Dense real symmetric matrix, stored row-major.
///
/// Construction symmetrizes the input by averaging mirrored entries, so
/// `get(i, j) == get(j, i)` holds bit-for-bit afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds a matrix from rows, rejecting ragged, non-finite or visibly
    /// asymmetric input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    dim,
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(dim, data)
    }

    /// Same checks as [`SymmetricMatrix::from_rows`] over a flat row-major buffer.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let scale = data.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut asym = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                asym = asym.max((data[i * dim + j] - data[j * dim + i]).abs());
            }
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self::symmetrized(dim, data))
    }

    /// Symmetrizes without validation. Used for products that are symmetric in
    /// exact arithmetic.
    pub(crate) fn symmetrized(dim: usize, mut data: Vec<f64>) -> Self {
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (data[i * dim + j] + data[j * dim + i]);
                data[i * dim + j] = avg;
                data[j * dim + i] = avg;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * dim + i] = d;
        }
        m
    }

    /// The dyad `v vᵀ`.
    pub fn outer(v: &UnitVector) -> Self {
        let mut m = Self::zeros(v.dim());
        m.add_outer(v, 1.0);
        m
    }

    /// `self += weight · v vᵀ`, touching only the nonzero block of `v`.
    pub fn add_outer(&mut self, v: &UnitVector, weight: f64) {
        let dim = self.dim;
        for &(i, vi) in v.entries() {
            for &(j, vj) in v.entries() {
                self.data[i * dim + j] += weight * vi * vj;
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Max-norm distance `max_ij |a_ij − b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `Σ_ij a_ij b_ij`, which equals `tr(A B)` for symmetric operands.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// `⟨v|A|v⟩` over the nonzero entries of `v`.
    pub fn quadratic_form(&self, v: &UnitVector) -> Result<f64> {
        self.check_dim(v.dim())?;
        let mut acc = 0.0;
        for &(i, vi) in v.entries() {
            let row = self.row(i);
            let mut inner = 0.0;
            for &(j, vj) in v.entries() {
                inner += row[j] * vj;
            }
            acc += vi * inner;
        }
        Ok(acc)
    }

    /// `A · B` as a plain row-major buffer (not symmetric in general).
    pub(crate) fn product(&self, other: &Self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let a_row = self.row(i);
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `A M A` for symmetric `A = self` and `M`, symmetrized.
    pub fn sandwich(&self, middle: &Self) -> Result<Self> {
        self.check_dim(middle.dim)?;
        let am = self.product(middle);
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = am[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(self.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::symmetrized(n, out))
    }

    /// Eigendecomposition of an arbitrary symmetric matrix. Eigenvalues may be
    /// negative here; densities clamp on top of this.
    pub fn eigen(&self) -> Result<EigenDecomposition> {
        eigen::decompose(self)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch(self.dim, other));
        }
        Ok(())
    }
}
