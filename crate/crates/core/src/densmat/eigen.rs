use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::densmat::matrix::SymmetricMatrix;
use crate::error::{Error, Result};

/// Components below this magnitude are skipped when fixing eigenvector signs.
const SIGN_TOL: f64 = 1e-10;

/// `A = Σ λ_k r_k r_kᵀ` with eigenvalues in descending order.
///
/// Eigenvectors are sign-normalized so their first component above `1e-10`
/// in magnitude is positive; equal eigenvalues are ordered by comparing the
/// normalized vectors lexicographically (larger first). The result is a
/// deterministic function of the input matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    dim: usize,
    values: Vec<f64>,
    /// Column-major: vector `k` occupies `vectors[k*dim..(k+1)*dim]`.
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    /// Assembles a decomposition from `(eigenvalue, eigenvector)` pairs,
    /// applying the sign and ordering conventions.
    pub(crate) fn from_pairs(dim: usize, mut pairs: Vec<(f64, Vec<f64>)>) -> Self {
        for (_, v) in &mut pairs {
            if let Some(first) = v.iter().find(|x| x.abs() > SIGN_TOL) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        pairs.sort_by(|(la, va), (lb, vb)| {
            lb.total_cmp(la).then_with(|| {
                va.iter()
                    .zip(vb)
                    .map(|(a, b)| b.total_cmp(a))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
        });
        let mut values = Vec::with_capacity(dim);
        let mut vectors = Vec::with_capacity(dim * dim);
        for (l, v) in pairs {
            values.push(l);
            vectors.extend(v);
        }
        Self {
            dim,
            values,
            vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// The `k`-th eigenvector (paired with `eigenvalues()[k]`).
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.dim)
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `Σ_k f(λ_k) r_k r_kᵀ` over the eigenpairs accepted by `keep`.
    pub fn map_spectrum<F, K>(&self, f: F, keep: K) -> SymmetricMatrix
    where
        F: Fn(f64) -> f64,
        K: Fn(f64) -> bool,
    {
        let n = self.dim;
        let mut data = vec![0.0; n * n];
        for (&l, v) in self.values.iter().zip(self.eigenvectors()) {
            if !keep(l) {
                continue;
            }
            let w = f(l);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let wi = w * v[i];
                if wi == 0.0 {
                    continue;
                }
                let row = &mut data[i * n..(i + 1) * n];
                for (r, &vj) in row.iter_mut().zip(v) {
                    *r += wi * vj;
                }
            }
        }
        SymmetricMatrix::symmetrized(n, data)
    }

    /// `Σ λ_k r_k r_kᵀ`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.map_spectrum(|l| l, |_| true)
    }

    /// `‖RᵀR − I‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, va) in self.eigenvectors().enumerate() {
            for (b, vb) in self.eigenvectors().enumerate().skip(a) {
                let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Dense symmetric eigensolver (implicit QR via nalgebra).
pub(crate) fn decompose(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    let dm = DMatrix::from_row_slice(n, n, m.as_slice());
    let budget = 1000 + 100 * n;
    let eig = SymmetricEigen::try_new(dm, f64::EPSILON, budget).ok_or(Error::ConvergenceFailure)?;
    let pairs = (0..n)
        .map(|k| {
            let col = eig.eigenvectors.column(k);
            (eig.eigenvalues[k], col.iter().copied().collect())
        })
        .collect();
    Ok(EigenDecomposition::from_pairs(n, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn mixed_example_spectrum() {
        let rho = SymmetricMatrix::from_rows(&[[0.5, 0.25], [0.25, 0.5]]).unwrap();
        let e = decompose(&rho).unwrap();
        assert!((e.eigenvalues()[0] - 0.75).abs() < 1e-12);
        assert!((e.eigenvalues()[1] - 0.25).abs() < 1e-12);
        let v0 = e.eigenvector(0);
        let v1 = e.eigenvector(1);
        assert!((v0[0] - FRAC_1_SQRT_2).abs() < 1e-12 && (v0[1] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v1[0] - FRAC_1_SQRT_2).abs() < 1e-12 && (v1[1] + FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_orders_by_vector() {
        let e = decompose(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvector(0), &[1.0, 0.0, 0.0]);
        assert_eq!(e.eigenvector(1), &[0.0, 1.0, 0.0]);
        assert_eq!(e.eigenvector(2), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn handles_negative_spectrum() {
        let m = SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = decompose(&m).unwrap();
        assert!((e.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues()[1] + 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&m).unwrap() < 1e-14);
        assert!(e.orthonormality_defect() < 1e-14);
    }
}
