//! Real symmetric density matrices.
//!
//! A [`DensityMatrix`] is a symmetric positive semi-definite matrix of trace
//! one. Documents and queries of both retrieval families end up here:
//! language models as diagonal densities, VSM vectors as rank-one (pure)
//! densities, and tomography estimates as general dense densities.
//!
//! The representation remembers which of those three shapes it was built
//! from, so measures and divergences can run in `O(n)` or `O(nnz)` without
//! ever materializing an `n × n` matrix for the structured cases.

mod bloch;
mod eigen;
mod matrix;
mod vector;

use std::sync::OnceLock;

pub use bloch::{diagonal_sweep, pure_positive_sweep, BlochPoint};
pub use eigen::EigenDecomposition;
pub use matrix::{SymmetricMatrix, SYMMETRY_TOL};
pub use vector::{UnitVector, ZERO_NORM};

use crate::error::{Error, Result};

/// Eigenvalues down to `-PSD_TOL` are accepted (and clamped to zero).
pub const PSD_TOL: f64 = 1e-10;
/// Accepted deviation of the input trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues and probabilities at or below this are outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// A density is classified pure when its purity is at least `1 − PURITY_TOL`.
pub const PURITY_TOL: f64 = 1e-9;

/// Which fast paths a density supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// `diag(θ)`, a classical distribution over the standard basis.
    Diagonal,
    /// `|v⟩⟨v|` for a sparse unit vector `v`.
    Pure,
    /// Anything else, stored densely.
    Dense,
}

#[derive(Debug, Clone)]
enum Repr {
    Diagonal(Vec<f64>),
    Pure(UnitVector),
    Dense(SymmetricMatrix),
}

/// A validated density matrix. Immutable; the eigendecomposition is computed
/// at most once and cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    repr: Repr,
    eigen: OnceLock<EigenDecomposition>,
}

/// Support-restricted matrix logarithm.
#[derive(Debug, Clone)]
pub struct SupportLog {
    /// `Σ_{λ_k > SUPPORT_TOL} ln λ_k r_k r_kᵀ`.
    pub log: SymmetricMatrix,
    /// Orthogonal projector onto the support.
    pub support: SymmetricMatrix,
    /// Number of eigenvalues above `SUPPORT_TOL`.
    pub rank: usize,
}

impl DensityMatrix {
    /// Validates `m` as a density: trace within [`TRACE_TOL`] of one and all
    /// eigenvalues at least `-PSD_TOL`. Slightly negative eigenvalues are
    /// clamped to zero and the trace renormalized to one.
    pub fn new(m: SymmetricMatrix) -> Result<Self> {
        let trace = m.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace(trace));
        }
        let mut eig = m.eigen()?;
        let min = eig.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        let clamped = min < 0.0;
        for l in eig.values_mut() {
            *l = l.max(0.0);
        }
        let total: f64 = eig.eigenvalues().iter().sum();
        for l in eig.values_mut() {
            *l /= total;
        }
        let matrix = if clamped {
            eig.reconstruct()
        } else {
            m.scaled(1.0 / trace)
        };
        let eigen = OnceLock::new();
        let _ = eigen.set(eig);
        Ok(Self {
            repr: Repr::Dense(matrix),
            eigen,
        })
    }

    /// Wraps a matrix that is PSD by construction (e.g. a congruence `A ρ A`),
    /// normalizing its trace. Full validation runs in debug builds only.
    pub(crate) fn from_psd_unchecked(m: SymmetricMatrix) -> Self {
        let trace = m.trace();
        let m = m.scaled(1.0 / trace);
        if cfg!(debug_assertions) {
            if let Err(e) = Self::new(m.clone()) {
                panic!("iterate is not a valid density: {e}");
            }
        }
        Self {
            repr: Repr::Dense(m),
            eigen: OnceLock::new(),
        }
    }

    /// Pure state `|v⟩⟨v|`.
    pub fn pure(v: UnitVector) -> Self {
        Self {
            repr: Repr::Pure(v),
            eigen: OnceLock::new(),
        }
    }

    /// Pure state from a dense vector, renormalized to unit length.
    pub fn pure_state(v: &[f64]) -> Result<Self> {
        Ok(Self::pure(UnitVector::from_dense(v)?))
    }

    /// `diag(θ)` for a probability vector θ. The diagonal is stored as given,
    /// so `diagonal()` returns θ bit-for-bit.
    pub fn diagonal_density(theta: &[f64]) -> Result<Self> {
        check_distribution(theta)?;
        Ok(Self {
            repr: Repr::Diagonal(theta.to_vec()),
            eigen: OnceLock::new(),
        })
    }

    /// The maximally mixed state `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Self::diagonal_density(&vec![1.0 / dim as f64; dim])
    }

    /// Copy stored densely, with no structural fast paths. Intended for
    /// checking fast paths against the general ones.
    pub fn to_dense(&self) -> Self {
        Self {
            repr: Repr::Dense(self.to_matrix()),
            eigen: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(t) => t.len(),
            Repr::Pure(v) => v.dim(),
            Repr::Dense(m) => m.dim(),
        }
    }

    pub fn structure(&self) -> Structure {
        match self.repr {
            Repr::Diagonal(_) => Structure::Diagonal,
            Repr::Pure(_) => Structure::Pure,
            Repr::Dense(_) => Structure::Dense,
        }
    }

    /// Diagonal weights when stored as `diag(θ)`.
    pub fn as_diagonal(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Diagonal(t) => Some(t),
            _ => None,
        }
    }

    /// Underlying vector when stored as a pure state.
    pub fn as_pure(&self) -> Option<&UnitVector> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            _ => None,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Diagonal(t) => {
                if i == j {
                    t[i]
                } else {
                    0.0
                }
            }
            Repr::Pure(v) => v.get(i) * v.get(j),
            Repr::Dense(m) => m.get(i, j),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Diagonal(t) => t.clone(),
            Repr::Pure(v) => {
                let mut d = vec![0.0; v.dim()];
                for &(i, x) in v.entries() {
                    d[i] = x * x;
                }
                d
            }
            Repr::Dense(m) => m.diagonal(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Materializes the full `n × n` matrix.
    pub fn to_matrix(&self) -> SymmetricMatrix {
        match &self.repr {
            Repr::Diagonal(t) => SymmetricMatrix::from_diagonal(t),
            Repr::Pure(v) => SymmetricMatrix::outer(v),
            Repr::Dense(m) => m.clone(),
        }
    }

    /// The eigendecomposition, computed once and cached. Eigenvalues are
    /// clamped to be nonnegative.
    pub fn eigen(&self) -> Result<&EigenDecomposition> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let e = match &self.repr {
            Repr::Diagonal(t) => {
                let n = t.len();
                let pairs = t
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| {
                        let mut v = vec![0.0; n];
                        v[i] = 1.0;
                        (l, v)
                    })
                    .collect();
                EigenDecomposition::from_pairs(n, pairs)
            }
            _ => {
                let mut e = self.to_matrix().eigen()?;
                for l in e.values_mut() {
                    *l = l.max(0.0);
                }
                e
            }
        };
        Ok(self.eigen.get_or_init(|| e))
    }

    /// `⟨u|ρ|u⟩`, the probability the density assigns to the dyad `|u⟩⟨u|`.
    pub fn expectation(&self, u: &UnitVector) -> Result<f64> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), u.dim()));
        }
        Ok(match &self.repr {
            Repr::Diagonal(t) => u.entries().iter().map(|&(i, x)| x * x * t[i]).sum(),
            Repr::Pure(v) => {
                let d = vector::sparse_dot(v.entries(), u.entries());
                d * d
            }
            Repr::Dense(m) => m.quadratic_form(u)?,
        })
    }

    /// `tr(ρ²)`, in `[1/dim, 1]`.
    pub fn purity(&self) -> f64 {
        match &self.repr {
            Repr::Diagonal(t) => t.iter().map(|x| x * x).sum(),
            Repr::Pure(v) => {
                let n2: f64 = v.entries().iter().map(|(_, x)| x * x).sum();
                n2 * n2
            }
            Repr::Dense(m) => m.as_slice().iter().map(|x| x * x).sum(),
        }
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - PURITY_TOL
    }

    /// Support-restricted logarithm; eigenvalues at or below [`SUPPORT_TOL`]
    /// are left out of the sum.
    pub fn matrix_log(&self) -> Result<SupportLog> {
        match &self.repr {
            Repr::Diagonal(t) => {
                let log: Vec<f64> = t
                    .iter()
                    .map(|&x| if x > SUPPORT_TOL { x.ln() } else { 0.0 })
                    .collect();
                let support: Vec<f64> = t
                    .iter()
                    .map(|&x| if x > SUPPORT_TOL { 1.0 } else { 0.0 })
                    .collect();
                Ok(SupportLog {
                    log: SymmetricMatrix::from_diagonal(&log),
                    rank: support.iter().filter(|&&s| s > 0.0).count(),
                    support: SymmetricMatrix::from_diagonal(&support),
                })
            }
            Repr::Pure(v) => Ok(SupportLog {
                log: SymmetricMatrix::zeros(v.dim()),
                support: SymmetricMatrix::outer(v),
                rank: 1,
            }),
            Repr::Dense(_) => {
                let e = self.eigen()?;
                let in_support = |l: f64| l > SUPPORT_TOL;
                Ok(SupportLog {
                    log: e.map_spectrum(f64::ln, in_support),
                    support: e.map_spectrum(|_| 1.0, in_support),
                    rank: e.eigenvalues().iter().filter(|&&l| in_support(l)).count(),
                })
            }
        }
    }

    /// PSD square root. A pure state is its own square root. Eigenvalues at
    /// or below [`SUPPORT_TOL`] are treated as zero so solver noise does not
    /// turn into `√ε`-sized entries.
    pub fn matrix_sqrt(&self) -> Result<SymmetricMatrix> {
        match &self.repr {
            Repr::Diagonal(t) => Ok(SymmetricMatrix::from_diagonal(
                &t.iter().map(|x| x.sqrt()).collect::<Vec<_>>(),
            )),
            Repr::Pure(v) => Ok(SymmetricMatrix::outer(v)),
            Repr::Dense(_) => Ok(self.eigen()?.map_spectrum(f64::sqrt, |l| l > SUPPORT_TOL)),
        }
    }

    /// Bloch coordinates of a 2×2 density.
    pub fn bloch_coordinates(&self) -> Result<BlochPoint> {
        BlochPoint::from_density(self)
    }
}

/// Checks `θ_i ≥ 0` and `Σθ_i = 1 ± TRACE_TOL`.
pub(crate) fn check_distribution(theta: &[f64]) -> Result<()> {
    if theta.is_empty() {
        return Err(Error::NotDistribution("empty vector".into()));
    }
    if let Some(index) = theta.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if let Some(i) = theta.iter().position(|&x| x < 0.0) {
        return Err(Error::NotDistribution(format!(
            "negative entry {} at index {i}",
            theta[i]
        )));
    }
    let sum: f64 = theta.iter().sum();
    if (sum - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}
