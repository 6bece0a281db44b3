use crate::error::{Error, Result};

/// Norms below this are treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-12;

/// A unit vector in `ℝⁿ`, stored sparsely as sorted `(index, value)` pairs.
///
/// Basis events, superpositions and VSM document vectors are all sparse over
/// a vocabulary-sized space, so nothing here allocates `O(dim)` unless asked.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl UnitVector {
    /// Normalizes the given entries. Duplicate indices are summed and exact
    /// zeros dropped.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        for &(index, value) in &entries {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        let norm = merged.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm < ZERO_NORM {
            return Err(Error::ZeroVector);
        }
        if norm != 1.0 {
            for (_, v) in &mut merged {
                *v /= norm;
            }
        }
        Ok(Self {
            dim,
            entries: merged,
        })
    }

    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), values.iter().copied().enumerate())
    }

    /// Standard basis vector `e_index`.
    pub fn basis(index: usize, dim: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(Self {
            dim,
            entries: vec![(index, 1.0)],
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    /// `Some(i)` when this is exactly `±e_i`.
    pub fn basis_index(&self) -> Option<usize> {
        match self.entries.as_slice() {
            [(i, v)] if v.abs() == 1.0 => Some(*i),
            _ => None,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    /// Sparse inner product, merging the two sorted index lists.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(sparse_dot(&self.entries, &other.entries))
    }
}

/// Dot product of two index-sorted sparse vectors.
pub(crate) fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut acc = 0.0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}
