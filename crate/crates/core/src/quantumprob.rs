//! Quantum events and the Gleason mapping `μ_ρ(|u⟩⟨u|) = ⟨u|ρ|u⟩`.
//!
//! Events are dyads over unit vectors. Over an orthonormal basis the
//! measure behaves like a classical distribution; over arbitrary event sets
//! it does not, and [`sequence_log_likelihood`] makes no attempt to hide that.

use crate::densmat::{DensityMatrix, SymmetricMatrix, UnitVector, PSD_TOL, SUPPORT_TOL};
use crate::error::{Error, Result};

/// Completeness tolerance for POVMs (`‖Σ M_i − I‖_max`).
pub const POVM_TOL: f64 = 1e-8;

/// The dyad `|u⟩⟨u|`, optionally labelled with a term or concept name.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorEvent {
    pub vector: UnitVector,
    pub label: Option<String>,
}

impl ProjectorEvent {
    pub fn new(vector: UnitVector) -> Self {
        Self {
            vector,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    /// Dense projector matrix. Only for inspection; measures never need it.
    pub fn projector(&self) -> SymmetricMatrix {
        SymmetricMatrix::outer(&self.vector)
    }

    pub fn display_label(&self) -> String {
        match (&self.label, self.vector.basis_index()) {
            (Some(l), _) => l.clone(),
            (None, Some(i)) => format!("e{i}"),
            (None, None) => "superposition".to_string(),
        }
    }
}

/// Dyad on `e_index`.
pub fn standard_basis_event(index: usize, dim: usize) -> Result<ProjectorEvent> {
    Ok(ProjectorEvent::new(UnitVector::basis(index, dim)?))
}

/// Dyad on the normalized superposition `Σ f(w) e_w`. Weights must be
/// nonnegative; repeated indices accumulate.
pub fn superpose(dim: usize, components: &[(usize, f64)]) -> Result<ProjectorEvent> {
    for &(index, weight) in components {
        if weight < 0.0 {
            return Err(Error::NegativeWeight { index, weight });
        }
    }
    match UnitVector::new(dim, components.iter().copied()) {
        Ok(v) => Ok(ProjectorEvent::new(v)),
        Err(Error::ZeroVector) => Err(Error::AllZeroWeights),
        Err(e) => Err(e),
    }
}

/// `tr(ρ |u⟩⟨u|) = ⟨u|ρ|u⟩`.
pub fn measure(rho: &DensityMatrix, event: &ProjectorEvent) -> Result<f64> {
    rho.expectation(&event.vector)
}

/// Ordered i.i.d. observations of projector events, all in one dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventSequence {
    events: Vec<ProjectorEvent>,
}

impl EventSequence {
    pub fn new(events: Vec<ProjectorEvent>) -> Result<Self> {
        if let Some(first) = events.first() {
            let dim = first.dim();
            if let Some(bad) = events.iter().find(|e| e.dim() != dim) {
                return Err(Error::DimensionMismatch(dim, bad.dim()));
            }
        }
        Ok(Self { events })
    }

    /// Basis events for a list of term indices, e.g. a tokenized query.
    pub fn from_basis_indices(indices: &[usize], dim: usize) -> Result<Self> {
        let events = indices
            .iter()
            .map(|&i| standard_basis_event(i, dim))
            .collect::<Result<_>>()?;
        Self::new(events)
    }

    pub fn events(&self) -> &[ProjectorEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.events.first().map(ProjectorEvent::dim)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProjectorEvent> {
        self.events.iter()
    }
}

impl<'a> IntoIterator for &'a EventSequence {
    type Item = &'a ProjectorEvent;
    type IntoIter = std::slice::Iter<'a, ProjectorEvent>;

    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

/// `Σ_i ln μ_ρ(P_i)`, or `-∞` as soon as one event has measure at or below
/// [`SUPPORT_TOL`]. Exponentiating gives the naive product likelihood.
pub fn sequence_log_likelihood(rho: &DensityMatrix, seq: &EventSequence) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut ll = 0.0;
    for event in seq {
        let p = measure(rho, event)?;
        if p <= SUPPORT_TOL {
            return Ok(f64::NEG_INFINITY);
        }
        ll += p.ln();
    }
    Ok(ll)
}

/// Positive operators that should sum to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    pub operators: Vec<SymmetricMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmDiagnostics {
    /// `max(0, −min eigenvalue)` over all operators.
    pub psd_defect: f64,
    /// `‖Σ M_i − I‖_max`.
    pub completeness_defect: f64,
    pub passed: bool,
}

/// Checks positivity of every operator and completeness of their sum.
pub fn validate_povm(povm: &Povm) -> Result<PovmDiagnostics> {
    let first = povm.operators.first().ok_or(Error::EmptyMatrix)?;
    let dim = first.dim();
    let mut sum = vec![0.0; dim * dim];
    let mut psd_defect = 0.0f64;
    for op in &povm.operators {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch(dim, op.dim()));
        }
        let min = op.eigen()?.eigenvalues().last().copied().unwrap_or(0.0);
        psd_defect = psd_defect.max(-min);
        for (s, x) in sum.iter_mut().zip(op.as_slice()) {
            *s += x;
        }
    }
    let completeness_defect = SymmetricMatrix::symmetrized(dim, sum)
        .max_abs_diff(&SymmetricMatrix::identity(dim))?;
    Ok(PovmDiagnostics {
        psd_defect,
        completeness_defect,
        passed: psd_defect <= PSD_TOL && completeness_defect <= POVM_TOL,
    })
}

/// `Σ_i tr(ρ M_i)`.
pub fn povm_total_probability(rho: &DensityMatrix, povm: &Povm) -> Result<f64> {
    let m = rho.to_matrix();
    povm.operators.iter().map(|op| m.trace_product(op)).sum()
}
