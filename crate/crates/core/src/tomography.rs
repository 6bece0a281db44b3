//! Maximum-likelihood density estimation from observed projector events.
//!
//! Given i.i.d. observations `P_1, …, P_m` the estimator maximizes
//! `Σ_i ln tr(ρ P_i)` over densities with the R·ρ·R fixed-point iteration:
//!
//! ```text
//! R(ρ)   = Σ_i P_i / tr(ρ P_i)
//! R_α    = (1 − α) I + α R(ρ) / m
//! ρ_next = R_α ρ R_α / tr(R_α ρ R_α)
//! ```
//!
//! starting from `I / dim`. With `α = 1` the iteration can oscillate (for
//! commuting events it flips between `θ` and `f² / θ`), so a step that
//! lowers the log-likelihood is rejected and retried with a halved `α`.
//!
//! Compound concepts enter as superposition events built by
//! [`compound_event`], which is what lets the estimate leave the diagonal.

use crate::densmat::{DensityMatrix, SymmetricMatrix, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::quantumprob::{measure, sequence_log_likelihood, superpose, EventSequence, ProjectorEvent};
use crate::textrep::Vocabulary;

/// Largest log-likelihood decrease tolerated before diluting.
pub const MONOTONE_TOL: f64 = 1e-10;
/// Dilution is never reduced below this.
pub const MIN_DILUTION: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub max_iterations: usize,
    /// Stop once `|Δ ln L| ≤ rel_tolerance · max(|ln L|, 1)` ...
    pub rel_tolerance: f64,
    /// ... and the largest entry change of the step is at most this.
    pub step_tolerance: f64,
    /// Initial dilution `α ∈ (0, 1]`; 1 is the plain R·ρ·R step.
    pub dilution: f64,
    /// Largest dimension accepted.
    pub max_dim: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            rel_tolerance: 1e-9,
            step_tolerance: 1e-9,
            dilution: 1.0,
            max_dim: 2000,
        }
    }
}

impl EstimatorConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.dilution > 0.0 && self.dilution <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "dilution must be in (0, 1], got {}",
                self.dilution
            )));
        }
        if !(self.rel_tolerance >= 0.0 && self.step_tolerance >= 0.0) {
            return Err(Error::InvalidConfig("tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

/// One accepted step of the iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub log_likelihood: f64,
    /// Change from the previous iterate; `None` for the starting point.
    pub delta: Option<f64>,
    /// Dilution used for this step.
    pub dilution: f64,
}

#[derive(Debug, Clone)]
pub struct Estimate {
    pub density: DensityMatrix,
    /// Starting point (iteration 0) followed by every accepted step.
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
}

impl Estimate {
    pub fn log_likelihood(&self) -> f64 {
        self.iterations.last().map_or(f64::NEG_INFINITY, |r| r.log_likelihood)
    }

    /// Number of accepted steps, excluding the starting point.
    pub fn steps(&self) -> usize {
        self.iterations.len().saturating_sub(1)
    }
}

/// Labelled events over one term space: single-term concepts plus compound
/// superpositions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptSet {
    events: Vec<ProjectorEvent>,
}

impl ConceptSet {
    pub fn new(events: Vec<ProjectorEvent>) -> Result<Self> {
        EventSequence::new(events.clone())?;
        Ok(Self { events })
    }

    pub fn events(&self) -> &[ProjectorEvent] {
        &self.events
    }

    /// Observation sequence with `counts[k]` copies of concept `k`.
    pub fn sequence(&self, counts: &[usize]) -> Result<EventSequence> {
        if counts.len() != self.events.len() {
            return Err(Error::DimensionMismatch(self.events.len(), counts.len()));
        }
        let events = self
            .events
            .iter()
            .zip(counts)
            .flat_map(|(e, &c)| std::iter::repeat_n(e.clone(), c))
            .collect();
        EventSequence::new(events)
    }
}

/// Compound-concept event `f_a e_a + f_b e_b` (normalized), labelled `a_b`.
pub fn compound_event(
    term_a: &str,
    term_b: &str,
    weights: (f64, f64),
    vocab: &Vocabulary,
) -> Result<ProjectorEvent> {
    let lookup = |t: &str| vocab.index_of(t).ok_or_else(|| Error::UnknownTerm(t.to_string()));
    let a = lookup(term_a)?;
    let b = lookup(term_b)?;
    if a == b {
        return Err(Error::InvalidConfig(format!(
            "compound concept needs two distinct terms, got {term_a:?} twice"
        )));
    }
    Ok(superpose(vocab.len(), &[(a, weights.0), (b, weights.1)])?
        .with_label(format!("{term_a}_{term_b}")))
}

/// `R(ρ) = Σ_i P_i / tr(ρ P_i)`.
pub fn r_operator(rho: &DensityMatrix, seq: &EventSequence) -> Result<SymmetricMatrix> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut r = SymmetricMatrix::zeros(rho.dim());
    for (index, event) in seq.iter().enumerate() {
        let p = measure(rho, event)?;
        if p <= SUPPORT_TOL {
            return Err(Error::ZeroMeasureEvent {
                index,
                label: event.display_label(),
            });
        }
        r.add_outer(&event.vector, 1.0 / p);
    }
    Ok(r)
}

fn diluted_step(rho: &DensityMatrix, seq: &EventSequence, alpha: f64) -> Result<DensityMatrix> {
    let n = rho.dim();
    let m = seq.len() as f64;
    let r = r_operator(rho, seq)?;
    let mut data = r.scaled(alpha / m).as_slice().to_vec();
    for i in 0..n {
        data[i * n + i] += 1.0 - alpha;
    }
    let r_alpha = SymmetricMatrix::symmetrized(n, data);
    let next = r_alpha.sandwich(&rho.to_matrix())?;
    Ok(DensityMatrix::from_psd_unchecked(next))
}

/// `‖normalize(R ρ R) − ρ‖_max`; zero at an (undiluted) fixed point.
pub fn fixed_point_residual(rho: &DensityMatrix, seq: &EventSequence) -> Result<f64> {
    let next = diluted_step(rho, seq, 1.0)?;
    next.to_matrix().max_abs_diff(&rho.to_matrix())
}

/// Runs the R·ρ·R iteration from `I / dim`.
///
/// Non-convergence within `max_iterations` is reported as
/// [`Error::DidNotConverge`] carrying the last accepted iterate.
pub fn rpr_estimate(seq: &EventSequence, dim: usize, config: &EstimatorConfig) -> Result<Estimate> {
    config.validate()?;
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if dim < 2 {
        return Err(Error::InvalidConfig(format!("dimension must be at least 2, got {dim}")));
    }
    if dim > config.max_dim {
        return Err(Error::DimensionTooLarge {
            dim,
            cap: config.max_dim,
        });
    }
    if let Some(d) = seq.dim().filter(|&d| d != dim) {
        return Err(Error::DimensionMismatch(dim, d));
    }

    let mut rho = DensityMatrix::from_psd_unchecked(SymmetricMatrix::identity(dim));
    let mut ll = sequence_log_likelihood(&rho, seq)?;
    let mut alpha = config.dilution;
    let mut iterations = vec![IterationRecord {
        iteration: 0,
        log_likelihood: ll,
        delta: None,
        dilution: alpha,
    }];

    for k in 1..=config.max_iterations {
        let (next, next_ll) = loop {
            let candidate = diluted_step(&rho, seq, alpha)?;
            let cand_ll = sequence_log_likelihood(&candidate, seq)?;
            if cand_ll >= ll - MONOTONE_TOL || alpha <= MIN_DILUTION {
                break (candidate, cand_ll);
            }
            alpha = if alpha >= 1.0 { 0.5 } else { (alpha / 2.0).max(MIN_DILUTION) };
        };
        if next_ll < ll - MONOTONE_TOL {
            // even the smallest dilution cannot improve: numerically at the optimum
            return Ok(Estimate {
                density: rho,
                iterations,
                converged: true,
            });
        }
        let delta = next_ll - ll;
        let step = next.to_matrix().max_abs_diff(&rho.to_matrix())?;
        rho = next;
        ll = next_ll;
        iterations.push(IterationRecord {
            iteration: k,
            log_likelihood: ll,
            delta: Some(delta),
            dilution: alpha,
        });
        if delta.abs() <= config.rel_tolerance * ll.abs().max(1.0) && step <= config.step_tolerance {
            return Ok(Estimate {
                density: rho,
                iterations,
                converged: true,
            });
        }
    }
    Err(Error::DidNotConverge(Box::new(Estimate {
        density: rho,
        iterations,
        converged: false,
    })))
}

/// Diagonal density of empirical frequencies for a basis-event sequence.
pub fn empirical_diagonal_oracle(seq: &EventSequence, dim: usize) -> Result<DensityMatrix> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut counts = vec![0.0; dim];
    for (k, event) in seq.iter().enumerate() {
        if event.dim() != dim {
            return Err(Error::DimensionMismatch(dim, event.dim()));
        }
        let i = event.vector.basis_index().ok_or(Error::NonBasisEvent(k))?;
        counts[i] += 1.0;
    }
    let m = seq.len() as f64;
    let theta: Vec<f64> = counts.iter().map(|c| c / m).collect();
    DensityMatrix::diagonal_density(&theta)
}
