use nalgebra::DMatrix;

use crate::densmat::{DensityMatrix, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::quantumprob::{measure, sequence_log_likelihood, EventSequence, ProjectorEvent};
use crate::textrep::{LanguageModelParams, TermVector};

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// `⟨q|d⟩` for two normalized nonnegative term vectors.
pub fn cosine(q: &TermVector, d: &TermVector) -> Result<f64> {
    check_dims(q.dim(), d.dim())?;
    let q = q.unit()?;
    let d = d.unit()?;
    q.dot(&d)
}

/// `μ_{ρ_d}(|q⟩⟨q|)`, the squared cosine when `ρ_d = |d⟩⟨d|`.
pub fn vsm_quantum_likelihood(rho_d: &DensityMatrix, q: &TermVector) -> Result<f64> {
    check_dims(rho_d.dim(), q.dim())?;
    if !rho_d.is_pure() {
        return Err(Error::NotPure(rho_d.purity()));
    }
    measure(rho_d, &ProjectorEvent::new(q.unit()?))
}

/// Uhlmann fidelity `tr √(√ρ_q ρ_d √ρ_q)`.
///
/// Pure and diagonal inputs take closed forms: `|⟨q|d⟩|` for two pure
/// states, `√⟨q|ρ|q⟩` when one side is pure, and `Σ √(θ_q θ_d)` for two
/// diagonals. Everything else goes through [`fidelity_general`].
pub fn fidelity(rho_q: &DensityMatrix, rho_d: &DensityMatrix) -> Result<f64> {
    check_dims(rho_q.dim(), rho_d.dim())?;
    if let (Some(q), Some(d)) = (rho_q.as_pure(), rho_d.as_pure()) {
        return Ok(q.dot(d)?.abs());
    }
    if let Some(q) = rho_q.as_pure() {
        return Ok(rho_d.expectation(q)?.max(0.0).sqrt());
    }
    if let Some(d) = rho_d.as_pure() {
        return Ok(rho_q.expectation(d)?.max(0.0).sqrt());
    }
    if let (Some(tq), Some(td)) = (rho_q.as_diagonal(), rho_d.as_diagonal()) {
        return Ok(tq.iter().zip(td).map(|(a, b)| (a * b).sqrt()).sum());
    }
    fidelity_general(rho_q, rho_d)
}

/// Dense fidelity for arbitrary densities.
///
/// Uses `tr √(√ρ_q ρ_d √ρ_q) = ‖√ρ_q √ρ_d‖_*`: the eigenvalues of the inner
/// matrix are the squared singular values of `√ρ_q √ρ_d`, and summing the
/// singular values directly avoids taking square roots of rounding noise.
pub fn fidelity_general(rho_q: &DensityMatrix, rho_d: &DensityMatrix) -> Result<f64> {
    check_dims(rho_q.dim(), rho_d.dim())?;
    let n = rho_q.dim();
    let sq = rho_q.matrix_sqrt()?;
    let sd = rho_d.matrix_sqrt()?;
    let mut prod = vec![0.0; n * n];
    for i in 0..n {
        for (k, &a) in sq.row(i).iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (p, &b) in prod[i * n..(i + 1) * n].iter_mut().zip(sd.row(k)) {
                *p += a * b;
            }
        }
    }
    let m = DMatrix::from_row_slice(n, n, &prod);
    let svd = nalgebra::SVD::try_new(m, false, false, f64::EPSILON, 1000 + 100 * n)
        .ok_or(Error::ConvergenceFailure)?;
    Ok(svd.singular_values.iter().sum())
}

/// Classical query likelihood `Σ_i ln θ_{q_i}` over term indices.
/// Probabilities at or below [`SUPPORT_TOL`] give `-∞`, matching
/// [`ql_quantum`].
pub fn ql_classical(query_terms: &[usize], theta_d: &LanguageModelParams) -> Result<f64> {
    if query_terms.is_empty() {
        return Err(Error::NoKnownTerms);
    }
    let mut ll = 0.0;
    for &t in query_terms {
        if t >= theta_d.dim() {
            return Err(Error::IndexOutOfRange {
                index: t,
                dim: theta_d.dim(),
            });
        }
        let p = theta_d.prob(t);
        if p <= SUPPORT_TOL {
            return Ok(f64::NEG_INFINITY);
        }
        ll += p.ln();
    }
    Ok(ll)
}

/// Quantum query likelihood: log of `Π μ_ρ(P_i)` over the event sequence.
pub fn ql_quantum(seq: &EventSequence, rho_d: &DensityMatrix) -> Result<f64> {
    sequence_log_likelihood(rho_d, seq)
}

/// `KL(θ_q ‖ θ_d) = Σ θ_q ln(θ_q / θ_d)`, nonnegative; `+∞` when θ_q puts
/// mass where θ_d has none.
pub fn kl_divergence(theta_q: &LanguageModelParams, theta_d: &LanguageModelParams) -> Result<f64> {
    kl_raw(theta_q.theta(), theta_d.theta())
}

fn kl_raw(q: &[f64], d: &[f64]) -> Result<f64> {
    check_dims(q.len(), d.len())?;
    let mut kl = 0.0;
    for (&a, &b) in q.iter().zip(d) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        kl += a * (a / b).ln();
    }
    Ok(kl)
}

/// Von Neumann divergence `tr(ρ_q (ln ρ_q − ln ρ_d))`.
///
/// Two diagonal densities reduce to [`kl_divergence`] on their diagonals;
/// pure and pure-vs-diagonal pairs have closed forms. `+∞` whenever the
/// support of `ρ_q` is not contained in that of `ρ_d`.
pub fn vn_divergence(rho_q: &DensityMatrix, rho_d: &DensityMatrix) -> Result<f64> {
    check_dims(rho_q.dim(), rho_d.dim())?;
    if let (Some(tq), Some(td)) = (rho_q.as_diagonal(), rho_d.as_diagonal()) {
        return kl_raw(tq, td);
    }
    if let Some(q) = rho_q.as_pure() {
        if let Some(d) = rho_d.as_pure() {
            let overlap = q.dot(d)?.powi(2);
            return Ok(if 1.0 - overlap > SUPPORT_TOL { f64::INFINITY } else { 0.0 });
        }
        if let Some(td) = rho_d.as_diagonal() {
            let mut cross = 0.0;
            for &(j, x) in q.entries() {
                let w = x * x;
                if td[j] > SUPPORT_TOL {
                    cross += w * td[j].ln();
                } else if w > SUPPORT_TOL {
                    return Ok(f64::INFINITY);
                }
            }
            return Ok(-cross);
        }
    }
    vn_divergence_general(rho_q, rho_d)
}

/// Eigenbasis double sum
/// `Σ_i λ_i ln λ_i − Σ_{i,j} λ_i ln ζ_j |⟨r_i|s_j⟩|²`, with no structural
/// shortcuts.
pub fn vn_divergence_general(rho_q: &DensityMatrix, rho_d: &DensityMatrix) -> Result<f64> {
    check_dims(rho_q.dim(), rho_d.dim())?;
    let eq = rho_q.eigen()?;
    let ed = rho_d.eigen()?;
    let mut entropy_term = 0.0;
    let mut cross = 0.0;
    for (&l, r) in eq.eigenvalues().iter().zip(eq.eigenvectors()) {
        if l <= SUPPORT_TOL {
            continue;
        }
        entropy_term += l * l.ln();
        for (&z, s) in ed.eigenvalues().iter().zip(ed.eigenvectors()) {
            let o: f64 = r.iter().zip(s).map(|(a, b)| a * b).sum::<f64>().powi(2);
            if z > SUPPORT_TOL {
                cross += l * z.ln() * o;
            } else if o > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(entropy_term - cross)
}
