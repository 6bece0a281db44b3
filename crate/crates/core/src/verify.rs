//! Seeded property harness behind `densir verify`.
//!
//! Every property draws its own random instances from a ChaCha stream
//! derived from the seed and the property's position, checks them against
//! an independent computation and reports the largest deviation seen. The
//! report is a pure function of the configuration: the same seed and sizes
//! give byte-identical text regardless of the number of threads.

use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::densmat::{
    diagonal_sweep, pure_positive_sweep, DensityMatrix, SymmetricMatrix, UnitVector,
};
use crate::error::{Error, Result};
use crate::quantumprob::{
    measure, povm_total_probability, sequence_log_likelihood, standard_basis_event, superpose,
    validate_povm, EventSequence, Povm, ProjectorEvent,
};
use crate::scoring::{
    assert_rank_equivalent, cosine, fidelity, fidelity_general, kl_divergence, ql_classical,
    ql_quantum, rank, vn_divergence, vn_divergence_general, DocRepr, QueryRepr, ScoringMethod,
};
use crate::textrep::{
    lm_density, tfidf_vector, vsm_density, Corpus, Document, LanguageModelParams, Smoothing,
    TermVector, Weighting,
};
use crate::tomography::{
    empirical_diagonal_oracle, fixed_point_residual, rpr_estimate, EstimatorConfig, MONOTONE_TOL,
};

/// Random instance generators shared by the harness and the test suites.
pub mod sampling {
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand_distr::{Exp1, StandardNormal};

    use crate::densmat::{DensityMatrix, SymmetricMatrix, UnitVector};
    use crate::error::Result;
    use crate::textrep::TermVector;

    pub fn normal_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
    }

    /// `G Gᵀ / tr` for a Gaussian `dim × rank` matrix `G`.
    pub fn density_of_rank<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityMatrix> {
        let g = normal_matrix(rng, dim, rank);
        let m = &g * g.transpose();
        let tr = m.trace();
        let data: Vec<f64> = (0..dim * dim).map(|k| m[(k / dim, k % dim)] / tr).collect();
        DensityMatrix::new(SymmetricMatrix::from_row_major(dim, data)?)
    }

    /// Dense density of uniformly random rank.
    pub fn density<R: Rng>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
        let rank = rng.random_range(1..=dim);
        density_of_rank(rng, dim, rank)
    }

    /// Haar-like orthonormal basis from the QR factor of a Gaussian matrix.
    pub fn orthonormal_basis<R: Rng>(rng: &mut R, dim: usize) -> Result<Vec<UnitVector>> {
        let q = normal_matrix(rng, dim, dim).qr().q();
        q.column_iter()
            .map(|c| UnitVector::from_dense(c.as_slice()))
            .collect()
    }

    /// Dense Gaussian direction.
    pub fn unit<R: Rng>(rng: &mut R, dim: usize) -> Result<UnitVector> {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        UnitVector::from_dense(&v)
    }

    /// Full-support point of the simplex (normalized exponentials).
    pub fn distribution<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(Exp1).max(1e-6))
            .collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    /// Sparse nonnegative unit term vector with at least one nonzero.
    pub fn nonneg_term_vector<R: Rng>(rng: &mut R, dim: usize, density: f64) -> Result<TermVector> {
        let forced = rng.random_range(0..dim);
        let mut entries = Vec::new();
        for i in 0..dim {
            if i == forced || rng.random_bool(density) {
                entries.push((i, rng.sample::<f64, _>(Exp1) + 0.01));
            }
        }
        TermVector::raw(dim, entries)?.normalize()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Dimensions exercised by the dimension-sweeping properties.
    pub sizes: Vec<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            sizes: vec![2, 5, 20, 50],
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidConfig("sizes must not be empty".into()));
        }
        if let Some(&bad) = self.sizes.iter().find(|&&d| !(2..=500).contains(&d)) {
            return Err(Error::InvalidConfig(format!("size {bad} outside 2..=500")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub samples: usize,
    pub max_dev: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the property could not be evaluated or a witness failed.
    pub failure: Option<String>,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: samples={} max_dev={:.3e} tol={:e} {}",
            self.name,
            self.samples,
            self.max_dev,
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" }
        )?;
        if let Some(msg) = &self.failure {
            write!(f, " ({msg})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.config.sizes.iter().map(|s| s.to_string()).collect();
        writeln!(f, "seed={} sizes={}", self.config.seed, sizes.join(","))?;
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let ok = self.results.iter().filter(|r| r.passed).count();
        writeln!(f, "{ok}/{} properties passed", self.results.len())
    }
}

#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self(e.to_string())
    }
}

type CheckResult = std::result::Result<Tracker, Failure>;
type Check = fn(&mut ChaCha8Rng, &VerifyConfig) -> CheckResult;

#[derive(Debug, Default)]
struct Tracker {
    samples: usize,
    max_dev: f64,
}

impl Tracker {
    fn record(&mut self, dev: f64) {
        self.samples += 1;
        if self.max_dev.is_nan() {
            return;
        }
        if dev.is_nan() || dev > self.max_dev {
            self.max_dev = dev;
        }
    }
}

struct Property {
    name: &'static str,
    tolerance: f64,
    check: Check,
}

const PROPERTIES: &[Property] = &[
    Property { name: "worked_matrices", tolerance: 1e-10, check: worked_matrices },
    Property { name: "density_invariants", tolerance: 1e-9, check: density_invariants },
    Property { name: "eigen_reconstruct", tolerance: 1e-8, check: eigen_reconstruct },
    Property { name: "purity", tolerance: 1e-9, check: purity },
    Property { name: "sqrt_and_log", tolerance: 1e-8, check: sqrt_and_log },
    Property { name: "bloch_bijection", tolerance: 1e-10, check: bloch_bijection },
    Property { name: "bloch_regions", tolerance: 1e-9, check: bloch_regions },
    Property { name: "gleason_normalization", tolerance: 1e-8, check: gleason_normalization },
    Property { name: "povm_reduction", tolerance: 1e-8, check: povm_reduction },
    Property { name: "measure_nonnegative", tolerance: 1e-12, check: measure_nonnegative },
    Property { name: "classical_reduction", tolerance: 1e-12, check: classical_reduction },
    Property { name: "non_orthogonal_witness", tolerance: 1e-9, check: non_orthogonal_witness },
    Property { name: "lm_invariants", tolerance: 1e-9, check: lm_invariants },
    Property { name: "tfidf_unit_norm", tolerance: 1e-9, check: tfidf_unit_norm },
    Property { name: "ql_quantum_equals_classical", tolerance: 1e-12, check: ql_equivalence },
    Property { name: "vn_equals_kl", tolerance: 1e-10, check: vn_kl },
    Property { name: "vn_worked_value", tolerance: 1e-3, check: vn_worked_value },
    Property { name: "cosine_rank_equivalence", tolerance: 0.0, check: cosine_ranks },
    Property { name: "fidelity_equals_cosine", tolerance: 1e-10, check: fidelity_cosine },
    Property { name: "fidelity_general_matches_fast", tolerance: 1e-8, check: fidelity_paths },
    Property { name: "fidelity_symmetry", tolerance: 1e-8, check: fidelity_symmetry },
    Property { name: "vn_self_zero", tolerance: 1e-10, check: vn_self_zero },
    Property { name: "vn_nonnegative", tolerance: 1e-10, check: vn_nonnegative },
    Property { name: "vn_asymmetry", tolerance: 1e-10, check: vn_asymmetry },
    Property { name: "fast_paths_match_general", tolerance: 1e-10, check: fast_paths },
    Property { name: "rpr_classical_consistency", tolerance: 1e-6, check: rpr_classical },
    Property { name: "rpr_pure_dyad", tolerance: 1e-6, check: rpr_pure_dyad },
    Property { name: "rpr_compound_beats_diagonal", tolerance: 1e-9, check: rpr_compound },
    Property { name: "rpr_monotone_likelihood", tolerance: MONOTONE_TOL, check: rpr_monotone },
    Property { name: "rpr_fixed_point", tolerance: 1e-6, check: rpr_fixed_point },
];

/// Names of all properties, in report order.
pub fn property_names() -> impl Iterator<Item = &'static str> {
    PROPERTIES.iter().map(|p| p.name)
}

/// Runs every property. Failures are report content, not errors; only an
/// invalid configuration is an error.
pub fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    config.validate()?;
    let results = PROPERTIES
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k as u64);
            match (p.check)(&mut rng, config) {
                Ok(t) => PropertyResult {
                    name: p.name,
                    samples: t.samples,
                    max_dev: t.max_dev,
                    tolerance: p.tolerance,
                    passed: t.max_dev <= p.tolerance,
                    failure: None,
                },
                Err(Failure(msg)) => PropertyResult {
                    name: p.name,
                    samples: 0,
                    max_dev: f64::NAN,
                    tolerance: p.tolerance,
                    passed: false,
                    failure: Some(msg),
                },
            }
        })
        .collect();
    Ok(VerifyReport {
        config: config.clone(),
        results,
    })
}

fn pick_size(cfg: &VerifyConfig, k: usize) -> usize {
    cfg.sizes[k % cfg.sizes.len()]
}

fn matrix2(rows: [[f64; 2]; 2]) -> Result<SymmetricMatrix> {
    SymmetricMatrix::from_rows(&rows)
}

fn worked_rho() -> Result<DensityMatrix> {
    DensityMatrix::new(matrix2([[0.5, 0.25], [0.25, 0.5]])?)
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn worked_matrices(_: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    let rho_theta = DensityMatrix::new(matrix2([[0.5, 0.0], [0.0, 0.5]])?)?;
    let sigma = DensityMatrix::new(matrix2([[0.5, 0.5], [0.5, 0.5]])?)?;
    let rho = worked_rho()?;
    if !sigma.is_pure() || rho.is_pure() || rho_theta.is_pure() {
        return Err(Failure("purity misclassifies a worked matrix".into()));
    }
    for bad in [[[0.6, 0.0], [0.0, 0.6]], [[0.5, 0.7], [0.7, 0.5]]] {
        if DensityMatrix::new(matrix2(bad)?).is_ok() {
            return Err(Failure(format!("accepted non-density {bad:?}")));
        }
    }
    let e = rho.eigen()?;
    t.record(max_abs(e.eigenvalues(), &[0.75, 0.25]));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    t.record(max_abs(e.eigenvector(0), &[h, h]));
    t.record(max_abs(e.eigenvector(1), &[h, -h]));
    t.record(max_abs(sigma.eigen()?.eigenvalues(), &[1.0, 0.0]));
    t.record(max_abs(rho_theta.eigen()?.eigenvalues(), &[0.5, 0.5]));
    Ok(t)
}

fn density_invariants(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..1000 {
        let dim = pick_size(cfg, k);
        let rho = sampling::density(rng, dim)?;
        let m = rho.to_matrix();
        let mut asym = 0.0f64;
        for i in 0..dim {
            for j in 0..i {
                asym = asym.max((m.get(i, j) - m.get(j, i)).abs());
            }
        }
        let min = rho.eigen()?.eigenvalues().last().copied().unwrap_or(0.0);
        t.record(asym.max(-min).max((m.trace() - 1.0).abs()));
    }
    Ok(t)
}

fn eigen_reconstruct(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    let dims = cfg.sizes.iter().flat_map(|&d| [d; 5]).chain([100, 100, 200]);
    for dim in dims {
        let rho = sampling::density(rng, dim)?;
        let e = rho.eigen()?;
        let recon = e.reconstruct().max_abs_diff(&rho.to_matrix())?;
        t.record(recon.max(e.orthonormality_defect()));
    }
    Ok(t)
}

fn purity(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..100 {
        let dim = pick_size(cfg, k);
        let pure = DensityMatrix::pure(sampling::unit(rng, dim)?);
        t.record((pure.purity() - 1.0).abs());
        t.record((pure.to_dense().purity() - 1.0).abs());
        let uniform = DensityMatrix::maximally_mixed(dim)?;
        t.record((uniform.purity() - 1.0 / dim as f64).abs());
    }
    Ok(t)
}

fn sqrt_and_log(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..60 {
        let dim = pick_size(cfg, k);
        let rho = sampling::density(rng, dim)?;
        let m = rho.to_matrix();
        let s = rho.matrix_sqrt()?;
        let squared = SymmetricMatrix::symmetrized(dim, s.product(&s));
        t.record(squared.max_abs_diff(&m)?);
        let log = rho.matrix_log()?;
        let exp = log.log.eigen()?.map_spectrum(f64::exp, |_| true);
        t.record(log.support.sandwich(&exp)?.max_abs_diff(&m)?);
    }
    Ok(t)
}

fn bloch_bijection(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for _ in 0..200 {
        let rho = sampling::density(rng, 2)?;
        let p = rho.bloch_coordinates()?;
        let back = matrix2([
            [(1.0 + p.z) / 2.0, p.x / 2.0],
            [p.x / 2.0, (1.0 - p.z) / 2.0],
        ])?;
        t.record(back.max_abs_diff(&rho.to_matrix())?.max(p.y.abs()));
    }
    Ok(t)
}

fn bloch_regions(_: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for (_, rho) in diagonal_sweep(101)? {
        let p = rho.bloch_coordinates()?;
        t.record(p.x.abs().max(p.y.abs()));
    }
    for (_, rho) in pure_positive_sweep(101)? {
        let p = rho.bloch_coordinates()?;
        t.record((-p.x).max(0.0).max((p.norm() - 1.0).abs()));
    }
    Ok(t)
}

fn gleason_normalization(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..500 {
        let dim = pick_size(cfg, k);
        let rho = sampling::density(rng, dim)?;
        let mut total = 0.0;
        for u in sampling::orthonormal_basis(rng, dim)? {
            total += measure(&rho, &ProjectorEvent::new(u))?;
        }
        t.record((total - 1.0).abs());
    }
    Ok(t)
}

fn povm_reduction(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..40 {
        let dim = pick_size(cfg, k);
        // half of one basis split into two weighted copies, half of another
        let mut operators = Vec::new();
        for u in sampling::orthonormal_basis(rng, dim)? {
            let w: f64 = rng.random();
            operators.push(SymmetricMatrix::outer(&u).scaled(0.5 * w));
            operators.push(SymmetricMatrix::outer(&u).scaled(0.5 * (1.0 - w)));
        }
        for u in sampling::orthonormal_basis(rng, dim)? {
            operators.push(SymmetricMatrix::outer(&u).scaled(0.5));
        }
        let povm = Povm { operators };
        let diag = validate_povm(&povm)?;
        if !diag.passed {
            return Err(Failure(format!("generated POVM rejected: {diag:?}")));
        }
        let rho = sampling::density(rng, dim)?;
        t.record((povm_total_probability(&rho, &povm)? - 1.0).abs());
    }
    Ok(t)
}

fn measure_nonnegative(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..300 {
        let dim = pick_size(cfg, k);
        let rho = sampling::density(rng, dim)?;
        let u = sampling::unit(rng, dim)?;
        t.record((-measure(&rho, &ProjectorEvent::new(u))?).max(0.0));
        // a kernel direction when there is one
        let e = rho.eigen()?;
        let kernel = UnitVector::from_dense(e.eigenvector(dim - 1))?;
        t.record((-measure(&rho, &ProjectorEvent::new(kernel))?).max(0.0));
    }
    Ok(t)
}

fn classical_reduction(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for _ in 0..200 {
        let dim = rng.random_range(2..=30);
        let theta = sampling::distribution(rng, dim);
        let len = rng.random_range(1..=20);
        let idx: Vec<usize> = (0..len).map(|_| rng.random_range(0..dim)).collect();
        let ll = sequence_log_likelihood(
            &DensityMatrix::diagonal_density(&theta)?,
            &EventSequence::from_basis_indices(&idx, dim)?,
        )?;
        let product: f64 = idx.iter().map(|&i| theta[i]).product();
        t.record((ll.exp() - product).abs() / product);
    }
    Ok(t)
}

fn non_orthogonal_witness(_: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    let rho = DensityMatrix::diagonal_density(&[0.5, 0.5])?;
    let events = [
        standard_basis_event(0, 2)?,
        standard_basis_event(1, 2)?,
        superpose(2, &[(0, 1.0), (1, 1.0)])?,
    ];
    let mut total = 0.0;
    for e in &events {
        total += measure(&rho, e)?;
    }
    t.record((total - 1.5).abs());
    Ok(t)
}

fn random_counts(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> Vec<(usize, u32)> {
    let mut counts = vec![0u32; dim];
    for _ in 0..len {
        counts[rng.random_range(0..dim)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect()
}

fn random_smoothing(rng: &mut ChaCha8Rng, k: usize) -> Smoothing {
    match k % 3 {
        0 => Smoothing::None,
        1 => Smoothing::JelinekMercer {
            lambda: rng.random_range(0.01..0.99),
        },
        _ => Smoothing::Dirichlet {
            mu: rng.random_range(1.0..5000.0),
        },
    }
}

fn lm_invariants(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..1000 {
        let dim = rng.random_range(2..=100);
        let collection = sampling::distribution(rng, dim);
        let len = rng.random_range(1..=200);
        let counts = random_counts(rng, dim, len);
        let smoothing = random_smoothing(rng, k);
        let lm = LanguageModelParams::from_counts(&counts, &collection, smoothing)?;
        let sum: f64 = lm.theta().iter().sum();
        let min = lm.theta().iter().copied().fold(f64::INFINITY, f64::min);
        if smoothing != Smoothing::None && min <= 0.0 {
            return Err(Failure(format!("{smoothing} produced a zero probability")));
        }
        let density = lm_density(&lm);
        if density.diagonal() != lm.theta() {
            return Err(Failure("lm_density diagonal differs from theta".into()));
        }
        t.record((sum - 1.0).abs().max(-min));
    }
    Ok(t)
}

fn tfidf_unit_norm(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for _ in 0..20 {
        let dim = rng.random_range(5..=80);
        let docs: Vec<Document> = (0..20)
            .map(|k| {
                let len = rng.random_range(1..=60);
                Document {
                    id: format!("d{k}"),
                    counts: random_counts(rng, dim, len),
                }
            })
            .collect();
        let corpus = Corpus::from_documents(dim, docs)?;
        for doc in corpus.documents() {
            for scheme in [Weighting::Tf, Weighting::TfIdf] {
                let v = tfidf_vector(&corpus, &doc.id, scheme)?;
                let min = v.entries().iter().map(|e| e.1).fold(0.0, f64::min);
                let purity = vsm_density(&v)?.purity();
                t.record((v.norm() - 1.0).abs().max(-min).max((purity - 1.0).abs()));
            }
        }
    }
    Ok(t)
}

fn ql_equivalence(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..200 {
        let dim = rng.random_range(5..=200);
        let collection = sampling::distribution(rng, dim);
        let len = rng.random_range(1..=300);
        let counts = random_counts(rng, dim, len);
        let smoothing = random_smoothing(rng, 1 + k % 2);
        let lm = LanguageModelParams::from_counts(&counts, &collection, smoothing)?;
        let qlen = rng.random_range(1..=20);
        let q: Vec<usize> = (0..qlen).map(|_| rng.random_range(0..dim)).collect();
        let classical = ql_classical(&q, &lm)?;
        let quantum = ql_quantum(&EventSequence::from_basis_indices(&q, dim)?, &lm_density(&lm))?;
        t.record((quantum - classical).abs() / classical.abs().max(f64::MIN_POSITIVE));
    }
    Ok(t)
}

fn vn_kl(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for _ in 0..200 {
        let dim = rng.random_range(2..=100);
        let q = LanguageModelParams::new(sampling::distribution(rng, dim), Smoothing::None)?;
        let d = LanguageModelParams::new(sampling::distribution(rng, dim), Smoothing::None)?;
        let kl = kl_divergence(&q, &d)?;
        let (rq, rd) = (lm_density(&q), lm_density(&d));
        let fast = vn_divergence(&rq, &rd)?;
        let general = vn_divergence_general(&rq.to_dense(), &rd.to_dense())?;
        t.record((fast - kl).abs().max((general - kl).abs()));
    }
    Ok(t)
}

fn vn_worked_value(_: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    let half = DensityMatrix::diagonal_density(&[0.5, 0.5])?;
    t.record((vn_divergence(&half, &worked_rho()?)? - 0.1438).abs());
    Ok(t)
}

fn cosine_ranks(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for _ in 0..100 {
        let dim = rng.random_range(5..=60);
        let mut vectors: Vec<TermVector> = Vec::with_capacity(50);
        for _ in 0..50 {
            // occasional duplicates make exact ties
            let v = match vectors.last() {
                Some(prev) if rng.random_bool(0.1) => prev.clone(),
                _ => sampling::nonneg_term_vector(rng, dim, 0.2)?,
            };
            vectors.push(v);
        }
        let q = sampling::nonneg_term_vector(rng, dim, 0.2)?;
        let mut as_vectors = Vec::with_capacity(50);
        let mut as_densities = Vec::with_capacity(50);
        for (k, v) in vectors.into_iter().enumerate() {
            if cosine(&q, &v)? < 0.0 {
                return Err(Failure("negative cosine on nonnegative vectors".into()));
            }
            let id = format!("d{k:02}");
            as_densities.push((id.clone(), DocRepr::Density(vsm_density(&v)?)));
            as_vectors.push((id, DocRepr::Vector(v)));
        }
        let query = QueryRepr::Vector(q);
        let a = rank("q", &as_vectors, &query, ScoringMethod::Cosine)?;
        let b = rank("q", &as_densities, &query, ScoringMethod::VsmQuantum)?;
        let eq = assert_rank_equivalent(&a, &b)?;
        t.record(if eq.equivalent { 0.0 } else { 1.0 });
    }
    Ok(t)
}

fn fidelity_cosine(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..1000 {
        let dim = pick_size(cfg, k);
        let q = sampling::nonneg_term_vector(rng, dim, 0.5)?;
        let d = sampling::nonneg_term_vector(rng, dim, 0.5)?;
        let f = fidelity(&vsm_density(&q)?, &vsm_density(&d)?)?;
        t.record((f - cosine(&q, &d)?).abs());
    }
    Ok(t)
}

fn fidelity_paths(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..150 {
        let dim = pick_size(cfg, k);
        let pq = DensityMatrix::pure(sampling::unit(rng, dim)?);
        let pd = DensityMatrix::pure(sampling::unit(rng, dim)?);
        let dq = DensityMatrix::diagonal_density(&sampling::distribution(rng, dim))?;
        let dd = DensityMatrix::diagonal_density(&sampling::distribution(rng, dim))?;
        let dense = sampling::density(rng, dim)?;
        for (a, b) in [(&pq, &pd), (&pq, &dd), (&dq, &pd), (&dq, &dd), (&pq, &dense)] {
            let fast = fidelity(a, b)?;
            let general = fidelity_general(&a.to_dense(), &b.to_dense())?;
            t.record((fast - general).abs());
        }
    }
    Ok(t)
}

fn fidelity_symmetry(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..150 {
        let dim = pick_size(cfg, k);
        let a = sampling::density(rng, dim)?;
        let b = sampling::density(rng, dim)?;
        let ab = fidelity(&a, &b)?;
        let ba = fidelity(&b, &a)?;
        let range = (-ab).max(ab - 1.0).max(0.0);
        let same = (fidelity(&a, &a)? - 1.0).abs();
        t.record((ab - ba).abs().max(range).max(same));
    }
    Ok(t)
}

fn vn_self_zero(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..200 {
        let dim = pick_size(cfg, k);
        let rho = sampling::density(rng, dim)?;
        let again = DensityMatrix::new(rho.to_matrix())?;
        t.record(vn_divergence(&rho, &again)?.abs());
    }
    Ok(t)
}

fn vn_nonnegative(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..200 {
        let dim = pick_size(cfg, k);
        let rho = sampling::density(rng, dim)?;
        let sigma = sampling::density_of_rank(rng, dim, dim)?;
        t.record((-vn_divergence(&rho, &sigma)?).max(0.0));
    }
    Ok(t)
}

fn vn_asymmetry(_: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    let half = DensityMatrix::diagonal_density(&[0.5, 0.5])?;
    let rho = worked_rho()?;
    // ρ has spectrum (3/4, 1/4) and commutes with I/2
    let forward_oracle = 0.5f64.ln() - 0.5 * (0.75f64.ln() + 0.25f64.ln());
    let backward_oracle = 0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln() - 0.5f64.ln();
    let forward = vn_divergence(&half, &rho)?;
    let backward = vn_divergence(&rho, &half)?;
    t.record((forward - forward_oracle).abs());
    t.record((backward - backward_oracle).abs());
    if (forward - backward).abs() < 1e-3 {
        return Err(Failure(format!("no asymmetry: {forward} vs {backward}")));
    }
    Ok(t)
}

fn fast_paths(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for k in 0..150 {
        let dim = pick_size(cfg, k);
        let v = sampling::nonneg_term_vector(rng, dim, 0.5)?.unit()?;
        let w = sampling::unit(rng, dim)?;
        let pure = DensityMatrix::pure(v.clone());
        let diag = DensityMatrix::diagonal_density(&sampling::distribution(rng, dim))?;
        let diag2 = DensityMatrix::diagonal_density(&sampling::distribution(rng, dim))?;
        let u = sampling::unit(rng, dim)?;
        for rho in [&pure, &diag] {
            t.record((rho.expectation(&u)? - rho.to_dense().expectation(&u)?).abs());
            t.record((rho.purity() - rho.to_dense().purity()).abs());
        }
        let vn = |a: &DensityMatrix, b: &DensityMatrix| -> Result<f64> {
            let fast = vn_divergence(a, b)?;
            let general = vn_divergence_general(&a.to_dense(), &b.to_dense())?;
            Ok(match (fast.is_finite(), general.is_finite()) {
                (true, true) => (fast - general).abs(),
                (false, false) => 0.0,
                _ => f64::INFINITY,
            })
        };
        t.record(vn(&diag, &diag2)?);
        t.record(vn(&pure, &diag)?);
        t.record(vn(&pure, &pure)?);
        t.record(vn(&pure, &DensityMatrix::pure(w))?);
    }
    Ok(t)
}

fn basis_sequence(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> Result<EventSequence> {
    let weights = sampling::distribution(rng, dim);
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::NotDistribution(e.to_string()))?;
    let idx: Vec<usize> = (0..len).map(|_| dist.sample(rng)).collect();
    EventSequence::from_basis_indices(&idx, dim)
}

fn dyad_sequence(rng: &mut ChaCha8Rng, dim: usize) -> Result<(EventSequence, UnitVector)> {
    let v = sampling::unit(rng, dim)?;
    let seq = EventSequence::new(vec![ProjectorEvent::new(v.clone()); 100])?;
    Ok((seq, v))
}

/// Dim-3 sequence of `e0`, `e1`, `e2` and a compound `f0 e0 + f1 e1` that
/// makes up at least a fifth of the observations.
fn compound_sequence(rng: &mut ChaCha8Rng) -> Result<(EventSequence, ProjectorEvent)> {
    let compound = rng.random_range(20..=50);
    let other = rng.random_range(0..=10);
    let a = rng.random_range(1..100 - compound - other);
    let b = 100 - compound - other - a;
    let k = superpose(3, &[(0, rng.random_range(0.3..1.0)), (1, rng.random_range(0.3..1.0))])?;
    let mut events = Vec::with_capacity(100);
    for (event, count) in [
        (standard_basis_event(0, 3)?, a),
        (standard_basis_event(1, 3)?, b),
        (standard_basis_event(2, 3)?, other),
        (k.clone(), compound),
    ] {
        events.extend(std::iter::repeat_n(event, count));
    }
    Ok((EventSequence::new(events)?, k))
}

/// Every estimator instance used by the tomography properties.
fn rpr_instances(rng: &mut ChaCha8Rng) -> Result<Vec<(EventSequence, usize)>> {
    let mut out = Vec::new();
    for dim in [2, 5, 10] {
        for _ in 0..10 {
            out.push((basis_sequence(rng, dim, 100)?, dim));
            out.push((dyad_sequence(rng, dim)?.0, dim));
        }
    }
    for _ in 0..10 {
        out.push((compound_sequence(rng)?.0, 3));
    }
    Ok(out)
}

fn rpr_classical(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for dim in [2, 5, 10] {
        for _ in 0..10 {
            let seq = basis_sequence(rng, dim, 100)?;
            let est = rpr_estimate(&seq, dim, &EstimatorConfig::default())?;
            let oracle = empirical_diagonal_oracle(&seq, dim)?;
            t.record(est.density.to_matrix().max_abs_diff(&oracle.to_matrix())?);
        }
    }
    Ok(t)
}

fn rpr_pure_dyad(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for dim in [2, 5, 10] {
        for _ in 0..10 {
            let (seq, v) = dyad_sequence(rng, dim)?;
            let est = rpr_estimate(&seq, dim, &EstimatorConfig::default())?;
            t.record(est.density.to_matrix().max_abs_diff(&SymmetricMatrix::outer(&v))?);
        }
    }
    Ok(t)
}

/// Best log-likelihood over diagonal densities on the simplex grid of
/// step 0.01, evaluated in closed form.
fn diagonal_grid_best(seq: &EventSequence) -> f64 {
    let weights: Vec<[f64; 3]> = seq
        .iter()
        .map(|e| [e.vector.get(0).powi(2), e.vector.get(1).powi(2), e.vector.get(2).powi(2)])
        .collect();
    let mut best = f64::NEG_INFINITY;
    for i in 0..=100 {
        for j in 0..=100 - i {
            let theta = [i as f64 / 100.0, j as f64 / 100.0, (100 - i - j) as f64 / 100.0];
            let ll: f64 = weights
                .iter()
                .map(|w| (w[0] * theta[0] + w[1] * theta[1] + w[2] * theta[2]).ln())
                .sum();
            best = best.max(ll);
        }
    }
    best
}

fn rpr_compound(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for _ in 0..10 {
        let (seq, _) = compound_sequence(rng)?;
        let est = rpr_estimate(&seq, 3, &EstimatorConfig::default())?;
        let off = est.density.entry(0, 1).abs();
        if off <= 0.01 {
            return Err(Failure(format!("estimate stayed near-diagonal (|ρ01| = {off:.3e})")));
        }
        t.record((diagonal_grid_best(&seq) - est.log_likelihood()).max(0.0));
    }
    Ok(t)
}

fn rpr_monotone(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for (seq, dim) in rpr_instances(rng)? {
        let est = rpr_estimate(&seq, dim, &EstimatorConfig::default())?;
        let drop = est
            .iterations
            .windows(2)
            .map(|w| w[0].log_likelihood - w[1].log_likelihood)
            .fold(0.0, f64::max);
        t.record(drop);
    }
    Ok(t)
}

fn rpr_fixed_point(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::default();
    for (seq, dim) in rpr_instances(rng)? {
        let est = rpr_estimate(&seq, dim, &EstimatorConfig::default())?;
        t.record(fixed_point_residual(&est.density, &seq)?);
    }
    Ok(t)
}
