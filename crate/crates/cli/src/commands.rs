use std::fs;
use std::io::Write;
use std::path::Path;

use densir::densmat::{diagonal_sweep, pure_positive_sweep, DensityMatrix, SymmetricMatrix};
use densir::quantumprob::EventSequence;
use densir::scoring::{rank, DocRepr, QueryRepr, ScoringMethod};
use densir::textrep::{
    estimate_lm, lm_density, query_lm, query_vector, tfidf_vector, tokenize, vsm_density,
    Smoothing, Weighting,
};
use densir::tomography::{rpr_estimate, Estimate, EstimatorConfig};
use densir::verify::{self, VerifyConfig, VerifyReport};
use densir::Error;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::formats::{
    bloch_row, format_density, parse_densities, parse_events, parse_tsv, resolve_events,
    write_trec, MatrixBlock, BLOCH_HEADER,
};
use crate::index::IndexArtifact;

/// Settings of one scoring run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: ScoringMethod,
    pub smoothing: Smoothing,
    pub weighting: Weighting,
    pub vocab_cap: Option<usize>,
    pub tag: String,
}

impl RunConfig {
    pub fn new(method: ScoringMethod) -> Self {
        Self {
            method,
            smoothing: Smoothing::default(),
            weighting: Weighting::TfIdf,
            vocab_cap: None,
            tag: "densir".into(),
        }
    }

    fn validate(&self) -> CliResult<()> {
        self.smoothing.validate()?;
        if self.tag.is_empty() || self.tag.contains(char::is_whitespace) {
            return Err(CliError::Usage(format!("run tag {:?} must be a single nonempty word", self.tag)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Sweep {
    /// `diag(θ, 1−θ)`, θ ∈ [0, 1]
    Diagonal,
    /// `(cos t, sin t)` pure states, t ∈ [0, π/2]
    PurePositive,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

fn emit(w: &mut dyn Write, s: &str) -> CliResult<()> {
    w.write_all(s.as_bytes()).map_err(CliError::io("<output>"))
}

fn note(w: &mut dyn Write, s: &str) {
    let _ = writeln!(w, "{s}");
}

/// Builds and saves an index; prints the document count and the vocabulary
/// size (the dimension of the term space).
pub fn cmd_index(
    corpus_path: &Path,
    index_path: &Path,
    vocab_cap: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<IndexArtifact> {
    let docs = parse_tsv(&read(corpus_path)?, &corpus_path.display().to_string())?;
    if docs.is_empty() {
        note(err, &format!("warning: {}: no documents", corpus_path.display()));
    }
    let index = IndexArtifact::build(&docs, vocab_cap)?;
    index.save(index_path)?;
    emit(
        out,
        &format!(
            "documents: {}\nvocabulary: {}\n",
            index.corpus.len(),
            index.vocabulary.len()
        ),
    )?;
    Ok(index)
}

fn doc_repr(index: &IndexArtifact, id: &str, cfg: &RunConfig) -> densir::Result<DocRepr> {
    let c = &index.corpus;
    Ok(match cfg.method {
        ScoringMethod::Cosine => DocRepr::Vector(tfidf_vector(c, id, cfg.weighting)?),
        ScoringMethod::VsmQuantum | ScoringMethod::Fidelity => {
            DocRepr::Density(vsm_density(&tfidf_vector(c, id, cfg.weighting)?)?)
        }
        ScoringMethod::QlClassical | ScoringMethod::NegKl => DocRepr::Lm(estimate_lm(c, id, cfg.smoothing)?),
        ScoringMethod::QlQuantum | ScoringMethod::NegVn => {
            DocRepr::Density(lm_density(&estimate_lm(c, id, cfg.smoothing)?))
        }
    })
}

/// Query representation for the method, plus the number of dropped
/// out-of-vocabulary tokens.
fn query_repr(tokens: &[String], index: &IndexArtifact, cfg: &RunConfig) -> densir::Result<(QueryRepr, usize)> {
    let (v, c) = (&index.vocabulary, &index.corpus);
    let terms = || {
        let (ids, dropped) = v.lookup(tokens);
        if ids.is_empty() {
            return Err(Error::NoKnownTerms);
        }
        Ok((ids, dropped))
    };
    Ok(match cfg.method {
        ScoringMethod::Cosine | ScoringMethod::VsmQuantum => {
            let (q, d) = query_vector(tokens, v, c, cfg.weighting)?;
            (QueryRepr::Vector(q), d)
        }
        ScoringMethod::Fidelity => {
            let (q, d) = query_vector(tokens, v, c, cfg.weighting)?;
            (QueryRepr::Density(vsm_density(&q)?), d)
        }
        ScoringMethod::QlClassical => {
            let (ids, d) = terms()?;
            (QueryRepr::Terms(ids), d)
        }
        ScoringMethod::QlQuantum => {
            let (ids, d) = terms()?;
            (QueryRepr::Events(EventSequence::from_basis_indices(&ids, v.len())?), d)
        }
        ScoringMethod::NegKl => {
            let (lm, d) = query_lm(tokens, v)?;
            (QueryRepr::Lm(lm), d)
        }
        ScoringMethod::NegVn => {
            let (lm, d) = query_lm(tokens, v)?;
            (QueryRepr::Density(lm_density(&lm)), d)
        }
    })
}

/// Ranks every document for every query and writes a TREC run. Documents
/// the method cannot represent (empty documents, for instance) are left
/// out with a warning; a query that cannot be scored is reported and makes
/// the command fail after the remaining queries are written.
pub fn cmd_score(
    index_path: &Path,
    queries_path: &Path,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    cfg.validate()?;
    let index = IndexArtifact::load(index_path)?.capped(cfg.vocab_cap)?;
    let queries = parse_tsv(&read(queries_path)?, &queries_path.display().to_string())?;

    let built: Vec<(String, densir::Result<DocRepr>)> = index
        .corpus
        .documents()
        .par_iter()
        .map(|d| (d.id.clone(), doc_repr(&index, &d.id, cfg)))
        .collect();
    let mut docs = Vec::with_capacity(built.len());
    for (id, repr) in built {
        match repr {
            Ok(r) => docs.push((id, r)),
            Err(e) => note(err, &format!("warning: document {id} skipped: {e}")),
        }
    }

    let mut run = String::new();
    let mut failed = 0;
    for (qid, text) in &queries {
        let tokens = tokenize(text);
        let ranked = query_repr(&tokens, &index, cfg).and_then(|(q, dropped)| {
            if dropped > 0 {
                note(err, &format!("query {qid}: {dropped} out-of-vocabulary tokens ignored"));
            }
            rank(qid, &docs, &q, cfg.method)
        });
        match ranked {
            Ok(list) => write_trec(&mut run, &list, &cfg.tag),
            Err(e) => {
                failed += 1;
                note(err, &format!("query {qid}: {e}"));
            }
        }
    }
    emit(out, &run)?;
    if failed > 0 {
        return Err(CliError::QueryFailures {
            failed,
            total: queries.len(),
        });
    }
    Ok(())
}

/// Runs the property suite and writes the report. A failing property is
/// reported and turned into [`CliError::VerificationFailed`].
pub fn cmd_verify(config: &VerifyConfig, out: &mut dyn Write) -> CliResult<VerifyReport> {
    let report = verify::run(config)?;
    emit(out, &report.to_string())?;
    let failed = report.results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::VerificationFailed(failed));
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct EstimateArgs<'a> {
    pub events: &'a Path,
    pub dim: Option<usize>,
    pub index: Option<&'a Path>,
    pub vocab_cap: Option<usize>,
    pub config: EstimatorConfig,
}

/// `iteration,log_likelihood,delta`; the starting point has no delta.
pub fn iteration_csv(est: &Estimate) -> String {
    let mut s = String::from("iteration,log_likelihood,delta\n");
    for r in &est.iterations {
        let delta = r.delta.map(|d| format!("{d:.15e}")).unwrap_or_default();
        s.push_str(&format!("{},{:.15e},{}\n", r.iteration, r.log_likelihood, delta));
    }
    s
}

/// Estimates a density from an event file. On non-convergence the last
/// iterate and its log are still written before the error is returned.
pub fn cmd_estimate(
    args: &EstimateArgs<'_>,
    density_out: &mut dyn Write,
    log_out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<Estimate> {
    let index = match args.index {
        Some(p) => Some(IndexArtifact::load(p)?.capped(args.vocab_cap)?),
        None => None,
    };
    let vocab = index.as_ref().map(|i| &i.vocabulary);
    let dim = match (args.dim, vocab) {
        (Some(d), Some(v)) if d != v.len() => {
            return Err(CliError::Usage(format!(
                "--dim {d} disagrees with the index vocabulary size {}",
                v.len()
            )))
        }
        (Some(d), _) => d,
        (None, Some(v)) => v.len(),
        (None, None) => return Err(CliError::Usage("give --dim or --index".into())),
    };
    let path = args.events.display().to_string();
    let lines = parse_events(&read(args.events)?, &path)?;
    let seq = resolve_events(&lines, dim, vocab, &path)?;
    let (estimate, outcome) = match rpr_estimate(&seq, dim, &args.config) {
        Ok(e) => (e, Ok(())),
        Err(Error::DidNotConverge(e)) => {
            let last = (*e).clone();
            (last, Err(CliError::Core(Error::DidNotConverge(e))))
        }
        Err(e) => return Err(e.into()),
    };
    emit(density_out, &format_density(&estimate.density.to_matrix()))?;
    emit(log_out, &iteration_csv(&estimate))?;
    if outcome.is_err() {
        note(
            err,
            &format!(
                "warning: not converged after {} iterations; wrote the last iterate",
                estimate.steps()
            ),
        );
    }
    outcome.map(|()| estimate)
}

fn block_density(b: &MatrixBlock) -> densir::Result<DensityMatrix> {
    if b.rows.len() != 2 {
        return Err(Error::WrongDimension(b.rows.len()));
    }
    DensityMatrix::new(SymmetricMatrix::from_rows(&b.rows)?)
}

/// Writes `label,x,y,z,purity` for every density in the input file followed
/// by the requested sweeps. Entries that are not valid 2×2 densities are
/// reported individually; the command then fails after writing the rest.
pub fn cmd_bloch(
    input: Option<&Path>,
    sweeps: &[Sweep],
    points: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    if input.is_none() && sweeps.is_empty() {
        return Err(CliError::Usage("give a densities file or --sweep".into()));
    }
    let mut csv = format!("{BLOCH_HEADER}\n");
    let mut row = |label: &str, rho: &DensityMatrix| -> densir::Result<()> {
        let p = rho.bloch_coordinates()?;
        csv.push_str(&bloch_row(label, &p, rho.purity()));
        csv.push('\n');
        Ok(())
    };
    let (mut failed, mut total) = (0, 0);
    if let Some(path) = input {
        for b in parse_densities(&read(path)?, &path.display().to_string())? {
            total += 1;
            if let Err(e) = block_density(&b).and_then(|rho| row(&b.label, &rho)) {
                failed += 1;
                note(err, &format!("{}:{}: {}: {e}", path.display(), b.line, b.label));
            }
        }
    }
    for sweep in sweeps {
        let family = match sweep {
            Sweep::Diagonal => diagonal_sweep(points)?,
            Sweep::PurePositive => pure_positive_sweep(points)?,
        };
        for (label, rho) in family {
            row(&label, &rho)?;
        }
    }
    emit(out, &csv)?;
    if failed > 0 {
        return Err(CliError::EntryFailures { failed, total });
    }
    Ok(())
}
