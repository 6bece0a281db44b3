use std::fmt;
use std::str::FromStr;

use super::{Corpus, Vocabulary};
use crate::densmat::{check_distribution, DensityMatrix};
use crate::error::{Error, Result};

/// How a document model is smoothed toward the collection model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// Maximum likelihood, `tf / |d|`.
    None,
    /// `(1 − λ) · MLE + λ · collection`, λ in (0, 1).
    JelinekMercer { lambda: f64 },
    /// `(tf + μ · collection) / (|d| + μ)`, μ > 0.
    Dirichlet { mu: f64 },
}

impl Default for Smoothing {
    fn default() -> Self {
        Self::Dirichlet { mu: 2000.0 }
    }
}

impl Smoothing {
    pub fn validate(self) -> Result<Self> {
        match self {
            Self::JelinekMercer { lambda } if !(lambda > 0.0 && lambda < 1.0) => Err(
                Error::InvalidSmoothing(format!("jelinek-mercer lambda must be in (0, 1), got {lambda}")),
            ),
            Self::Dirichlet { mu } if !(mu > 0.0 && mu.is_finite()) => Err(Error::InvalidSmoothing(
                format!("dirichlet mu must be positive, got {mu}"),
            )),
            s => Ok(s),
        }
    }
}

/// Parses `none`, `jm:<lambda>` or `dirichlet:<mu>`.
impl FromStr for Smoothing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidSmoothing(format!("bad number {v:?}")))
        };
        let smoothing = match s.split_once(':') {
            None if s == "none" => Self::None,
            Some(("jm", v)) => Self::JelinekMercer { lambda: parse(v)? },
            Some(("dirichlet", v)) => Self::Dirichlet { mu: parse(v)? },
            _ => return Err(Error::InvalidSmoothing(format!("unknown smoothing {s:?}"))),
        };
        smoothing.validate()
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::JelinekMercer { lambda } => write!(f, "jm:{lambda}"),
            Self::Dirichlet { mu } => write!(f, "dirichlet:{mu}"),
        }
    }
}

/// Categorical distribution θ over the vocabulary, with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModelParams {
    theta: Vec<f64>,
    smoothing: Smoothing,
}

impl LanguageModelParams {
    pub fn new(theta: Vec<f64>, smoothing: Smoothing) -> Result<Self> {
        check_distribution(&theta)?;
        Ok(Self { theta, smoothing })
    }

    /// Estimates θ from sparse counts against an explicit collection model.
    pub fn from_counts(
        counts: &[(usize, u32)],
        collection: &[f64],
        smoothing: Smoothing,
    ) -> Result<Self> {
        let smoothing = smoothing.validate()?;
        let dim = collection.len();
        let len: f64 = counts.iter().map(|&(_, c)| c as f64).sum();
        let mut theta = match smoothing {
            Smoothing::None => vec![0.0; dim],
            Smoothing::JelinekMercer { lambda } => collection.iter().map(|&c| lambda * c).collect(),
            Smoothing::Dirichlet { mu } => collection.iter().map(|&c| mu * c / (len + mu)).collect(),
        };
        for &(t, c) in counts {
            if t >= dim {
                return Err(Error::IndexOutOfRange { index: t, dim });
            }
            let c = c as f64;
            theta[t] = match smoothing {
                Smoothing::None => c / len,
                Smoothing::JelinekMercer { lambda } => (1.0 - lambda) * (c / len) + lambda * collection[t],
                Smoothing::Dirichlet { mu } => (c + mu * collection[t]) / (len + mu),
            };
        }
        Self::new(theta, smoothing)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn prob(&self, term: usize) -> f64 {
        self.theta[term]
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }
}

/// Unigram model of a corpus document.
pub fn estimate_lm(corpus: &Corpus, doc_id: &str, smoothing: Smoothing) -> Result<LanguageModelParams> {
    let doc = corpus.document(doc_id)?;
    if doc.counts.is_empty() && smoothing == Smoothing::None {
        return Err(Error::EmptyDocument(doc_id.to_string()));
    }
    let collection = corpus.collection_model()?;
    LanguageModelParams::from_counts(&doc.counts, &collection, smoothing)
}

/// MLE query model over in-vocabulary tokens, plus the number of dropped
/// out-of-vocabulary tokens.
pub fn query_lm<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Result<(LanguageModelParams, usize)> {
    let (ids, dropped) = vocab.lookup(tokens);
    if ids.is_empty() {
        return Err(Error::NoKnownTerms);
    }
    let mut theta = vec![0.0; vocab.len()];
    for &i in &ids {
        theta[i] += 1.0;
    }
    let m = ids.len() as f64;
    theta.iter_mut().for_each(|t| *t /= m);
    Ok((LanguageModelParams::new(theta, Smoothing::None)?, dropped))
}

/// `diag(θ)`.
pub fn lm_density(theta: &LanguageModelParams) -> DensityMatrix {
    DensityMatrix::diagonal_density(theta.theta()).expect("LanguageModelParams is a valid distribution")
}
