use std::fmt;
use std::str::FromStr;

use super::{Corpus, Vocabulary};
use crate::densmat::{DensityMatrix, UnitVector, ZERO_NORM};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Term weighting for VSM vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Raw term counts.
    #[default]
    Tf,
    /// `tf · ln((N + 1) / (df + 1))`.
    TfIdf,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tf" => Ok(Self::Tf),
            "tfidf" => Ok(Self::TfIdf),
            other => Err(Error::InvalidConfig(format!("unknown weighting {other:?}"))),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tf => "tf",
            Self::TfIdf => "tfidf",
        })
    }
}

/// Sparse nonnegative vector in the term space.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
    normalized: bool,
}

impl TermVector {
    /// Unnormalized vector from `(term, weight)` pairs. Weights must be
    /// nonnegative; zero weights are dropped and duplicates summed.
    pub fn raw<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        for &(index, weight) in &entries {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
            if !weight.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if weight < 0.0 {
                return Err(Error::NegativeWeight { index, weight });
            }
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        Ok(Self {
            dim,
            entries: merged,
            normalized: false,
        })
    }

    /// Scales to unit l2 norm.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm < ZERO_NORM {
            return Err(Error::ZeroVector);
        }
        for (_, w) in &mut self.entries {
            *w /= norm;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    /// The unit vector `|v⟩`. Fails unless the vector was normalized.
    pub fn unit(&self) -> Result<UnitVector> {
        if self.entries.is_empty() {
            return Err(Error::ZeroVector);
        }
        let norm = self.norm();
        if !self.normalized || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        UnitVector::new(self.dim, self.entries.iter().copied())
    }
}

fn weighted(dim: usize, counts: &[(usize, u32)], corpus: &Corpus, scheme: Weighting) -> Result<TermVector> {
    let entries = counts.iter().map(|&(t, c)| {
        let tf = c as f64;
        let w = match scheme {
            Weighting::Tf => tf,
            Weighting::TfIdf => tf * corpus.idf(t),
        };
        (t, w)
    });
    TermVector::raw(dim, entries)
}

/// l2-normalized tf or tf-idf vector of a corpus document.
pub fn tfidf_vector(corpus: &Corpus, doc_id: &str, scheme: Weighting) -> Result<TermVector> {
    let doc = corpus.document(doc_id)?;
    if doc.counts.is_empty() {
        return Err(Error::EmptyDocument(doc_id.to_string()));
    }
    weighted(corpus.dim(), &doc.counts, corpus, scheme)?.normalize()
}

/// Query vector over in-vocabulary tokens, weighted with the corpus idf.
/// Returns the vector and the number of dropped out-of-vocabulary tokens.
pub fn query_vector<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    corpus: &Corpus,
    scheme: Weighting,
) -> Result<(TermVector, usize)> {
    let (ids, dropped) = vocab.lookup(tokens);
    if ids.is_empty() {
        return Err(Error::NoKnownTerms);
    }
    let mut counts: Vec<(usize, u32)> = Vec::new();
    let mut sorted = ids;
    sorted.sort_unstable();
    for id in sorted {
        match counts.last_mut() {
            Some((t, c)) if *t == id => *c += 1,
            _ => counts.push((id, 1)),
        }
    }
    let v = weighted(corpus.dim(), &counts, corpus, scheme)?.normalize()?;
    Ok((v, dropped))
}

/// Pure state `|d⟩⟨d|` for a normalized term vector.
pub fn vsm_density(v: &TermVector) -> Result<DensityMatrix> {
    Ok(DensityMatrix::pure(v.unit()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textrep::build_corpus;

    #[test]
    fn tf_counts_then_normalizes() {
        let (c, v) = build_corpus([("d", "a a b")]).unwrap();
        let t = tfidf_vector(&c, "d", Weighting::Tf).unwrap();
        let s5 = 5f64.sqrt();
        let a = v.index_of("a").unwrap();
        let b = v.index_of("b").unwrap();
        assert_eq!(t.entries(), &[(a, 2.0 / s5), (b, 1.0 / s5)]);
        assert!(t.is_normalized());
    }

    #[test]
    fn single_term_doc_is_basis_vector() {
        let (c, v) = build_corpus([("d1", "a"), ("d2", "b")]).unwrap();
        for scheme in [Weighting::Tf, Weighting::TfIdf] {
            let t = tfidf_vector(&c, "d1", scheme).unwrap();
            assert_eq!(t.entries(), &[(v.index_of("a").unwrap(), 1.0)]);
        }
    }

    #[test]
    fn idf_concentrates_on_rare_term() {
        let (c, v) = build_corpus([("d1", "a b"), ("d2", "b")]).unwrap();
        let a = v.index_of("a").unwrap();
        let b = v.index_of("b").unwrap();
        assert!((c.idf(a) - 1.5f64.ln()).abs() < 1e-15);
        assert_eq!(c.idf(b), 0.0);
        let t = tfidf_vector(&c, "d1", Weighting::TfIdf).unwrap();
        assert_eq!(t.entries(), &[(a, 1.0)]);
    }

    #[test]
    fn error_paths() {
        let (c, _) = build_corpus([("d1", "a"), ("empty", "!!")]).unwrap();
        assert!(matches!(tfidf_vector(&c, "nope", Weighting::Tf), Err(Error::UnknownDoc(_))));
        assert!(matches!(tfidf_vector(&c, "empty", Weighting::Tf), Err(Error::EmptyDocument(_))));
        // term present in every document: all idf weights vanish
        let (c, _) = build_corpus([("d1", "a")]).unwrap();
        assert!(matches!(tfidf_vector(&c, "d1", Weighting::TfIdf), Err(Error::ZeroVector)));
        assert!(TermVector::raw(2, [(0, -1.0)]).is_err());
    }

    #[test]
    fn vsm_density_requires_normalization() {
        let raw = TermVector::raw(3, [(0, 3.0), (2, 4.0)]).unwrap();
        assert!(matches!(vsm_density(&raw), Err(Error::NotNormalized(n)) if (n - 5.0).abs() < 1e-12));
        let unit = raw.normalize().unwrap();
        let d = vsm_density(&unit).unwrap();
        assert!((d.purity() - 1.0).abs() < 1e-12);
        assert!((d.entry(0, 2) - 0.48).abs() < 1e-15);

        let two = TermVector::raw(2, [(0, 1.0), (1, 1.0)]).unwrap().normalize().unwrap();
        let m = vsm_density(&two).unwrap().to_matrix();
        assert!(m.as_slice().iter().all(|x| (x - 0.5).abs() < 1e-15));

        let empty = TermVector::raw(2, []).unwrap();
        assert!(matches!(vsm_density(&empty), Err(Error::ZeroVector)));
    }

    #[test]
    fn query_vector_drops_unknown_terms() {
        let (c, v) = build_corpus([("d1", "a b"), ("d2", "b c")]).unwrap();
        let (q, dropped) = query_vector(&["a", "a", "zzz"], &v, &c, Weighting::Tf).unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(q.entries(), &[(0, 1.0)]);
        assert!(matches!(query_vector(&["zzz"], &v, &c, Weighting::Tf), Err(Error::NoKnownTerms)));
    }
}
