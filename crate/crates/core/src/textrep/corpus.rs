use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::tokenize;
use crate::error::{Error, Result};

/// Ordered set of terms. Position `i` is the basis vector `e_i` of the
/// term space, so the vocabulary size is the Hilbert dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Maps tokens to indices, dropping unknown ones. Returns the indices in
    /// token order and the number of dropped tokens.
    pub fn lookup<S: AsRef<str>>(&self, tokens: &[S]) -> (Vec<usize>, usize) {
        let mut dropped = 0;
        let ids = tokens
            .iter()
            .filter_map(|t| {
                let id = self.index_of(t.as_ref());
                if id.is_none() {
                    dropped += 1;
                }
                id
            })
            .collect();
        (ids, dropped)
    }

    fn intern(&mut self, term: &str) -> usize {
        if let Some(&i) = self.index.get(term) {
            return i;
        }
        let i = self.terms.len();
        self.terms.push(term.to_string());
        self.index.insert(term.to_string(), i);
        i
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = Error;

    fn try_from(terms: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::NotDistribution(format!("duplicate vocabulary term {t:?}")));
            }
        }
        Ok(Self { terms, index })
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

/// A document reduced to sparse term counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// `(term index, count)` sorted by index, counts ≥ 1.
    pub counts: Vec<(usize, u32)>,
}

impl Document {
    pub fn length(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c as u64).sum()
    }

    pub fn tf(&self, term: usize) -> u32 {
        self.counts
            .binary_search_by_key(&term, |&(i, _)| i)
            .map(|k| self.counts[k].1)
            .unwrap_or(0)
    }
}

/// Documents plus the collection statistics derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorpusData", into = "CorpusData")]
pub struct Corpus {
    dim: usize,
    docs: Vec<Document>,
    by_id: HashMap<String, usize>,
    collection_counts: Vec<u64>,
    doc_freq: Vec<u32>,
    total_tokens: u64,
}

/// Serialized form. Statistics are stored so an index file is
/// self-describing, and re-derived on load to catch corruption.
#[derive(Serialize, Deserialize)]
struct CorpusData {
    dim: usize,
    documents: Vec<Document>,
    collection_counts: Vec<u64>,
    doc_freq: Vec<u32>,
    total_tokens: u64,
}

impl TryFrom<CorpusData> for Corpus {
    type Error = Error;

    fn try_from(d: CorpusData) -> Result<Self> {
        let corpus = Corpus::from_documents(d.dim, d.documents)?;
        if corpus.collection_counts != d.collection_counts
            || corpus.doc_freq != d.doc_freq
            || corpus.total_tokens != d.total_tokens
        {
            return Err(Error::NotDistribution(
                "stored collection statistics do not match the documents".into(),
            ));
        }
        Ok(corpus)
    }
}

impl From<Corpus> for CorpusData {
    fn from(c: Corpus) -> Self {
        CorpusData {
            dim: c.dim,
            documents: c.docs,
            collection_counts: c.collection_counts,
            doc_freq: c.doc_freq,
            total_tokens: c.total_tokens,
        }
    }
}

impl Corpus {
    /// Builds a corpus over a term space of size `dim`, computing statistics.
    pub fn from_documents(dim: usize, docs: Vec<Document>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(docs.len());
        let mut collection_counts = vec![0u64; dim];
        let mut doc_freq = vec![0u32; dim];
        let mut total_tokens = 0u64;
        for (k, doc) in docs.iter().enumerate() {
            if by_id.insert(doc.id.clone(), k).is_some() {
                return Err(Error::DuplicateDocId(doc.id.clone()));
            }
            let mut prev = None;
            for &(term, count) in &doc.counts {
                if term >= dim {
                    return Err(Error::IndexOutOfRange { index: term, dim });
                }
                if prev.is_some_and(|p| p >= term) || count == 0 {
                    return Err(Error::NotDistribution(format!(
                        "document {:?} has unsorted or zero counts",
                        doc.id
                    )));
                }
                prev = Some(term);
                collection_counts[term] += count as u64;
                doc_freq[term] += 1;
                total_tokens += count as u64;
            }
        }
        Ok(Self {
            dim,
            docs,
            by_id,
            collection_counts,
            doc_freq,
            total_tokens,
        })
    }

    /// Size of the term space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn document(&self, id: &str) -> Result<&Document> {
        self.by_id
            .get(id)
            .map(|&k| &self.docs[k])
            .ok_or_else(|| Error::UnknownDoc(id.to_string()))
    }

    pub fn collection_count(&self, term: usize) -> u64 {
        self.collection_counts[term]
    }

    pub fn collection_counts(&self) -> &[u64] {
        &self.collection_counts
    }

    pub fn doc_freq(&self, term: usize) -> u32 {
        self.doc_freq[term]
    }

    pub fn doc_freqs(&self) -> &[u32] {
        &self.doc_freq
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// `ln((N + 1) / (df + 1))`.
    pub fn idf(&self, term: usize) -> f64 {
        let n = self.docs.len() as f64;
        ((n + 1.0) / (self.doc_freq[term] as f64 + 1.0)).ln()
    }

    /// Collection language model: term counts over total tokens.
    pub fn collection_model(&self) -> Result<Vec<f64>> {
        if self.total_tokens == 0 {
            return Err(Error::NotDistribution("collection has no tokens".into()));
        }
        let total = self.total_tokens as f64;
        Ok(self
            .collection_counts
            .iter()
            .map(|&c| c as f64 / total)
            .collect())
    }
}

/// Tokenizes `(id, text)` pairs into a corpus. The vocabulary lists terms in
/// order of first occurrence.
pub fn build_corpus<I, S, T>(docs: I) -> Result<(Corpus, Vocabulary)>
where
    I: IntoIterator<Item = (S, T)>,
    S: Into<String>,
    T: AsRef<str>,
{
    let mut vocab = Vocabulary::default();
    let mut documents = Vec::new();
    for (id, text) in docs {
        let mut counts: HashMap<usize, u32> = HashMap::new();
        for tok in tokenize(text.as_ref()) {
            *counts.entry(vocab.intern(&tok)).or_default() += 1;
        }
        let mut counts: Vec<(usize, u32)> = counts.into_iter().collect();
        counts.sort_unstable();
        documents.push(Document {
            id: id.into(),
            counts,
        });
    }
    let corpus = Corpus::from_documents(vocab.len(), documents)?;
    Ok((corpus, vocab))
}

/// Keeps the `cap` terms with the highest collection frequency (ties go to
/// the earlier term), preserving their relative order, and drops every
/// other count from the documents.
pub fn cap_vocabulary(corpus: &Corpus, vocab: &Vocabulary, cap: usize) -> Result<(Corpus, Vocabulary)> {
    if cap >= vocab.len() {
        return Ok((corpus.clone(), vocab.clone()));
    }
    let mut order: Vec<usize> = (0..vocab.len()).collect();
    order.sort_by(|&a, &b| {
        corpus.collection_counts[b]
            .cmp(&corpus.collection_counts[a])
            .then(a.cmp(&b))
    });
    let mut keep: Vec<usize> = order[..cap].to_vec();
    keep.sort_unstable();
    let mut remap = vec![None; vocab.len()];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = Some(new);
    }
    let terms: Vec<String> = keep.iter().map(|&i| vocab.terms[i].clone()).collect();
    let docs = corpus
        .docs
        .iter()
        .map(|d| Document {
            id: d.id.clone(),
            counts: d
                .counts
                .iter()
                .filter_map(|&(t, c)| remap[t].map(|n| (n, c)))
                .collect(),
        })
        .collect();
    Ok((Corpus::from_documents(cap, docs)?, Vocabulary::try_from(terms)?))
}
