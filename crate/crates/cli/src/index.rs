use std::fs;
use std::path::Path;

use densir::textrep::{build_corpus, cap_vocabulary, Corpus, Vocabulary};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

/// Persisted index: vocabulary, per-document sparse counts and the
/// collection statistics derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexArtifact {
    pub format_version: u32,
    pub vocabulary: Vocabulary,
    pub corpus: Corpus,
}

#[derive(Deserialize)]
struct Header {
    format_version: u32,
}

impl IndexArtifact {
    pub fn build(docs: &[(String, String)], vocab_cap: Option<usize>) -> CliResult<Self> {
        let (corpus, vocabulary) = build_corpus(docs.iter().map(|(id, text)| (id.clone(), text)))?;
        Self {
            format_version: FORMAT_VERSION,
            vocabulary,
            corpus,
        }
        .capped(vocab_cap)
    }

    /// Restricts to the `cap` most frequent terms; `None` is a no-op.
    pub fn capped(self, cap: Option<usize>) -> CliResult<Self> {
        let Some(cap) = cap else { return Ok(self) };
        if cap == 0 {
            return Err(CliError::Usage("--vocab-cap must be positive".into()));
        }
        let (corpus, vocabulary) = cap_vocabulary(&self.corpus, &self.vocabulary, cap)?;
        Ok(Self {
            format_version: self.format_version,
            vocabulary,
            corpus,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("index serializes")
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_json()).map_err(CliError::io(path))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        let bad = |source| CliError::Index {
            path: path.to_path_buf(),
            source,
        };
        let header: Header = serde_json::from_str(&text).map_err(bad)?;
        if header.format_version != FORMAT_VERSION {
            return Err(CliError::IndexVersion {
                path: path.to_path_buf(),
                found: header.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let index: Self = serde_json::from_str(&text).map_err(bad)?;
        if index.corpus.dim() != index.vocabulary.len() {
            return Err(CliError::Usage(format!(
                "{}: corpus dimension {} does not match vocabulary size {}",
                path.display(),
                index.corpus.dim(),
                index.vocabulary.len()
            )));
        }
        Ok(index)
    }
}
