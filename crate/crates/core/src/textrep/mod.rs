//! From text to term vectors, language models and their densities.
//!
//! The vocabulary fixes the term space: term `i` is the basis vector `e_i`.
//! VSM documents become normalized term vectors (pure densities once lifted
//! with [`vsm_density`]); LM documents become smoothed unigram models
//! (diagonal densities via [`lm_density`]).

mod corpus;
mod lm;
mod tokenize;
mod vectors;

pub use corpus::{build_corpus, cap_vocabulary, Corpus, Document, Vocabulary};
pub use lm::{estimate_lm, lm_density, query_lm, LanguageModelParams, Smoothing};
pub use tokenize::tokenize;
pub use vectors::{query_vector, tfidf_vector, vsm_density, TermVector, Weighting};
