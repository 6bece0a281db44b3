//! Density matrices as a common language for vector-space and
//! language-model retrieval.
//!
//! Documents and queries become real symmetric density matrices over the
//! term space, terms become projector events, and the classical scoring
//! functions (cosine, query likelihood, KL divergence) reappear as
//! quadratic forms, sequence likelihoods and von Neumann divergences.

pub mod densmat;
pub mod error;
pub mod quantumprob;
pub mod scoring;
pub mod textrep;
pub mod tomography;
pub mod verify;

pub use error::{Error, Result};

/// Guide chapters, compiled so that their examples run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/densities.md")]
    mod densities {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/representations.md")]
    mod representations {}
    #[doc = include_str!("../../../book/src/scoring.md")]
    mod scoring {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
