use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::functions::*;
use crate::densmat::DensityMatrix;
use crate::error::{Error, Result};
use crate::quantumprob::EventSequence;
use crate::textrep::{LanguageModelParams, TermVector};

/// Scores closer than this within one list are tied for rank comparison.
pub const TIE_TOL: f64 = 1e-12;

/// The scoring functions of the two views, for both model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoringMethod {
    /// `⟨q|d⟩` over normalized term vectors.
    Cosine,
    /// `μ_{|d⟩⟨d|}(|q⟩⟨q|) = ⟨q|d⟩²`.
    VsmQuantum,
    /// Fidelity between query and document densities.
    Fidelity,
    /// `Σ ln θ_{d,q_i}` over query term indices.
    QlClassical,
    /// `Σ ln μ_{ρ_d}(P_i)` over a query event sequence.
    QlQuantum,
    /// `−KL(θ_q ‖ θ_d)`.
    NegKl,
    /// `−VN(ρ_q ‖ ρ_d)`.
    NegVn,
}

impl ScoringMethod {
    pub const ALL: [ScoringMethod; 7] = [
        Self::Cosine,
        Self::VsmQuantum,
        Self::Fidelity,
        Self::QlClassical,
        Self::QlQuantum,
        Self::NegKl,
        Self::NegVn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cosine => "cosine",
            Self::VsmQuantum => "vsm-quantum",
            Self::Fidelity => "fidelity",
            Self::QlClassical => "ql-classical",
            Self::QlQuantum => "ql-quantum",
            Self::NegKl => "neg-kl",
            Self::NegVn => "neg-vn",
        }
    }

    /// Document representation this method scores against.
    pub fn document_kind(self) -> ReprKind {
        match self {
            Self::Cosine => ReprKind::Vector,
            Self::QlClassical | Self::NegKl => ReprKind::LanguageModel,
            Self::VsmQuantum | Self::Fidelity | Self::QlQuantum | Self::NegVn => ReprKind::Density,
        }
    }

    /// Query representation this method expects.
    pub fn query_kind(self) -> ReprKind {
        match self {
            Self::Cosine | Self::VsmQuantum => ReprKind::Vector,
            Self::Fidelity | Self::NegVn => ReprKind::Density,
            Self::QlClassical => ReprKind::Terms,
            Self::QlQuantum => ReprKind::Events,
            Self::NegKl => ReprKind::LanguageModel,
        }
    }
}

impl fmt::Display for ScoringMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoringMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scoring method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReprKind {
    Vector,
    LanguageModel,
    Density,
    Terms,
    Events,
}

impl ReprKind {
    fn describe(self) -> &'static str {
        match self {
            Self::Vector => "a term vector",
            Self::LanguageModel => "a language model",
            Self::Density => "a density matrix",
            Self::Terms => "query term indices",
            Self::Events => "an event sequence",
        }
    }
}

#[derive(Debug, Clone)]
pub enum DocRepr {
    Vector(TermVector),
    Lm(LanguageModelParams),
    Density(DensityMatrix),
}

#[derive(Debug, Clone)]
pub enum QueryRepr {
    Vector(TermVector),
    Terms(Vec<usize>),
    Lm(LanguageModelParams),
    Density(DensityMatrix),
    Events(EventSequence),
}

fn mismatch(method: ScoringMethod, kind: ReprKind) -> Error {
    Error::RepresentationMismatch {
        method: method.name(),
        expected: kind.describe(),
    }
}

/// Scores one document. Divergences are negated so that larger is better.
pub fn score(method: ScoringMethod, query: &QueryRepr, doc: &DocRepr) -> Result<f64> {
    use ScoringMethod as M;
    let qerr = || mismatch(method, method.query_kind());
    let derr = || mismatch(method, method.document_kind());
    match method {
        M::Cosine => match (query, doc) {
            (QueryRepr::Vector(q), DocRepr::Vector(d)) => cosine(q, d),
            (QueryRepr::Vector(_), _) => Err(derr()),
            _ => Err(qerr()),
        },
        M::VsmQuantum => match (query, doc) {
            (QueryRepr::Vector(q), DocRepr::Density(d)) => vsm_quantum_likelihood(d, q),
            (QueryRepr::Vector(_), _) => Err(derr()),
            _ => Err(qerr()),
        },
        M::Fidelity => match (query, doc) {
            (QueryRepr::Density(q), DocRepr::Density(d)) => fidelity(q, d),
            (QueryRepr::Density(_), _) => Err(derr()),
            _ => Err(qerr()),
        },
        M::QlClassical => match (query, doc) {
            (QueryRepr::Terms(q), DocRepr::Lm(d)) => ql_classical(q, d),
            (QueryRepr::Terms(_), _) => Err(derr()),
            _ => Err(qerr()),
        },
        M::QlQuantum => match (query, doc) {
            (QueryRepr::Events(q), DocRepr::Density(d)) => ql_quantum(q, d),
            (QueryRepr::Events(_), _) => Err(derr()),
            _ => Err(qerr()),
        },
        M::NegKl => match (query, doc) {
            (QueryRepr::Lm(q), DocRepr::Lm(d)) => kl_divergence(q, d).map(|x| -x),
            (QueryRepr::Lm(_), _) => Err(derr()),
            _ => Err(qerr()),
        },
        M::NegVn => match (query, doc) {
            (QueryRepr::Density(q), DocRepr::Density(d)) => vn_divergence(q, d).map(|x| -x),
            (QueryRepr::Density(_), _) => Err(derr()),
            _ => Err(qerr()),
        },
    }
}

/// Documents ordered by non-increasing score; ties by doc-id ascending;
/// `-∞` (and NaN) last.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    entries: Vec<(String, f64)>,
}

fn score_order(a: f64, b: f64) -> Ordering {
    let key = |x: f64| if x.is_nan() { f64::NEG_INFINITY } else { x };
    key(b).total_cmp(&key(a))
}

impl RankedList {
    pub fn from_scores(query_id: impl Into<String>, mut entries: Vec<(String, f64)>) -> Self {
        for (_, s) in &mut entries {
            // folds -0.0 into +0.0 so total_cmp does not split them
            *s += 0.0;
        }
        entries.sort_by(|(ia, sa), (ib, sb)| score_order(*sa, *sb).then_with(|| ia.cmp(ib)));
        Self {
            query_id: query_id.into(),
            entries,
        }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(d, _)| d.as_str())
    }

    /// Tie-group index per position: consecutive scores within [`TIE_TOL`]
    /// share a group.
    fn tie_groups(&self) -> Vec<usize> {
        let mut groups = Vec::with_capacity(self.entries.len());
        let mut g = 0;
        for (k, (_, s)) in self.entries.iter().enumerate() {
            if k > 0 {
                let prev = self.entries[k - 1].1;
                if !(prev == *s || prev - s <= TIE_TOL) {
                    g += 1;
                }
            }
            groups.push(g);
        }
        groups
    }
}

/// Scores every document in parallel and sorts. Output does not depend on
/// the number of threads.
pub fn rank(
    query_id: &str,
    docs: &[(String, DocRepr)],
    query: &QueryRepr,
    method: ScoringMethod,
) -> Result<RankedList> {
    let scored = docs
        .par_iter()
        .map(|(id, d)| score(method, query, d).map(|s| (id.clone(), s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RankedList::from_scores(query_id, scored))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankEquivalence {
    pub equivalent: bool,
    /// 1-based rank of the first position where the tie-normalized orders
    /// differ.
    pub first_divergent_rank: Option<usize>,
    pub compared: usize,
}

/// Checks that two lists order the same documents identically, treating
/// documents tied (within [`TIE_TOL`]) in either list as tied in both.
///
/// Each list is canonicalized by sorting on (own tie group, other list's
/// tie group, doc id). The canonical orders agree exactly when no pair of
/// documents is strictly ordered one way in `a` and the other way in `b`.
pub fn assert_rank_equivalent(a: &RankedList, b: &RankedList) -> Result<RankEquivalence> {
    if a.query_id != b.query_id {
        return Err(Error::DocSetMismatch(format!(
            "query ids differ: {:?} vs {:?}",
            a.query_id, b.query_id
        )));
    }
    if a.len() != b.len() {
        return Err(Error::DocSetMismatch(format!(
            "list lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let ga = a.tie_groups();
    let gb = b.tie_groups();
    let pos_b: HashMap<&str, usize> = b.doc_ids().enumerate().map(|(k, d)| (d, k)).collect();
    if pos_b.len() != b.len() {
        return Err(Error::DocSetMismatch("duplicate doc ids".into()));
    }
    // (group in a, group in b, id) per document
    let mut keyed = Vec::with_capacity(a.len());
    for (k, id) in a.doc_ids().enumerate() {
        let kb = *pos_b
            .get(id)
            .ok_or_else(|| Error::DocSetMismatch(format!("{id:?} missing from second list")))?;
        keyed.push((ga[k], gb[kb], id));
    }
    let mut order_a = keyed.clone();
    order_a.sort_by(|x, y| (x.0, x.1, x.2).cmp(&(y.0, y.1, y.2)));
    let mut order_b = keyed;
    order_b.sort_by(|x, y| (x.1, x.0, x.2).cmp(&(y.1, y.0, y.2)));
    let first = order_a
        .iter()
        .zip(&order_b)
        .position(|(x, y)| x.2 != y.2)
        .map(|p| p + 1);
    Ok(RankEquivalence {
        equivalent: first.is_none(),
        first_divergent_rank: first,
        compared: a.len(),
    })
}
