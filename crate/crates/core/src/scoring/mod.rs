//! Scoring functions for both retrieval families, in both their classical
//! and density-matrix forms, plus ranking and rank-equivalence checks.
//!
//! | family | view       | query            | document     | score               |
//! |--------|------------|------------------|--------------|---------------------|
//! | VSM    | likelihood | `{|q⟩⟨q|}`       | `|d⟩⟨d|`     | `μ_ρd(|q⟩⟨q|)`      |
//! | LM     | likelihood | `{|e_qi⟩⟨e_qi|}` | `diag(θ_d)`  | `Π μ_ρd(|e_qi⟩⟨e_qi|)` |
//! | VSM    | divergence | `|q⟩⟨q|`         | `|d⟩⟨d|`     | `F(ρ_q, ρ_d)`       |
//! | LM     | divergence | `diag(θ_q)`      | `diag(θ_d)`  | `−VN(ρ_q ‖ ρ_d)`    |

mod functions;
mod rank;

pub use functions::{
    cosine, fidelity, fidelity_general, kl_divergence, ql_classical, ql_quantum,
    vn_divergence, vn_divergence_general, vsm_quantum_likelihood,
};
pub use rank::{
    assert_rank_equivalent, rank, score, DocRepr, QueryRepr, RankEquivalence, RankedList,
    ReprKind, ScoringMethod, TIE_TOL,
};
