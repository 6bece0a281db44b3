//! Worked 2×2 examples checked against closed-form oracles written here,
//! independently of the library's eigen solver.

use std::f64::consts::FRAC_1_SQRT_2;

use densir::densmat::{DensityMatrix, Structure, SymmetricMatrix, UnitVector};
use densir::quantumprob::{measure, sequence_log_likelihood, standard_basis_event, superpose, EventSequence};
use densir::scoring::{
    cosine, fidelity, fidelity_general, kl_divergence, ql_classical, ql_quantum, vn_divergence,
    vn_divergence_general, vsm_quantum_likelihood,
};
use densir::textrep::{build_corpus, tfidf_vector, vsm_density, LanguageModelParams, Smoothing, TermVector, Weighting};
use densir::Error;

fn sym(rows: [[f64; 2]; 2]) -> SymmetricMatrix {
    SymmetricMatrix::from_rows(&rows).unwrap()
}

fn density(rows: [[f64; 2]; 2]) -> DensityMatrix {
    DensityMatrix::new(sym(rows)).unwrap()
}

/// Eigenvalues of `[[a, b], [b, d]]`, descending, by the quadratic formula.
fn eig2(a: f64, b: f64, d: f64) -> (f64, f64) {
    let mean = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    (mean + r, mean - r)
}

/// `F = √(tr(ρσ) + 2√(det ρ · det σ))`, valid for 2×2 densities.
fn fidelity2(p: [[f64; 2]; 2], s: [[f64; 2]; 2]) -> f64 {
    let tr = p[0][0] * s[0][0] + 2.0 * p[0][1] * s[0][1] + p[1][1] * s[1][1];
    let det = |m: [[f64; 2]; 2]| (m[0][0] * m[1][1] - m[0][1] * m[1][0]).max(0.0);
    (tr + 2.0 * (det(p) * det(s)).sqrt()).sqrt()
}

fn kl_oracle(q: &[f64], d: &[f64]) -> f64 {
    q.iter()
        .zip(d)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum()
}

const RHO: [[f64; 2]; 2] = [[0.5, 0.25], [0.25, 0.5]];
const SIGMA: [[f64; 2]; 2] = [[0.5, 0.5], [0.5, 0.5]];
const RHO_THETA: [[f64; 2]; 2] = [[0.5, 0.0], [0.0, 0.5]];

#[test]
fn worked_matrices_are_densities_and_classified() {
    let rho = density(RHO);
    let sigma = density(SIGMA);
    let theta = density(RHO_THETA);
    assert!(sigma.is_pure());
    assert!(!rho.is_pure() && !theta.is_pure());
    let (l0, l1) = eig2(0.5, 0.25, 0.5);
    let e = rho.eigen().unwrap();
    assert!((e.eigenvalues()[0] - l0).abs() < 1e-10 && (e.eigenvalues()[1] - l1).abs() < 1e-10);
    assert!((e.eigenvalues()[0] - 0.75).abs() < 1e-10);
    assert!((rho.purity() - (l0 * l0 + l1 * l1)).abs() < 1e-12);
    assert!(matches!(
        DensityMatrix::new(sym([[0.6, 0.0], [0.0, 0.6]])),
        Err(Error::BadTrace(_))
    ));
}

#[test]
fn eigenvectors_match_hand_solution() {
    let e = density(RHO).eigen().unwrap().clone();
    let h = FRAC_1_SQRT_2;
    for (got, want) in e.eigenvectors().zip([[h, h], [h, -h]]) {
        assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
    }
    let d = DensityMatrix::new(sym([[0.3, 0.0], [0.0, 0.7]])).unwrap();
    let e = d.eigen().unwrap();
    assert_eq!(e.eigenvalues(), &[0.7, 0.3]);
    assert_eq!(e.eigenvector(0), &[0.0, 1.0]);
}

#[test]
fn pure_state_outer_products() {
    let p = DensityMatrix::pure_state(&[0.6, 0.8]).unwrap().to_matrix();
    for (i, j, want) in [(0, 0, 0.6 * 0.6), (0, 1, 0.6 * 0.8), (1, 1, 0.8 * 0.8)] {
        assert!((p.get(i, j) - want).abs() < 1e-15);
    }
    let s = DensityMatrix::pure_state(&[1.0, 1.0]).unwrap().to_matrix();
    assert!(s.max_abs_diff(&sym(SIGMA)).unwrap() < 1e-15);
}

#[test]
fn trace_products() {
    let want = 0.5 * 0.5 + 2.0 * 0.25 * 0.5 + 0.5 * 0.5;
    assert!((sym(RHO).trace_product(&sym(SIGMA)).unwrap() - want).abs() < 1e-15);
    assert!((sym(SIGMA).trace_product(&sym(SIGMA)).unwrap() - 1.0).abs() < 1e-15);
    let e1 = standard_basis_event(1, 2).unwrap().projector();
    assert_eq!(sym(RHO_THETA).trace_product(&e1).unwrap(), 0.5);
}

#[test]
fn matrix_functions_on_rho() {
    let rho = density(RHO);
    let (l0, l1) = eig2(0.5, 0.25, 0.5);
    // in the (1,1)/√2, (1,−1)/√2 basis: f(ρ) = ½[[f0+f1, f0−f1], [f0−f1, f0+f1]]
    let expect = |f0: f64, f1: f64| sym([[(f0 + f1) / 2.0, (f0 - f1) / 2.0], [(f0 - f1) / 2.0, (f0 + f1) / 2.0]]);
    let log = rho.matrix_log().unwrap();
    assert!(log.log.max_abs_diff(&expect(l0.ln(), l1.ln())).unwrap() < 1e-12);
    assert_eq!(log.rank, 2);
    let sqrt = rho.matrix_sqrt().unwrap();
    assert!(sqrt.max_abs_diff(&expect(l0.sqrt(), l1.sqrt())).unwrap() < 1e-12);
    let d = DensityMatrix::diagonal_density(&[0.25, 0.75]).unwrap().matrix_sqrt().unwrap();
    assert!((d.get(1, 1) - 0.75f64.sqrt()).abs() < 1e-15 && d.get(0, 0) == 0.5);
}

#[test]
fn measures_and_sequences() {
    let sigma = density(SIGMA);
    let anti = superpose(2, &[(0, 1.0), (1, 0.0)]).unwrap();
    assert!((measure(&sigma, &anti).unwrap() - 0.5).abs() < 1e-15);
    let minus = densir::quantumprob::ProjectorEvent::new(UnitVector::from_dense(&[1.0, -1.0]).unwrap());
    assert!(measure(&sigma, &minus).unwrap().abs() < 1e-15);
    let half = DensityMatrix::diagonal_density(&[0.5, 0.5]).unwrap();
    let seq = EventSequence::from_basis_indices(&[0, 1], 2).unwrap();
    assert!((sequence_log_likelihood(&half, &seq).unwrap() - 0.25f64.ln()).abs() < 1e-15);
    let pole = DensityMatrix::diagonal_density(&[1.0, 0.0]).unwrap();
    let seq = EventSequence::from_basis_indices(&[1], 2).unwrap();
    assert_eq!(sequence_log_likelihood(&pole, &seq).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn vn_worked_value_against_closed_form() {
    let half = DensityMatrix::diagonal_density(&[0.5, 0.5]).unwrap();
    let (l0, l1) = eig2(0.5, 0.25, 0.5);
    // ρ_q = I/2 commutes with everything: VN = ln ½ − ½ (ln λ0 + ln λ1)
    let oracle = 0.5f64.ln() - 0.5 * (l0.ln() + l1.ln());
    let got = vn_divergence(&half, &density(RHO)).unwrap();
    assert!((got - oracle).abs() < 1e-12);
    assert!((got - 0.1438).abs() < 1e-3);
    let general = vn_divergence_general(&half.to_dense(), &density(RHO)).unwrap();
    assert!((general - oracle).abs() < 1e-12);
}

#[test]
fn kl_examples_against_direct_sum() {
    let lm = |t: &[f64]| LanguageModelParams::new(t.to_vec(), Smoothing::None).unwrap();
    let q = [1.0, 0.0];
    let d = [0.5, 0.5];
    assert!((kl_divergence(&lm(&q), &lm(&d)).unwrap() - kl_oracle(&q, &d)).abs() < 1e-15);
    assert_eq!(kl_divergence(&lm(&d), &lm(&q)).unwrap(), f64::INFINITY);
    let a = [0.2, 0.3, 0.5];
    let b = [0.4, 0.4, 0.2];
    assert!((kl_divergence(&lm(&a), &lm(&b)).unwrap() - kl_oracle(&a, &b)).abs() < 1e-15);
    let vn = vn_divergence(
        &DensityMatrix::diagonal_density(&a).unwrap(),
        &DensityMatrix::diagonal_density(&b).unwrap(),
    )
    .unwrap();
    assert!((vn - kl_oracle(&a, &b)).abs() < 1e-15);
}

#[test]
fn fidelity_against_determinant_formula() {
    let pairs = [
        (RHO, SIGMA),
        (RHO, RHO_THETA),
        (RHO_THETA, SIGMA),
        (RHO, [[0.9, -0.1], [-0.1, 0.1]]),
        ([[0.2, 0.1], [0.1, 0.8]], [[0.7, 0.3], [0.3, 0.3]]),
    ];
    for (p, s) in pairs {
        let oracle = fidelity2(p, s);
        let got = fidelity(&density(p), &density(s)).unwrap();
        assert!((got - oracle).abs() < 1e-10, "{p:?} {s:?}: {got} vs {oracle}");
        let general = fidelity_general(&density(p), &density(s)).unwrap();
        assert!((general - oracle).abs() < 1e-10);
    }
}

#[test]
fn vsm_examples() {
    let tv = |e: &[(usize, f64)]| TermVector::raw(2, e.iter().copied()).unwrap().normalize().unwrap();
    let a = tv(&[(0, 1.0)]);
    let ab = tv(&[(0, 1.0), (1, 1.0)]);
    let b = tv(&[(1, 1.0)]);
    assert!((cosine(&a, &ab).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
    assert_eq!(cosine(&a, &b).unwrap(), 0.0);
    assert!((cosine(&ab, &ab).unwrap() - 1.0).abs() < 1e-15);
    let rho_ab = vsm_density(&ab).unwrap();
    assert_eq!(rho_ab.structure(), Structure::Pure);
    assert!((vsm_quantum_likelihood(&rho_ab, &a).unwrap() - 0.5).abs() < 1e-15);
    assert!((fidelity(&vsm_density(&a).unwrap(), &rho_ab).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
    let raw = TermVector::raw(2, [(0, 2.0)]).unwrap();
    assert!(matches!(vsm_density(&raw), Err(Error::NotNormalized(_))));
    let seq = EventSequence::new(vec![densir::quantumprob::ProjectorEvent::new(a.unit().unwrap())]).unwrap();
    assert!((ql_quantum(&seq, &rho_ab).unwrap() - 0.5f64.ln()).abs() < 1e-15);
}

#[test]
fn query_likelihood_examples() {
    let lm = |t: &[f64]| LanguageModelParams::new(t.to_vec(), Smoothing::None).unwrap();
    assert!((ql_classical(&[0, 1], &lm(&[0.5, 0.5])).unwrap() - 0.25f64.ln()).abs() < 1e-15);
    assert_eq!(ql_classical(&[0], &lm(&[1.0, 0.0])).unwrap(), 0.0);
    assert_eq!(ql_classical(&[1], &lm(&[1.0, 0.0])).unwrap(), f64::NEG_INFINITY);
    let half = DensityMatrix::diagonal_density(&[0.5, 0.5]).unwrap();
    let seq = EventSequence::from_basis_indices(&[0, 1], 2).unwrap();
    assert_eq!(ql_quantum(&seq, &half).unwrap(), ql_classical(&[0, 1], &lm(&[0.5, 0.5])).unwrap());
}

#[test]
fn tfidf_examples() {
    let (c, v) = build_corpus([("d1", "a a b")]).unwrap();
    let tf = tfidf_vector(&c, "d1", Weighting::Tf).unwrap();
    let s5 = 5f64.sqrt();
    assert!((tf.entries()[0].1 - 2.0 / s5).abs() < 1e-15 && (tf.entries()[1].1 - 1.0 / s5).abs() < 1e-15);
    assert_eq!(v.index_of("a"), Some(0));

    let (c, v) = build_corpus([("d1", "a b"), ("d2", "b")]).unwrap();
    let w = tfidf_vector(&c, "d1", Weighting::TfIdf).unwrap();
    let a = v.index_of("a").unwrap();
    // idf(a) = ln(3/2), idf(b) = ln(3/3) = 0
    assert_eq!(w.entries(), &[(a, 1.0)]);
    assert!((c.idf(a) - 1.5f64.ln()).abs() < 1e-15);
    assert_eq!(c.idf(v.index_of("b").unwrap()), 0.0);

    let (c, _) = build_corpus([("d1", "a"), ("d2", "b c")]).unwrap();
    for scheme in [Weighting::Tf, Weighting::TfIdf] {
        assert_eq!(tfidf_vector(&c, "d1", scheme).unwrap().entries(), &[(0, 1.0)]);
    }
}
