//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, captured or not.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;

use densir::densmat::{diagonal_sweep, pure_positive_sweep, DensityMatrix, SymmetricMatrix, UnitVector};
use densir::quantumprob::{measure, superpose, EventSequence, ProjectorEvent};
use densir::scoring::{
    assert_rank_equivalent, fidelity, fidelity_general, ql_classical, ql_quantum, rank, vn_divergence,
    vn_divergence_general, DocRepr, QueryRepr, ScoringMethod,
};
use densir::textrep::{lm_density, vsm_density, LanguageModelParams, Smoothing, TermVector};
use densir::tomography::{rpr_estimate, EstimatorConfig};
use densir::verify::sampling;
use densir_cli::run_args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(20_240_901);
    r.set_stream(stream);
    r
}

fn cli(args: &[&str]) -> (i32, Vec<u8>, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_args(std::iter::once("densir").chain(args.iter().copied()), &mut out, &mut err);
    (code, out, String::from_utf8_lossy(&err).into_owned())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// uᵀ M u straight from the dense entries.
fn quad(m: &SymmetricMatrix, u: &[f64]) -> f64 {
    let n = u.len();
    (0..n).map(|i| u[i] * (0..n).map(|j| m.get(i, j) * u[j]).sum::<f64>()).sum()
}

fn worked_matrices() -> Outcome {
    let rows = |r: [[f64; 2]; 2]| SymmetricMatrix::from_rows(&r).unwrap();
    let rho_theta = DensityMatrix::new(rows([[0.5, 0.0], [0.0, 0.5]])).map_err(|e| e.to_string())?;
    let sigma = DensityMatrix::new(rows([[0.5, 0.5], [0.5, 0.5]])).map_err(|e| e.to_string())?;
    let rho = DensityMatrix::new(rows([[0.5, 0.25], [0.25, 0.5]])).map_err(|e| e.to_string())?;
    for bad in [
        [[0.6, 0.0], [0.0, 0.6]],
        [[1.2, 0.0], [0.0, -0.2]],
        [[0.5, 0.6], [0.6, 0.5]],
    ] {
        ensure!(DensityMatrix::new(rows(bad)).is_err(), "accepted non-density {bad:?}");
    }
    ensure!(SymmetricMatrix::from_rows(&[[0.5, 0.1], [0.2, 0.5]]).is_err(), "accepted asymmetric matrix");
    ensure!(sigma.is_pure() && !rho.is_pure() && !rho_theta.is_pure(), "pure/mixed misclassified");
    ensure!((rho.purity() - 0.625).abs() <= 1e-12, "purity(rho) = {}", rho.purity());
    let ev = rho.eigen().map_err(|e| e.to_string())?.eigenvalues().to_vec();
    // [[a, b], [b, a]] has eigenvalues a ± b.
    let dev = (ev[0] - 0.75).abs().max((ev[1] - 0.25).abs());
    ensure!(dev <= 1e-10, "eigenvalues {ev:?}");
    Ok(format!("eigenvalues ({:.12}, {:.12})", ev[0], ev[1]))
}

fn gleason() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let dim = [2, 5, 20, 50][k % 4];
        let rho = sampling::density(&mut r, dim).unwrap();
        let basis = sampling::orthonormal_basis(&mut r, dim).unwrap();
        let m = rho.to_matrix();
        let mut total = 0.0;
        for u in basis {
            let p = measure(&rho, &ProjectorEvent::new(u.clone())).unwrap();
            ensure!((p - quad(&m, &u.to_dense())).abs() <= 1e-10, "measure disagrees with uᵀρu");
            total += p;
        }
        worst = worst.max((total - 1.0).abs());
    }
    ensure!(worst <= 1e-8, "max |sum - 1| = {worst:e}");
    Ok(format!("500 pairs, max |sum - 1| = {worst:.3e}"))
}

fn ql_equivalence() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let dim = r.random_range(2..=200);
        let collection = sampling::distribution(&mut r, dim);
        let mut counts: Vec<(usize, u32)> = Vec::new();
        for i in 0..dim {
            if r.random_bool(0.3) {
                counts.push((i, r.random_range(1..10)));
            }
        }
        let counts = if counts.is_empty() { vec![(0, 1)] } else { counts };
        let smoothing = if k % 2 == 0 {
            Smoothing::Dirichlet { mu: r.random_range(1.0..3000.0) }
        } else {
            Smoothing::JelinekMercer { lambda: r.random_range(0.05..0.95) }
        };
        let lm = LanguageModelParams::from_counts(&counts, &collection, smoothing).unwrap();
        let len = r.random_range(1..=20);
        let q: Vec<usize> = (0..len).map(|_| r.random_range(0..dim)).collect();
        let oracle: f64 = q.iter().map(|&i| lm.theta()[i].ln()).sum();
        let classical = ql_classical(&q, &lm).unwrap();
        let quantum = ql_quantum(&EventSequence::from_basis_indices(&q, dim).unwrap(), &lm_density(&lm)).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel(quantum, classical)).max(rel(classical, oracle));
    }
    ensure!(worst <= 1e-12, "max relative deviation {worst:e}");
    Ok(format!("200 models, max relative deviation {worst:.3e}"))
}

fn vn_kl() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let dim = r.random_range(2..=100);
        let q = sampling::distribution(&mut r, dim);
        let d = sampling::distribution(&mut r, dim);
        let kl: f64 = q.iter().zip(&d).map(|(a, b)| a * (a / b).ln()).sum();
        let rq = DensityMatrix::diagonal_density(&q).unwrap();
        let rd = DensityMatrix::diagonal_density(&d).unwrap();
        let fast = vn_divergence(&rq, &rd).unwrap();
        let general = vn_divergence_general(&rq.to_dense(), &rd.to_dense()).unwrap();
        worst = worst.max((fast - kl).abs()).max((general - kl).abs());
    }
    ensure!(worst <= 1e-10, "max |VN - KL| = {worst:e}");
    let half = DensityMatrix::diagonal_density(&[0.5, 0.5]).unwrap();
    let rho = DensityMatrix::new(SymmetricMatrix::from_rows(&[[0.5, 0.25], [0.25, 0.5]]).unwrap()).unwrap();
    let worked = vn_divergence(&half, &rho).unwrap();
    // -ln 2 - (ln 0.75 + ln 0.25) / 2
    let closed = -std::f64::consts::LN_2 - (0.75f64.ln() + 0.25f64.ln()) / 2.0;
    ensure!((worked - 0.1438).abs() <= 1e-3, "worked value {worked}");
    ensure!((worked - closed).abs() <= 1e-10, "worked value {worked} vs closed form {closed}");
    Ok(format!("200 pairs, max |VN - KL| = {worst:.3e}, worked value {worked:.4}"))
}

fn cos_oracle(q: &TermVector, d: &TermVector) -> f64 {
    let dq: BTreeMap<usize, f64> = q.entries().iter().copied().collect();
    let num: f64 = d.entries().iter().map(|(i, x)| x * dq.get(i).unwrap_or(&0.0)).sum();
    num / (q.norm() * d.norm())
}

fn cosine_rank_equivalence() -> Outcome {
    let mut r = rng(5);
    let mut divergent = 0usize;
    for k in 0..100 {
        let dim = r.random_range(5..=60);
        let docs: Vec<TermVector> = (0..50)
            .map(|_| sampling::nonneg_term_vector(&mut r, dim, 0.3).unwrap())
            .collect();
        let q = sampling::nonneg_term_vector(&mut r, dim, 0.3).unwrap();
        let ids: Vec<String> = (0..50).map(|j| format!("d{j:02}")).collect();
        let vectors: Vec<(String, DocRepr)> =
            ids.iter().cloned().zip(docs.iter().map(|d| DocRepr::Vector(d.clone()))).collect();
        let densities: Vec<(String, DocRepr)> = ids
            .iter()
            .cloned()
            .zip(docs.iter().map(|d| DocRepr::Density(vsm_density(d).unwrap())))
            .collect();
        let query = QueryRepr::Vector(q.clone());
        let a = rank("q", &vectors, &query, ScoringMethod::Cosine).unwrap();
        let b = rank("q", &densities, &query, ScoringMethod::VsmQuantum).unwrap();
        ensure!(assert_rank_equivalent(&a, &b).unwrap().equivalent, "query {k}: library reports divergence");

        // Independent ordering by the test-side squared cosine.
        let sq: BTreeMap<&str, f64> = ids.iter().zip(&docs).map(|(id, d)| (id.as_str(), cos_oracle(&q, d).powi(2))).collect();
        let mut want: Vec<&str> = sq.keys().copied().collect();
        want.sort_by(|x, y| sq[y].total_cmp(&sq[x]).then(x.cmp(y)));
        for (got, want) in b.doc_ids().zip(&want) {
            if got != *want && (sq[got] - sq[want]).abs() > 1e-12 {
                divergent += 1;
            }
        }
    }
    ensure!(divergent == 0, "{divergent} divergent ranks");
    Ok("100 queries x 50 documents, 0 divergent ranks".into())
}

const WORDS: [&str; 24] = [
    "quantum", "probability", "retrieval", "density", "matrix", "vector", "space", "model", "language", "query",
    "document", "term", "weight", "score", "rank", "event", "measure", "state", "basis", "trace", "log", "kernel",
    "index", "corpus",
];

/// Writes a random corpus and query file; returns the index path and query path.
fn synthetic_collection(dir: &TempDir, seed: u64, docs: usize, queries: usize) -> (String, String) {
    let mut r = rng(seed);
    let text = |n: usize, r: &mut ChaCha8Rng| {
        (0..n)
            .map(|_| {
                // Skewed draw so some terms are frequent.
                let u: f64 = r.random();
                WORDS[((u * u) * WORDS.len() as f64) as usize]
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let corpus: String = (0..docs).map(|k| format!("doc{k:03}\t{}\n", text(r.random_range(4..30), &mut r))).collect();
    let qs: String = (0..queries).map(|k| format!("q{k:02}\t{}\n", text(r.random_range(1..5), &mut r))).collect();
    let corpus_path = dir.path().join("corpus.tsv");
    let query_path = dir.path().join("queries.tsv");
    let index_path = dir.path().join("index.json");
    fs::write(&corpus_path, corpus).unwrap();
    fs::write(&query_path, qs).unwrap();
    let (code, _, err) = cli(&["index", s(&corpus_path), "--out", s(&index_path)]);
    assert_eq!(code, 0, "{err}");
    (s(&index_path).to_string(), s(&query_path).to_string())
}

fn rank_columns(run: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(run)
        .lines()
        .map(|l| l.split(' ').take(4).collect::<Vec<_>>().join(" "))
        .collect()
}

fn fidelity_cosine() -> Outcome {
    let mut r = rng(6);
    let mut pure_dev: f64 = 0.0;
    for _ in 0..1000 {
        let dim = r.random_range(2..=50);
        let u = sampling::unit(&mut r, dim).unwrap();
        let v = sampling::unit(&mut r, dim).unwrap();
        let f = fidelity(&DensityMatrix::pure(u.clone()), &DensityMatrix::pure(v.clone())).unwrap();
        pure_dev = pure_dev.max((f - dot(&u.to_dense(), &v.to_dense()).abs()).abs());
    }
    ensure!(pure_dev <= 1e-10, "pure fidelity vs |cos|: {pure_dev:e}");

    let mut path_dev: f64 = 0.0;
    for k in 0..200 {
        let dim = r.random_range(2..=20);
        let (a, b) = match k % 3 {
            0 => (DensityMatrix::pure(sampling::unit(&mut r, dim).unwrap()), DensityMatrix::pure(sampling::unit(&mut r, dim).unwrap())),
            1 => (
                DensityMatrix::diagonal_density(&sampling::distribution(&mut r, dim)).unwrap(),
                DensityMatrix::diagonal_density(&sampling::distribution(&mut r, dim)).unwrap(),
            ),
            _ => (DensityMatrix::pure(sampling::unit(&mut r, dim).unwrap()), sampling::density(&mut r, dim).unwrap()),
        };
        let fast = fidelity(&a, &b).unwrap();
        let general = fidelity_general(&a.to_dense(), &b.to_dense()).unwrap();
        path_dev = path_dev.max((fast - general).abs());
    }
    ensure!(path_dev <= 1e-8, "fast vs general fidelity: {path_dev:e}");

    let dir = TempDir::new().unwrap();
    let (index, queries) = synthetic_collection(&dir, 60, 80, 25);
    let run = |method: &str| {
        let (code, out, err) = cli(&["score", "--index", &index, "--queries", &queries, "--method", method]);
        assert_eq!(code, 0, "{method}: {err}");
        rank_columns(&out)
    };
    let (f, c) = (run("fidelity"), run("cosine"));
    ensure!(!f.is_empty() && f == c, "fidelity and cosine runs differ");
    Ok(format!(
        "pure max dev {pure_dev:.3e}, fast/general max dev {path_dev:.3e}, {} identical run lines",
        f.len()
    ))
}

fn sequence_ll(m: &SymmetricMatrix, events: &[(Vec<f64>, usize)]) -> f64 {
    events.iter().map(|(u, c)| *c as f64 * quad(m, u).ln()).sum()
}

/// Best diagonal density on the 0.01 grid of the 3-simplex.
fn grid_best(events: &[(Vec<f64>, usize)]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for a in 0..=100 {
        for b in 0..=(100 - a) {
            let p = [a as f64 / 100.0, b as f64 / 100.0, (100 - a - b) as f64 / 100.0];
            let ll: f64 = events
                .iter()
                .map(|(u, c)| *c as f64 * u.iter().zip(&p).map(|(x, w)| x * x * w).sum::<f64>().ln())
                .sum();
            best = best.max(ll);
        }
    }
    best
}

fn estimator() -> Outcome {
    let mut r = rng(7);
    let config = EstimatorConfig::default();
    let mut diag_dev: f64 = 0.0;
    let mut max_steps = 0;
    for dim in [2usize, 5, 10] {
        for _ in 0..20 {
            let idx: Vec<usize> = (0..100).map(|_| r.random_range(0..dim)).collect();
            let est = rpr_estimate(&EventSequence::from_basis_indices(&idx, dim).unwrap(), dim, &config)
                .map_err(|e| format!("dim {dim}: {e}"))?;
            ensure!(est.converged && est.steps() <= 500, "dim {dim}: {} steps", est.steps());
            for w in est.iterations.windows(2) {
                ensure!(w[1].log_likelihood >= w[0].log_likelihood - 1e-10, "dim {dim}: likelihood decreased");
            }
            let m = est.density.to_matrix();
            for i in 0..dim {
                for j in 0..dim {
                    let want = if i == j { idx.iter().filter(|&&x| x == i).count() as f64 / 100.0 } else { 0.0 };
                    diag_dev = diag_dev.max((m.get(i, j) - want).abs());
                }
            }
            max_steps = max_steps.max(est.steps());
        }
    }
    ensure!(diag_dev <= 1e-6, "empirical diagonal sup-norm {diag_dev:e}");

    let mut dyad_dev: f64 = 0.0;
    for dim in [2usize, 5, 10] {
        for _ in 0..10 {
            let u = sampling::unit(&mut r, dim).unwrap();
            let seq = EventSequence::new(vec![ProjectorEvent::new(u.clone()); 100]).unwrap();
            let est = rpr_estimate(&seq, dim, &config).map_err(|e| format!("dyad dim {dim}: {e}"))?;
            dyad_dev = dyad_dev.max(est.density.to_matrix().max_abs_diff(&SymmetricMatrix::outer(&u)).unwrap());
        }
    }
    ensure!(dyad_dev <= 1e-6, "dyad recovery {dyad_dev:e}");

    let mut margin = f64::INFINITY;
    for _ in 0..10 {
        let mut raw: Vec<(UnitVector, usize)> = (0..3).map(|i| (UnitVector::basis(i, 3).unwrap(), r.random_range(5..40))).collect();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let w = (r.random_range(0.2..1.0), r.random_range(0.2..1.0));
            let k = superpose(3, &[(i, w.0), (j, w.1)]).unwrap();
            raw.push((k.vector.clone(), r.random_range(5..40)));
        }
        let seq = EventSequence::new(
            raw.iter().flat_map(|(u, c)| std::iter::repeat_n(ProjectorEvent::new(u.clone()), *c)).collect(),
        )
        .unwrap();
        let est = rpr_estimate(&seq, 3, &config).map_err(|e| format!("compound: {e}"))?;
        let events: Vec<(Vec<f64>, usize)> = raw.iter().map(|(u, c)| (u.to_dense(), *c)).collect();
        let ll = sequence_ll(&est.density.to_matrix(), &events);
        margin = margin.min(ll - grid_best(&events));
    }
    ensure!(margin >= 0.0, "compound estimate below best diagonal by {}", -margin);
    Ok(format!(
        "diag sup-norm {diag_dev:.3e} (max {max_steps} steps), dyad {dyad_dev:.3e}, compound margin over grid {margin:.4}"
    ))
}

fn bloch_regions() -> Outcome {
    let mut worst_norm: f64 = 0.0;
    for (_, rho) in diagonal_sweep(101).unwrap() {
        let p = rho.bloch_coordinates().unwrap();
        ensure!(p.x == 0.0 && p.y == 0.0, "diagonal point off the z axis: {p:?}");
    }
    for (_, rho) in pure_positive_sweep(101).unwrap() {
        let p = rho.bloch_coordinates().unwrap();
        ensure!(p.x >= 0.0, "pure-positive point with x < 0: {p:?}");
        worst_norm = worst_norm.max((p.norm() - 1.0).abs());
    }
    ensure!(worst_norm <= 1e-9, "norm deviation {worst_norm:e}");

    let (code, out, err) = cli(&["bloch", "--sweep", "diagonal", "--sweep", "pure-positive", "--points", "101"]);
    ensure!(code == 0, "bloch exited {code}: {err}");
    let text = String::from_utf8(out).unwrap();
    let mut counts = (0, 0);
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let xyz: Vec<f64> = f[1..4].iter().map(|v| v.parse().unwrap()).collect();
        if f[0].starts_with("diagonal") {
            ensure!(xyz[0] == 0.0, "csv diagonal row {line}");
            counts.0 += 1;
        } else {
            let norm = xyz.iter().map(|v| v * v).sum::<f64>().sqrt();
            ensure!(xyz[0] >= 0.0 && (norm - 1.0).abs() <= 1e-9, "csv pure row {line}");
            counts.1 += 1;
        }
    }
    ensure!(counts == (101, 101), "row counts {counts:?}");
    Ok(format!("101 + 101 points, max pure norm deviation {worst_norm:.3e}"))
}

fn determinism() -> Outcome {
    let verify = |threads: &str| {
        let (code, out, err) = cli(&["--threads", threads, "verify", "--seed", "11"]);
        assert!(code == 0 || code == 2, "{err}");
        out
    };
    let v1 = verify("1");
    ensure!(v1 == verify("1"), "verify differs between identical runs");
    ensure!(v1 == verify("4"), "verify differs between 1 and 4 threads");

    let dir = TempDir::new().unwrap();
    let (index, queries) = synthetic_collection(&dir, 90, 120, 20);
    let mut lines = 0;
    for method in ScoringMethod::ALL {
        let score = |threads: &str| {
            let (code, out, err) =
                cli(&["--threads", threads, "score", "--index", &index, "--queries", &queries, "--method", method.name()]);
            assert_eq!(code, 0, "{err}");
            out
        };
        let s1 = score("1");
        ensure!(s1 == score("1"), "{method}: runs differ");
        ensure!(s1 == score("4"), "{method}: runs differ between 1 and 4 threads");
        lines += s1.iter().filter(|&&b| b == b'\n').count();
    }
    Ok(format!("verify report {} bytes, {lines} run lines over 7 methods", v1.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("worked matrices", worked_matrices),
        ("gleason normalization", gleason),
        ("query-likelihood equivalence", ql_equivalence),
        ("von neumann equals kl", vn_kl),
        ("cosine rank equivalence", cosine_rank_equivalence),
        ("fidelity equals cosine", fidelity_cosine),
        ("rpr estimator", estimator),
        ("bloch regions", bloch_regions),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.into_iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", n + 1);
            }
        }
    }
    println!("{}/9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
