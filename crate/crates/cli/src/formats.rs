//! Line-oriented file formats: corpus and query TSV, TREC runs, event
//! files, dense density text and Bloch CSV.

use std::collections::HashSet;
use std::fmt::Write as _;

use densir::densmat::{BlochPoint, SymmetricMatrix};
use densir::quantumprob::{superpose, EventSequence, ProjectorEvent};
use densir::scoring::RankedList;
use densir::textrep::Vocabulary;
use densir::tomography::compound_event;

use crate::error::{CliError, CliResult};

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Non-blank lines with their 1-based line numbers, `\r` stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// `id<TAB>text` per line. Blank lines are skipped; ids must be unique.
pub fn parse_tsv(text: &str, path: &str) -> CliResult<Vec<(String, String)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let (id, body) = l
            .split_once('\t')
            .ok_or_else(|| parse_err(path, line, "expected `id<TAB>text`"))?;
        let id = id.trim();
        if id.is_empty() {
            return Err(parse_err(path, line, "empty id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(parse_err(path, line, format!("duplicate id {id:?}")));
        }
        out.push((id.to_string(), body.to_string()));
    }
    Ok(out)
}

/// `qid Q0 docid rank score tag`, one line per ranked document.
pub fn write_trec(out: &mut String, list: &RankedList, tag: &str) {
    for (k, (doc, score)) in list.entries().iter().enumerate() {
        let _ = writeln!(out, "{} Q0 {} {} {:.6} {}", list.query_id, doc, k + 1, score, tag);
    }
}

/// Term reference in an event file: a 0-based index or, when an index file
/// supplies the vocabulary, a term.
#[derive(Debug, Clone, PartialEq)]
pub enum TermRef {
    Index(usize),
    Term(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventSpec {
    /// `e(i)`
    Basis(TermRef),
    /// `k(i,j,w_i,w_j)`
    Compound(TermRef, TermRef, f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventLine {
    pub line: usize,
    pub count: usize,
    pub spec: EventSpec,
}

fn term_ref(s: &str) -> TermRef {
    let s = s.trim();
    s.parse().map_or_else(|_| TermRef::Term(s.to_string()), TermRef::Index)
}

fn parse_event_spec(s: &str) -> Option<EventSpec> {
    let s = s.trim();
    let args = |prefix: &str| s.strip_prefix(prefix)?.strip_suffix(')').map(|a| a.split(',').collect::<Vec<_>>());
    if let Some(a) = args("e(") {
        return (a.len() == 1 && !a[0].trim().is_empty()).then(|| EventSpec::Basis(term_ref(a[0])));
    }
    let a = args("k(")?;
    if a.len() != 4 {
        return None;
    }
    let w = |x: &str| x.trim().parse::<f64>().ok().filter(|w| w.is_finite());
    Some(EventSpec::Compound(term_ref(a[0]), term_ref(a[1]), w(a[2])?, w(a[3])?))
}

/// `count<TAB>e(i)` or `count<TAB>k(i,j,w,w)` per line. A file with no
/// events is an error.
pub fn parse_events(text: &str, path: &str) -> CliResult<Vec<EventLine>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        if l.trim_start().starts_with('#') {
            continue;
        }
        let (count, spec) = l
            .split_once('\t')
            .ok_or_else(|| parse_err(path, line, "expected `count<TAB>event`"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad count {:?}", count.trim())))?;
        let spec = parse_event_spec(spec)
            .ok_or_else(|| parse_err(path, line, format!("bad event {:?}", spec.trim())))?;
        out.push(EventLine { line, count, spec });
    }
    if out.iter().all(|e| e.count == 0) {
        return Err(parse_err(path, 1, "no events"));
    }
    Ok(out)
}

fn resolve(r: &TermRef, dim: usize, vocab: Option<&Vocabulary>, path: &str, line: usize) -> CliResult<usize> {
    let index = match (r, vocab) {
        (TermRef::Index(i), _) => *i,
        (TermRef::Term(t), Some(v)) => v
            .index_of(t)
            .ok_or_else(|| parse_err(path, line, format!("unknown term {t:?}")))?,
        (TermRef::Term(t), None) => {
            return Err(parse_err(path, line, format!("term {t:?} needs --index to resolve")))
        }
    };
    if index >= dim {
        return Err(parse_err(path, line, format!("index {index} out of range for dimension {dim}")));
    }
    Ok(index)
}

/// Expands event lines into a sequence over a term space of size `dim`.
pub fn resolve_events(
    lines: &[EventLine],
    dim: usize,
    vocab: Option<&Vocabulary>,
    path: &str,
) -> CliResult<EventSequence> {
    let mut events = Vec::new();
    for e in lines {
        let event: ProjectorEvent = match &e.spec {
            EventSpec::Basis(r) => {
                let i = resolve(r, dim, vocab, path, e.line)?;
                densir::quantumprob::standard_basis_event(i, dim)?
            }
            EventSpec::Compound(a, b, wa, wb) => {
                let i = resolve(a, dim, vocab, path, e.line)?;
                let j = resolve(b, dim, vocab, path, e.line)?;
                if i == j {
                    return Err(parse_err(path, e.line, "compound event needs two distinct terms"));
                }
                let built = match (a, b, vocab) {
                    (TermRef::Term(ta), TermRef::Term(tb), Some(v)) => compound_event(ta, tb, (*wa, *wb), v),
                    _ => superpose(dim, &[(i, *wa), (j, *wb)]).map(|k| k.with_label(format!("k({i},{j})"))),
                };
                built.map_err(|err| parse_err(path, e.line, err.to_string()))?
            }
        };
        events.extend(std::iter::repeat_n(event, e.count));
    }
    Ok(EventSequence::new(events)?)
}

/// `dim` on the first line, then `dim` rows of whitespace-separated
/// entries in scientific notation with 16 significant digits.
pub fn format_density(m: &SymmetricMatrix) -> String {
    let mut s = format!("{}\n", m.dim());
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{:.15e}", x + 0.0)).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

/// A matrix block read from a densities file.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixBlock {
    pub label: String,
    pub line: usize,
    pub rows: Vec<Vec<f64>>,
}

/// Blocks of the density text format, each optionally preceded by a
/// `# label` line. Unlabelled blocks are named `density-<k>`.
pub fn parse_densities(text: &str, path: &str) -> CliResult<Vec<MatrixBlock>> {
    let mut lines = content_lines(text).peekable();
    let mut blocks = Vec::new();
    while let Some((mut line, mut l)) = lines.next() {
        let mut label = None;
        if let Some(rest) = l.trim_start().strip_prefix('#') {
            label = Some(rest.trim().to_string());
            (line, l) = lines
                .next()
                .ok_or_else(|| parse_err(path, line, "label without a matrix"))?;
        }
        let dim: usize = l
            .trim()
            .parse()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| parse_err(path, line, format!("expected a dimension, got {:?}", l.trim())))?;
        let start = line;
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (line, l) = lines
                .next()
                .ok_or_else(|| parse_err(path, start, format!("expected {dim} rows")))?;
            let row: Vec<f64> = l
                .split_whitespace()
                .map(|x| x.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| parse_err(path, line, "bad number"))?;
            if row.len() != dim {
                return Err(parse_err(path, line, format!("expected {dim} entries, got {}", row.len())));
            }
            rows.push(row);
        }
        let label = label.unwrap_or_else(|| format!("density-{}", blocks.len()));
        blocks.push(MatrixBlock { label, line: start, rows });
    }
    Ok(blocks)
}

pub const BLOCH_HEADER: &str = "label,x,y,z,purity";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn bloch_row(label: &str, p: &BlochPoint, purity: f64) -> String {
    format!(
        "{},{:.12},{:.12},{:.12},{:.12}",
        csv_field(label),
        p.x + 0.0,
        p.y + 0.0,
        p.z + 0.0,
        purity
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_lines() {
        let docs = parse_tsv("d1\ta b\n\nd2\tb c\r\n", "c.tsv").unwrap();
        assert_eq!(docs, vec![("d1".into(), "a b".into()), ("d2".into(), "b c".into())]);
        assert!(parse_tsv("", "c.tsv").unwrap().is_empty());
        match parse_tsv("d1\ta\nbroken line\n", "c.tsv") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_tsv("d1\ta\nd1\tb", "c"), Err(CliError::Parse { line: 2, .. })));
    }

    #[test]
    fn event_lines() {
        let ev = parse_events("70\te(0)\n30\te(1)\n5\tk(0,1,1,1)\n", "e").unwrap();
        assert_eq!(ev[0].spec, EventSpec::Basis(TermRef::Index(0)));
        assert_eq!(
            ev[2].spec,
            EventSpec::Compound(TermRef::Index(0), TermRef::Index(1), 1.0, 1.0)
        );
        let seq = resolve_events(&ev, 2, None, "e").unwrap();
        assert_eq!(seq.len(), 105);
        assert!(matches!(parse_events("", "e"), Err(CliError::Parse { .. })));
        assert!(matches!(parse_events("3\tx(0)", "e"), Err(CliError::Parse { line: 1, .. })));
        assert!(matches!(parse_events("1\te(0)\n-1\te(1)", "e"), Err(CliError::Parse { line: 2, .. })));
        let ev = parse_events("1\te(5)", "e").unwrap();
        assert!(matches!(resolve_events(&ev, 2, None, "e"), Err(CliError::Parse { line: 1, .. })));
        let ev = parse_events("1\te(cat)", "e").unwrap();
        assert!(resolve_events(&ev, 2, None, "e").is_err());
    }

    #[test]
    fn density_text_round_trip() {
        let m = SymmetricMatrix::from_rows(&[[0.5, 0.25], [0.25, 0.5]]).unwrap();
        let text = format!("# rho\n{}\n{}", format_density(&m), format_density(&m));
        let blocks = parse_densities(&text, "d").unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].label, "rho");
        assert_eq!(blocks[1].label, "density-1");
        assert_eq!(blocks[0].rows, vec![vec![0.5, 0.25], vec![0.25, 0.5]]);
        assert!(format_density(&m).starts_with("2\n5.000000000000000e-1 2.500000000000000e-1\n"));
        assert!(parse_densities("2\n1 0\n", "d").is_err());
        assert!(parse_densities("2\n1 0 0\n0 1\n", "d").is_err());
    }

    #[test]
    fn bloch_rows() {
        let p = BlochPoint { x: -0.0, y: 0.0, z: 1.0 };
        assert_eq!(bloch_row("a,b", &p, 1.0), "\"a,b\",0.000000000000,0.000000000000,1.000000000000,1.000000000000");
    }
}
