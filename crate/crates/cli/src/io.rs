//! Matrix and graph files.
//!
//! Matrices are read from JSON (`{"order": n, "entries": [[...], ...]}`,
//! row-major) or Matrix Market coordinate files with the `real symmetric`
//! qualifier. Graphs are JSON with 1-based `edges` and an optional
//! `coupling`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use spisep_core::{CoupledGraph, Coupling, DenseSymmetric, LabeledGraph};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Json,
    MatrixMarket,
}

impl MatrixFormat {
    /// `.mtx` means Matrix Market, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => MatrixFormat::MatrixMarket,
            _ => MatrixFormat::Json,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    order: usize,
    entries: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
pub struct GraphJson {
    pub order: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<(usize, usize)>>,
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// Parses either format; Matrix Market is recognised by its banner.
pub fn parse_matrix(text: &str) -> Result<DenseSymmetric, CliError> {
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(text)
    } else {
        parse_matrix_json(text)
    }
}

pub fn parse_matrix_json(text: &str) -> Result<DenseSymmetric, CliError> {
    let m: MatrixJson = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    if m.entries.len() != m.order || m.entries.iter().any(|r| r.len() != m.order) {
        return Err(parse_err(format!(
            "entries do not form a {0}x{0} array",
            m.order
        )));
    }
    Ok(DenseSymmetric::from_rows(&m.entries)?)
}

pub fn parse_matrix_market(text: &str) -> Result<DenseSymmetric, CliError> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or_else(|| parse_err("empty file"))?;
    let words: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err("bad Matrix Market banner"));
    }
    if words[2] != "coordinate" || words[3] != "real" || words[4] != "symmetric" {
        return Err(parse_err(format!(
            "only 'coordinate real symmetric' is supported, got '{} {} {}'",
            words[2], words[3], words[4]
        )));
    }
    let mut data = lines.filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let size = data.next().ok_or_else(|| parse_err("missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| {
            w.parse()
                .map_err(|_| parse_err(format!("bad size line '{size}'")))
        })
        .collect::<Result<_, _>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(parse_err(format!("bad size line '{size}'")));
    };
    if rows != cols {
        return Err(parse_err(format!("matrix is {rows}x{cols}")));
    }
    let mut m = DMatrix::zeros(rows, rows);
    let mut count = 0;
    for line in data {
        let w: Vec<&str> = line.split_whitespace().collect();
        if w.len() != 3 {
            return Err(parse_err(format!("bad entry line '{line}'")));
        }
        let i: usize = w[0]
            .parse()
            .map_err(|_| parse_err(format!("bad row index '{}'", w[0])))?;
        let j: usize = w[1]
            .parse()
            .map_err(|_| parse_err(format!("bad column index '{}'", w[1])))?;
        let v: f64 = w[2]
            .parse()
            .map_err(|_| parse_err(format!("bad value '{}'", w[2])))?;
        if i == 0 || j == 0 || i > rows || j > rows {
            return Err(parse_err(format!("index ({i}, {j}) out of range")));
        }
        if i < j {
            return Err(parse_err(format!(
                "entry ({i}, {j}) lies above the diagonal"
            )));
        }
        m[(i - 1, j - 1)] = v;
        m[(j - 1, i - 1)] = v;
        count += 1;
    }
    if count != nnz {
        return Err(parse_err(format!("expected {nnz} entries, found {count}")));
    }
    Ok(DenseSymmetric::new(m)?)
}

pub fn matrix_to_json(n: &DenseSymmetric) -> String {
    let m = MatrixJson {
        order: n.order(),
        entries: n.rows(),
    };
    serde_json::to_string_pretty(&m).expect("finite floats serialise")
}

/// Lower triangle, every entry whose bit pattern is not `+0.0`.
pub fn matrix_to_market(n: &DenseSymmetric) -> String {
    let size = n.order();
    let mut entries = Vec::new();
    for j in 0..size {
        for i in j..size {
            let v = n.get(i, j);
            if v.to_bits() != 0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    writeln!(out, "{size} {size} {}", entries.len()).expect("string write");
    for (i, j, v) in entries {
        writeln!(out, "{i} {j} {v:e}").expect("string write");
    }
    out
}

pub fn read_matrix(path: &Path) -> Result<DenseSymmetric, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn write_matrix(path: &Path, n: &DenseSymmetric) -> Result<(), CliError> {
    let text = match MatrixFormat::from_path(path) {
        MatrixFormat::Json => matrix_to_json(n),
        MatrixFormat::MatrixMarket => matrix_to_market(n),
    };
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A graph file, with its coupling if present.
pub fn parse_graph(text: &str) -> Result<(LabeledGraph, Option<Coupling>), CliError> {
    let g: GraphJson = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let graph = LabeledGraph::from_one_based(g.order, &g.edges)?;
    let coupling = match g.coupling {
        Some(pairs) => Some(Coupling::from_one_based(g.order, &pairs)?),
        None => None,
    };
    Ok((graph, coupling))
}

pub fn read_graph(path: &Path) -> Result<(LabeledGraph, Option<Coupling>), CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn graph_to_json(cg: &CoupledGraph) -> String {
    let g = GraphJson {
        order: cg.order(),
        edges: cg.graph.edges_one_based(),
        coupling: Some(cg.coupling.pairs_one_based()),
    };
    serde_json::to_string_pretty(&g).expect("plain integers serialise")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseSymmetric {
        DenseSymmetric::from_rows(&[
            vec![2.0, 0.1 + 0.2, -0.0],
            vec![0.1 + 0.2, 1e-300, 1.0 / 3.0],
            vec![-0.0, 1.0 / 3.0, f64::MAX],
        ])
        .unwrap()
    }

    fn bits(n: &DenseSymmetric) -> Vec<u64> {
        n.as_matrix().iter().map(|v| v.to_bits()).collect()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let n = sample();
        assert_eq!(bits(&parse_matrix(&matrix_to_json(&n)).unwrap()), bits(&n));
    }

    #[test]
    fn market_round_trip_is_exact() {
        let n = sample();
        let text = matrix_to_market(&n);
        assert!(text.starts_with("%%MatrixMarket"));
        assert_eq!(bits(&parse_matrix(&text).unwrap()), bits(&n));
    }

    #[test]
    fn market_rejects_general() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n";
        assert!(matches!(parse_matrix(text), Err(CliError::Parse(_))));
    }

    #[test]
    fn market_rejects_upper_entries_and_bad_counts() {
        let upper = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n";
        assert!(matches!(parse_matrix(upper), Err(CliError::Parse(_))));
        let short = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n";
        assert!(matches!(parse_matrix(short), Err(CliError::Parse(_))));
    }

    #[test]
    fn json_shape_errors() {
        assert!(matches!(
            parse_matrix(r#"{"order": 2, "entries": [[1.0, 0.0]]}"#),
            Err(CliError::Parse(_))
        ));
        assert!(matches!(parse_matrix("not json"), Err(CliError::Parse(_))));
        assert!(matches!(
            parse_matrix(r#"{"order": 2, "entries": [[1.0, 2.0], [0.0, 1.0]]}"#),
            Err(CliError::Precondition(_))
        ));
    }

    #[test]
    fn graph_round_trip() {
        let cg = spisep_core::graphs::cycle_coupled(3).unwrap();
        let (g, c) = parse_graph(&graph_to_json(&cg)).unwrap();
        assert_eq!(g, cg.graph);
        assert_eq!(c, Some(cg.coupling));
    }
}
