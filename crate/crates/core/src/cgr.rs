//! The `cgr v1` text format.
//!
//! ```text
//! n r
//! u v c        (one line per pair, 0 <= u < v < n, 1 <= c <= r,
//! ...           lexicographic order, LF endings, trailing LF)
//! ```
//!
//! The reader is strict: anything other than the exact bytes the writer
//! would produce for the parsed graph is rejected.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{ColoredCompleteGraph, GraphError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CgrError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: expected pair ({u}, {v})")]
    Order { line: usize, u: usize, v: usize },
    #[error("file is not in canonical form (whitespace, leading zeros or line endings)")]
    NonCanonical,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn write_cgr(g: &ColoredCompleteGraph) -> String {
    let mut out = String::with_capacity(g.n() * g.n() * 4);
    writeln!(out, "{} {}", g.n(), g.r()).unwrap();
    for (u, v, c) in g.pairs() {
        writeln!(out, "{u} {v} {c}").unwrap();
    }
    out
}

fn fields(line: &str, want: usize, line_no: usize) -> Result<Vec<usize>, CgrError> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != want {
        return Err(CgrError::Syntax {
            line: line_no,
            msg: format!("expected {want} space-separated integers"),
        });
    }
    parts
        .iter()
        .map(|p| {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(CgrError::Syntax {
                    line: line_no,
                    msg: format!("not a decimal integer: {p:?}"),
                });
            }
            p.parse::<usize>().map_err(|e| CgrError::Syntax {
                line: line_no,
                msg: e.to_string(),
            })
        })
        .collect()
}

pub fn read_cgr(text: &str) -> Result<ColoredCompleteGraph, CgrError> {
    let body = text.strip_suffix('\n').ok_or(CgrError::Syntax {
        line: text.lines().count().max(1),
        msg: "missing final newline".into(),
    })?;
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or("");
    let hdr = fields(header, 2, 1)?;
    let (n, r) = (hdr[0], hdr[1]);
    let mut triples = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut expect = (0usize, 1usize);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let f = fields(line, 3, line_no)?;
        if expect.0 + 1 >= n.max(1) || (f[0], f[1]) != expect {
            return Err(CgrError::Order {
                line: line_no,
                u: expect.0,
                v: expect.1,
            });
        }
        triples.push((f[0], f[1], f[2]));
        expect = if expect.1 + 1 < n {
            (expect.0, expect.1 + 1)
        } else {
            (expect.0 + 1, expect.0 + 2)
        };
    }
    let g = ColoredCompleteGraph::new(n, r, &triples)?;
    if write_cgr(&g) != text {
        return Err(CgrError::NonCanonical);
    }
    Ok(g)
}
