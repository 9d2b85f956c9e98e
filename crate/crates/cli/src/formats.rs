//! Plain-text formats for matrices and graphs.
//!
//! Both formats ignore blank lines and everything after `#`.
//!
//! A matrix is one row per line, entries `0`/`1`, optionally separated by
//! spaces or commas:
//!
//! ```text
//! # 2x3
//! 1 0 1
//! 0 1 1
//! ```
//!
//! A graph starts with its vertex count, followed by one `u v` edge per line:
//!
//! ```text
//! 3
//! 0 1
//! 1 2
//! ```

use graphmerge_core::{BitMat, BitVec, Graph};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("empty input")]
    Empty,
    #[error("{0}")]
    Invalid(String),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_matrix(text: &str) -> Result<BitMat, FormatError> {
    let mut rows: Vec<BitVec> = Vec::new();
    for (line, l) in content_lines(text) {
        let bits: Vec<u8> = l
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(FormatError::Syntax {
                    line,
                    msg: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<_, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != bits.len() {
                return Err(FormatError::Syntax {
                    line,
                    msg: format!("row has {} entries, expected {}", bits.len(), first.len()),
                });
            }
        }
        rows.push(BitVec::from_bits(&bits));
    }
    let cols = rows.first().ok_or(FormatError::Empty)?.len();
    Ok(BitMat::from_row_vecs(cols, rows))
}

pub fn format_matrix(m: &BitMat) -> Vec<String> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| if m.get(r, c) { '1' } else { '0' }).collect())
        .collect()
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(FormatError::Empty)?;
    let n: usize = header.parse().map_err(|_| FormatError::Syntax {
        line,
        msg: format!("expected vertex count, found {header:?}"),
    })?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let parts: Vec<&str> = l
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        let [u, v] = parts.as_slice() else {
            return Err(FormatError::Syntax {
                line,
                msg: "expected two vertex indices".into(),
            });
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| FormatError::Syntax {
                line,
                msg: format!("bad vertex {s:?}"),
            })
        };
        edges.push((parse(u)?, parse(v)?));
    }
    Graph::from_edges(n, &edges).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// `"0,2,3"` into vertex indices; the empty string is the empty set.
pub fn parse_index_list(s: &str) -> Result<Vec<usize>, FormatError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse().map_err(|_| FormatError::Syntax {
                line: 1,
                msg: format!("bad index {t:?}"),
            })
        })
        .collect()
}

pub fn bits_string(v: &BitVec) -> String {
    v.iter().map(|b| if b { '1' } else { '0' }).collect()
}
