//! Text formats.
//!
//! `BIGRAPH v1`:
//!
//! ```text
//! BIGRAPH v1
//! nl=<int> nr=<int>
//! <u> <v>
//! ...
//! ```
//!
//! One `u v` pair per line, ASCII decimal, single space, LF endings. Repeated
//! lines are multi-edges; line order is the edge order. `GRAPH v1` is the same
//! with header `n=<int> d=<int>` and unordered vertex pairs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::bigraph::{BipartiteMultigraph, GraphError};
use crate::spectral::{RegularGraph, SpectralError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected `{expected}`")]
    MalformedHeader { line: usize, expected: &'static str },
    #[error("line {line}: malformed edge line {content:?}")]
    MalformedEdge { line: usize, content: String },
    #[error("line {line}: index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        bound: usize,
    },
    #[error("truncated input: {0}")]
    Truncated(&'static str),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

struct Lines<'a> {
    lines: std::iter::Enumerate<std::str::Split<'a, char>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Result<Self, ParseError> {
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(ParseError::Truncated("last line has no LF terminator"));
        }
        let body = text.strip_suffix('\n').unwrap_or(text);
        Ok(Lines {
            lines: body.split('\n').enumerate(),
        })
    }

    fn header(&mut self, expected: &'static str) -> Result<(usize, &'a str), ParseError> {
        match self.lines.next() {
            Some((_, "")) | None => Err(ParseError::Truncated("missing header")),
            Some((i, l)) => Ok((i + 1, l)),
        }
        .and_then(|(line, l)| {
            if l.ends_with('\r') {
                Err(ParseError::MalformedHeader { line, expected })
            } else {
                Ok((line, l))
            }
        })
    }
}

fn parse_key_values<'a>(
    text: &'a str,
    keys: [&'static str; 2],
    line: usize,
    expected: &'static str,
) -> Result<[usize; 2], ParseError> {
    let bad = || ParseError::MalformedHeader { line, expected };
    let mut parts = text.split(' ');
    let mut out = [0usize; 2];
    for (slot, key) in out.iter_mut().zip(keys) {
        let part = parts.next().ok_or_else(bad)?;
        let value = part
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(bad)?;
        *slot = parse_decimal(value).ok_or_else(bad)?;
    }
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(out)
}

fn parse_decimal(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_pairs(
    lines: Lines<'_>,
    bounds: (usize, usize),
) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut pairs = Vec::new();
    for (i, content) in lines.lines {
        let line = i + 1;
        let mut parts = content.split(' ');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            if !content.is_empty() && !content.contains(' ') && parse_decimal(content).is_some() {
                return Err(ParseError::Truncated("edge line with a single index"));
            }
            return Err(ParseError::MalformedEdge {
                line,
                content: content.to_string(),
            });
        };
        let (Some(u), Some(v)) = (parse_decimal(a), parse_decimal(b)) else {
            return Err(ParseError::MalformedEdge {
                line,
                content: content.to_string(),
            });
        };
        if u >= bounds.0 {
            return Err(ParseError::IndexOutOfRange {
                line,
                index: u,
                bound: bounds.0,
            });
        }
        if v >= bounds.1 {
            return Err(ParseError::IndexOutOfRange {
                line,
                index: v,
                bound: bounds.1,
            });
        }
        pairs.push((u, v));
    }
    Ok(pairs)
}

pub fn parse_bigraph(text: &str) -> Result<BipartiteMultigraph, ParseError> {
    const MAGIC: &str = "BIGRAPH v1";
    const SIZES: &str = "nl=<int> nr=<int>";
    let mut lines = Lines::new(text)?;
    let (line, magic) = lines.header(MAGIC)?;
    if magic != MAGIC {
        return Err(ParseError::MalformedHeader {
            line,
            expected: MAGIC,
        });
    }
    let (line, sizes) = lines.header(SIZES)?;
    let [nl, nr] = parse_key_values(sizes, ["nl", "nr"], line, SIZES)?;
    let edges = parse_pairs(lines, (nl, nr))?;
    BipartiteMultigraph::new(nl, nr, edges)
        .map_err(|e: GraphError| ParseError::InvalidGraph(e.to_string()))
}

pub fn format_bigraph(g: &BipartiteMultigraph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.n_edges());
    out.push_str("BIGRAPH v1\n");
    let _ = writeln!(out, "nl={} nr={}", g.n_left(), g.n_right());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_regular_graph(text: &str) -> Result<RegularGraph, ParseError> {
    const MAGIC: &str = "GRAPH v1";
    const SIZES: &str = "n=<int> d=<int>";
    let mut lines = Lines::new(text)?;
    let (line, magic) = lines.header(MAGIC)?;
    if magic != MAGIC {
        return Err(ParseError::MalformedHeader {
            line,
            expected: MAGIC,
        });
    }
    let (line, sizes) = lines.header(SIZES)?;
    let [n, d] = parse_key_values(sizes, ["n", "d"], line, SIZES)?;
    let edges = parse_pairs(lines, (n, n))?;
    RegularGraph::new(n, d, edges)
        .map_err(|e: SpectralError| ParseError::InvalidGraph(e.to_string()))
}

pub fn format_regular_graph(g: &RegularGraph) -> String {
    let mut out = String::new();
    out.push_str("GRAPH v1\n");
    let _ = writeln!(out, "n={} d={}", g.n(), g.degree());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<BipartiteMultigraph, IoError> {
    let path = path.as_ref();
    parse_bigraph(&read_text(path)?).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_graph(g: &BipartiteMultigraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_text(path.as_ref(), &format_bigraph(g))
}

pub fn read_regular_graph(path: impl AsRef<Path>) -> Result<RegularGraph, IoError> {
    let path = path.as_ref();
    parse_regular_graph(&read_text(path)?).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_regular_graph(g: &RegularGraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_text(path.as_ref(), &format_regular_graph(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::complete_bipartite;

    const C4: &str = "BIGRAPH v1\nnl=2 nr=2\n0 0\n0 1\n1 0\n1 1\n";

    #[test]
    fn c4_file() {
        let g = parse_bigraph(C4).unwrap();
        assert_eq!(g.edges(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(format_bigraph(&g), C4);
    }

    #[test]
    fn empty_graph() {
        let g = parse_bigraph("BIGRAPH v1\nnl=0 nr=0\n").unwrap();
        assert_eq!((g.n_left(), g.n_right(), g.n_edges()), (0, 0, 0));
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            parse_bigraph("BIGRAPH v1\nnl=2 nr=2\n2 0\n"),
            Err(ParseError::IndexOutOfRange {
                line: 3,
                index: 2,
                bound: 2
            })
        ));
        assert!(matches!(
            parse_bigraph("BIGRAPH v2\nnl=2 nr=2\n"),
            Err(ParseError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_bigraph("BIGRAPH v1\nnl=2,nr=2\n"),
            Err(ParseError::MalformedHeader { line: 2, .. })
        ));
        assert!(matches!(
            parse_bigraph("BIGRAPH v1\n"),
            Err(ParseError::Truncated(_))
        ));
        assert!(matches!(parse_bigraph(""), Err(ParseError::Truncated(_))));
        assert!(matches!(
            parse_bigraph("BIGRAPH v1\nnl=2 nr=2\n0 0\n1"),
            Err(ParseError::Truncated(_))
        ));
        assert!(matches!(
            parse_bigraph("BIGRAPH v1\nnl=2 nr=2\n0 0\n1\n"),
            Err(ParseError::Truncated(_))
        ));
        assert!(matches!(
            parse_bigraph("BIGRAPH v1\nnl=2 nr=2\n0  0\n"),
            Err(ParseError::MalformedEdge { line: 3, .. })
        ));
        assert!(matches!(
            parse_bigraph("BIGRAPH v1\nnl=2 nr=2\n-1 0\n"),
            Err(ParseError::MalformedEdge { .. })
        ));
    }

    #[test]
    fn multi_edges_survive_round_trip() {
        let g = BipartiteMultigraph::new(2, 1, vec![(1, 0), (1, 0), (0, 0)]).unwrap();
        let back = parse_bigraph(&format_bigraph(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn regular_graph_format() {
        let text = "GRAPH v1\nn=3 d=2\n0 1\n1 2\n2 0\n";
        let g = parse_regular_graph(text).unwrap();
        assert_eq!(g.degree(), 2);
        assert_eq!(format_regular_graph(&g), text);
        assert!(matches!(
            parse_regular_graph("GRAPH v1\nn=3 d=3\n0 1\n1 2\n2 0\n"),
            Err(ParseError::InvalidGraph(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k32.bg");
        let g = complete_bipartite(3, 2);
        write_graph(&g, &path).unwrap();
        assert_eq!(read_graph(&path).unwrap(), g);
        assert!(matches!(
            read_graph(dir.path().join("missing")),
            Err(IoError::Io { .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn write_then_read_is_identity(
                nl in 1usize..8,
                nr in 1usize..8,
                raw in proptest::collection::vec((0usize..64, 0usize..64), 0..40),
            ) {
                let edges: Vec<_> = raw.into_iter().map(|(u, v)| (u % nl, v % nr)).collect();
                let g = BipartiteMultigraph::new(nl, nr, edges).unwrap();
                let back = parse_bigraph(&format_bigraph(&g)).unwrap();
                prop_assert!(back.same_port_structure(&g));
                prop_assert_eq!(back, g);
            }
        }
    }
}
