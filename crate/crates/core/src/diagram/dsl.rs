//! Line-oriented text formats for diagrams, frames and graphs.
//!
//! ```text
//! # reflexive successor
//! points 2
//! edge x0 -a-> x1
//! edge x1 -a-> x1
//! ```
//!
//! Graphs use `graph <n>` and `edge v<i> -- v<j>`. `#` starts a comment
//! anywhere on a line. An optional `root x0` line is accepted for diagrams;
//! naming any other root is an error.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{is_identifier, Diagram, Edge, Frame, Label};
use crate::constructions::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// A parsed value together with the non-fatal warnings produced on the way.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ParseWarning>,
}

struct Cursor<'a> {
    line_no: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line_no: usize, text: &'a str) -> Self {
        Cursor { line_no, text, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line_no,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn keyword(&mut self) -> Result<&'a str, ParseError> {
        self.word().ok_or_else(|| self.error("expected a keyword"))
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        self.pos += len;
        rest[..len].parse().map_err(|_| {
            self.pos = start;
            self.error("number out of range")
        })
    }

    /// A point reference such as `x3` or `v3`.
    fn point(&mut self, prefix: char) -> Result<usize, ParseError> {
        self.skip_ws();
        if !self.text[self.pos..].starts_with(prefix) {
            return Err(self.error(format!("expected a point `{prefix}<index>`")));
        }
        self.pos += 1;
        self.number()
    }

    fn literal(&mut self, lit: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{lit}`")))
        }
    }

    /// A labelled arrow `-label->`.
    fn arrow(&mut self) -> Result<Label, ParseError> {
        self.skip_ws();
        if !self.text[self.pos..].starts_with('-') {
            return Err(self.error("expected an arrow `-<label>->`"));
        }
        self.pos += 1;
        let start = self.pos;
        let rest = &self.text[self.pos..];
        let len = rest.find("->").ok_or_else(|| self.error("unterminated arrow"))?;
        let name = &rest[..len];
        if !is_identifier(name) {
            return Err(self.error(format!("invalid label `{name}`")));
        }
        self.pos = start + len + 2;
        Ok(Label::new(name).expect("checked identifier"))
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn parse_labelled(text: &str, header: &str) -> Result<Parsed<(usize, Vec<Edge>)>, ParseError> {
    let mut size: Option<usize> = None;
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen: BTreeSet<Edge> = BTreeSet::new();
    let mut warnings = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let mut cur = Cursor::new(line_no, strip_comment(raw));
        if cur.at_end() {
            continue;
        }
        let kw = cur.keyword()?;
        match kw {
            k if k == header => {
                if size.is_some() {
                    return Err(cur.error(format!("duplicate `{header}` header")));
                }
                let n = cur.number()?;
                if n == 0 {
                    return Err(cur.error("at least one point is required"));
                }
                cur.expect_end()?;
                size = Some(n);
            }
            "root" => {
                let p = cur.point('x')?;
                if p != 0 {
                    return Err(cur.error("the root is always x0"));
                }
                cur.expect_end()?;
            }
            "edge" => {
                let n = size.ok_or_else(|| cur.error(format!("`edge` before `{header}` header")))?;
                let src = cur.point('x')?;
                if src >= n {
                    return Err(cur.error(format!("dangling point reference x{src}")));
                }
                let label = cur.arrow()?;
                let dst = cur.point('x')?;
                if dst >= n {
                    return Err(cur.error(format!("dangling point reference x{dst}")));
                }
                cur.expect_end()?;
                let e = Edge::new(src, dst, label);
                if seen.insert(e.clone()) {
                    edges.push(e);
                } else {
                    warnings.push(ParseWarning {
                        line: line_no,
                        message: format!("duplicate edge x{src} -{}-> x{dst} ignored", e.label),
                    });
                }
            }
            other => return Err(cur.error(format!("unknown keyword `{other}`"))),
        }
    }
    let size = size.ok_or(ParseError {
        line: last_line.max(1),
        column: 1,
        message: format!("missing `{header}` header"),
    })?;
    Ok(Parsed { value: (size, edges), warnings })
}

/// Parses the diagram DSL. Duplicate edges are dropped with a warning.
pub fn parse_diagram(text: &str) -> Result<Parsed<Diagram>, ParseError> {
    let Parsed { value: (n, edges), warnings } = parse_labelled(text, "points")?;
    let value = Diagram::new(n, edges).expect("points and edges validated while parsing");
    Ok(Parsed { value, warnings })
}

/// Parses a frame written in the diagram DSL (the root is ignored).
pub fn parse_frame(text: &str) -> Result<Parsed<Frame>, ParseError> {
    let Parsed { value: (n, edges), warnings } = parse_labelled(text, "points")?;
    let value = Frame::new(n, edges).expect("points and edges validated while parsing");
    Ok(Parsed { value, warnings })
}

/// Parses the graph DSL: `graph <n>` then `edge v<i> -- v<j>`.
pub fn parse_graph(text: &str) -> Result<Parsed<Graph>, ParseError> {
    let mut size: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut cur = Cursor::new(line_no, strip_comment(raw));
        if cur.at_end() {
            continue;
        }
        match cur.keyword()? {
            "graph" => {
                if size.is_some() {
                    return Err(cur.error("duplicate `graph` header"));
                }
                size = Some(cur.number()?);
                cur.expect_end()?;
            }
            "edge" => {
                let n = size.ok_or_else(|| cur.error("`edge` before `graph` header"))?;
                let a = cur.point('v')?;
                if a >= n {
                    return Err(cur.error(format!("dangling vertex reference v{a}")));
                }
                cur.literal("--")?;
                let b = cur.point('v')?;
                if b >= n {
                    return Err(cur.error(format!("dangling vertex reference v{b}")));
                }
                cur.expect_end()?;
                if seen.insert((a.min(b), a.max(b))) {
                    edges.push((a, b));
                } else {
                    warnings.push(ParseWarning {
                        line: line_no,
                        message: format!("duplicate edge v{a} -- v{b} ignored"),
                    });
                }
            }
            other => return Err(cur.error(format!("unknown keyword `{other}`"))),
        }
    }
    let n = size.ok_or(ParseError { line: 1, column: 1, message: "missing `graph` header".into() })?;
    let value = Graph::new(n, edges).expect("vertices validated while parsing");
    Ok(Parsed { value, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::edge;

    #[test]
    fn parses_symmetric_diagram() {
        let d = parse_diagram("points 2\nedge x0 -a-> x1\nedge x1 -a-> x0\n").unwrap().value;
        assert_eq!(d.point_count(), 2);
        assert_eq!(d.edges().iter().cloned().collect::<Vec<_>>(), vec![edge(0, 1, "a"), edge(1, 0, "a")]);
    }

    #[test]
    fn parses_refsucc_with_comments() {
        let d = parse_diagram("# refsucc\npoints 2 # two\nedge x0 -a-> x1\n\nedge x1 -a-> x1").unwrap().value;
        assert!(d.has_edge(1, 1, &Label::new("a").unwrap()));
        assert_eq!(d.edges().len(), 2);
    }

    #[test]
    fn single_root() {
        let d = parse_diagram("points 1").unwrap().value;
        assert_eq!(d.point_count(), 1);
        assert!(d.edges().is_empty());
    }

    #[test]
    fn duplicate_edges_warn() {
        let p = parse_diagram("points 2\nedge x0 -a-> x1\nedge x0 -a-> x1\nedge x0 -b-> x1").unwrap();
        assert_eq!(p.value.edges().len(), 2);
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.warnings[0].line, 3);
    }

    #[test]
    fn reports_positions() {
        let err = parse_diagram("points 2\nedge x0 -a-> x5").unwrap_err();
        assert_eq!((err.line, err.message.contains("dangling")), (2, true));
        let err = parse_diagram("points 2\nedge x0 a x1").unwrap_err();
        assert_eq!((err.line, err.column), (2, 9));
        assert!(parse_diagram("edge x0 -a-> x1").is_err());
        assert!(parse_diagram("points 2\nroot x1").is_err());
        assert!(parse_diagram("points 2\nroot x0").is_ok());
        assert!(parse_diagram("points 0").is_err());
        assert!(parse_diagram("points 2\nedge x0 -1a-> x1").is_err());
        assert!(parse_diagram("points 2\nfoo").is_err());
    }

    #[test]
    fn parses_graphs_with_loops() {
        let g = parse_graph("graph 3\nedge v0 -- v1\nedge v1 -- v1\nedge v1 -- v0").unwrap();
        assert_eq!(g.warnings.len(), 1);
        assert!(g.value.adjacent(1, 0));
        assert!(g.value.has_loop());
        assert!(parse_graph("graph 2\nedge v0 -- v2").is_err());
    }

    #[test]
    fn dsl_round_trip() {
        let src = "points 3\nedge x0 -a-> x1\nedge x1 -b-> x2\nedge x2 -a-> x1\n";
        let d = parse_diagram(src).unwrap().value;
        assert_eq!(parse_diagram(&d.to_dsl()).unwrap().value, d);
    }
}
