//! Graph and trace formats.
//!
//! ```text
//! vertex a          # graph
//! vertex z
//! edge a z
//! sink z
//!
//! B+ a              # trace
//! B+ z
//! B- a
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Move, PebbleGraph, Pebbling};
use crate::text::{is_valid_name, lines, Line, ParseError, ParseErrorKind, Token};

pub fn parse_graph(text: &str) -> Result<PebbleGraph, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edge_lines: Vec<Line<'_>> = Vec::new();
    let mut sink_line: Option<Line<'_>> = None;
    for line in lines(text) {
        let head = line.tokens[0];
        match head.text {
            "vertex" => {
                line.expect_len(2, "vertex ID")?;
                let id = line.tokens[1];
                if !is_valid_name(id.text) {
                    return Err(line.syntax(id.column, format!("invalid name `{}`", id.text)));
                }
                if index.insert(id.text.into(), names.len()).is_some() {
                    return Err(line.error(id.column, ParseErrorKind::DuplicateId(id.text.into())));
                }
                names.push(id.text.into());
            }
            "edge" => {
                line.expect_len(3, "edge FROM TO")?;
                edge_lines.push(line);
            }
            "sink" => {
                line.expect_len(2, "sink ID")?;
                if sink_line.is_some() {
                    return Err(line.syntax(head.column, "second `sink` line"));
                }
                sink_line = Some(line);
            }
            other => return Err(line.syntax(head.column, format!("unknown statement `{other}`"))),
        }
    }
    let mut edges = Vec::with_capacity(edge_lines.len());
    for line in &edge_lines {
        let from = lookup(line, &index, line.tokens[1])?;
        let to = lookup(line, &index, line.tokens[2])?;
        edges.push((from, to));
    }
    let sink_line = sink_line.ok_or(ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::Missing("sink"),
    })?;
    let sink = lookup(&sink_line, &index, sink_line.tokens[1])?;
    PebbleGraph::new(names, &edges, sink).map_err(|e| ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::Invalid(e.to_string()),
    })
}

/// Parses a trace over the vertices of `g`.
pub fn parse_trace(text: &str, g: &PebbleGraph) -> Result<Pebbling, ParseError> {
    let index: HashMap<&str, usize> = g.names().iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut moves = Vec::new();
    for line in lines(text) {
        line.expect_len(2, "B+|B-|W+|W- VERTEX")?;
        let v = *index.get(line.tokens[1].text).ok_or_else(|| {
            line.error(
                line.tokens[1].column,
                ParseErrorKind::UnknownVertex(line.tokens[1].text.into()),
            )
        })?;
        let head = line.tokens[0];
        moves.push(match head.text {
            "B+" => Move::PlaceBlack(v),
            "B-" => Move::RemoveBlack(v),
            "W+" => Move::PlaceWhite(v),
            "W-" => Move::RemoveWhite(v),
            other => {
                return Err(line.syntax(
                    head.column,
                    format!("unknown move `{other}`, expected B+, B-, W+ or W-"),
                ))
            }
        });
    }
    Ok(Pebbling::new(moves))
}

fn lookup(line: &Line<'_>, index: &HashMap<String, usize>, token: Token<'_>) -> Result<usize, ParseError> {
    index
        .get(token.text)
        .copied()
        .ok_or_else(|| line.error(token.column, ParseErrorKind::UnknownVertex(token.text.into())))
}

/// Vertices in storage order, then each vertex's incoming edges, then the sink.
pub(super) fn write_graph(g: &PebbleGraph) -> String {
    let mut out = String::new();
    for name in g.names() {
        let _ = writeln!(out, "vertex {name}");
    }
    for v in 0..g.len() {
        for &u in g.preds(v) {
            let _ = writeln!(out, "edge {} {}", g.name(u), g.name(v));
        }
    }
    let _ = writeln!(out, "sink {}", g.name(g.sink()));
    out
}

pub(super) fn write_trace(g: &PebbleGraph, p: &Pebbling) -> String {
    let mut out = String::new();
    for m in &p.moves {
        let _ = writeln!(out, "{} {}", m.symbol(), g.name(m.vertex()));
    }
    out
}
