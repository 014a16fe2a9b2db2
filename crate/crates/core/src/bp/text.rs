//! Branching program file format.
//!
//! ```text
//! var x1            # optional declarations
//! guess y1
//! start r
//! node r x1
//! edge r 0 f
//! edge r 1 t
//! sink f 0
//! sink t 1
//! ```
//!
//! Statements may come in any order. Without `var`/`guess` lines every read
//! variable is an actual variable, in name order. With them, every read
//! variable must be declared.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{BpNode, BpNodeKind, BranchingProgram};
use crate::text::{is_valid_name, lines, parse_bit, Line, ParseError, ParseErrorKind, Token};

pub fn parse_bp(text: &str) -> Result<BranchingProgram, ParseError> {
    let mut actual_vars: Vec<String> = Vec::new();
    let mut guess_vars: Vec<String> = Vec::new();
    let mut declared_any = false;
    let mut nodes: Vec<BpNode> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    // resolved once every node is known
    let mut edges: Vec<(Line<'_>, bool)> = Vec::new();
    let mut start: Option<Line<'_>> = None;
    let mut read_lines: Vec<(usize, usize)> = Vec::new();

    for line in lines(text) {
        let head = line.tokens[0];
        match head.text {
            "var" | "guess" => {
                line.expect_len(2, &format!("{} NAME", head.text))?;
                let name = line.tokens[1];
                check_name(&line, name)?;
                if actual_vars.iter().chain(&guess_vars).any(|v| v == name.text) {
                    return Err(line.error(
                        name.column,
                        ParseErrorKind::DuplicateVariable(name.text.into()),
                    ));
                }
                declared_any = true;
                if head.text == "var" {
                    actual_vars.push(name.text.into());
                } else {
                    guess_vars.push(name.text.into());
                }
            }
            "start" => {
                line.expect_len(2, "start ID")?;
                if start.is_some() {
                    return Err(line.syntax(head.column, "second `start` line"));
                }
                start = Some(line);
            }
            "node" | "sink" => {
                let usage = if head.text == "node" { "node ID VAR" } else { "sink ID 0|1" };
                line.expect_len(3, usage)?;
                let id = line.tokens[1];
                check_name(&line, id)?;
                if ids.contains_key(id.text) {
                    return Err(line.error(id.column, ParseErrorKind::DuplicateId(id.text.into())));
                }
                let kind = if head.text == "node" {
                    let var = line.tokens[2];
                    check_name(&line, var)?;
                    read_lines.push((nodes.len(), line.number));
                    BpNodeKind::Read {
                        var: var.text.into(),
                        edges: Vec::new(),
                    }
                } else {
                    BpNodeKind::Sink(parse_bit(&line.tokens[2], &line)?)
                };
                ids.insert(id.text.into(), nodes.len());
                nodes.push(BpNode {
                    name: id.text.into(),
                    kind,
                });
            }
            "edge" => {
                line.expect_len(4, "edge FROM 0|1 TO")?;
                let label = parse_bit(&line.tokens[2], &line)?;
                edges.push((line, label));
            }
            other => {
                return Err(line.syntax(head.column, format!("unknown statement `{other}`")));
            }
        }
    }

    for (line, label) in &edges {
        let from = lookup(line, &ids, line.tokens[1])?;
        let to = lookup(line, &ids, line.tokens[3])?;
        match &mut nodes[from].kind {
            BpNodeKind::Read { edges, .. } => edges.push((*label, to)),
            BpNodeKind::Sink(_) => {
                return Err(line.syntax(line.tokens[1].column, "a sink has no outgoing edges"));
            }
        }
    }
    let start_line = start.ok_or(ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::Missing("start"),
    })?;
    let start = lookup(&start_line, &ids, start_line.tokens[1])?;

    if declared_any {
        for &(id, line) in &read_lines {
            let BpNodeKind::Read { var, .. } = &nodes[id].kind else { unreachable!() };
            if !actual_vars.iter().chain(&guess_vars).any(|v| v == var) {
                return Err(ParseError {
                    line,
                    column: 1,
                    kind: ParseErrorKind::UndeclaredVariable(var.clone()),
                });
            }
        }
    } else {
        let read: BTreeSet<&String> = nodes
            .iter()
            .filter_map(|n| match &n.kind {
                BpNodeKind::Read { var, .. } => Some(var),
                BpNodeKind::Sink(_) => None,
            })
            .collect();
        actual_vars = read.into_iter().cloned().collect();
    }

    BranchingProgram::new(nodes, start, actual_vars, guess_vars).map_err(|e| ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::Invalid(e.to_string()),
    })
}

fn check_name(line: &Line<'_>, token: Token<'_>) -> Result<(), ParseError> {
    if is_valid_name(token.text) {
        Ok(())
    } else {
        Err(line.syntax(token.column, format!("invalid name `{}`", token.text)))
    }
}

fn lookup(line: &Line<'_>, ids: &HashMap<String, usize>, token: Token<'_>) -> Result<usize, ParseError> {
    ids.get(token.text)
        .copied()
        .ok_or_else(|| line.error(token.column, ParseErrorKind::UnknownVertex(token.text.into())))
}

/// Writes declarations, `start`, then each node followed by its edges.
pub(super) fn write_bp(bp: &BranchingProgram) -> String {
    let mut out = String::new();
    for v in bp.actual_vars() {
        let _ = writeln!(out, "var {v}");
    }
    for v in bp.guess_vars() {
        let _ = writeln!(out, "guess {v}");
    }
    let _ = writeln!(out, "start {}", bp.node(bp.start()).name);
    for node in bp.nodes() {
        match &node.kind {
            BpNodeKind::Sink(bit) => {
                let _ = writeln!(out, "sink {} {}", node.name, u8::from(*bit));
            }
            BpNodeKind::Read { var, edges } => {
                let _ = writeln!(out, "node {} {var}", node.name);
                for &(label, t) in edges {
                    let _ = writeln!(out, "edge {} {} {}", node.name, u8::from(label), bp.node(t).name);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::EvalMode;

    #[test]
    fn parse_without_declarations() {
        let bp = parse_bp("start r\nnode r x1\nedge r 0 f\nedge r 1 t\nsink f 0\nsink t 1\n").unwrap();
        assert_eq!(bp.actual_vars(), ["x1"]);
        assert_eq!(bp.size(), 3);
        assert!(bp.evaluate(&"x1=1".parse().unwrap(), EvalMode::Strict).unwrap());
    }

    #[test]
    fn round_trip() {
        let text = "var x\nguess y\nstart a\nnode a y\nedge a 0 b\nedge a 1 b\nnode b x\nedge b 1 t\nsink t 1\n";
        let bp = parse_bp(text).unwrap();
        assert_eq!(bp.to_text(), text);
        assert_eq!(parse_bp(&bp.to_text()).unwrap(), bp);
    }

    #[test]
    fn errors() {
        let e = parse_bp("start r\nnode r x\nedge r 0 q\nsink t 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 10));
        let e = parse_bp("var x\nstart r\nnode r z\nedge r 1 t\nsink t 1\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredVariable("z".into()));
        let e = parse_bp("node r x\nedge r 1 r\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Missing("start"));
        let e = parse_bp("start r\nsink r 2\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));
    }
}
