//! Circuit file format.
//!
//! ```text
//! var x1
//! guess y1
//! g1 = input x1
//! g2 = guess y1
//! n1 = and g1 g2
//! output n1
//! layer 1: n1        # layered form only
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Circuit, CircuitError, Gate, LayeredCircuit, Node, NodeId};
use crate::text::{is_valid_name, lines, Line, ParseError, ParseErrorKind, Token};

struct Parsed {
    circuit: Circuit,
    /// (K, members, line number) for each `layer K:` line.
    layers: Vec<(usize, Vec<NodeId>, usize)>,
}

/// Parses the circuit format. `layer` trailer lines are syntax-checked and
/// then ignored; use [`parse_layered`] to keep them.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    parse(text).map(|p| p.circuit)
}

/// Parses the layered form: a circuit followed by `layer K: ID ...` lines
/// that must describe a valid layering of it.
pub fn parse_layered(text: &str) -> Result<LayeredCircuit, ParseError> {
    let Parsed { circuit, layers } = parse(text)?;
    let mut ordered: Vec<Option<Vec<NodeId>>> = Vec::new();
    for (k, ids, line) in layers {
        let err = |message: String| ParseError {
            line,
            column: 7,
            kind: ParseErrorKind::Syntax(message),
        };
        if k == 0 {
            return Err(err("layers are numbered from 1".into()));
        }
        if ordered.len() < k {
            ordered.resize(k, None);
        }
        if ordered[k - 1].replace(ids).is_some() {
            return Err(err(format!("layer {k} is listed twice")));
        }
    }
    let mut layers = Vec::with_capacity(ordered.len());
    for (k, ids) in ordered.into_iter().enumerate() {
        layers.push(ids.ok_or_else(|| ParseError {
            line: 0,
            column: 0,
            kind: ParseErrorKind::Invalid(format!("layer {} is missing", k + 1)),
        })?);
    }
    if layers.is_empty() && circuit.nodes().iter().any(|n| n.gate.is_gate()) {
        return Err(ParseError {
            line: 0,
            column: 0,
            kind: ParseErrorKind::Missing("layer"),
        });
    }
    LayeredCircuit::from_parts(circuit, layers).map_err(|e| ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::Invalid(e.to_string()),
    })
}

fn parse(text: &str) -> Result<Parsed, ParseError> {
    let mut actual_vars = Vec::new();
    let mut guess_vars = Vec::new();
    // name -> (is_guess, index)
    let mut vars: HashMap<String, (bool, usize)> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut guess_labeled: Vec<bool> = Vec::new();
    let mut output: Option<NodeId> = None;
    let mut layer_lines = Vec::new();

    for line in lines(text) {
        let head = line.tokens[0];
        match head.text {
            "var" | "guess" if line.tokens.get(1).map(|t| t.text) != Some("=") => {
                line.expect_len(2, &format!("{} NAME", head.text))?;
                let name = line.tokens[1];
                check_name(&line, name)?;
                if vars.contains_key(name.text) {
                    return Err(line.error(
                        name.column,
                        ParseErrorKind::DuplicateVariable(name.text.into()),
                    ));
                }
                if head.text == "var" {
                    vars.insert(name.text.into(), (false, actual_vars.len()));
                    actual_vars.push(name.text.to_string());
                } else {
                    vars.insert(name.text.into(), (true, guess_vars.len()));
                    guess_vars.push(name.text.to_string());
                    guess_labeled.push(false);
                }
            }
            "output" if line.tokens.get(1).map(|t| t.text) != Some("=") => {
                line.expect_len(2, "output ID")?;
                if output.is_some() {
                    return Err(line.syntax(head.column, "second `output` line"));
                }
                output = Some(lookup(&line, &ids, line.tokens[1])?);
            }
            "layer" if line.tokens.get(1).map(|t| t.text) != Some("=") => {
                let Some(label) = line.tokens.get(1) else {
                    return Err(line.error_at_end(ParseErrorKind::Syntax(
                        "expected `layer K: ID ...`".into(),
                    )));
                };
                let k = label
                    .text
                    .strip_suffix(':')
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| line.syntax(label.column, "expected `K:` after `layer`"))?;
                let members = line.tokens[2..]
                    .iter()
                    .map(|&t| lookup(&line, &ids, t))
                    .collect::<Result<Vec<_>, _>>()?;
                layer_lines.push((k, members, line.number));
            }
            _ => {
                if line.tokens.len() < 3 || line.tokens[1].text != "=" {
                    return Err(line.syntax(
                        head.column,
                        format!("unrecognized statement starting with `{}`", head.text),
                    ));
                }
                check_name(&line, head)?;
                if ids.contains_key(head.text) {
                    return Err(line.error(head.column, ParseErrorKind::DuplicateId(head.text.into())));
                }
                let kind = line.tokens[2];
                let args = &line.tokens[3..];
                let arity = |n: usize, usage: &str| line.expect_len(3 + n, usage);
                let gate = match kind.text {
                    "input" | "guess" => {
                        arity(1, &format!("ID = {} NAME", kind.text))?;
                        let name = args[0];
                        let want_guess = kind.text == "guess";
                        match vars.get(name.text) {
                            Some(&(true, i)) if want_guess => {
                                if std::mem::replace(&mut guess_labeled[i], true) {
                                    return Err(line.error(
                                        name.column,
                                        ParseErrorKind::DuplicateGuess(name.text.into()),
                                    ));
                                }
                                Gate::Guess(i)
                            }
                            Some(&(false, i)) if !want_guess => Gate::Input(i),
                            Some(_) => {
                                return Err(line.syntax(
                                    name.column,
                                    format!(
                                        "`{}` is declared as {} variable",
                                        name.text,
                                        if want_guess { "an actual" } else { "a guess" }
                                    ),
                                ))
                            }
                            None => {
                                return Err(line.error(
                                    name.column,
                                    ParseErrorKind::UndeclaredVariable(name.text.into()),
                                ))
                            }
                        }
                    }
                    "const" => {
                        arity(1, "ID = const 0|1")?;
                        Gate::Const(crate::text::parse_bit(&args[0], &line)?)
                    }
                    "and" | "or" => {
                        arity(2, &format!("ID = {} ID ID", kind.text))?;
                        let a = lookup(&line, &ids, args[0])?;
                        let b = lookup(&line, &ids, args[1])?;
                        if kind.text == "and" {
                            Gate::And(a, b)
                        } else {
                            Gate::Or(a, b)
                        }
                    }
                    "not" | "copy" => {
                        arity(1, &format!("ID = {} ID", kind.text))?;
                        let a = lookup(&line, &ids, args[0])?;
                        if kind.text == "not" {
                            Gate::Not(a)
                        } else {
                            Gate::Copy(a)
                        }
                    }
                    other => {
                        return Err(line.syntax(kind.column, format!("unknown node kind `{other}`")))
                    }
                };
                ids.insert(head.text.to_string(), nodes.len());
                nodes.push(Node {
                    name: head.text.to_string(),
                    gate,
                });
            }
        }
    }
    let output = output.ok_or(ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::MissingOutput,
    })?;
    let circuit = Circuit::new(nodes, output, actual_vars, guess_vars).map_err(|e| ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::Invalid(e.to_string()),
    })?;
    Ok(Parsed {
        circuit,
        layers: layer_lines,
    })
}

fn check_name(line: &Line<'_>, token: Token<'_>) -> Result<(), ParseError> {
    if is_valid_name(token.text) && !matches!(token.text, "var" | "guess" | "output" | "layer") {
        Ok(())
    } else {
        Err(line.syntax(token.column, format!("invalid name `{}`", token.text)))
    }
}

fn lookup(
    line: &Line<'_>,
    ids: &HashMap<String, NodeId>,
    token: Token<'_>,
) -> Result<NodeId, ParseError> {
    ids.get(token.text).copied().ok_or_else(|| {
        line.error(
            token.column,
            ParseErrorKind::ForwardReference(token.text.into()),
        )
    })
}

pub(super) fn write_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    for v in c.actual_vars() {
        writeln!(out, "var {v}").unwrap();
    }
    for v in c.guess_vars() {
        writeln!(out, "guess {v}").unwrap();
    }
    let name = |id: NodeId| c.node(id).name.as_str();
    for node in c.nodes() {
        let rhs = match node.gate {
            Gate::Input(i) => format!("input {}", c.actual_vars()[i]),
            Gate::Guess(i) => format!("guess {}", c.guess_vars()[i]),
            Gate::Const(b) => format!("const {}", u8::from(b)),
            Gate::And(a, b) => format!("and {} {}", name(a), name(b)),
            Gate::Or(a, b) => format!("or {} {}", name(a), name(b)),
            Gate::Not(a) => format!("not {}", name(a)),
            Gate::Copy(a) => format!("copy {}", name(a)),
        };
        writeln!(out, "{} = {rhs}", node.name).unwrap();
    }
    writeln!(out, "output {}", name(c.output())).unwrap();
    out
}

pub(super) fn write_layers(lc: &LayeredCircuit) -> String {
    let c = lc.circuit();
    let mut out = write_circuit(c);
    for (k, layer) in lc.layers().iter().enumerate() {
        write!(out, "layer {}:", k + 1).unwrap();
        for &id in layer {
            write!(out, " {}", c.node(id).name).unwrap();
        }
        out.push('\n');
    }
    out
}

impl From<CircuitError> for ParseError {
    fn from(e: CircuitError) -> Self {
        ParseError {
            line: 0,
            column: 0,
            kind: ParseErrorKind::Invalid(e.to_string()),
        }
    }
}
