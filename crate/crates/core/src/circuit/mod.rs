//! Fan-in-two Boolean circuits over AND/OR/NOT with actual and guess inputs.
//!
//! A [`Circuit`] stores its nodes in a topological order: every operand is
//! defined before the node that reads it. Nodes are addressed by their
//! position ([`NodeId`]) and also carry a textual name used by the file
//! format.

mod layer;
mod restrict;
mod text;

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::assignment::Assignment;
use crate::text::is_valid_name;

pub use layer::{layer, LayerError, LayeredCircuit};
pub use restrict::restrict;
pub use text::{parse_circuit, parse_layered};

/// Position of a node in [`Circuit::nodes`].
pub type NodeId = usize;

/// Default cap on guess inputs for exhaustive nondeterministic evaluation.
pub const DEFAULT_GUESS_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Reads the actual variable at this index of [`Circuit::actual_vars`].
    Input(usize),
    /// Reads the guess variable at this index of [`Circuit::guess_vars`].
    Guess(usize),
    Const(bool),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Not(NodeId),
    /// Dummy unary gate used to carry a value across layers.
    Copy(NodeId),
}

impl Gate {
    pub fn operands(&self) -> impl Iterator<Item = NodeId> {
        let pair = match *self {
            Gate::And(a, b) | Gate::Or(a, b) => [Some(a), Some(b)],
            Gate::Not(a) | Gate::Copy(a) => [Some(a), None],
            Gate::Input(_) | Gate::Guess(_) | Gate::Const(_) => [None, None],
        };
        pair.into_iter().flatten()
    }

    /// AND, OR, NOT and COPY nodes; these are the nodes that occupy layers.
    pub fn is_gate(&self) -> bool {
        matches!(self, Gate::And(..) | Gate::Or(..) | Gate::Not(_) | Gate::Copy(_))
    }

    /// Actual or guess input.
    pub fn is_input(&self) -> bool {
        matches!(self, Gate::Input(_) | Gate::Guess(_))
    }

    fn map_operands(self, mut f: impl FnMut(NodeId) -> NodeId) -> Gate {
        match self {
            Gate::And(a, b) => Gate::And(f(a), f(b)),
            Gate::Or(a, b) => Gate::Or(f(a), f(b)),
            Gate::Not(a) => Gate::Not(f(a)),
            Gate::Copy(a) => Gate::Copy(f(a)),
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub name: String,
    pub gate: Gate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("node `{node}` reads node {operand}, which is not defined before it")]
    ForwardReference { node: String, operand: NodeId },
    #[error("node `{node}` references variable index {index}, which is not declared")]
    UnknownVariable { node: String, index: usize },
    #[error("guess variable `{0}` labels more than one node")]
    DuplicateGuessNode(String),
    #[error("output node {0} does not exist")]
    MissingOutput(NodeId),
    #[error("node name `{0}` is used twice")]
    DuplicateNodeName(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("`{0}` is not an actual variable of the circuit")]
    NotAnActualVariable(String),
    #[error("the circuit has guess inputs; use nondeterministic evaluation")]
    GuessInputPresent,
    #[error("{guesses} guess inputs exceed the enumeration limit of {limit}")]
    GuessLimitExceeded { guesses: usize, limit: usize },
}

/// A Boolean circuit with actual inputs `x` and guess inputs `y`.
///
/// Invariants (checked by [`Circuit::new`]): operands precede their readers,
/// variable indices are in range, each guess variable labels at most one
/// node, node and variable names are unique, and the output exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    nodes: Vec<Node>,
    output: NodeId,
    actual_vars: Vec<String>,
    guess_vars: Vec<String>,
}

impl Circuit {
    pub fn new(
        nodes: Vec<Node>,
        output: NodeId,
        actual_vars: Vec<String>,
        guess_vars: Vec<String>,
    ) -> Result<Self, CircuitError> {
        let mut var_names = HashSet::new();
        for name in actual_vars.iter().chain(&guess_vars) {
            if !is_valid_name(name) {
                return Err(CircuitError::InvalidName(name.clone()));
            }
            if !var_names.insert(name.as_str()) {
                return Err(CircuitError::DuplicateVariable(name.clone()));
            }
        }
        let mut node_names = HashSet::new();
        let mut guess_used = vec![false; guess_vars.len()];
        for (id, node) in nodes.iter().enumerate() {
            if !is_valid_name(&node.name) {
                return Err(CircuitError::InvalidName(node.name.clone()));
            }
            if !node_names.insert(node.name.as_str()) {
                return Err(CircuitError::DuplicateNodeName(node.name.clone()));
            }
            for operand in node.gate.operands() {
                if operand >= id {
                    return Err(CircuitError::ForwardReference {
                        node: node.name.clone(),
                        operand,
                    });
                }
            }
            match node.gate {
                Gate::Input(v) if v >= actual_vars.len() => {
                    return Err(CircuitError::UnknownVariable {
                        node: node.name.clone(),
                        index: v,
                    })
                }
                Gate::Guess(v) => {
                    let slot = guess_used.get_mut(v).ok_or_else(|| CircuitError::UnknownVariable {
                        node: node.name.clone(),
                        index: v,
                    })?;
                    if std::mem::replace(slot, true) {
                        return Err(CircuitError::DuplicateGuessNode(guess_vars[v].clone()));
                    }
                }
                _ => {}
            }
        }
        if output >= nodes.len() {
            return Err(CircuitError::MissingOutput(output));
        }
        Ok(Circuit {
            nodes,
            output,
            actual_vars,
            guess_vars,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn output(&self) -> NodeId {
        self.output
    }

    pub fn actual_vars(&self) -> &[String] {
        &self.actual_vars
    }

    pub fn guess_vars(&self) -> &[String] {
        &self.guess_vars
    }

    /// Number of actual inputs, `n`.
    pub fn num_actual(&self) -> usize {
        self.actual_vars.len()
    }

    /// Number of guess inputs, `m`.
    pub fn num_guess(&self) -> usize {
        self.guess_vars.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.guess_vars.is_empty()
    }

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Size `s`: the number of AND, OR and NOT gates. COPY gates are free.
    pub fn size(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.gate, Gate::And(..) | Gate::Or(..) | Gate::Not(_)))
            .count()
    }

    pub fn copy_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.gate, Gate::Copy(_)))
            .count()
    }

    /// Membership mask of the nodes the output depends on.
    pub fn output_cone(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        live[self.output] = true;
        for id in (0..self.nodes.len()).rev() {
            if live[id] {
                for op in self.nodes[id].gate.operands() {
                    live[op] = true;
                }
            }
        }
        live
    }

    /// Gate depth of every node: inputs and constants are 0, a gate is one
    /// more than its deepest operand.
    pub fn gate_depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if node.gate.is_gate() {
                depth[id] = 1 + node.gate.operands().map(|op| depth[op]).max().unwrap_or(0);
            }
        }
        depth
    }

    /// Longest input-to-output path, counted in gates (COPY included).
    pub fn depth(&self) -> usize {
        self.gate_depths()[self.output]
    }

    /// For every actual variable, the number of input nodes labeled by it.
    pub fn read_multiplicities(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> =
            self.actual_vars.iter().map(|v| (v.clone(), 0)).collect();
        for node in &self.nodes {
            if let Gate::Input(v) = node.gate {
                *counts.get_mut(&self.actual_vars[v]).expect("declared variable") += 1;
            }
        }
        counts
    }

    /// Total number of actual-input nodes, `T`.
    pub fn input_node_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.gate, Gate::Input(_)))
            .count()
    }

    /// Values of every node. `actual` and `guess` are indexed like the
    /// variable lists.
    pub fn node_values(&self, actual: &[bool], guess: &[bool]) -> Vec<bool> {
        assert_eq!(actual.len(), self.actual_vars.len());
        assert_eq!(guess.len(), self.guess_vars.len());
        let mut val = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node.gate {
                Gate::Input(i) => actual[i],
                Gate::Guess(i) => guess[i],
                Gate::Const(b) => b,
                Gate::And(a, b) => val[a] && val[b],
                Gate::Or(a, b) => val[a] || val[b],
                Gate::Not(a) => !val[a],
                Gate::Copy(a) => val[a],
            };
            val.push(v);
        }
        val
    }

    /// Output value for fully specified actual and guess vectors.
    pub fn eval_bits(&self, actual: &[bool], guess: &[bool]) -> bool {
        self.node_values(actual, guess)[self.output]
    }

    /// Bit-parallel evaluation: bit `j` of every word is an independent lane.
    pub fn eval_words(&self, actual: &[u64], guess: &[u64]) -> u64 {
        assert_eq!(actual.len(), self.actual_vars.len());
        assert_eq!(guess.len(), self.guess_vars.len());
        let mut val: Vec<u64> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node.gate {
                Gate::Input(i) => actual[i],
                Gate::Guess(i) => guess[i],
                Gate::Const(b) => {
                    if b {
                        !0
                    } else {
                        0
                    }
                }
                Gate::And(a, b) => val[a] & val[b],
                Gate::Or(a, b) => val[a] | val[b],
                Gate::Not(a) => !val[a],
                Gate::Copy(a) => val[a],
            };
            val.push(v);
        }
        val[self.output]
    }

    /// Nondeterministic acceptance of one actual vector: some guess vector
    /// makes the output 1. Enumerates all `2^m` guess vectors.
    pub fn accepts(&self, actual: &[bool]) -> bool {
        let m = self.guess_vars.len();
        let mut guess = vec![false; m];
        (0..1u64 << m).any(|g| {
            for (j, slot) in guess.iter_mut().enumerate() {
                *slot = (g >> j) & 1 == 1;
            }
            self.eval_bits(actual, &guess)
        })
    }

    /// Nondeterministic truth table over all `2^n` actual vectors; entry `i`
    /// assigns bit `j` of `i` to `actual_vars[j]`.
    pub fn truth_table(&self) -> Vec<bool> {
        let n = self.actual_vars.len();
        let m = self.guess_vars.len();
        let total = 1u64 << n;
        let mut table = Vec::with_capacity(total as usize);
        let mut base = 0u64;
        while base < total {
            let lanes = (total - base).min(64);
            let actual: Vec<u64> = (0..n)
                .map(|j| {
                    (0..lanes).fold(0u64, |w, lane| w | ((((base + lane) >> j) & 1) << lane))
                })
                .collect();
            let mut acc = 0u64;
            for g in 0..1u64 << m {
                let guess: Vec<u64> = (0..m)
                    .map(|j| if (g >> j) & 1 == 1 { !0 } else { 0 })
                    .collect();
                acc |= self.eval_words(&actual, &guess);
            }
            table.extend((0..lanes).map(|lane| (acc >> lane) & 1 == 1));
            base += lanes;
        }
        table
    }

    /// Extracts the actual vector from `a`, requiring every actual variable.
    pub fn actual_bits(&self, a: &Assignment) -> Result<Vec<bool>, CircuitError> {
        self.actual_vars
            .iter()
            .map(|v| a.get(v).ok_or_else(|| CircuitError::UnboundVariable(v.clone())))
            .collect()
    }

    /// Deterministic evaluation. The circuit must not have guess inputs.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, CircuitError> {
        if !self.guess_vars.is_empty() {
            return Err(CircuitError::GuessInputPresent);
        }
        Ok(self.eval_bits(&self.actual_bits(a)?, &[]))
    }

    /// Existential evaluation over all guess settings, refusing more than
    /// `guess_limit` guess inputs.
    pub fn evaluate_nondet(&self, a: &Assignment, guess_limit: usize) -> Result<bool, CircuitError> {
        if self.guess_vars.len() > guess_limit {
            return Err(CircuitError::GuessLimitExceeded {
                guesses: self.guess_vars.len(),
                limit: guess_limit,
            });
        }
        Ok(self.accepts(&self.actual_bits(a)?))
    }

    /// Evaluation with every actual and guess variable bound by `a`.
    pub fn evaluate_with_guesses(&self, a: &Assignment) -> Result<bool, CircuitError> {
        let guess = self
            .guess_vars
            .iter()
            .map(|v| a.get(v).ok_or_else(|| CircuitError::UnboundVariable(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.eval_bits(&self.actual_bits(a)?, &guess))
    }

    /// Serializes to the circuit text format.
    pub fn to_text(&self) -> String {
        text::write_circuit(self)
    }
}

/// Incremental construction of a [`Circuit`] in topological order.
///
/// Variables are declared on first use. Unnamed nodes get `n<id>` names.
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    nodes: Vec<Node>,
    actual_vars: Vec<String>,
    guess_vars: Vec<String>,
    actual_index: HashMap<String, usize>,
    guess_index: HashMap<String, usize>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn declare_var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.actual_index.get(name) {
            return i;
        }
        let i = self.actual_vars.len();
        self.actual_vars.push(name.to_string());
        self.actual_index.insert(name.to_string(), i);
        i
    }

    pub fn declare_guess(&mut self, name: &str) -> usize {
        if let Some(&i) = self.guess_index.get(name) {
            return i;
        }
        let i = self.guess_vars.len();
        self.guess_vars.push(name.to_string());
        self.guess_index.insert(name.to_string(), i);
        i
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.actual_index.contains_key(name) || self.guess_index.contains_key(name)
    }

    pub fn push_named(&mut self, name: impl Into<String>, gate: Gate) -> NodeId {
        self.nodes.push(Node {
            name: name.into(),
            gate,
        });
        self.nodes.len() - 1
    }

    pub fn push(&mut self, gate: Gate) -> NodeId {
        let name = format!("n{}", self.nodes.len());
        self.push_named(name, gate)
    }

    pub fn input(&mut self, var: &str) -> NodeId {
        let v = self.declare_var(var);
        self.push(Gate::Input(v))
    }

    pub fn guess(&mut self, var: &str) -> NodeId {
        let v = self.declare_guess(var);
        self.push(Gate::Guess(v))
    }

    pub fn constant(&mut self, bit: bool) -> NodeId {
        self.push(Gate::Const(bit))
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Gate::Or(a, b))
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        self.push(Gate::Not(a))
    }

    pub fn copy(&mut self, a: NodeId) -> NodeId {
        self.push(Gate::Copy(a))
    }

    pub fn finish(self, output: NodeId) -> Result<Circuit, CircuitError> {
        Circuit::new(self.nodes, output, self.actual_vars, self.guess_vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x1 = b.input("x1");
        let x2 = b.input("x2");
        let g = b.and(x1, x2);
        b.finish(g).unwrap()
    }

    #[test]
    fn evaluate_conjunction() {
        let c = and2();
        assert!(c.evaluate(&"x1=1,x2=1".parse().unwrap()).unwrap());
        assert!(!c.evaluate(&"x1=1,x2=0".parse().unwrap()).unwrap());
        assert_eq!(
            c.evaluate(&"x1=1".parse().unwrap()),
            Err(CircuitError::UnboundVariable("x2".into()))
        );
    }

    #[test]
    fn not_of_constant() {
        let mut b = CircuitBuilder::new();
        b.declare_var("x1");
        let k = b.constant(false);
        let n = b.not(k);
        let c = b.finish(n).unwrap();
        for a in ["x1=0", "x1=1"] {
            assert!(c.evaluate(&a.parse().unwrap()).unwrap());
        }
    }

    #[test]
    fn nondeterministic_semantics() {
        // output = y1
        let mut b = CircuitBuilder::new();
        b.declare_var("x1");
        let y = b.guess("y1");
        let c = b.finish(y).unwrap();
        for a in ["x1=0", "x1=1"] {
            assert!(c.evaluate_nondet(&a.parse().unwrap(), DEFAULT_GUESS_LIMIT).unwrap());
        }
        assert_eq!(
            c.evaluate(&"x1=0".parse().unwrap()),
            Err(CircuitError::GuessInputPresent)
        );

        // output = x1 AND y1
        let mut b = CircuitBuilder::new();
        let x = b.input("x1");
        let y = b.guess("y1");
        let g = b.and(x, y);
        let c = b.finish(g).unwrap();
        for bit in [false, true] {
            let a: Assignment = [("x1", bit)].into_iter().collect();
            assert_eq!(c.evaluate_nondet(&a, DEFAULT_GUESS_LIMIT).unwrap(), bit);
        }

        // output = y1 AND NOT y1
        let mut b = CircuitBuilder::new();
        b.declare_var("x1");
        let y = b.guess("y1");
        let ny = b.not(y);
        let g = b.and(y, ny);
        let c = b.finish(g).unwrap();
        for a in ["x1=0", "x1=1"] {
            assert!(!c.evaluate_nondet(&a.parse().unwrap(), DEFAULT_GUESS_LIMIT).unwrap());
        }
        assert_eq!(
            c.evaluate_nondet(&"x1=0".parse().unwrap(), 0),
            Err(CircuitError::GuessLimitExceeded { guesses: 1, limit: 0 })
        );
    }

    #[test]
    fn guess_uniqueness_is_enforced() {
        let mut b = CircuitBuilder::new();
        let y = b.guess("y1");
        b.push(Gate::Guess(0));
        assert_eq!(b.finish(y), Err(CircuitError::DuplicateGuessNode("y1".into())));
    }

    #[test]
    fn forward_reference_is_rejected() {
        let nodes = vec![Node {
            name: "n1".into(),
            gate: Gate::And(0, 0),
        }];
        assert!(matches!(
            Circuit::new(nodes, 0, vec![], vec![]),
            Err(CircuitError::ForwardReference { .. })
        ));
    }

    #[test]
    fn multiplicities_count_nodes_not_wires() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x1");
        let g = b.and(x, x);
        let c = b.finish(g).unwrap();
        assert_eq!(c.read_multiplicities()["x1"], 1);

        let mut b = CircuitBuilder::new();
        let x = b.input("x1");
        let x_again = b.input("x1");
        let g = b.and(x, x_again);
        let c = b.finish(g).unwrap();
        assert_eq!(c.read_multiplicities()["x1"], 2);
    }

    #[test]
    fn depth_examples() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x1");
        let n1 = b.not(x);
        assert_eq!(b.clone().finish(n1).unwrap().depth(), 1);
        let n2 = b.not(n1);
        assert_eq!(b.finish(n2).unwrap().depth(), 2);

        // Balanced AND tree over eight variables.
        let mut b = CircuitBuilder::new();
        let mut level: Vec<_> = (1..=8).map(|i| b.input(&format!("x{i}"))).collect();
        while level.len() > 1 {
            level = level.chunks(2).map(|p| b.and(p[0], p[1])).collect();
        }
        assert_eq!(b.finish(level[0]).unwrap().depth(), 3);
    }

    #[test]
    fn truth_table_matches_scalar_evaluation() {
        let mut b = CircuitBuilder::new();
        let xs: Vec<_> = (0..7).map(|i| b.input(&format!("x{i}"))).collect();
        let y = b.guess("y");
        let a = b.and(xs[0], xs[1]);
        let o = b.or(a, xs[6]);
        let n = b.not(o);
        let e = b.and(n, y);
        let f = b.or(e, xs[3]);
        let c = b.finish(f).unwrap();
        let table = c.truth_table();
        assert_eq!(table.len(), 128);
        for (i, &v) in table.iter().enumerate() {
            let actual: Vec<bool> = (0..7).map(|j| (i >> j) & 1 == 1).collect();
            assert_eq!(v, c.accepts(&actual), "row {i}");
        }
    }
}
