//! Nondeterministic branching programs.
//!
//! A program is a DAG of reader nodes, each labeled by a variable and left by
//! 0- and 1-labeled edges, ending in 0- and 1-sinks. Several edges may share a
//! label, and a missing label rejects. An input is accepted when some path
//! consistent with it reaches a 1-sink.

mod text;

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::assignment::Assignment;
use crate::text::is_valid_name;

pub use text::parse_bp;

/// Index of a node in [`BranchingProgram::nodes`].
pub type BpNodeId = usize;

/// Upper limit on variables enumerated by strict evaluation.
pub const DEFAULT_UNBOUND_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BpNodeKind {
    Read {
        var: String,
        edges: Vec<(bool, BpNodeId)>,
    },
    Sink(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpNode {
    pub name: String,
    pub kind: BpNodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarRef {
    Actual(usize),
    Guess(usize),
}

/// How unbound (guess) variables are treated by [`BranchingProgram::evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Some setting of the unbound variables admits an accepting path.
    #[default]
    Strict,
    /// Edges of nodes reading unbound variables may be taken freely.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpError {
    #[error("node name `{0}` is used twice")]
    DuplicateName(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("edge from `{from}` points to node {target}, which does not exist")]
    DanglingEdge { from: String, target: BpNodeId },
    #[error("start node {0} does not exist")]
    MissingStart(BpNodeId),
    #[error("inner node `{0}` has no outgoing edge")]
    NoEdges(String),
    #[error("the program has a cycle through `{0}`")]
    Cycle(String),
    #[error("node `{node}` reads undeclared variable `{var}`")]
    UndeclaredVariable { node: String, var: String },
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("actual variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("{unbound} unbound variables exceed the enumeration limit of {limit}")]
    UnboundLimitExceeded { unbound: usize, limit: usize },
}

/// A validated nondeterministic branching program.
///
/// Invariants (checked by [`BranchingProgram::new`]): names are unique, every
/// edge target exists, inner nodes have at least one edge, the graph is
/// acyclic, and every read variable is declared. Acyclicity and the edge
/// condition mean every path from `start` ends in a sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingProgram {
    nodes: Vec<BpNode>,
    start: BpNodeId,
    actual_vars: Vec<String>,
    guess_vars: Vec<String>,
    var_of: Vec<Option<VarRef>>,
    topo: Vec<BpNodeId>,
}

impl BranchingProgram {
    pub fn new(
        nodes: Vec<BpNode>,
        start: BpNodeId,
        actual_vars: Vec<String>,
        guess_vars: Vec<String>,
    ) -> Result<Self, BpError> {
        if start >= nodes.len() {
            return Err(BpError::MissingStart(start));
        }
        let mut vars: HashMap<&str, VarRef> = HashMap::new();
        let declared = actual_vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v, VarRef::Actual(i)))
            .chain(guess_vars.iter().enumerate().map(|(i, v)| (v, VarRef::Guess(i))));
        for (name, r) in declared {
            if !is_valid_name(name) {
                return Err(BpError::InvalidName(name.clone()));
            }
            if vars.insert(name, r).is_some() {
                return Err(BpError::DuplicateVariable(name.clone()));
            }
        }

        let mut names = HashSet::new();
        let mut var_of = Vec::with_capacity(nodes.len());
        let mut indegree = vec![0usize; nodes.len()];
        for node in &nodes {
            if !is_valid_name(&node.name) {
                return Err(BpError::InvalidName(node.name.clone()));
            }
            if !names.insert(node.name.as_str()) {
                return Err(BpError::DuplicateName(node.name.clone()));
            }
            match &node.kind {
                BpNodeKind::Sink(_) => var_of.push(None),
                BpNodeKind::Read { var, edges } => {
                    let r = vars.get(var.as_str()).ok_or_else(|| BpError::UndeclaredVariable {
                        node: node.name.clone(),
                        var: var.clone(),
                    })?;
                    var_of.push(Some(*r));
                    if edges.is_empty() {
                        return Err(BpError::NoEdges(node.name.clone()));
                    }
                    for &(_, t) in edges {
                        if t >= nodes.len() {
                            return Err(BpError::DanglingEdge {
                                from: node.name.clone(),
                                target: t,
                            });
                        }
                        indegree[t] += 1;
                    }
                }
            }
        }

        // Kahn's algorithm, smallest index first for a stable order.
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<BpNodeId>> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| std::cmp::Reverse(v))
            .collect();
        let mut topo = Vec::with_capacity(nodes.len());
        while let Some(std::cmp::Reverse(v)) = ready.pop() {
            topo.push(v);
            for t in successors(&nodes[v]) {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    ready.push(std::cmp::Reverse(t));
                }
            }
        }
        if topo.len() < nodes.len() {
            let stuck = indegree.iter().position(|&d| d > 0).unwrap_or(0);
            return Err(BpError::Cycle(nodes[stuck].name.clone()));
        }

        Ok(BranchingProgram {
            nodes,
            start,
            actual_vars,
            guess_vars,
            var_of,
            topo,
        })
    }

    pub fn nodes(&self) -> &[BpNode] {
        &self.nodes
    }

    pub fn node(&self, id: BpNodeId) -> &BpNode {
        &self.nodes[id]
    }

    pub fn start(&self) -> BpNodeId {
        self.start
    }

    pub fn actual_vars(&self) -> &[String] {
        &self.actual_vars
    }

    pub fn guess_vars(&self) -> &[String] {
        &self.guess_vars
    }

    /// Total node count, sinks included.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in a topological order.
    pub fn topological_order(&self) -> &[BpNodeId] {
        &self.topo
    }

    pub fn find_node(&self, name: &str) -> Option<BpNodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Evaluates under `a`, which must bind every actual variable. Guess
    /// variables bound by `a` are fixed; the rest are unbound.
    pub fn evaluate(&self, a: &Assignment, mode: EvalMode) -> Result<bool, BpError> {
        match mode {
            EvalMode::Free => {
                let (actual, guess) = self.bind(a)?;
                Ok(self.reaches_one(&actual, &guess))
            }
            EvalMode::Strict => self.accepting_guesses(a).map(|g| g.is_some()),
        }
    }

    /// The lexicographically first setting of the unbound guess variables
    /// (sorted by name, first most significant) under which an accepting path
    /// exists, or `None` when `a` is rejected.
    pub fn accepting_guesses(&self, a: &Assignment) -> Result<Option<Assignment>, BpError> {
        self.accepting_guesses_limited(a, DEFAULT_UNBOUND_LIMIT)
    }

    pub fn accepting_guesses_limited(
        &self,
        a: &Assignment,
        limit: usize,
    ) -> Result<Option<Assignment>, BpError> {
        let (actual, mut guess) = self.bind(a)?;
        let mut unbound: Vec<(String, usize)> = self
            .guess_vars
            .iter()
            .enumerate()
            .filter(|(i, _)| guess[*i].is_none())
            .map(|(i, v)| (v.clone(), i))
            .collect();
        if unbound.len() > limit {
            return Err(BpError::UnboundLimitExceeded {
                unbound: unbound.len(),
                limit,
            });
        }
        unbound.sort();
        let names: Vec<String> = unbound.iter().map(|(v, _)| v.clone()).collect();
        for index in 0..1u64 << unbound.len() {
            let setting = Assignment::from_index(&names, index);
            for (name, i) in &unbound {
                guess[*i] = setting.get(name);
            }
            if self.reaches_one(&actual, &guess) {
                return Ok(Some(setting));
            }
        }
        Ok(None)
    }

    fn bind(&self, a: &Assignment) -> Result<(Vec<bool>, Vec<Option<bool>>), BpError> {
        let actual = self
            .actual_vars
            .iter()
            .map(|v| a.get(v).ok_or_else(|| BpError::UnboundVariable(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let guess = self.guess_vars.iter().map(|v| a.get(v)).collect();
        Ok((actual, guess))
    }

    /// Reachability of a 1-sink; `None` guesses follow every edge.
    fn reaches_one(&self, actual: &[bool], guess: &[Option<bool>]) -> bool {
        let mut reached = vec![false; self.nodes.len()];
        reached[self.start] = true;
        for &v in &self.topo {
            if !reached[v] {
                continue;
            }
            match &self.nodes[v].kind {
                BpNodeKind::Sink(true) => return true,
                BpNodeKind::Sink(false) => {}
                BpNodeKind::Read { edges, .. } => {
                    let bit = match self.var_of[v] {
                        Some(VarRef::Actual(i)) => Some(actual[i]),
                        Some(VarRef::Guess(i)) => guess[i],
                        None => unreachable!("reader without a variable"),
                    };
                    for &(label, t) in edges {
                        if bit.is_none_or(|b| b == label) {
                            reached[t] = true;
                        }
                    }
                }
            }
        }
        false
    }

    /// For every declared variable, the largest number of nodes reading it
    /// on a single path from `start` to a sink.
    pub fn max_read_counts(&self) -> BTreeMap<String, usize> {
        let all_vars: Vec<&String> = self.actual_vars.iter().chain(&self.guess_vars).collect();
        let mut out = BTreeMap::new();
        let mut count = vec![0usize; self.nodes.len()];
        for var in all_vars {
            for &v in self.topo.iter().rev() {
                count[v] = match &self.nodes[v].kind {
                    BpNodeKind::Sink(_) => 0,
                    BpNodeKind::Read { var: label, edges } => {
                        let below = edges.iter().map(|&(_, t)| count[t]).max().unwrap_or(0);
                        below + usize::from(label == var)
                    }
                };
            }
            out.insert(var.clone(), count[self.start]);
        }
        out
    }

    /// Size and per-path read counts of the actual variables.
    pub fn stats(&self) -> BpStats {
        let counts = self.max_read_counts();
        let read_counts = self
            .actual_vars
            .iter()
            .map(|v| (v.clone(), counts[v]))
            .collect();
        BpStats {
            size: self.size(),
            read_counts,
        }
    }

    /// Serializes to the BP text format.
    pub fn to_text(&self) -> String {
        text::write_bp(self)
    }
}

fn successors(node: &BpNode) -> impl Iterator<Item = BpNodeId> + '_ {
    let edges: &[(bool, BpNodeId)] = match &node.kind {
        BpNodeKind::Read { edges, .. } => edges,
        BpNodeKind::Sink(_) => &[],
    };
    edges.iter().map(|&(_, t)| t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpStats {
    pub size: usize,
    /// Maximum reads per path for each actual variable.
    pub read_counts: BTreeMap<String, usize>,
}

impl BpStats {
    /// The smallest `k` for which the program is syntactically read-k over
    /// its actual variables.
    pub fn read_k(&self) -> usize {
        self.read_counts.values().copied().max().unwrap_or(0)
    }

    pub fn is_read_k(&self, k: usize) -> bool {
        self.read_k() <= k
    }
}
