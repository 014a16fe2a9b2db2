//! The black and black-white pebble games on DAGs with a unique sink.
//!
//! A pebbling starts from the empty configuration and must end with a single
//! black pebble on the sink. The moves are:
//! 1. place a black pebble on an empty vertex whose predecessors all carry a
//!    pebble of either color;
//! 2. remove a black pebble;
//! 3. place a white pebble on an empty vertex (black-white game only);
//! 4. remove a white pebble from a vertex whose predecessors all carry a
//!    pebble.
//!
//! A vertex holds at most one pebble, so a white pebble must be removed
//! before a black one can take its place.

mod search;
mod strategy;
mod text;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::circuit::Circuit;
use crate::text::is_valid_name;

pub use search::{search_min_space, SearchError, SearchResult, DEFAULT_BLACK_VERTEX_CAP, DEFAULT_BW_VERTEX_CAP};
pub use strategy::{generate_strategy, guess_then_verify, topological_black, Family, StrategyError};
pub use text::{parse_graph, parse_trace};

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex name `{0}` is used twice")]
    DuplicateVertex(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("edge ({0}, {1}) refers to a missing vertex")]
    MissingVertex(Vertex, Vertex),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("the graph has a cycle through `{0}`")]
    Cycle(String),
    #[error("sink `{0}` has outgoing edges")]
    SinkHasSuccessor(String),
    #[error("`{0}` has no successor, but only the sink may")]
    ExtraSink(String),
    #[error("the graph has no vertices")]
    Empty,
}

/// A DAG with a designated unique sink.
///
/// Invariants (checked by [`PebbleGraph::new`]): names are unique, the graph
/// is acyclic, the sink has no successors and every other vertex has one.
/// Parallel edges are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleGraph {
    names: Vec<String>,
    preds: Vec<Vec<Vertex>>,
    succs: Vec<Vec<Vertex>>,
    sink: Vertex,
    topo: Vec<Vertex>,
}

impl PebbleGraph {
    pub fn new(names: Vec<String>, edges: &[(Vertex, Vertex)], sink: Vertex) -> Result<Self, GraphError> {
        let n = names.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashMap::new();
        for name in &names {
            if !is_valid_name(name) {
                return Err(GraphError::InvalidName(name.clone()));
            }
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        if sink >= n {
            return Err(GraphError::MissingVertex(sink, sink));
        }
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::MissingVertex(u, v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(names[u].clone()));
            }
            if !succs[u].contains(&v) {
                succs[u].push(v);
                preds[v].push(u);
            }
        }
        if !succs[sink].is_empty() {
            return Err(GraphError::SinkHasSuccessor(names[sink].clone()));
        }
        if let Some(v) = (0..n).find(|&v| v != sink && succs[v].is_empty()) {
            return Err(GraphError::ExtraSink(names[v].clone()));
        }

        let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: Vec<Vertex> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            topo.push(v);
            for &w in succs[v].iter().rev() {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(w);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
            return Err(GraphError::Cycle(names[stuck].clone()));
        }
        Ok(PebbleGraph {
            names,
            preds,
            succs,
            sink,
            topo,
        })
    }

    /// The dependency graph of a circuit's output cone: one vertex per node
    /// (named after it), one edge per distinct operand, the output as sink.
    pub fn from_circuit(c: &Circuit) -> PebbleGraph {
        let cone = c.output_cone();
        let mut index = vec![usize::MAX; c.nodes().len()];
        let mut names = Vec::new();
        let mut edges = Vec::new();
        for (id, node) in c.nodes().iter().enumerate() {
            if !cone[id] {
                continue;
            }
            index[id] = names.len();
            names.push(node.name.clone());
            for op in node.gate.operands() {
                edges.push((index[op], index[id]));
            }
        }
        PebbleGraph::new(names, &edges, index[c.output()])
            .expect("the output cone of a circuit is a DAG with a unique sink")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn find(&self, name: &str) -> Option<Vertex> {
        self.names.iter().position(|n| n == name)
    }

    pub fn preds(&self, v: Vertex) -> &[Vertex] {
        &self.preds[v]
    }

    pub fn succs(&self, v: Vertex) -> &[Vertex] {
        &self.succs[v]
    }

    pub fn sink(&self) -> Vertex {
        self.sink
    }

    /// A topological order, preferring smaller indices.
    pub fn topological_order(&self) -> &[Vertex] {
        &self.topo
    }

    pub fn edge_count(&self) -> usize {
        self.succs.iter().map(Vec::len).sum()
    }

    pub fn to_text(&self) -> String {
        text::write_graph(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    PlaceBlack(Vertex),
    RemoveBlack(Vertex),
    PlaceWhite(Vertex),
    RemoveWhite(Vertex),
}

impl Move {
    pub fn vertex(self) -> Vertex {
        match self {
            Move::PlaceBlack(v) | Move::RemoveBlack(v) | Move::PlaceWhite(v) | Move::RemoveWhite(v) => v,
        }
    }

    /// The rule governing this move, numbered as in the module docs.
    pub fn rule(self) -> u8 {
        match self {
            Move::PlaceBlack(_) => 1,
            Move::RemoveBlack(_) => 2,
            Move::PlaceWhite(_) => 3,
            Move::RemoveWhite(_) => 4,
        }
    }

    pub fn is_white(self) -> bool {
        matches!(self, Move::PlaceWhite(_) | Move::RemoveWhite(_))
    }

    /// The trace mnemonic: `B+`, `B-`, `W+` or `W-`.
    pub fn symbol(self) -> &'static str {
        match self {
            Move::PlaceBlack(_) => "B+",
            Move::RemoveBlack(_) => "B-",
            Move::PlaceWhite(_) => "W+",
            Move::RemoveWhite(_) => "W-",
        }
    }

    pub fn with_vertex(self, v: Vertex) -> Move {
        match self {
            Move::PlaceBlack(_) => Move::PlaceBlack(v),
            Move::RemoveBlack(_) => Move::RemoveBlack(v),
            Move::PlaceWhite(_) => Move::PlaceWhite(v),
            Move::RemoveWhite(_) => Move::RemoveWhite(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Black,
    BlackWhite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pebble {
    #[default]
    Empty,
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measures {
    pub time: usize,
    pub space: usize,
}

/// A sequence of moves, interpreted against a [`PebbleGraph`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Pebbling {
    pub moves: Vec<Move>,
}

impl Pebbling {
    pub fn new(moves: Vec<Move>) -> Self {
        Pebbling { moves }
    }

    /// Time is the number of moves; space the largest pebble count reached.
    pub fn measures(&self) -> Measures {
        let (mut now, mut space) = (0usize, 0usize);
        for m in &self.moves {
            match m {
                Move::PlaceBlack(_) | Move::PlaceWhite(_) => {
                    now += 1;
                    space = space.max(now);
                }
                Move::RemoveBlack(_) | Move::RemoveWhite(_) => now = now.saturating_sub(1),
            }
        }
        Measures {
            time: self.moves.len(),
            space,
        }
    }

    pub fn black_placements(&self) -> usize {
        self.moves.iter().filter(|m| matches!(m, Move::PlaceBlack(_))).count()
    }

    pub fn white_placements(&self) -> usize {
        self.moves.iter().filter(|m| matches!(m, Move::PlaceWhite(_))).count()
    }

    pub fn has_white(&self) -> bool {
        self.moves.iter().any(|m| m.is_white())
    }

    /// Maps the pebbling onto another graph with the same vertex names.
    pub fn translate(&self, from: &PebbleGraph, to: &PebbleGraph) -> Result<Pebbling, UnknownVertex> {
        self.moves
            .iter()
            .map(|&m| {
                let name = from.name(m.vertex());
                to.find(name)
                    .map(|v| m.with_vertex(v))
                    .ok_or_else(|| UnknownVertex(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Pebbling::new)
    }

    pub fn to_text(&self, g: &PebbleGraph) -> String {
        text::write_trace(g, self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown vertex `{0}`")]
pub struct UnknownVertex(pub String);

/// Why a pebbling is not legal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("move {index} ({symbol} {vertex}): rule {rule} violated: {reason}")]
    Rule {
        index: usize,
        rule: u8,
        symbol: &'static str,
        vertex: String,
        reason: String,
    },
    #[error("move {index} refers to vertex {vertex}, which is not in the graph")]
    UnknownVertex { index: usize, vertex: Vertex },
    #[error("final configuration is {found}, expected ({{{sink}}}, {{}})")]
    FinalConfiguration { found: String, sink: String },
}

impl Violation {
    /// The violated rule number, or `None` for configuration errors.
    pub fn rule(&self) -> Option<u8> {
        match self {
            Violation::Rule { rule, .. } => Some(*rule),
            _ => None,
        }
    }

    /// Index of the offending move; the move count for final-state errors.
    pub fn index(&self) -> Option<usize> {
        match self {
            Violation::Rule { index, .. } | Violation::UnknownVertex { index, .. } => Some(*index),
            Violation::FinalConfiguration { .. } => None,
        }
    }
}

/// Checks every move against the rules and the final configuration, and
/// returns the measures of a legal pebbling.
pub fn validate(g: &PebbleGraph, p: &Pebbling, mode: Mode) -> Result<Measures, Violation> {
    let mut config = vec![Pebble::Empty; g.len()];
    for (index, &m) in p.moves.iter().enumerate() {
        let v = m.vertex();
        if v >= g.len() {
            return Err(Violation::UnknownVertex { index, vertex: v });
        }
        let fail = |reason: String| Violation::Rule {
            index,
            rule: m.rule(),
            symbol: m.symbol(),
            vertex: g.name(v).to_string(),
            reason,
        };
        let unpebbled_pred = || g.preds(v).iter().copied().find(|&u| config[u] == Pebble::Empty);
        match m {
            Move::PlaceBlack(_) | Move::PlaceWhite(_) => {
                if m.is_white() && mode == Mode::Black {
                    return Err(fail("white pebbles are not allowed in the black game".into()));
                }
                if config[v] != Pebble::Empty {
                    return Err(fail("the vertex already holds a pebble".into()));
                }
                if let (Move::PlaceBlack(_), Some(u)) = (m, unpebbled_pred()) {
                    return Err(fail(format!("predecessor `{}` holds no pebble", g.name(u))));
                }
                config[v] = if m.is_white() { Pebble::White } else { Pebble::Black };
            }
            Move::RemoveBlack(_) => {
                if config[v] != Pebble::Black {
                    return Err(fail("the vertex holds no black pebble".into()));
                }
                config[v] = Pebble::Empty;
            }
            Move::RemoveWhite(_) => {
                if mode == Mode::Black {
                    return Err(fail("white pebbles are not allowed in the black game".into()));
                }
                if config[v] != Pebble::White {
                    return Err(fail("the vertex holds no white pebble".into()));
                }
                if let Some(u) = unpebbled_pred() {
                    return Err(fail(format!("predecessor `{}` holds no pebble", g.name(u))));
                }
                config[v] = Pebble::Empty;
            }
        }
    }
    let done = config
        .iter()
        .enumerate()
        .all(|(v, &p)| p == if v == g.sink() { Pebble::Black } else { Pebble::Empty });
    if !done {
        return Err(Violation::FinalConfiguration {
            found: describe(g, &config),
            sink: g.name(g.sink()).to_string(),
        });
    }
    Ok(p.measures())
}

fn describe(g: &PebbleGraph, config: &[Pebble]) -> String {
    let set = |color: Pebble| {
        let members: Vec<&str> = (0..g.len()).filter(|&v| config[v] == color).map(|v| g.name(v)).collect();
        format!("{{{}}}", members.join(", "))
    };
    format!("({}, {})", set(Pebble::Black), set(Pebble::White))
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Black => "black",
            Mode::BlackWhite => "bw",
        })
    }
}
