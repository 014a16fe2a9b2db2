use std::fmt;

use thiserror::Error;

use super::{Move, Pebble, PebbleGraph, Pebbling, Vertex};

/// Largest binary tree height accepted by [`generate_strategy`].
const MAX_TREE_HEIGHT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `p1 -> p2 -> ... -> pℓ`, sink `pℓ`.
    Path(usize),
    /// Complete binary in-tree of height `h`: leaves are sources, the root
    /// `t1` is the sink, and `t{i}` has children `t{2i}` and `t{2i+1}`.
    BinaryTree(usize),
    /// Rows `0..=h`, row `r` holding `h + 1 - r` vertices `v{r}_{i}`, where
    /// `v{r}_{i}` has predecessors `v{r-1}_{i}` and `v{r-1}_{i+1}`.
    Pyramid(usize),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path(l) => write!(f, "path({l})"),
            Family::BinaryTree(h) => write!(f, "tree({h})"),
            Family::Pyramid(h) => write!(f, "pyramid({h})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("{0}: parameter out of range")]
    OutOfRange(Family),
    #[error("vertex {0} cannot carry a white pebble here")]
    BadWhite(Vertex),
}

/// Builds a family graph and its standard black pebbling: sliding for
/// paths (space 2), recursive for trees (space `h + 2`), row sweep for
/// pyramids (space `h + 2`).
pub fn generate_strategy(family: Family) -> Result<(PebbleGraph, Pebbling), StrategyError> {
    match family {
        Family::Path(len) if len >= 1 => Ok(path(len)),
        Family::BinaryTree(h) if h <= MAX_TREE_HEIGHT => Ok(tree(h)),
        Family::Pyramid(h) => Ok(pyramid(h)),
        _ => Err(StrategyError::OutOfRange(family)),
    }
}

fn path(len: usize) -> (PebbleGraph, Pebbling) {
    let names = (1..=len).map(|i| format!("p{i}")).collect();
    let edges: Vec<_> = (1..len).map(|i| (i - 1, i)).collect();
    let g = PebbleGraph::new(names, &edges, len - 1).expect("paths are valid");
    let mut moves = vec![Move::PlaceBlack(0)];
    for v in 1..len {
        moves.push(Move::PlaceBlack(v));
        moves.push(Move::RemoveBlack(v - 1));
    }
    (g, Pebbling::new(moves))
}

fn tree(h: usize) -> (PebbleGraph, Pebbling) {
    let count = (1usize << (h + 1)) - 1;
    let names = (1..=count).map(|i| format!("t{i}")).collect();
    // vertex t{i} is index i - 1
    let edges: Vec<_> = (2..=count).map(|i| (i - 1, i / 2 - 1)).collect();
    let g = PebbleGraph::new(names, &edges, 0).expect("trees are valid");
    let mut moves = Vec::new();
    fn pebble(i: usize, count: usize, moves: &mut Vec<Move>) {
        let (left, right) = (2 * i, 2 * i + 1);
        if left <= count {
            pebble(left, count, moves);
            pebble(right, count, moves);
            moves.push(Move::PlaceBlack(i - 1));
            moves.push(Move::RemoveBlack(left - 1));
            moves.push(Move::RemoveBlack(right - 1));
        } else {
            moves.push(Move::PlaceBlack(i - 1));
        }
    }
    pebble(1, count, &mut moves);
    (g, Pebbling::new(moves))
}

fn pyramid(h: usize) -> (PebbleGraph, Pebbling) {
    let mut index = Vec::new();
    let mut names = Vec::new();
    for r in 0..=h {
        let row: Vec<usize> = (0..=h - r)
            .map(|i| {
                names.push(format!("v{r}_{i}"));
                names.len() - 1
            })
            .collect();
        index.push(row);
    }
    let mut edges = Vec::new();
    for r in 1..=h {
        for i in 0..=h - r {
            edges.push((index[r - 1][i], index[r][i]));
            edges.push((index[r - 1][i + 1], index[r][i]));
        }
    }
    let g = PebbleGraph::new(names, &edges, index[h][0]).expect("pyramids are valid");
    let mut moves: Vec<Move> = index[0].iter().map(|&v| Move::PlaceBlack(v)).collect();
    for r in 1..=h {
        for i in 0..=h - r {
            moves.push(Move::PlaceBlack(index[r][i]));
            moves.push(Move::RemoveBlack(index[r - 1][i]));
        }
        moves.push(Move::RemoveBlack(index[r - 1][h - r + 1]));
    }
    (g, Pebbling::new(moves))
}

/// Black pebbling of any graph: place vertices in topological order and
/// remove each as soon as all of its successors are pebbled.
pub fn topological_black(g: &PebbleGraph) -> Pebbling {
    let mut config = vec![Pebble::Empty; g.len()];
    let mut moves = Vec::new();
    pebble_targets(g, &mut config, &[g.sink()], &mut moves);
    Pebbling::new(moves)
}

/// Black-white pebbling that puts white pebbles on `whites` first, pebbles
/// the sink treating them as available, then discharges the whites in
/// reverse topological order by pebbling their predecessors.
pub fn guess_then_verify(g: &PebbleGraph, whites: &[Vertex]) -> Result<Pebbling, StrategyError> {
    let mut config = vec![Pebble::Empty; g.len()];
    let mut moves = Vec::new();
    for &w in whites {
        if w >= g.len() || w == g.sink() || config[w] != Pebble::Empty {
            return Err(StrategyError::BadWhite(w));
        }
        config[w] = Pebble::White;
        moves.push(Move::PlaceWhite(w));
    }
    pebble_targets(g, &mut config, &[g.sink()], &mut moves);

    let mut position = vec![0; g.len()];
    for (i, &v) in g.topological_order().iter().enumerate() {
        position[v] = i;
    }
    let mut order = whites.to_vec();
    order.sort_by_key(|&w| std::cmp::Reverse(position[w]));
    for w in order {
        let missing: Vec<Vertex> = g
            .preds(w)
            .iter()
            .copied()
            .filter(|&u| config[u] == Pebble::Empty)
            .collect();
        let kept = pebble_targets(g, &mut config, &missing, &mut moves);
        config[w] = Pebble::Empty;
        moves.push(Move::RemoveWhite(w));
        for u in kept {
            config[u] = Pebble::Empty;
            moves.push(Move::RemoveBlack(u));
        }
    }
    Ok(Pebbling::new(moves))
}

/// Black-pebbles `targets` from the current configuration, placing only
/// the empty vertices they depend on, and removes every helper pebble as
/// soon as it is no longer needed. Returns the targets placed here.
fn pebble_targets(
    g: &PebbleGraph,
    config: &mut [Pebble],
    targets: &[Vertex],
    moves: &mut Vec<Move>,
) -> Vec<Vertex> {
    let mut needed = vec![false; g.len()];
    let mut stack: Vec<Vertex> = targets.iter().copied().filter(|&t| config[t] == Pebble::Empty).collect();
    while let Some(v) = stack.pop() {
        if needed[v] {
            continue;
        }
        needed[v] = true;
        stack.extend(g.preds(v).iter().copied().filter(|&u| config[u] == Pebble::Empty));
    }
    let mut uses = vec![0usize; g.len()];
    for v in (0..g.len()).filter(|&v| needed[v]) {
        for &u in g.preds(v) {
            uses[u] += 1;
        }
    }
    let mut kept = Vec::new();
    for &v in g.topological_order() {
        if !needed[v] {
            continue;
        }
        config[v] = Pebble::Black;
        moves.push(Move::PlaceBlack(v));
        for &u in g.preds(v) {
            uses[u] -= 1;
            if needed[u] && uses[u] == 0 && !targets.contains(&u) {
                config[u] = Pebble::Empty;
                moves.push(Move::RemoveBlack(u));
            }
        }
        if targets.contains(&v) {
            kept.push(v);
        }
    }
    kept
}
