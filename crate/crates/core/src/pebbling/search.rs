use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::{Mode, Move, PebbleGraph, Pebbling};

pub const DEFAULT_BLACK_VERTEX_CAP: usize = 14;
pub const DEFAULT_BW_VERTEX_CAP: usize = 10;

/// Configurations are bit masks, so no cap may exceed this.
const MASK_BITS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{vertices} vertices exceed the search cap of {cap}")]
    TooManyVertices { vertices: usize, cap: usize },
    #[error("no pebbling within space {space_cap}")]
    NotFound { space_cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    /// The least space admitting a pebbling.
    pub space: usize,
    /// A shortest pebbling within that space, lexicographically first among
    /// the shortest under the move order B+ < B- < W+ < W-, then by vertex.
    pub witness: Pebbling,
    /// Configurations visited over all rounds.
    pub states: usize,
}

type State = (u32, u32);

/// Finds the minimum pebbling space by breadth-first search over
/// configurations, raising the space bound from 1 to `space_cap`.
pub fn search_min_space(
    g: &PebbleGraph,
    mode: Mode,
    space_cap: usize,
    vertex_cap: usize,
) -> Result<SearchResult, SearchError> {
    let cap = vertex_cap.min(MASK_BITS);
    if g.len() > cap {
        return Err(SearchError::TooManyVertices {
            vertices: g.len(),
            cap,
        });
    }
    let preds: Vec<u32> = (0..g.len())
        .map(|v| g.preds(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let goal: State = (1 << g.sink(), 0);
    let mut states = 0;
    for bound in 1..=space_cap.min(g.len()) {
        let (found, visited) = bfs(&preds, mode, bound, goal);
        states += visited;
        if let Some(moves) = found {
            return Ok(SearchResult {
                space: bound,
                witness: Pebbling::new(moves),
                states,
            });
        }
    }
    Err(SearchError::NotFound { space_cap })
}

fn bfs(preds: &[u32], mode: Mode, bound: usize, goal: State) -> (Option<Vec<Move>>, usize) {
    let n = preds.len();
    let mut parent: HashMap<State, (State, Move)> = HashMap::new();
    let start: State = (0, 0);
    let mut queue = VecDeque::from([start]);
    parent.insert(start, (start, Move::PlaceBlack(usize::MAX)));
    while let Some(state @ (black, white)) = queue.pop_front() {
        if state == goal {
            let mut moves = Vec::new();
            let mut at = state;
            while at != start {
                let (prev, m) = parent[&at];
                moves.push(m);
                at = prev;
            }
            moves.reverse();
            return (Some(moves), parent.len());
        }
        let pebbled = black | white;
        let room = (pebbled.count_ones() as usize) < bound;
        let mut successors: Vec<(State, Move)> = Vec::new();
        for v in 0..n {
            let bit = 1u32 << v;
            if room && pebbled & bit == 0 && preds[v] & !pebbled == 0 {
                successors.push(((black | bit, white), Move::PlaceBlack(v)));
            }
        }
        for v in 0..n {
            let bit = 1u32 << v;
            if black & bit != 0 {
                successors.push(((black & !bit, white), Move::RemoveBlack(v)));
            }
        }
        if mode == Mode::BlackWhite {
            for v in 0..n {
                let bit = 1u32 << v;
                if room && pebbled & bit == 0 {
                    successors.push(((black, white | bit), Move::PlaceWhite(v)));
                }
            }
            for v in 0..n {
                let bit = 1u32 << v;
                if white & bit != 0 && preds[v] & !pebbled == 0 {
                    successors.push(((black, white & !bit), Move::RemoveWhite(v)));
                }
            }
        }
        for (next, m) in successors {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert((state, m));
                queue.push_back(next);
            }
        }
    }
    (None, parent.len())
}
