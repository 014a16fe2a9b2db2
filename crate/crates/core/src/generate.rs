//! Seeded random instances for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{Circuit, CircuitBuilder, Gate, LayeredCircuit, NodeId};
use crate::pebbling::PebbleGraph;

fn declare(b: &mut CircuitBuilder, n: usize, m: usize) -> (Vec<String>, Vec<String>) {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let guesses: Vec<String> = (1..=m).map(|i| format!("y{i}")).collect();
    for v in &vars {
        b.declare_var(v);
    }
    for v in &guesses {
        b.declare_guess(v);
    }
    (vars, guesses)
}

fn random_gate(rng: &mut impl Rng, a: NodeId, b: NodeId) -> Gate {
    match rng.gen_range(0..5) {
        0 | 1 => Gate::And(a, b),
        2 | 3 => Gate::Or(a, b),
        _ => Gate::Not(a),
    }
}

/// A layered circuit over `n` actual and `m` guess variables with at most
/// `s` gates in layers of at most `w` gates, built directly in layered form.
///
/// Every input node is read in a single layer, each guess labels at most one
/// node, and the output is the only gate of the last layer. Values that a
/// layer does not consume are dropped.
pub fn layered_circuit(rng: &mut impl Rng, n: usize, m: usize, s: usize, w: usize) -> LayeredCircuit {
    assert!(n >= 1 && s >= 1 && w >= 1);
    let mut b = CircuitBuilder::new();
    let (vars, guesses) = declare(&mut b, n, m);
    let mut pending_guesses: Vec<usize> = (0..m).collect();
    pending_guesses.shuffle(rng);
    let mut layers: Vec<Vec<NodeId>> = Vec::new();
    let mut prev: Vec<NodeId> = Vec::new();
    let mut remaining = s;
    while remaining > 0 {
        let last = remaining == 1;
        let width = if last { 1 } else { rng.gen_range(1..=w.min(remaining - 1)) };
        let mut fresh: Vec<NodeId> = Vec::new();
        let mut operand = |b: &mut CircuitBuilder, rng: &mut dyn rand::RngCore, prev: &[NodeId]| -> NodeId {
            let roll = rng.gen_range(0..10);
            if !pending_guesses.is_empty() && roll == 0 {
                let g = pending_guesses.pop().expect("nonempty");
                return b.guess(&guesses[g]);
            }
            if !prev.is_empty() && roll >= 4 {
                return prev[rng.gen_range(0..prev.len())];
            }
            if !fresh.is_empty() && rng.gen_bool(0.3) {
                return *fresh.choose(rng).expect("nonempty");
            }
            let node = b.input(&vars[rng.gen_range(0..n)]);
            fresh.push(node);
            node
        };
        let mut layer = Vec::with_capacity(width);
        for _ in 0..width {
            let x = operand(&mut b, rng, &prev);
            let y = operand(&mut b, rng, &prev);
            let gate = random_gate(rng, x, y);
            layer.push(b.push(gate));
        }
        remaining -= width;
        prev = layer.clone();
        layers.push(layer);
    }
    // unused guesses are still declared; they simply do not label a node
    let out = *prev.last().expect("at least one layer");
    LayeredCircuit::from_parts(b.finish(out).expect("valid by construction"), layers)
        .expect("layered by construction")
}

/// A circuit with `s` AND/OR/NOT gates over `n` actual and `m` guess
/// variables, with at most `s + 1` actual-input nodes.
///
/// Operands are drawn from the last `window` nodes, which keeps the layered
/// width moderate. Each guess labels exactly one node.
pub fn random_circuit(rng: &mut impl Rng, n: usize, m: usize, s: usize, window: usize) -> Circuit {
    assert!(n + m >= 1 && s >= 1 && window >= 1);
    let mut b = CircuitBuilder::new();
    let (vars, guesses) = declare(&mut b, n, m);
    let mut pool: Vec<NodeId> = Vec::new();
    for g in &guesses {
        pool.push(b.guess(g));
    }
    let mut input_budget = s + 1;
    let mut last = 0;
    for _ in 0..s {
        let mut operand = |b: &mut CircuitBuilder, rng: &mut dyn rand::RngCore, pool: &mut Vec<NodeId>| {
            let fresh = n > 0 && input_budget > 0 && (pool.len() < 2 || rng.gen_bool(0.35));
            if fresh {
                input_budget -= 1;
                let node = b.input(&vars[rng.gen_range(0..n)]);
                pool.push(node);
                node
            } else {
                let lo = pool.len().saturating_sub(window);
                pool[rng.gen_range(lo..pool.len())]
            }
        };
        let x = operand(&mut b, rng, &mut pool);
        let y = operand(&mut b, rng, &mut pool);
        let gate = random_gate(rng, x, y);
        last = b.push(gate);
        pool.push(last);
    }
    b.finish(last).expect("valid by construction")
}

/// A conjunction of `clauses` random clauses of up to `width` literals over
/// `n` actual variables. When `m > 0`, the first `m` literals read guess
/// variables instead, each guess labelling one node.
///
/// Near the satisfiability threshold these are a mix of satisfiable and
/// unsatisfiable instances, unlike [`random_circuit`].
pub fn random_cnf(rng: &mut impl Rng, n: usize, m: usize, clauses: usize, width: usize) -> Circuit {
    assert!(n >= 1 && clauses >= 1 && width >= 1);
    let mut b = CircuitBuilder::new();
    let (vars, guesses) = declare(&mut b, n, m);
    let mut guesses = guesses.into_iter();
    let mut acc: Option<NodeId> = None;
    for _ in 0..clauses {
        let mut clause: Option<NodeId> = None;
        for _ in 0..rng.gen_range(1..=width) {
            let node = match guesses.next() {
                Some(y) => b.guess(&y),
                None => b.input(&vars[rng.gen_range(0..n)]),
            };
            let literal = if rng.gen_bool(0.5) { b.not(node) } else { node };
            clause = Some(match clause {
                Some(c) => b.or(c, literal),
                None => literal,
            });
        }
        let clause = clause.expect("clauses are nonempty");
        acc = Some(match acc {
            Some(a) => b.and(a, clause),
            None => clause,
        });
    }
    b.finish(acc.expect("at least one clause")).expect("valid by construction")
}

/// A deterministic circuit with `s` gates and gate depth exactly `depth`
/// (`s >= depth`), over `n` actual variables.
///
/// Gates are spread over `depth` levels; each gate reads one operand from
/// the level below and the other from any lower level or an input.
pub fn deep_circuit(rng: &mut impl Rng, n: usize, s: usize, depth: usize) -> Circuit {
    assert!(n >= 1 && depth >= 1 && s >= depth);
    let mut b = CircuitBuilder::new();
    let (vars, _) = declare(&mut b, n, 0);
    let mut per_level = vec![1usize; depth];
    for _ in depth..s {
        per_level[rng.gen_range(0..depth)] += 1;
    }
    // the top level holds only the output
    let extra = per_level[depth - 1] - 1;
    per_level[depth - 1] = 1;
    if depth > 1 {
        per_level[depth - 2] += extra;
    } else {
        per_level[0] += extra;
    }
    let mut levels: Vec<Vec<NodeId>> = Vec::with_capacity(depth);
    let input = |b: &mut CircuitBuilder, rng: &mut dyn rand::RngCore| b.input(&vars[rng.gen_range(0..n)]);
    for (d, &count) in per_level.iter().enumerate() {
        let mut level = Vec::with_capacity(count);
        for _ in 0..count {
            let x = match d {
                0 => input(&mut b, rng),
                _ => *levels[d - 1].choose(rng).expect("levels are nonempty"),
            };
            let y = if d > 0 && rng.gen_bool(0.6) {
                let below = rng.gen_range(0..d);
                *levels[below].choose(rng).expect("levels are nonempty")
            } else {
                input(&mut b, rng)
            };
            let gate = random_gate(rng, x, y);
            level.push(b.push(gate));
        }
        levels.push(level);
    }
    let c = b.finish(*levels[depth - 1].last().expect("nonempty")).expect("valid by construction");
    debug_assert!(c.depth() <= depth);
    c
}

/// A random DAG with `vertices` vertices, in-degree at most `max_preds`,
/// and a unique sink: the last vertex, which every other vertex reaches.
///
/// Vertices are `v1..vN` in a topological order.
pub fn random_dag(rng: &mut impl Rng, vertices: usize, max_preds: usize) -> PebbleGraph {
    assert!(vertices >= 1 && max_preds >= 1);
    let names: Vec<String> = (1..=vertices).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut has_succ = vec![false; vertices];
    for v in 1..vertices {
        let preds = rng.gen_range(0..=max_preds.min(v));
        let mut options: Vec<usize> = (0..v).collect();
        options.shuffle(rng);
        for &u in &options[..preds] {
            edges.push((u, v));
            has_succ[u] = true;
        }
    }
    // route every other sink into a later vertex with spare in-degree, or the last one
    for u in 0..vertices - 1 {
        if has_succ[u] {
            continue;
        }
        let indeg = |v: usize, edges: &[(usize, usize)]| edges.iter().filter(|e| e.1 == v).count();
        let target = (u + 1..vertices)
            .filter(|&v| indeg(v, &edges) < max_preds)
            .collect::<Vec<_>>()
            .choose(rng)
            .copied()
            .unwrap_or(vertices - 1);
        edges.push((u, target));
        has_succ[u] = true;
    }
    PebbleGraph::new(names, &edges, vertices - 1).expect("acyclic with a unique sink")
}
