use std::collections::{BTreeSet, HashMap, HashSet};

use super::{Check, ConversionReport, ConvertError};
use crate::circuit::{layer, Circuit, CircuitBuilder, Gate, LayeredCircuit, NodeId};

/// A gate-to-gate edge `(from, to)`: `to` reads `from`.
pub type Edge = (NodeId, NodeId);

/// Gate depth of every node when the edges in `removed` are ignored; inputs
/// and constants have depth 0.
fn depths(c: &Circuit, removed: &HashSet<Edge>) -> Vec<usize> {
    let mut depth = vec![0usize; c.nodes().len()];
    for (id, node) in c.nodes().iter().enumerate() {
        if node.gate.is_gate() {
            depth[id] = 1 + node
                .gate
                .operands()
                .filter(|&op| !removed.contains(&(op, id)))
                .map(|op| depth[op])
                .max()
                .unwrap_or(0);
        }
    }
    depth
}

/// Depth of the output cone once the edges in `removed` no longer count.
pub fn gate_depth_without(c: &Circuit, removed: &[Edge]) -> usize {
    let removed: HashSet<Edge> = removed.iter().copied().collect();
    let depth = depths(c, &removed);
    let cone = c.output_cone();
    (0..depth.len()).filter(|&v| cone[v]).map(|v| depth[v]).max().unwrap_or(0)
}

fn cone_edges(c: &Circuit) -> BTreeSet<Edge> {
    let cone = c.output_cone();
    let mut edges = BTreeSet::new();
    for (id, node) in c.nodes().iter().enumerate() {
        if cone[id] && node.gate.is_gate() {
            for op in node.gate.operands() {
                if c.node(op).gate.is_gate() {
                    edges.insert((op, id));
                }
            }
        }
    }
    edges
}

/// Chooses gate-to-gate edges whose removal leaves the output cone with
/// gate depth at most `target_depth` (values below 1 are treated as 1).
///
/// Repeatedly labels gates by depth, groups the remaining edges by the
/// highest bit in which the labels of their endpoints differ, and removes
/// the smallest group (lowest bit on ties). Dropping a group lets the
/// labels lose that bit, so each round halves the depth bound.
pub fn valiant_cut(c: &Circuit, target_depth: usize) -> Vec<Edge> {
    let target = target_depth.max(1);
    let cone = c.output_cone();
    let mut remaining = cone_edges(c);
    let mut removed: HashSet<Edge> = HashSet::new();
    loop {
        let depth = depths(c, &removed);
        let max = (0..depth.len()).filter(|&v| cone[v]).map(|v| depth[v]).max().unwrap_or(0);
        if max <= target {
            break;
        }
        let mut classes: Vec<Vec<Edge>> = vec![Vec::new(); usize::BITS as usize];
        for &(u, v) in &remaining {
            let diff = depth[u] ^ depth[v];
            classes[(usize::BITS - 1 - diff.leading_zeros()) as usize].push((u, v));
        }
        let Some(lightest) = classes.into_iter().filter(|k| !k.is_empty()).min_by_key(Vec::len) else {
            break;
        };
        for e in lightest {
            remaining.remove(&e);
            removed.insert(e);
        }
    }
    let mut out: Vec<Edge> = removed.into_iter().collect();
    out.sort_unstable();
    out
}

/// The cut-free cone of one root, layered by depth inside the block.
struct Block {
    root: NodeId,
    /// Gates of the block with their layer, 1-based.
    level: HashMap<NodeId, usize>,
    /// Gates in storage order.
    gates: Vec<NodeId>,
    len: usize,
}

fn build_block(c: &Circuit, root: NodeId, cut: &HashSet<Edge>) -> Block {
    let mut member = HashSet::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if !c.node(v).gate.is_gate() || !member.insert(v) {
            continue;
        }
        stack.extend(c.node(v).gate.operands().filter(|&op| !cut.contains(&(op, v))));
    }
    let mut gates: Vec<NodeId> = member.into_iter().collect();
    gates.sort_unstable();
    let mut level = HashMap::new();
    for &g in &gates {
        let d = 1 + c
            .node(g)
            .gate
            .operands()
            .filter(|&op| !cut.contains(&(op, g)))
            .filter_map(|op| level.get(&op).copied())
            .max()
            .unwrap_or(0);
        level.insert(g, d);
    }
    let len = level.get(&root).copied().unwrap_or(0);
    Block {
        root,
        level,
        gates,
        len,
    }
}

/// Rebuilds `c` as a layered circuit whose depth per block is that of `c`
/// with the `cut` edges removed.
///
/// Sources of cut edges are evaluated in topological order, each by a block
/// computing its cut-free cone; a final block computes the output. A block
/// reads actual inputs through fresh input nodes per layer and cut values
/// from a bank of registers, each carried by COPY gates from the end of its
/// block to its last reader. Checked bound: width at most `|cut|` plus the
/// widest block layer.
pub fn cut_to_bounded_width(
    c: &Circuit,
    cut: &[Edge],
) -> Result<(LayeredCircuit, ConversionReport), ConvertError> {
    if !c.is_deterministic() {
        return Err(ConvertError::Nondeterministic);
    }
    let valid = cone_edges(c);
    for &(from, to) in cut {
        if !valid.contains(&(from, to)) {
            return Err(ConvertError::NotACutEdge { from, to });
        }
    }
    let cut_set: HashSet<Edge> = cut.iter().copied().collect();
    let sources: BTreeSet<NodeId> = cut.iter().map(|&(u, _)| u).collect();

    let mut b = CircuitBuilder::new();
    for v in c.actual_vars() {
        b.declare_var(v);
    }
    let mut names: HashSet<String> = HashSet::new();
    let mut push = |b: &mut CircuitBuilder, name: String, gate: Gate| {
        let mut name = name;
        while !names.insert(name.clone()) {
            name.push('\'');
        }
        b.push_named(name, gate)
    };

    let out = c.output();
    if !c.node(out).gate.is_gate() {
        let gate = c.node(out).gate;
        let id = push(&mut b, c.node(out).name.clone(), gate);
        let lc = LayeredCircuit::from_parts(b.finish(id)?, Vec::new())?;
        let report = report(c, &lc, cut, 0, 0, 0, 0);
        return Ok((lc, report.into_result()?));
    }

    let blocks: Vec<Block> = sources
        .iter()
        .copied()
        .chain(std::iter::once(out))
        .map(|r| build_block(c, r, &cut_set))
        .collect();
    let mut start = Vec::with_capacity(blocks.len());
    let mut total = 0;
    for block in &blocks {
        start.push(total);
        total += block.len;
    }
    // global 0-based layer of the last reader of each bank value
    let mut last_read: HashMap<NodeId, usize> = HashMap::new();
    for (k, block) in blocks.iter().enumerate() {
        for &g in &block.gates {
            for op in c.node(g).gate.operands() {
                if cut_set.contains(&(op, g)) {
                    let at = start[k] + block.level[&g] - 1;
                    let e = last_read.entry(op).or_insert(at);
                    *e = (*e).max(at);
                }
            }
        }
    }

    let mut layers: Vec<Vec<NodeId>> = vec![Vec::new(); total];
    // bank value -> (carrier node, layer it sits in)
    let mut bank: Vec<(NodeId, NodeId)> = Vec::new();
    let mut consts: [Option<NodeId>; 2] = [None, None];
    let (mut max_bank, mut block_width) = (0, 0);
    let mut output = None;
    for (k, block) in blocks.iter().enumerate() {
        // last block layer needing each gate's value
        let mut need: HashMap<NodeId, usize> = HashMap::new();
        for &g in &block.gates {
            for op in c.node(g).gate.operands() {
                if block.level.contains_key(&op) && !cut_set.contains(&(op, g)) {
                    let e = need.entry(op).or_insert(0);
                    *e = (*e).max(block.level[&g]);
                }
            }
        }
        let mut value_at: HashMap<(NodeId, usize), NodeId> = HashMap::new();
        for d in 1..=block.len {
            let at = start[k] + d - 1;
            let mut inputs: HashMap<NodeId, NodeId> = HashMap::new();
            let mut width = 0;
            for &g in block.gates.iter().filter(|g| block.level[g] == d) {
                let mut operand = |op: NodeId, b: &mut CircuitBuilder| -> NodeId {
                    if cut_set.contains(&(op, g)) {
                        return bank.iter().find(|(src, _)| *src == op).expect("bank value is ready").1;
                    }
                    match c.node(op).gate {
                        Gate::Input(_) => *inputs.entry(op).or_insert_with(|| {
                            push(b, format!("{}@{}", c.node(op).name, at + 1), c.node(op).gate)
                        }),
                        Gate::Const(bit) => *consts[usize::from(bit)].get_or_insert_with(|| {
                            push(b, format!("const{}", u8::from(bit)), Gate::Const(bit))
                        }),
                        _ => value_at[&(op, d - 1)],
                    }
                };
                let gate = match c.node(g).gate {
                    Gate::And(x, y) => Gate::And(operand(x, &mut b), operand(y, &mut b)),
                    Gate::Or(x, y) => Gate::Or(operand(x, &mut b), operand(y, &mut b)),
                    Gate::Not(x) => Gate::Not(operand(x, &mut b)),
                    Gate::Copy(x) => Gate::Copy(operand(x, &mut b)),
                    _ => unreachable!("blocks hold gates"),
                };
                let id = push(&mut b, format!("{}@{}", c.node(g).name, at + 1), gate);
                layers[at].push(id);
                value_at.insert((g, d), id);
                width += 1;
            }
            // copy chains inside the block
            for &g in &block.gates {
                let lvl = block.level[&g];
                if lvl < d && d < need.get(&g).copied().unwrap_or(0) {
                    let prev = value_at[&(g, d - 1)];
                    let id = push(&mut b, format!("{}@{}", c.node(g).name, at + 1), Gate::Copy(prev));
                    layers[at].push(id);
                    value_at.insert((g, d), id);
                    width += 1;
                }
            }
            block_width = usize::max(block_width, width);
            // bank registers still awaiting a reader in a later layer
            bank.retain(|(src, _)| last_read.get(src).is_some_and(|&last| last > at));
            for (src, carrier) in bank.iter_mut() {
                let id = push(&mut b, format!("{}@{}", c.node(*src).name, at + 1), Gate::Copy(*carrier));
                layers[at].push(id);
                *carrier = id;
            }
            max_bank = max_bank.max(bank.len());
        }
        let done = value_at[&(block.root, block.len)];
        if block.root == out {
            output = Some(done);
        } else {
            bank.push((block.root, done));
        }
    }
    let lc = LayeredCircuit::from_parts(b.finish(output.expect("the output block runs last"))?, layers)?;
    let block_depth = blocks.iter().map(|b| b.len).max().unwrap_or(0);
    let report = report(c, &lc, cut, max_bank, block_width, block_depth, blocks.len());
    Ok((lc, report.into_result()?))
}

fn report(
    c: &Circuit,
    lc: &LayeredCircuit,
    cut: &[Edge],
    bank: usize,
    block_width: usize,
    block_depth: usize,
    blocks: usize,
) -> ConversionReport {
    ConversionReport {
        s: c.size(),
        w: layer(c).width(),
        n: c.num_actual(),
        m: c.num_guess(),
        out_size: lc.circuit().size(),
        out_width: lc.width(),
        checks: vec![Check::new("out_width", lc.width(), cut.len() + block_width)],
        extras: vec![
            ("cut", cut.len().to_string()),
            ("bank_width", bank.to_string()),
            ("block_width", block_width.to_string()),
            ("block_depth", block_depth.to_string()),
            ("blocks", blocks.to_string()),
            ("depth", c.depth().to_string()),
            ("depth_after_cut", gate_depth_without(c, cut).to_string()),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    fn not_chain(len: usize) -> Circuit {
        let mut text = "var x\ng0 = input x\n".to_string();
        for i in 1..=len {
            text += &format!("g{i} = not g{}\n", i - 1);
        }
        text += &format!("output g{len}\n");
        parse_circuit(&text).unwrap()
    }

    #[test]
    fn chain_of_eight() {
        let c = not_chain(8);
        let cut = valiant_cut(&c, 4);
        assert!(!cut.is_empty());
        assert!(gate_depth_without(&c, &cut) <= 4);
        let (lc, report) = cut_to_bounded_width(&c, &cut).unwrap();
        assert_eq!(lc.circuit().truth_table(), c.truth_table());
        assert!(report.ok());
    }

    #[test]
    fn shallow_circuit_needs_no_cut() {
        let c = not_chain(3);
        assert!(valiant_cut(&c, 3).is_empty());
        let (lc, _) = cut_to_bounded_width(&c, &[]).unwrap();
        assert_eq!(lc.circuit().size(), 3);
        assert_eq!(lc.width(), 1);
        assert_eq!(lc.circuit().truth_table(), c.truth_table());
    }

    #[test]
    fn shared_subcircuit_with_cut() {
        let c = parse_circuit(
            "var a\nvar b\nx = input a\ny = input b\ng1 = and x y\ng2 = not g1\ng3 = or g2 x\n\
             g4 = and g3 g1\ng5 = not g4\ng6 = or g5 g2\noutput g6\n",
        )
        .unwrap();
        for target in 1..=c.depth() {
            let cut = valiant_cut(&c, target);
            assert!(gate_depth_without(&c, &cut) <= target);
            let (lc, report) = cut_to_bounded_width(&c, &cut).unwrap();
            assert_eq!(lc.circuit().truth_table(), c.truth_table(), "target {target}");
            assert!(report.ok());
        }
    }

    #[test]
    fn rejects_foreign_edges() {
        let c = not_chain(2);
        assert_eq!(
            cut_to_bounded_width(&c, &[(0, 2)]),
            Err(ConvertError::NotACutEdge { from: 0, to: 2 })
        );
    }
}
