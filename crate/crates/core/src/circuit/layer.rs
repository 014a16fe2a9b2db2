//! Layered circuits and ASAP layering with COPY insertion.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use super::{Circuit, CircuitBuilder, CircuitError, Gate, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerError {
    #[error("gate `{0}` is not assigned to any layer")]
    Unlayered(String),
    #[error("node `{0}` appears in more than one layer")]
    Duplicate(String),
    #[error("`{0}` is an input or constant and cannot occupy a layer")]
    NotAGate(String),
    #[error("edge `{from}` -> `{to}` does not connect adjacent layers")]
    NonAdjacent { from: String, to: String },
    #[error("input node `{0}` is read by gates in more than one layer")]
    InputReadTwice(String),
    #[error("output gate `{0}` is not in the last layer")]
    OutputNotLast(String),
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A circuit together with a partition of its gates into layers.
///
/// Invariants, checked by [`LayeredCircuit::from_parts`]:
/// - every AND/OR/NOT/COPY node is in exactly one layer, inputs and
///   constants are in none, and no layer is empty;
/// - every gate-to-gate edge goes from layer `t` to layer `t + 1`;
/// - each input node is read by gates of at most one layer, and an input
///   node that is the output is read by no gate;
/// - an output gate sits in the last layer.
///
/// Constants may feed any layer. The last three conditions make the layer
/// boundary the only state a left-to-right evaluation has to carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredCircuit {
    base: Circuit,
    layers: Vec<Vec<NodeId>>,
    layer_of: Vec<Option<usize>>,
    width: usize,
    copy_count: usize,
}

impl LayeredCircuit {
    pub fn from_parts(base: Circuit, layers: Vec<Vec<NodeId>>) -> Result<Self, LayerError> {
        let nodes = base.nodes();
        let mut layer_of = vec![None; nodes.len()];
        for (t, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(LayerError::EmptyLayer(t + 1));
            }
            for &id in layer {
                let node = &nodes[id];
                if !node.gate.is_gate() {
                    return Err(LayerError::NotAGate(node.name.clone()));
                }
                if layer_of[id].replace(t).is_some() {
                    return Err(LayerError::Duplicate(node.name.clone()));
                }
            }
        }
        let mut input_layer: HashMap<NodeId, usize> = HashMap::new();
        for (id, node) in nodes.iter().enumerate() {
            if !node.gate.is_gate() {
                continue;
            }
            let t = layer_of[id].ok_or_else(|| LayerError::Unlayered(node.name.clone()))?;
            for op in node.gate.operands() {
                let operand = &nodes[op];
                if operand.gate.is_gate() {
                    if layer_of[op].map(|s| s + 1) != Some(t) {
                        return Err(LayerError::NonAdjacent {
                            from: operand.name.clone(),
                            to: node.name.clone(),
                        });
                    }
                } else if operand.gate.is_input() && *input_layer.entry(op).or_insert(t) != t {
                    return Err(LayerError::InputReadTwice(operand.name.clone()));
                }
            }
        }
        let out = base.output();
        if base.node(out).gate.is_gate() {
            if layer_of[out] != Some(layers.len() - 1) {
                return Err(LayerError::OutputNotLast(base.node(out).name.clone()));
            }
        } else if input_layer.contains_key(&out) {
            return Err(LayerError::InputReadTwice(base.node(out).name.clone()));
        }
        let width = layers.iter().map(Vec::len).max().unwrap_or(0);
        let copy_count = base.copy_count();
        Ok(LayeredCircuit {
            base,
            layers,
            layer_of,
            width,
            copy_count,
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.base
    }

    pub fn into_circuit(self) -> Circuit {
        self.base
    }

    /// Layers in order; `layers()[0]` is layer 1.
    pub fn layers(&self) -> &[Vec<NodeId>] {
        &self.layers
    }

    /// Zero-based layer index of a gate.
    pub fn layer_of(&self, id: NodeId) -> Option<usize> {
        self.layer_of[id]
    }

    /// Maximum number of gates (COPY included) in a layer.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn copy_count(&self) -> usize {
        self.copy_count
    }

    pub fn layer_widths(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// Serializes to the layered text form.
    pub fn to_text(&self) -> String {
        super::text::write_layers(self)
    }
}

/// Layers `c` by gate depth, inserting COPY chains so that every gate-to-gate
/// edge joins adjacent layers.
///
/// Input nodes are read in a single layer: when an input node feeds gates in
/// several layers, a COPY chain starting in the earliest of them carries the
/// value to the later ones. A gate output that is not in the last layer is
/// carried to it the same way. Non-COPY gates are untouched.
pub fn layer(c: &Circuit) -> LayeredCircuit {
    let nodes = c.nodes();
    let depth = c.gate_depths();
    let last = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.gate.is_gate())
        .map(|(id, _)| depth[id])
        .max()
        .unwrap_or(0);

    // Layers in which each node is consumed. The output counts as consumed
    // just after the last layer.
    let mut demand: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
    for (id, node) in nodes.iter().enumerate() {
        for op in node.gate.operands() {
            demand[op].insert(depth[id]);
        }
    }
    if last > 0 {
        demand[c.output()].insert(last + 1);
    }

    let mut used: HashSet<String> = nodes.iter().map(|n| n.name.clone()).collect();
    let mut fresh = |base: &str, t: usize| {
        let mut name = format!("{base}@{t}");
        while !used.insert(name.clone()) {
            name.push('\'');
        }
        name
    };

    let mut b = CircuitBuilder::new();
    for v in c.actual_vars() {
        b.declare_var(v);
    }
    for v in c.guess_vars() {
        b.declare_guess(v);
    }
    let mut layers: Vec<Vec<NodeId>> = vec![Vec::new(); last];
    // new id of each original node, and of its copy in each layer
    let mut remap = vec![0usize; nodes.len()];
    let mut copy_at: HashMap<(NodeId, usize), NodeId> = HashMap::new();
    // where a consumer in layer t finds operand `op`
    let source = |op: NodeId, t: usize, remap: &[NodeId], copy_at: &HashMap<(NodeId, usize), NodeId>| {
        copy_at.get(&(op, t - 1)).copied().unwrap_or(remap[op])
    };

    for (id, node) in nodes.iter().enumerate() {
        let t = depth[id];
        let gate = node
            .gate
            .map_operands(|op| source(op, t, &remap, &copy_at));
        let new_id = b.push_named(node.name.clone(), gate);
        remap[id] = new_id;
        if node.gate.is_gate() {
            layers[t - 1].push(new_id);
        }

        let (Some(&first), Some(&max)) = (demand[id].first(), demand[id].last()) else {
            continue;
        };
        // Copies span layers [start, max - 1].
        let start = match node.gate {
            Gate::Const(_) => continue,
            Gate::Input(_) | Gate::Guess(_) => {
                if demand[id].len() == 1 {
                    continue;
                }
                first
            }
            _ => t + 1,
        };
        let mut prev = new_id;
        for layer_idx in start..max {
            let copy = b.push_named(fresh(&node.name, layer_idx), Gate::Copy(prev));
            layers[layer_idx - 1].push(copy);
            copy_at.insert((id, layer_idx), copy);
            prev = copy;
        }
    }

    let out = c.output();
    let new_out = if last > 0 {
        copy_at.get(&(out, last)).copied().unwrap_or(remap[out])
    } else {
        remap[out]
    };
    let circuit = b
        .finish(new_out)
        .expect("layering preserves circuit invariants");
    LayeredCircuit::from_parts(circuit, layers).expect("layering produces a valid layered circuit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    fn check_equivalent(c: &Circuit, lc: &LayeredCircuit) {
        assert_eq!(c.truth_table(), lc.circuit().truth_table());
        assert_eq!(c.size(), lc.circuit().size());
    }

    #[test]
    fn two_ands_under_an_or() {
        let c = parse_circuit(
            "var x1\nvar x2\nvar x3\nvar x4\na = input x1\nb = input x2\nc = input x3\nd = input x4\n\
             p = and a b\nq = and c d\nr = or p q\noutput r\n",
        )
        .unwrap();
        let lc = layer(&c);
        assert_eq!(lc.layer_widths(), vec![2, 1]);
        assert_eq!(lc.width(), 2);
        assert_eq!(lc.copy_count(), 0);
        check_equivalent(&c, &lc);
    }

    #[test]
    fn input_enters_late_layer_directly() {
        let c = parse_circuit(
            "var x1\nvar x2\nvar x3\na = input x1\nb = input x2\nc = input x3\n\
             i = and b c\no = and a i\noutput o\n",
        )
        .unwrap();
        let lc = layer(&c);
        assert_eq!(lc.layer_widths(), vec![1, 1]);
        assert_eq!(lc.copy_count(), 0);
        check_equivalent(&c, &lc);
    }

    #[test]
    fn long_edge_gets_a_copy_chain() {
        // g feeds the top OR, three layers above it.
        let c = parse_circuit(
            "var x\na = input x\ng = not a\nh1 = not g\nh2 = not h1\no = or g h2\noutput o\n",
        )
        .unwrap();
        let lc = layer(&c);
        assert_eq!(lc.copy_count(), 2);
        assert_eq!(lc.layer_widths(), vec![1, 2, 2, 1]);
        check_equivalent(&c, &lc);
    }

    #[test]
    fn input_read_in_two_layers_is_carried() {
        let c = parse_circuit("var x\nvar y\na = input x\nb = input y\ng = and a b\no = or g a\noutput o\n")
            .unwrap();
        let lc = layer(&c);
        // a is read in layer 1 only; layer 2 reads its copy.
        assert_eq!(lc.copy_count(), 1);
        assert_eq!(lc.layer_widths(), vec![2, 1]);
        check_equivalent(&c, &lc);
    }

    #[test]
    fn output_below_top_layer() {
        let c = parse_circuit(
            "var x\na = input x\ng = not a\nh1 = not g\nh2 = not h1\noutput g\n",
        )
        .unwrap();
        let lc = layer(&c);
        let out = lc.circuit().output();
        assert_eq!(lc.layer_of(out), Some(2));
        check_equivalent(&c, &lc);
    }

    #[test]
    fn gateless_and_single_gate() {
        let c = parse_circuit("var x\na = input x\noutput a\n").unwrap();
        let lc = layer(&c);
        assert_eq!(lc.width(), 0);
        assert!(lc.layers().is_empty());

        let c = parse_circuit("var x\na = input x\nn = not a\noutput n\n").unwrap();
        assert_eq!(layer(&c).width(), 1);
    }

    #[test]
    fn k_parallel_ands() {
        let mut b = CircuitBuilder::new();
        let mut tops = Vec::new();
        for i in 0..5 {
            let x = b.input(&format!("x{i}"));
            let y = b.input(&format!("y{i}"));
            tops.push(b.and(x, y));
        }
        let c = b.finish(tops[0]).unwrap();
        assert_eq!(layer(&c).width(), 5);
    }

    #[test]
    fn pyramid_of_height_three() {
        // rows of 4, 3, 2, 1 gates above 5 inputs; hand count: densest row 4
        let mut b = CircuitBuilder::new();
        let mut row: Vec<_> = (0..5).map(|i| b.input(&format!("x{i}"))).collect();
        while row.len() > 1 {
            row = row.windows(2).map(|w| b.and(w[0], w[1])).collect();
        }
        let c = b.finish(row[0]).unwrap();
        let lc = layer(&c);
        assert_eq!(lc.layer_widths(), vec![4, 3, 2, 1]);
        assert_eq!(lc.width(), 4);
    }

    #[test]
    fn rejects_bad_partitions() {
        let c = parse_circuit("var x\na = input x\ng = not a\nh = not g\noutput h\n").unwrap();
        let g = c.find_node("g").unwrap();
        let h = c.find_node("h").unwrap();
        let a = c.find_node("a").unwrap();
        assert!(LayeredCircuit::from_parts(c.clone(), vec![vec![g, h]]).is_err());
        assert!(LayeredCircuit::from_parts(c.clone(), vec![vec![g]]).is_err());
        assert!(LayeredCircuit::from_parts(c.clone(), vec![vec![a], vec![g], vec![h]]).is_err());
        assert!(LayeredCircuit::from_parts(c.clone(), vec![vec![h], vec![g]]).is_err());
        assert!(LayeredCircuit::from_parts(c, vec![vec![g], vec![h]]).is_ok());
    }
}
