use std::collections::HashMap;

use super::{Check, ConversionReport, ConvertError};
use crate::bp::{BpNode, BpNodeId, BpNodeKind, BranchingProgram};
use crate::circuit::{Gate, LayeredCircuit, NodeId};

/// Largest layered width accepted by [`circuit_to_bp`].
pub const MAX_BP_WIDTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Compute(NodeId),
    Read(NodeId),
}

/// Lowers a layered circuit to a branching program reading each input node
/// of the output cone once per path.
///
/// The layers are flattened into a straight-line program. Within a layer,
/// gates that need no new input are computed first; then each input node is
/// read in order of first use, followed by the gates it completes. Every
/// read becomes one level of program nodes, one per reachable setting of
/// the values that are live across the read: previous-layer values still
/// needed, gates of the current layer already computed, and inputs read but
/// not yet consumed. That is at most `2w` bits, so a level holds at most
/// `4^w` nodes. Computations between reads are folded into the edges.
///
/// Checked bounds: size at most `4^w (R + 1) + 2` for `R` reads, and no
/// actual variable read more often on a path than it labels input nodes.
pub fn circuit_to_bp(lc: &LayeredCircuit) -> Result<(BranchingProgram, ConversionReport), ConvertError> {
    let w = lc.width();
    if w > MAX_BP_WIDTH {
        return Err(ConvertError::WidthCap {
            width: w,
            cap: MAX_BP_WIDTH,
        });
    }
    let c = lc.circuit();
    let nodes = c.nodes();
    let out = c.output();
    let steps = linearize(lc);

    let mut defined_at = vec![usize::MAX; nodes.len()];
    let mut last_use = vec![0usize; nodes.len()];
    for (i, step) in steps.iter().enumerate() {
        match *step {
            Step::Read(v) => defined_at[v] = i,
            Step::Compute(g) => {
                defined_at[g] = i;
                for op in nodes[g].gate.operands() {
                    last_use[op] = i;
                }
            }
        }
    }
    last_use[out] = steps.len();
    let reads: Vec<usize> = (0..steps.len())
        .filter(|&i| matches!(steps[i], Step::Read(_)))
        .collect();
    // live values across each read, in node order
    let held: Vec<Vec<NodeId>> = reads
        .iter()
        .map(|&r| {
            (0..nodes.len())
                .filter(|&v| defined_at[v] < r && last_use[v] > r)
                .collect()
        })
        .collect();

    let mut val = vec![false; nodes.len()];
    for (id, node) in nodes.iter().enumerate() {
        if let Gate::Const(bit) = node.gate {
            val[id] = bit;
        }
    }
    let run = |val: &mut [bool], from: usize, to: usize| {
        for step in &steps[from..to] {
            if let Step::Compute(g) = *step {
                val[g] = match nodes[g].gate {
                    Gate::And(a, b) => val[a] && val[b],
                    Gate::Or(a, b) => val[a] || val[b],
                    Gate::Not(a) => !val[a],
                    Gate::Copy(a) => val[a],
                    _ => unreachable!("only gates are computed"),
                };
            }
        }
    };
    let encode = |val: &[bool], held: &[NodeId]| {
        held.iter()
            .enumerate()
            .fold(0u32, |m, (i, &v)| m | (u32::from(val[v]) << i))
    };
    let segment_end = |j: usize| reads.get(j + 1).copied().unwrap_or(steps.len());

    let mut bp_nodes: Vec<BpNode> = Vec::new();
    let mut sinks: [Option<BpNodeId>; 2] = [None, None];
    let mut sink = |bp_nodes: &mut Vec<BpNode>, bit: bool| {
        *sinks[usize::from(bit)].get_or_insert_with(|| {
            bp_nodes.push(BpNode {
                name: format!("sink{}", u8::from(bit)),
                kind: BpNodeKind::Sink(bit),
            });
            bp_nodes.len() - 1
        })
    };

    run(&mut val, 0, reads.first().copied().unwrap_or(steps.len()));
    let mut level_width = 1;
    let start = if reads.is_empty() {
        sink(&mut bp_nodes, val[out])
    } else {
        let var_name = |r: usize| match steps[r] {
            Step::Read(v) => match nodes[v].gate {
                Gate::Input(i) => c.actual_vars()[i].clone(),
                Gate::Guess(i) => c.guess_vars()[i].clone(),
                _ => unreachable!("only input nodes are read"),
            },
            Step::Compute(_) => unreachable!(),
        };
        let new_reader = |bp_nodes: &mut Vec<BpNode>, j: usize, mask: u32| {
            let bits: String = (0..held[j].len())
                .map(|i| if (mask >> i) & 1 == 1 { '1' } else { '0' })
                .collect();
            let name = if bits.is_empty() {
                format!("m{j}")
            } else {
                format!("m{j}_{bits}")
            };
            bp_nodes.push(BpNode {
                name,
                kind: BpNodeKind::Read {
                    var: var_name(reads[j]),
                    edges: Vec::with_capacity(2),
                },
            });
            bp_nodes.len() - 1
        };

        let start = new_reader(&mut bp_nodes, 0, encode(&val, &held[0]));
        let mut level: Vec<(u32, BpNodeId)> = vec![(encode(&val, &held[0]), start)];
        for j in 0..reads.len() {
            level_width = level_width.max(level.len());
            let Step::Read(read) = steps[reads[j]] else { unreachable!() };
            let mut next: Vec<(u32, BpNodeId)> = Vec::new();
            let mut next_index: HashMap<u32, BpNodeId> = HashMap::new();
            for &(mask, id) in &level {
                for bit in [false, true] {
                    for (i, &v) in held[j].iter().enumerate() {
                        val[v] = (mask >> i) & 1 == 1;
                    }
                    val[read] = bit;
                    run(&mut val, reads[j] + 1, segment_end(j));
                    let target = if j + 1 < reads.len() {
                        let m = encode(&val, &held[j + 1]);
                        *next_index.entry(m).or_insert_with(|| {
                            let t = new_reader(&mut bp_nodes, j + 1, m);
                            next.push((m, t));
                            t
                        })
                    } else {
                        sink(&mut bp_nodes, val[out])
                    };
                    if let BpNodeKind::Read { edges, .. } = &mut bp_nodes[id].kind {
                        edges.push((bit, target));
                    }
                }
            }
            level = next;
        }
        start
    };

    let bp = BranchingProgram::new(
        bp_nodes,
        start,
        c.actual_vars().to_vec(),
        c.guess_vars().to_vec(),
    )?;

    let r = reads.len();
    let limit = 4usize.pow(w as u32).saturating_mul(r + 1).saturating_add(2);
    let counts = bp.max_read_counts();
    let multiplicity = c.read_multiplicities();
    let excess = c
        .actual_vars()
        .iter()
        .filter(|v| counts[*v] > multiplicity[*v])
        .count();
    let stats = bp.stats();
    let report = ConversionReport {
        s: c.size(),
        w,
        n: c.num_actual(),
        m: c.num_guess(),
        out_size: bp.size(),
        out_width: level_width,
        checks: vec![
            Check::new("out_size", bp.size(), limit),
            Check::new("read_excess", excess, 0),
        ],
        extras: vec![("reads", r.to_string()), ("read_k", stats.read_k().to_string())],
    }
    .into_result()?;
    Ok((bp, report))
}

/// Flattens the output cone into compute and read steps, layer by layer.
fn linearize(lc: &LayeredCircuit) -> Vec<Step> {
    let c = lc.circuit();
    let nodes = c.nodes();
    let cone = c.output_cone();
    let mut available: Vec<bool> = nodes.iter().map(|n| matches!(n.gate, Gate::Const(_))).collect();
    let mut steps = Vec::new();

    let flush = |pending: &mut Vec<NodeId>, available: &mut Vec<bool>, steps: &mut Vec<Step>| {
        pending.retain(|&g| {
            if nodes[g].gate.operands().all(|op| available[op]) {
                steps.push(Step::Compute(g));
                available[g] = true;
                false
            } else {
                true
            }
        });
    };

    for layer in lc.layers() {
        let gates: Vec<NodeId> = layer.iter().copied().filter(|&g| cone[g]).collect();
        let mut pending = gates.clone();
        flush(&mut pending, &mut available, &mut steps);
        for &g in &gates {
            for op in nodes[g].gate.operands() {
                if nodes[op].gate.is_input() && !available[op] {
                    steps.push(Step::Read(op));
                    available[op] = true;
                    flush(&mut pending, &mut available, &mut steps);
                }
            }
        }
        debug_assert!(pending.is_empty(), "layer gates read only earlier values");
    }
    let out = c.output();
    if nodes[out].gate.is_input() {
        steps.push(Step::Read(out));
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Assignment;
    use crate::bp::EvalMode;
    use crate::circuit::{layer, parse_circuit};

    fn check_equivalent(text: &str) -> (BranchingProgram, ConversionReport) {
        let c = parse_circuit(text).unwrap();
        let (bp, report) = circuit_to_bp(&layer(&c)).unwrap();
        let names = c.actual_vars().to_vec();
        let table = c.truth_table();
        for (i, &expected) in table.iter().enumerate() {
            let a: Assignment = names
                .iter()
                .enumerate()
                .map(|(j, v)| (v.clone(), (i >> j) & 1 == 1))
                .collect();
            assert_eq!(bp.evaluate(&a, EvalMode::Strict).unwrap(), expected, "{a}");
            assert_eq!(bp.evaluate(&a, EvalMode::Free).unwrap(), expected, "{a}");
        }
        (bp, report)
    }

    #[test]
    fn single_not() {
        let (bp, report) = check_equivalent("var x1\ng1 = input x1\nn1 = not g1\noutput n1\n");
        assert_eq!(bp.size(), 3);
        assert_eq!(report.checks[0].limit, 10);
        assert_eq!(
            bp.to_text(),
            "var x1\nstart m0\nnode m0 x1\nedge m0 0 sink1\nedge m0 1 sink0\nsink sink1 1\nsink sink0 0\n"
        );
    }

    #[test]
    fn guess_forced_by_conjunction() {
        let (bp, _) = check_equivalent("var x1\nguess y1\na = input x1\nb = guess y1\ng = and a b\noutput g\n");
        assert_eq!(bp.guess_vars(), ["y1"]);
    }

    #[test]
    fn degenerate_outputs() {
        let (bp, report) = check_equivalent("var x\nk = const 1\nn = not k\noutput n\n");
        assert_eq!(bp.size(), 1);
        assert_eq!(report.extra("reads"), Some("0"));
        let (bp, _) = check_equivalent("var x\na = input x\noutput a\n");
        assert_eq!(bp.size(), 3);
    }

    #[test]
    fn read_twice_circuit_stays_read_twice() {
        let (bp, report) = check_equivalent(
            "var x\nvar y\na = input x\nb = input y\ng = and a b\nh = not a\nc = input x\n\
             k = or h c\no = or g k\noutput o\n",
        );
        assert_eq!(bp.stats().read_counts["x"], 2);
        assert_eq!(bp.stats().read_counts["y"], 1);
        assert!(report.ok());
    }

    #[test]
    fn long_chains_and_shared_inputs() {
        check_equivalent(
            "var a\nvar b\nvar c\nx = input a\ny = input b\nz = input c\n\
             g1 = and x y\ng2 = or g1 z\ng3 = not g2\ng4 = and g3 x\ng5 = or g4 g1\noutput g5\n",
        );
    }

    #[test]
    fn width_cap() {
        let mut text = String::new();
        for i in 0..13 {
            text += &format!("var x{i}\ni{i} = input x{i}\ng{i} = not i{i}\n");
        }
        let mut acc = "g0".to_string();
        for i in 1..13 {
            text += &format!("h{i} = and {acc} g{i}\n");
            acc = format!("h{i}");
        }
        text += &format!("output {acc}\n");
        let lc = layer(&parse_circuit(&text).unwrap());
        assert!(lc.width() > MAX_BP_WIDTH);
        assert!(matches!(circuit_to_bp(&lc), Err(ConvertError::WidthCap { .. })));
    }
}
