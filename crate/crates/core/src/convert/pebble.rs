use std::collections::HashSet;

use super::{Check, ConversionReport, ConvertError};
use crate::circuit::{layer, Circuit, CircuitBuilder, Gate, LayeredCircuit, NodeId};
use crate::pebbling::{validate, Measures, Mode, Move, PebbleGraph, Pebbling, Vertex};

/// Operand of a gadget step: the two registers, or the checked vertex's
/// inputs. For a source vertex `A` is the freshly read variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Src {
    R1,
    R2,
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Copy(Src),
    Not(Src),
    And(Src, Src),
    Or(Src, Src),
}

impl Op {
    fn reads(self, s: Src) -> bool {
        match self {
            Op::Copy(x) | Op::Not(x) => x == s,
            Op::And(x, y) | Op::Or(x, y) => x == s || y == s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reg {
    R1,
    R2,
}

/// A two-register verification circuit. Each step is one layer computing
/// the new `(r1, r2)` from the old registers and the operands. Starting from
/// `r1 = guess` and `r2 = valid`, the result register ends holding
/// `valid AND (guess == f(A, B))`.
struct Gadget {
    steps: &'static [(Op, Op)],
    result: Reg,
}

use Src::{A, B, R1, R2};

const CHECK_COPY: Gadget = Gadget {
    steps: &[
        (Op::Not(R2), Op::And(R1, R2)),
        (Op::Copy(R2), Op::Or(R1, R2)),
        (Op::Copy(R1), Op::Or(R2, A)),
        (Op::Not(R2), Op::And(R1, A)),
        (Op::Copy(R1), Op::Or(R1, R2)),
    ],
    result: Reg::R2,
};

const CHECK_NOT: Gadget = Gadget {
    steps: &[
        (Op::And(R1, R2), Op::And(R2, A)),
        (Op::And(R1, R2), Op::Or(R1, R2)),
        (Op::Not(R1), Op::Copy(R2)),
        (Op::And(R1, R2), Op::Copy(R1)),
    ],
    result: Reg::R1,
};

/// Like [`CHECK_COPY`], but reads `A` in a single step so that a fresh input
/// node is consumed within one layer.
const CHECK_SOURCE: Gadget = Gadget {
    steps: &[
        (Op::Not(R2), Op::And(R1, R2)),
        (Op::Copy(R2), Op::Or(R1, R2)),
        (Op::And(R1, A), Op::Or(R2, A)),
        (Op::Not(R2), Op::Copy(R1)),
        (Op::Copy(R1), Op::Or(R1, R2)),
    ],
    result: Reg::R2,
};

const CHECK_AND: Gadget = Gadget {
    steps: &[
        (Op::Not(R1), Op::Copy(R2)),
        (Op::And(R1, R2), Op::And(R2, A)),
        (Op::Copy(R1), Op::And(R2, B)),
        (Op::And(R1, R2), Op::Or(R1, R2)),
        (Op::Not(R1), Op::Copy(R2)),
        (Op::And(R1, R2), Op::Copy(R1)),
    ],
    result: Reg::R1,
};

const CHECK_OR: Gadget = Gadget {
    steps: &[
        (Op::Not(R2), Op::And(R1, R2)),
        (Op::Copy(R2), Op::Or(R1, A)),
        (Op::Copy(R1), Op::Or(R2, B)),
        (Op::And(R1, R2), Op::Or(R1, R2)),
        (Op::Not(R2), Op::Copy(R1)),
        (Op::Copy(R1), Op::Or(R1, R2)),
    ],
    result: Reg::R2,
};

/// Compiles a black pebbling of `c`'s output cone into a layered circuit.
///
/// `p` indexes the vertices of [`PebbleGraph::from_circuit`]. Each black
/// placement opens a layer holding the placed vertex's gate, wired to the
/// values of its predecessors in the previous layer, and a COPY of every
/// other pebbled vertex. A placed source becomes a fresh input node and a
/// COPY. Removals emit nothing. Checked bounds: width at most `space(p)` and
/// size at most the number of black placements.
pub fn black_pebbling_to_circuit(
    c: &Circuit,
    p: &Pebbling,
) -> Result<(LayeredCircuit, ConversionReport), ConvertError> {
    let (mut compiler, measures) = Compiler::new(c, p, Mode::Black)?;
    for &m in &p.moves {
        compiler.apply(m);
    }
    let lc = compiler.finish()?;
    let placements = p.black_placements();
    let report = ConversionReport {
        s: c.size(),
        w: layer(c).width(),
        n: c.num_actual(),
        m: c.num_guess(),
        out_size: lc.circuit().size(),
        out_width: lc.width(),
        checks: vec![
            Check::new("out_width", lc.width(), measures.space),
            Check::new("out_size", lc.circuit().size(), placements),
        ],
        extras: vec![
            ("time", measures.time.to_string()),
            ("space", measures.space.to_string()),
            ("placements", placements.to_string()),
        ],
    }
    .into_result()?;
    Ok((lc, report))
}

/// Compiles a black-white pebbling of `c`'s output cone into a
/// nondeterministic layered circuit.
///
/// Black moves compile as in [`black_pebbling_to_circuit`]. Placing a white
/// pebble reads a fresh guess variable for the vertex. Removing it runs a
/// two-register gadget that recomputes the vertex from its predecessors and
/// folds the comparison with the guess into a validity wire; the output is
/// the sink value AND the validity wire. Any wrong guess therefore forces the
/// output to 0, and correct guesses reproduce `c`. Checked bounds: width at
/// most `space(p) + 1` and size at most `6 time(p)`.
pub fn bw_pebbling_to_circuit(
    c: &Circuit,
    p: &Pebbling,
) -> Result<(LayeredCircuit, ConversionReport), ConvertError> {
    let (mut compiler, measures) = Compiler::new(c, p, Mode::BlackWhite)?;
    for &m in &p.moves {
        compiler.apply(m);
    }
    let lc = compiler.finish()?;
    let report = ConversionReport {
        s: c.size(),
        w: layer(c).width(),
        n: c.num_actual(),
        m: c.num_guess(),
        out_size: lc.circuit().size(),
        out_width: lc.width(),
        checks: vec![
            Check::new("out_width", lc.width(), measures.space + 1),
            Check::new("out_size", lc.circuit().size(), 6 * measures.time),
        ],
        extras: vec![
            ("time", measures.time.to_string()),
            ("space", measures.space.to_string()),
            ("whites", p.white_placements().to_string()),
            ("guesses", lc.circuit().num_guess().to_string()),
        ],
    }
    .into_result()?;
    Ok((lc, report))
}

struct Compiler<'a> {
    c: &'a Circuit,
    g: PebbleGraph,
    /// Circuit node of each vertex, and back.
    node_of: Vec<NodeId>,
    vertex_of: Vec<Option<Vertex>>,
    b: CircuitBuilder,
    names: HashSet<String>,
    layers: Vec<Vec<NodeId>>,
    /// The node holding each pebbled vertex's value in the last layer.
    carried: Vec<Option<NodeId>>,
    /// Conjunction of all checks so far; `None` stands for constant 1.
    valid: Option<NodeId>,
    one: Option<NodeId>,
}

impl<'a> Compiler<'a> {
    fn new(c: &'a Circuit, p: &Pebbling, mode: Mode) -> Result<(Self, Measures), ConvertError> {
        if !c.is_deterministic() {
            return Err(ConvertError::Nondeterministic);
        }
        let g = PebbleGraph::from_circuit(c);
        let measures = validate(&g, p, mode)?;
        let node_of: Vec<NodeId> = g
            .names()
            .iter()
            .map(|name| c.find_node(name).expect("graph vertices are circuit nodes"))
            .collect();
        let mut vertex_of = vec![None; c.nodes().len()];
        for (v, &id) in node_of.iter().enumerate() {
            vertex_of[id] = Some(v);
        }
        let mut b = CircuitBuilder::new();
        for v in c.actual_vars() {
            b.declare_var(v);
        }
        let compiler = Compiler {
            c,
            carried: vec![None; g.len()],
            g,
            node_of,
            vertex_of,
            b,
            names: HashSet::new(),
            layers: Vec::new(),
            valid: None,
            one: None,
        };
        Ok((compiler, measures))
    }

    fn push(&mut self, name: String, gate: Gate) -> NodeId {
        let mut name = name;
        while !self.names.insert(name.clone()) {
            name.push('\'');
        }
        self.b.push_named(name, gate)
    }

    fn push_in_layer(&mut self, name: String, gate: Gate) -> NodeId {
        let id = self.push(name, gate);
        self.layers.last_mut().expect("a layer is open").push(id);
        id
    }

    /// Opens a layer that copies every carried value and, if `with_valid`,
    /// the validity wire. Returns the 1-based layer number.
    fn open_layer(&mut self, with_valid: bool) -> usize {
        self.layers.push(Vec::new());
        let t = self.layers.len();
        for v in 0..self.g.len() {
            if let Some(prev) = self.carried[v] {
                let name = format!("{}@{t}", self.g.name(v));
                self.carried[v] = Some(self.push_in_layer(name, Gate::Copy(prev)));
            }
        }
        if with_valid {
            if let Some(prev) = self.valid {
                self.valid = Some(self.push_in_layer(format!("valid@{t}"), Gate::Copy(prev)));
            }
        }
        t
    }

    /// The vertex's value recomputed from its predecessors' carried values,
    /// or a fresh read for a source.
    fn source_node(&mut self, v: Vertex, t: usize) -> NodeId {
        let name = format!("{}@{t}.in", self.g.name(v));
        let gate = self.c.node(self.node_of[v]).gate;
        match gate {
            Gate::Input(_) | Gate::Const(_) => self.push(name, gate),
            _ => unreachable!("only sources are read"),
        }
    }

    fn carried_operand(&self, op: NodeId) -> NodeId {
        let v = self.vertex_of[op].expect("operands of cone nodes are in the cone");
        self.carried[v].expect("operands of a placed vertex are pebbled")
    }

    fn apply(&mut self, m: Move) {
        match m {
            Move::PlaceBlack(v) => {
                let gate = self.c.node(self.node_of[v]).gate;
                let operands = match gate {
                    Gate::And(a, b) | Gate::Or(a, b) => [Some(self.carried_operand(a)), Some(self.carried_operand(b))],
                    Gate::Not(a) | Gate::Copy(a) => [Some(self.carried_operand(a)), None],
                    _ => [None, None],
                };
                let t = self.open_layer(true);
                let gate = match gate {
                    Gate::And(..) => Gate::And(operands[0].unwrap(), operands[1].unwrap()),
                    Gate::Or(..) => Gate::Or(operands[0].unwrap(), operands[1].unwrap()),
                    Gate::Not(_) => Gate::Not(operands[0].unwrap()),
                    Gate::Copy(_) => Gate::Copy(operands[0].unwrap()),
                    _ => Gate::Copy(self.source_node(v, t)),
                };
                let name = format!("{}@{t}", self.g.name(v));
                self.carried[v] = Some(self.push_in_layer(name, gate));
            }
            Move::RemoveBlack(v) => self.carried[v] = None,
            Move::PlaceWhite(v) => {
                let t = self.open_layer(true);
                let mut var = format!("{}.{t}", self.g.name(v));
                while self.b.is_declared(&var) {
                    var.push('\'');
                }
                let index = self.b.declare_guess(&var);
                let y = self.push(format!("{}@{t}.guess", self.g.name(v)), Gate::Guess(index));
                let name = format!("{}@{t}", self.g.name(v));
                self.carried[v] = Some(self.push_in_layer(name, Gate::Copy(y)));
            }
            Move::RemoveWhite(v) => self.check(v),
        }
    }

    /// Runs the gadget for the white vertex `v` and retires its pebble.
    fn check(&mut self, v: Vertex) {
        let gate = self.c.node(self.node_of[v]).gate;
        let (gadget, preds) = match gate {
            Gate::And(a, b) => (&CHECK_AND, [Some(a), Some(b)]),
            Gate::Or(a, b) => (&CHECK_OR, [Some(a), Some(b)]),
            Gate::Not(a) => (&CHECK_NOT, [Some(a), None]),
            Gate::Copy(a) => (&CHECK_COPY, [Some(a), None]),
            _ => (&CHECK_SOURCE, [None, None]),
        };
        let mut r1 = self.carried[v].take().expect("a white vertex is carried");
        let mut r2 = match self.valid {
            Some(valid) => valid,
            None => *self.one.get_or_insert_with(|| {
                let mut name = "one".to_string();
                while !self.names.insert(name.clone()) {
                    name.push('\'');
                }
                self.b.push_named(name, Gate::Const(true))
            }),
        };
        let vname = self.g.name(v).to_string();
        let mut source = None;
        for (k, &(op1, op2)) in gadget.steps.iter().enumerate() {
            let operand = |me: &Self, slot: usize| preds[slot].map(|op| me.carried_operand(op));
            let a = operand(self, 0);
            let b = operand(self, 1);
            let t = self.layers.len() + 1;
            if preds[0].is_none() && (op1.reads(A) || op2.reads(A)) && source.is_none() {
                source = Some(self.source_node(v, t));
            }
            let resolve = |s: Src| match s {
                R1 => r1,
                R2 => r2,
                A => a.or(source).expect("gadget operand A is bound"),
                B => b.expect("gadget operand B is bound"),
            };
            let gates = [op1, op2].map(|op| match op {
                Op::Copy(x) => Gate::Copy(resolve(x)),
                Op::Not(x) => Gate::Not(resolve(x)),
                Op::And(x, y) => Gate::And(resolve(x), resolve(y)),
                Op::Or(x, y) => Gate::Or(resolve(x), resolve(y)),
            });
            self.open_layer(false);
            r1 = self.push_in_layer(format!("{vname}@{t}.check{k}a"), gates[0]);
            r2 = self.push_in_layer(format!("{vname}@{t}.check{k}b"), gates[1]);
        }
        self.valid = Some(match gadget.result {
            Reg::R1 => r1,
            Reg::R2 => r2,
        });
    }

    fn finish(mut self) -> Result<LayeredCircuit, ConvertError> {
        let z = self.carried[self.g.sink()].expect("the sink ends pebbled");
        let output = match self.valid {
            Some(valid) => {
                self.layers.push(Vec::new());
                let t = self.layers.len();
                self.push_in_layer(format!("out@{t}"), Gate::And(z, valid))
            }
            None => z,
        };
        let circuit = self.b.finish(output)?;
        Ok(LayeredCircuit::from_parts(circuit, self.layers)?)
    }
}

/// Realizes a graph as a deterministic circuit with matching shape: a
/// source becomes an input node of the variable named after it, a vertex
/// with one predecessor a NOT, and a vertex with two an AND on odd depths
/// and an OR on even ones. Nodes are named after their vertices.
pub fn realize_circuit(g: &PebbleGraph) -> Result<Circuit, ConvertError> {
    let mut b = CircuitBuilder::new();
    let mut id = vec![0; g.len()];
    let mut depth = vec![0usize; g.len()];
    for &v in g.topological_order() {
        let preds = g.preds(v);
        depth[v] = preds.iter().map(|&u| depth[u] + 1).max().unwrap_or(0);
        let gate = match *preds {
            [] => Gate::Input(b.declare_var(g.name(v))),
            [a] => Gate::Not(id[a]),
            [a, c] if depth[v] % 2 == 1 => Gate::And(id[a], id[c]),
            [a, c] => Gate::Or(id[a], id[c]),
            _ => {
                return Err(ConvertError::FanIn {
                    vertex: g.name(v).to_string(),
                    preds: preds.len(),
                })
            }
        };
        id[v] = b.push_named(g.name(v), gate);
    }
    Ok(b.finish(id[g.sink()])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::pebbling::{generate_strategy, guess_then_verify, Family};

    fn eval(op: Op, r1: bool, r2: bool, a: bool, b: bool) -> bool {
        let get = |s: Src| match s {
            R1 => r1,
            R2 => r2,
            A => a,
            B => b,
        };
        match op {
            Op::Copy(x) => get(x),
            Op::Not(x) => !get(x),
            Op::And(x, y) => get(x) && get(y),
            Op::Or(x, y) => get(x) || get(y),
        }
    }

    fn run(gadget: &Gadget, guess: bool, valid: bool, a: bool, b: bool) -> bool {
        let (mut r1, mut r2) = (guess, valid);
        for &(op1, op2) in gadget.steps {
            (r1, r2) = (eval(op1, r1, r2, a, b), eval(op2, r1, r2, a, b));
        }
        match gadget.result {
            Reg::R1 => r1,
            Reg::R2 => r2,
        }
    }

    #[test]
    fn gadgets_compute_the_check() {
        let table: [(&Gadget, fn(bool, bool) -> bool); 5] = [
            (&CHECK_COPY, |a, _| a),
            (&CHECK_SOURCE, |a, _| a),
            (&CHECK_NOT, |a, _| !a),
            (&CHECK_AND, |a, b| a && b),
            (&CHECK_OR, |a, b| a || b),
        ];
        for (gadget, f) in table {
            for bits in 0..16u8 {
                let [g, v, a, b] = [0, 1, 2, 3].map(|i| (bits >> i) & 1 == 1);
                assert_eq!(run(gadget, g, v, a, b), v && (g == f(a, b)));
            }
            let gates = gadget
                .steps
                .iter()
                .flat_map(|&(x, y)| [x, y])
                .filter(|op| !matches!(op, Op::Copy(_)))
                .count();
            assert!(gates <= 8);
        }
        let source_steps = CHECK_SOURCE
            .steps
            .iter()
            .filter(|&&(x, y)| x.reads(A) || y.reads(A))
            .count();
        assert_eq!(source_steps, 1);
    }

    #[test]
    fn double_negation() {
        let c = parse_circuit("var x1\na = input x1\nb = not a\nz = not b\noutput z\n").unwrap();
        let (g, p) = generate_strategy(Family::Path(3)).unwrap();
        let realized = PebbleGraph::from_circuit(&c);
        let renamed: Vec<_> = p
            .moves
            .iter()
            .map(|m| m.with_vertex(realized.find(["a", "b", "z"][m.vertex()]).unwrap()))
            .collect();
        assert_eq!(g.len(), 3);
        let (lc, report) = black_pebbling_to_circuit(&c, &Pebbling::new(renamed)).unwrap();
        assert!(lc.width() <= 2);
        assert_eq!(lc.circuit().size(), 2);
        assert_eq!(lc.circuit().truth_table(), c.truth_table());
        assert!(report.ok());
    }

    #[test]
    fn white_path() {
        let (g, _) = generate_strategy(Family::Path(3)).unwrap();
        let c = realize_circuit(&g).unwrap();
        let cg = PebbleGraph::from_circuit(&c);
        let p = guess_then_verify(&g, &[1]).unwrap().translate(&g, &cg).unwrap();
        let (lc, report) = bw_pebbling_to_circuit(&c, &p).unwrap();
        assert_eq!(lc.circuit().num_guess(), 1);
        assert_eq!(lc.circuit().truth_table(), c.truth_table());
        assert!(lc.width() <= report.checks[0].limit);
        // the wrong guess rejects every input
        for x in [false, true] {
            let right = lc.circuit().eval_bits(&[x], &[!x]);
            let wrong = lc.circuit().eval_bits(&[x], &[x]);
            assert_eq!(right, x);
            assert!(!wrong);
        }
    }

    #[test]
    fn invalid_pebbling() {
        let c = parse_circuit("var x1\na = input x1\nb = not a\noutput b\n").unwrap();
        let err = black_pebbling_to_circuit(&c, &Pebbling::new(vec![Move::PlaceBlack(1)])).unwrap_err();
        assert!(matches!(err, ConvertError::Pebbling(v) if v.rule() == Some(1)));
    }

    #[test]
    fn realize_shapes() {
        let (g, _) = generate_strategy(Family::BinaryTree(2)).unwrap();
        let c = realize_circuit(&g).unwrap();
        assert_eq!(c.num_actual(), 4);
        assert_eq!(c.size(), 3);
        assert!(matches!(c.node(c.output()).gate, Gate::Or(..)));
    }
}
