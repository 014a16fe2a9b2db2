use super::{Circuit, CircuitBuilder, CircuitError, Gate, NodeId};
use crate::assignment::Assignment;

#[derive(Clone, Copy)]
enum Folded {
    Const(bool),
    Node(NodeId),
}

/// Fixes the variables bound by `partial` and propagates constants.
///
/// Bound input nodes become constants; AND/OR with an absorbing constant
/// fold to it, with an identity constant fold to the other operand; NOT and
/// COPY of a constant fold. Only the output cone is kept, so the size never
/// grows. No other simplification is done. The result declares the unbound
/// actual variables in their original order and every guess variable.
pub fn restrict(c: &Circuit, partial: &Assignment) -> Result<Circuit, CircuitError> {
    for name in partial.names() {
        if !c.actual_vars().iter().any(|v| v == name) {
            return Err(CircuitError::NotAnActualVariable(name.to_string()));
        }
    }
    let bound: Vec<Option<bool>> = c.actual_vars().iter().map(|v| partial.get(v)).collect();

    let nodes = c.nodes();
    let cone = c.output_cone();
    let mut b = CircuitBuilder::new();
    // new index of each surviving actual variable
    let mut var_map = vec![usize::MAX; bound.len()];
    for (i, v) in c.actual_vars().iter().enumerate() {
        if bound[i].is_none() {
            var_map[i] = b.declare_var(v);
        }
    }
    for v in c.guess_vars() {
        b.declare_guess(v);
    }

    let mut folded: Vec<Folded> = Vec::with_capacity(nodes.len());
    for (id, node) in nodes.iter().enumerate() {
        if !cone[id] {
            // never read by a cone node
            folded.push(Folded::Const(false));
            continue;
        }
        let f = match node.gate {
            Gate::Input(v) => match bound[v] {
                Some(bit) => Folded::Const(bit),
                None => Folded::Node(b.push_named(node.name.clone(), Gate::Input(var_map[v]))),
            },
            Gate::Guess(v) => Folded::Node(b.push_named(node.name.clone(), Gate::Guess(v))),
            Gate::Const(bit) => Folded::Const(bit),
            Gate::And(x, y) => match (folded[x], folded[y]) {
                (Folded::Const(false), _) | (_, Folded::Const(false)) => Folded::Const(false),
                (Folded::Const(true), other) | (other, Folded::Const(true)) => other,
                (Folded::Node(p), Folded::Node(q)) => {
                    Folded::Node(b.push_named(node.name.clone(), Gate::And(p, q)))
                }
            },
            Gate::Or(x, y) => match (folded[x], folded[y]) {
                (Folded::Const(true), _) | (_, Folded::Const(true)) => Folded::Const(true),
                (Folded::Const(false), other) | (other, Folded::Const(false)) => other,
                (Folded::Node(p), Folded::Node(q)) => {
                    Folded::Node(b.push_named(node.name.clone(), Gate::Or(p, q)))
                }
            },
            Gate::Not(x) => match folded[x] {
                Folded::Const(bit) => Folded::Const(!bit),
                Folded::Node(p) => Folded::Node(b.push_named(node.name.clone(), Gate::Not(p))),
            },
            Gate::Copy(x) => match folded[x] {
                Folded::Const(bit) => Folded::Const(bit),
                Folded::Node(p) => Folded::Node(b.push_named(node.name.clone(), Gate::Copy(p))),
            },
        };
        folded.push(f);
    }

    let output = match folded[c.output()] {
        Folded::Node(id) => id,
        Folded::Const(bit) => b.push_named(unique_const_name(c, bit), Gate::Const(bit)),
    };
    // Folding can orphan nodes (e.g. the surviving operand of a folded gate
    // that fed nothing else), so prune to the new cone.
    prune(b.finish(output)?)
}

fn unique_const_name(c: &Circuit, bit: bool) -> String {
    let mut name = format!("const{}", u8::from(bit));
    while c.find_node(&name).is_some() {
        name.push('\'');
    }
    name
}

fn prune(c: Circuit) -> Result<Circuit, CircuitError> {
    let cone = c.output_cone();
    if cone.iter().all(|&live| live) {
        return Ok(c);
    }
    let mut remap = vec![usize::MAX; c.nodes().len()];
    let mut kept = Vec::new();
    for (id, node) in c.nodes().iter().enumerate() {
        if cone[id] {
            remap[id] = kept.len();
            let mut node = node.clone();
            node.gate = node.gate.map_operands(|op| remap[op]);
            kept.push(node);
        }
    }
    Circuit::new(
        kept,
        remap[c.output()],
        c.actual_vars().to_vec(),
        c.guess_vars().to_vec(),
    )
}
