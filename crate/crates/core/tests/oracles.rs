//! Cross-checks against oracles written independently of the library.

use std::collections::HashMap;

use boundwidth::circuit::{layer, parse_circuit, restrict};
use boundwidth::convert::{circuit_to_bp, select_compose};
use boundwidth::generate::{layered_circuit, random_circuit};
use boundwidth::sat::{brute_force_sat, SatCaps};
use boundwidth::{Assignment, Circuit, EvalMode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Evaluates the serialized circuit by recursive descent from the output.
struct Interpreter {
    defs: HashMap<String, Vec<String>>,
    output: String,
    actual: Vec<String>,
    guesses: Vec<String>,
}

impl Interpreter {
    fn new(text: &str) -> Self {
        let mut defs = HashMap::new();
        let mut output = String::new();
        let (mut actual, mut guesses) = (Vec::new(), Vec::new());
        for line in text.lines() {
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["var", v] => actual.push(v.to_string()),
                ["guess", v] => guesses.push(v.to_string()),
                ["output", o] => output = o.to_string(),
                [name, "=", rest @ ..] => {
                    defs.insert(name.to_string(), rest.iter().map(|s| s.to_string()).collect());
                }
                [] => {}
                other => panic!("unexpected line {other:?}"),
            }
        }
        Interpreter {
            defs,
            output,
            actual,
            guesses,
        }
    }

    fn value(&self, node: &str, env: &HashMap<&str, bool>) -> bool {
        let def = &self.defs[node];
        let arg = |i: usize| self.value(&def[i], env);
        match def[0].as_str() {
            "input" | "guess" => env[def[1].as_str()],
            "const" => def[1] == "1",
            "and" => arg(1) && arg(2),
            "or" => arg(1) || arg(2),
            "not" => !arg(1),
            "copy" => arg(1),
            op => panic!("unknown op {op}"),
        }
    }

    /// Existential over guesses.
    fn accepts(&self, actual: &[bool]) -> bool {
        (0..1u32 << self.guesses.len()).any(|g| {
            let mut env: HashMap<&str, bool> =
                self.actual.iter().map(String::as_str).zip(actual.iter().copied()).collect();
            for (j, v) in self.guesses.iter().enumerate() {
                env.insert(v, (g >> j) & 1 == 1);
            }
            self.value(&self.output, &env)
        })
    }
}

fn bits(i: u64, n: usize) -> Vec<bool> {
    (0..n).map(|j| (i >> j) & 1 == 1).collect()
}

fn assignment(names: &[String], values: &[bool]) -> Assignment {
    names.iter().cloned().zip(values.iter().copied()).collect()
}

#[test]
fn evaluation_matches_interpreter_on_1000_circuits() {
    let mut rng = StdRng::seed_from_u64(11);
    for round in 0..1000 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(0..=2);
        let s = rng.gen_range(1..=30);
        let c = random_circuit(&mut rng, n, m, s, 6);
        let oracle = Interpreter::new(&c.to_text());
        let table = c.truth_table();
        for (i, &value) in table.iter().enumerate() {
            assert_eq!(value, oracle.accepts(&bits(i as u64, n)), "round {round}, input {i}");
        }
    }
}

#[test]
fn brute_force_verdict_matches_interpreter_scan() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.gen_range(1..=6);
        let (m, s) = (rng.gen_range(0..=2), rng.gen_range(1..=20));
        let c = random_circuit(&mut rng, n, m, s, 5);
        let oracle = Interpreter::new(&c.to_text());
        let expected = (0..1u64 << n).any(|i| oracle.accepts(&bits(i, n)));
        let r = brute_force_sat(&c, SatCaps::default()).unwrap();
        assert_eq!(r.is_satisfiable(), expected);
        if let Some(w) = r.witness {
            assert!(c.evaluate_with_guesses(&w).unwrap());
        }
    }
}

#[test]
fn restriction_agrees_with_interpreter() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..300 {
        let n = rng.gen_range(2..=6);
        let (m, s) = (rng.gen_range(0..=2), rng.gen_range(1..=25));
        let c = random_circuit(&mut rng, n, m, s, 6);
        let oracle = Interpreter::new(&c.to_text());
        let fixed = rng.gen_range(1..n);
        let values: Vec<bool> = (0..fixed).map(|_| rng.gen()).collect();
        let partial = assignment(&c.actual_vars()[..fixed], &values);
        let r = restrict(&c, &partial).unwrap();
        assert!(r.size() <= c.size());
        for i in 0..1u64 << (n - fixed) {
            let rest = bits(i, n - fixed);
            let full: Vec<bool> = values.iter().chain(&rest).copied().collect();
            assert_eq!(r.accepts(&rest), oracle.accepts(&full));
        }
    }
}

/// Every start-to-sink path of a branching program, as lists of
/// `(variable, bit)` decisions ending in the sink value.
fn paths(bp: &boundwidth::BranchingProgram) -> Vec<(Vec<(String, bool)>, bool)> {
    use boundwidth::bp::BpNodeKind;
    fn walk(
        bp: &boundwidth::BranchingProgram,
        v: usize,
        prefix: &mut Vec<(String, bool)>,
        out: &mut Vec<(Vec<(String, bool)>, bool)>,
    ) {
        match &bp.node(v).kind {
            BpNodeKind::Sink(bit) => out.push((prefix.clone(), *bit)),
            BpNodeKind::Read { var, edges } => {
                for &(bit, t) in edges {
                    prefix.push((var.clone(), bit));
                    walk(bp, t, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(bp, bp.start(), &mut Vec::new(), &mut out);
    out
}

#[test]
fn branching_programs_match_by_path_enumeration() {
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..150 {
        let (n, m, s) = (rng.gen_range(1..=4), rng.gen_range(0..=2), rng.gen_range(1..=12));
        let lc = layered_circuit(&mut rng, n, m, s, 3);
        let c: &Circuit = lc.circuit();
        let (bp, _) = circuit_to_bp(&lc).unwrap();
        let all_paths = paths(&bp);
        let multiplicity = c.read_multiplicities();
        for (path, _) in &all_paths {
            for v in c.actual_vars() {
                assert!(path.iter().filter(|(u, _)| u == v).count() <= multiplicity[v]);
            }
        }
        // strict acceptance: some guess setting admits a consistent path to 1
        let n = c.num_actual();
        let m = c.num_guess();
        for i in 0..1u64 << n {
            let actual = bits(i, n);
            let mut env: HashMap<&str, bool> =
                c.actual_vars().iter().map(String::as_str).zip(actual.iter().copied()).collect();
            let accepted = (0..1u64 << m).any(|g| {
                for (j, v) in c.guess_vars().iter().enumerate() {
                    env.insert(v, (g >> j) & 1 == 1);
                }
                all_paths
                    .iter()
                    .any(|(p, sink)| *sink && p.iter().all(|(v, bit)| env[v.as_str()] == *bit))
            });
            assert_eq!(accepted, c.accepts(&actual));
            let a = assignment(c.actual_vars(), &actual);
            assert_eq!(bp.evaluate(&a, EvalMode::Strict).unwrap(), accepted);
        }
    }
}

#[test]
fn layering_preserves_function() {
    let mut rng = StdRng::seed_from_u64(15);
    for _ in 0..300 {
        let n = rng.gen_range(1..=6);
        let (m, s) = (rng.gen_range(0..=2), rng.gen_range(1..=30));
        let c = random_circuit(&mut rng, n, m, s, 10);
        let lc = layer(&c);
        assert_eq!(lc.circuit().size(), c.size());
        let oracle = Interpreter::new(&lc.circuit().to_text());
        for i in 0..1u64 << n {
            assert_eq!(oracle.accepts(&bits(i, n)), c.accepts(&bits(i, n)));
        }
        let reparsed = boundwidth::circuit::parse_layered(&lc.to_text()).unwrap();
        assert_eq!(reparsed, lc);
        assert_eq!(parse_circuit(&c.to_text()).unwrap(), c);
    }
}

#[test]
fn selector_projection() {
    for n in 1..=4 {
        let z: Vec<bool> = (0..2 * n).map(|i| i < n).collect();
        for i in 0..1u64 << (2 * n) {
            let x = bits(i, 2 * n);
            let got = select_compose(|v| v.iter().filter(|&&b| b).count() % 3 == 1, &x, &z).unwrap();
            assert_eq!(got, x[..n].iter().filter(|&&b| b).count() % 3 == 1);
        }
    }
}
