//! Satisfiability of nondeterministic circuits.
//!
//! [`brute_force_sat`] scans all actual assignments. [`bounded_width_sat`]
//! splits the variables instead: half of them, chosen among the least read,
//! are left free; the rest are enumerated, and for each setting the
//! restricted circuit is layered, lowered to a branching program reading
//! every free variable at most `k` times, and handed to a [`BpSatBackend`].
//!
//! Enumeration is lexicographic over name-sorted variables with the first
//! name most significant, so results do not depend on declaration order.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::assignment::Assignment;
use crate::bp::{BpError, BranchingProgram};
use crate::circuit::{layer, restrict, Circuit, CircuitError, Gate};
use crate::convert::{circuit_to_bp, ConvertError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("{count} {what} variables exceed the cap of {cap}")]
    Cap { what: &'static str, count: usize, cap: usize },
    #[error("backend failed: {0}")]
    Backend(#[from] BpError),
    #[error("witness {0} does not satisfy the circuit")]
    BadWitness(Assignment),
    #[error(transparent)]
    Convert(#[from] ConvertError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatCaps {
    /// Most actual variables enumerated by one loop: all of them for brute
    /// force, the unchosen and the chosen ones separately otherwise.
    pub max_vars: usize,
    pub max_guesses: usize,
}

impl Default for SatCaps {
    fn default() -> Self {
        SatCaps {
            max_vars: 22,
            max_guesses: 20,
        }
    }
}

impl SatCaps {
    fn check(&self, what: &'static str, count: usize, cap: usize) -> Result<(), SatError> {
        if count > cap {
            Err(SatError::Cap { what, count, cap })
        } else {
            Ok(())
        }
    }
}

/// A positive rational `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: usize,
    pub den: usize,
}

impl Fraction {
    pub const HALF: Fraction = Fraction { num: 1, den: 2 };

    /// `ceil(self * n)`.
    pub fn ceil_of(self, n: usize) -> usize {
        (self.num * n).div_ceil(self.den)
    }
}

/// Variables left free by [`bounded_width_sat`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadKChoice {
    /// Sorted by name.
    pub vars: Vec<String>,
    /// Largest read multiplicity among `vars`; 0 when none is chosen.
    pub k: usize,
    /// Total number of actual-input nodes of the circuit.
    pub input_nodes: usize,
}

impl ReadKChoice {
    /// `ceil(2T / n)`, which bounds `k` when half the variables are chosen.
    pub fn averaging_bound(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            (2 * self.input_nodes).div_ceil(n)
        }
    }
}

/// Picks the `ceil(fraction * n)` actual variables of lowest read
/// multiplicity, breaking ties by name.
pub fn choose_read_k_vars(c: &Circuit, fraction: Fraction) -> ReadKChoice {
    let mut by_reads: Vec<(usize, String)> =
        c.read_multiplicities().into_iter().map(|(v, k)| (k, v)).collect();
    by_reads.sort();
    let want = fraction.ceil_of(c.num_actual()).min(by_reads.len());
    let k = by_reads[..want].iter().map(|(k, _)| *k).max().unwrap_or(0);
    let mut vars: Vec<String> = by_reads.into_iter().take(want).map(|(_, v)| v).collect();
    vars.sort();
    ReadKChoice {
        vars,
        k,
        input_nodes: c.input_node_count(),
    }
}

/// A solver for branching programs: finds an assignment to `free` (plus
/// guesses) that the program accepts.
///
/// Implementations must be deterministic.
pub trait BpSatBackend: Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, bp: &BranchingProgram, free: &[String]) -> Result<Option<Assignment>, BpError>;
}

/// Tries the assignments to the free variables in lexicographic order,
/// each with the lexicographically first accepting guesses.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerationBackend;

impl BpSatBackend for EnumerationBackend {
    fn name(&self) -> &'static str {
        "enum"
    }

    fn solve(&self, bp: &BranchingProgram, free: &[String]) -> Result<Option<Assignment>, BpError> {
        for index in 0..1u64 << free.len() {
            let a = Assignment::from_index(free, index);
            if let Some(guesses) = bp.accepting_guesses(&a)? {
                return Ok(Some(a.union(&guesses).expect("guesses are disjoint from actual variables")));
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SatStats {
    /// Outer assignments tried, up to and including the satisfying one.
    pub enumerated: u64,
    pub bp_conversions: u64,
    /// Read bound of the free variables; `None` for brute force.
    pub k: Option<usize>,
    /// Variables left free, sorted by name.
    pub chosen: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    /// Binds every actual and guess variable when satisfiable.
    pub witness: Option<Assignment>,
    pub stats: SatStats,
}

impl SatResult {
    pub fn is_satisfiable(&self) -> bool {
        self.witness.is_some()
    }

    /// `verdict=...`, the witness as `name=bit` lines, then the stats.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SatResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Some(w) => {
                writeln!(f, "verdict=satisfiable")?;
                for (name, bit) in w.iter() {
                    writeln!(f, "{name}={}", u8::from(bit))?;
                }
            }
            None => writeln!(f, "verdict=unsatisfiable")?,
        }
        let s = &self.stats;
        writeln!(f, "enumerated={}", s.enumerated)?;
        writeln!(f, "bp_conversions={}", s.bp_conversions)?;
        if let Some(k) = s.k {
            writeln!(f, "k={k}")?;
            writeln!(f, "chosen={}", s.chosen.join(","))?;
        }
        Ok(())
    }
}

fn sorted(names: &[String]) -> Vec<String> {
    let mut v = names.to_vec();
    v.sort();
    v
}

fn first_guesses(c: &Circuit, a: &Assignment) -> Result<Option<Assignment>, CircuitError> {
    let guesses = sorted(c.guess_vars());
    for index in 0..1u64 << guesses.len() {
        let full = a.union(&Assignment::from_index(&guesses, index)).expect("disjoint names");
        if c.evaluate_with_guesses(&full)? {
            return Ok(Some(full));
        }
    }
    Ok(None)
}

/// Scans actual assignments in lexicographic order and returns the first
/// accepted one, with its lexicographically first accepting guesses.
pub fn brute_force_sat(c: &Circuit, caps: SatCaps) -> Result<SatResult, SatError> {
    caps.check("actual", c.num_actual(), caps.max_vars)?;
    caps.check("guess", c.num_guess(), caps.max_guesses)?;
    let vars = sorted(c.actual_vars());
    let mut stats = SatStats::default();
    for index in 0..1u64 << vars.len() {
        stats.enumerated += 1;
        let a = Assignment::from_index(&vars, index);
        if !c.evaluate_nondet(&a, caps.max_guesses)? {
            continue;
        }
        let witness = first_guesses(c, &a)?;
        return Ok(SatResult { witness, stats });
    }
    Ok(SatResult { witness: None, stats })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatOptions {
    pub caps: SatCaps,
    /// Worker threads for the outer enumeration; 1 runs inline.
    pub jobs: usize,
    /// Replace the witness by the lexicographically first one, found by
    /// fixing the variables one at a time with further decision calls. The
    /// witness then equals that of [`brute_force_sat`].
    pub lex_first_witness: bool,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions {
            caps: SatCaps::default(),
            jobs: 1,
            lex_first_witness: false,
        }
    }
}

enum Branch {
    /// The restriction folded to constant 0.
    Dead,
    Solved { converted: bool, witness: Option<Assignment> },
}

fn solve_branch(
    c: &Circuit,
    fixed: Assignment,
    chosen: &[String],
    backend: &dyn BpSatBackend,
) -> Result<Branch, SatError> {
    let r = restrict(c, &fixed)?;
    if let Gate::Const(bit) = r.node(r.output()).gate {
        if !bit {
            return Ok(Branch::Dead);
        }
        let rest: Vec<String> = chosen.iter().chain(c.guess_vars()).cloned().collect();
        let witness = fixed.union(&rest.iter().map(|v| (v.clone(), false)).collect()).expect("disjoint names");
        return Ok(Branch::Solved {
            converted: false,
            witness: Some(witness),
        });
    }
    let (bp, _) = circuit_to_bp(&layer(&r))?;
    let witness = backend
        .solve(&bp, chosen)?
        .map(|w| fixed.union(&w).expect("backend binds only free and guess variables"));
    Ok(Branch::Solved {
        converted: true,
        witness,
    })
}

/// Decides satisfiability by enumerating the variables outside a
/// low-multiplicity half and solving each restriction as a branching
/// program.
///
/// The verdict always equals that of [`brute_force_sat`]. The witness is the
/// first one found: the lexicographically first satisfying setting of the
/// enumerated variables, completed by `backend`. Results and statistics are
/// the same for every `jobs` value.
pub fn bounded_width_sat(
    c: &Circuit,
    backend: &dyn BpSatBackend,
    options: SatOptions,
) -> Result<SatResult, SatError> {
    let mut result = decide(c, backend, options)?;
    if options.lex_first_witness && result.witness.is_some() {
        result.witness = Some(lex_first(c, backend, options)?);
    }
    if let Some(w) = &result.witness {
        if !c.evaluate_with_guesses(w)? {
            return Err(SatError::BadWitness(w.clone()));
        }
    }
    Ok(result)
}

fn decide(c: &Circuit, backend: &dyn BpSatBackend, options: SatOptions) -> Result<SatResult, SatError> {
    let caps = options.caps;
    caps.check("guess", c.num_guess(), caps.max_guesses)?;
    let choice = choose_read_k_vars(c, Fraction::HALF);
    let outer: Vec<String> = sorted(c.actual_vars())
        .into_iter()
        .filter(|v| choice.vars.binary_search(v).is_err())
        .collect();
    caps.check("enumerated", outer.len(), caps.max_vars)?;
    caps.check("free", choice.vars.len(), caps.max_vars)?;

    let mut stats = SatStats {
        k: Some(choice.k),
        chosen: choice.vars.clone(),
        ..SatStats::default()
    };
    let total = 1u64 << outer.len();
    let run = |index: u64| solve_branch(c, Assignment::from_index(&outer, index), &choice.vars, backend);
    let batch = if options.jobs > 1 { 16 * options.jobs as u64 } else { 1 };
    let pool = if options.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(options.jobs)
                .build()
                .expect("thread pool"),
        )
    } else {
        None
    };
    let mut start = 0;
    while start < total {
        let end = (start + batch).min(total);
        let outcomes: Vec<Result<Branch, SatError>> = match &pool {
            Some(pool) => pool.install(|| (start..end).into_par_iter().map(run).collect()),
            None => (start..end).map(run).collect(),
        };
        // merge in index order so that the lowest satisfying branch wins
        for outcome in outcomes {
            stats.enumerated += 1;
            if let Branch::Solved { converted, witness } = outcome? {
                stats.bp_conversions += u64::from(converted);
                if witness.is_some() {
                    return Ok(SatResult { witness, stats });
                }
            }
        }
        start = end;
    }
    Ok(SatResult { witness: None, stats })
}

/// Self-reduction: fix actual variables in name order, preferring 0, then
/// take the first accepting guesses.
fn lex_first(c: &Circuit, backend: &dyn BpSatBackend, options: SatOptions) -> Result<Assignment, SatError> {
    let mut fixed = Assignment::new();
    for v in sorted(c.actual_vars()) {
        let mut attempt = fixed.clone();
        attempt.bind(v.clone(), false).expect("fresh name");
        let sub = restrict(c, &attempt)?;
        let zero_works = decide(&sub, backend, options)?.witness.is_some();
        fixed.bind(v, !zero_works).expect("fresh name");
    }
    let witness = first_guesses(c, &fixed)?;
    Ok(witness.expect("a satisfiable circuit keeps a witness under self-reduction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    fn circuit(text: &str) -> Circuit {
        parse_circuit(text).unwrap()
    }

    fn width(c: &Circuit) -> SatResult {
        bounded_width_sat(c, &EnumerationBackend, SatOptions::default()).unwrap()
    }

    #[test]
    fn constants() {
        let one = circuit("k = const 1\noutput k\n");
        let r = brute_force_sat(&one, SatCaps::default()).unwrap();
        assert_eq!(r.witness, Some(Assignment::new()));
        assert_eq!(width(&one).witness, Some(Assignment::new()));

        let zero = circuit("var x\nk = const 0\noutput k\n");
        let r = width(&zero);
        assert!(!r.is_satisfiable());
        assert_eq!(r.stats.bp_conversions, 0);
        assert!(!brute_force_sat(&zero, SatCaps::default()).unwrap().is_satisfiable());
    }

    #[test]
    fn contradiction() {
        let c = circuit("var x1\na = input x1\nb = not a\ng = and a b\noutput g\n");
        assert!(!brute_force_sat(&c, SatCaps::default()).unwrap().is_satisfiable());
        assert!(!width(&c).is_satisfiable());
    }

    #[test]
    fn and_of_four() {
        let c = circuit(
            "var x1\nvar x2\nvar x3\nvar x4\na = input x1\nb = input x2\nc = input x3\nd = input x4\n\
             g = and a b\nh = and c d\no = and g h\noutput o\n",
        );
        let r = width(&c);
        assert_eq!(r.stats.k, Some(1));
        assert_eq!(r.stats.chosen, ["x1", "x2"]);
        let all_ones: Assignment = ["x1", "x2", "x3", "x4"].into_iter().map(|v| (v, true)).collect();
        assert_eq!(r.witness, Some(all_ones.clone()));
        assert_eq!(brute_force_sat(&c, SatCaps::default()).unwrap().witness, Some(all_ones));
        assert_eq!(r.to_text().lines().next(), Some("verdict=satisfiable"));
    }

    #[test]
    fn choice_prefers_rarely_read_variables() {
        let mut text = "var x1\nvar x2\nvar x3\nvar x4\n".to_string();
        for i in 0..10 {
            text += &format!("r{i} = input x1\n");
        }
        for v in ["x2", "x3", "x4"] {
            text += &format!("i{v} = input {v}\n");
        }
        text += "g0 = and r0 r1\n";
        for i in 2..10 {
            text += &format!("g{} = and g{} r{i}\n", i - 1, i - 2);
        }
        text += "h1 = or g8 ix2\nh2 = or h1 ix3\nh3 = or h2 ix4\noutput h3\n";
        let choice = choose_read_k_vars(&circuit(&text), Fraction::HALF);
        assert_eq!(choice.vars, ["x2", "x3"]);
        assert_eq!(choice.k, 1);
        assert!(choice.k <= choice.averaging_bound(4));
    }

    #[test]
    fn guesses_and_lex_first_witness() {
        // accepts iff x1 or x2, via a guessed selector
        let c = circuit(
            "var x2\nvar x1\nguess y\na = input x1\nb = input x2\ns = guess y\nt = not s\n\
             p = and a s\nq = and b t\no = or p q\noutput o\n",
        );
        let brute = brute_force_sat(&c, SatCaps::default()).unwrap();
        let expected: Assignment = [("x1", false), ("x2", true), ("y", false)].into_iter().collect();
        assert_eq!(brute.witness, Some(expected.clone()));
        for jobs in [1, 3] {
            let options = SatOptions {
                jobs,
                lex_first_witness: true,
                ..SatOptions::default()
            };
            let r = bounded_width_sat(&c, &EnumerationBackend, options).unwrap();
            assert_eq!(r.witness, Some(expected.clone()));
        }
    }

    #[test]
    fn caps() {
        let mut text = String::new();
        for i in 0..23 {
            text += &format!("var x{i}\n");
        }
        text += "k = const 1\noutput k\n";
        assert!(matches!(
            brute_force_sat(&circuit(&text), SatCaps::default()),
            Err(SatError::Cap { .. })
        ));
    }
}
