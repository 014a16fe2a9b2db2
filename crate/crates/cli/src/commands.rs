use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boundwidth::circuit::{layer, parse_circuit, parse_layered};
use boundwidth::convert::{
    black_pebbling_to_circuit, bw_pebbling_to_circuit, circuit_to_bp, cut_to_bounded_width, realize_circuit,
    valiant_cut,
};
use boundwidth::pebbling::{
    generate_strategy, guess_then_verify, parse_graph, parse_trace, search_min_space, validate, Family,
    DEFAULT_BW_VERTEX_CAP, DEFAULT_BLACK_VERTEX_CAP,
};
use boundwidth::sat::{bounded_width_sat, brute_force_sat, EnumerationBackend, SatCaps, SatOptions};
use boundwidth::{Assignment, Circuit, LayeredCircuit, Mode, PebbleGraph};
use thiserror::Error;

use crate::{Backend, Command, FamilyKind, GameMode, Method, Output, PebbleCommand};

/// Exit status of an unsatisfiable `sat` run.
const UNSATISFIABLE: u8 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: boundwidth::ParseError,
    },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn domain(e: impl std::fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parsed<T>(path: &Path, r: std::result::Result<T, boundwidth::ParseError>) -> Result<T> {
    r.map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    parsed(path, parse_circuit(&read(path)?))
}

fn has_layers(text: &str) -> bool {
    text.lines().any(|l| l.trim_start().starts_with("layer"))
}

fn load_graph(path: &Path) -> Result<PebbleGraph> {
    parsed(path, parse_graph(&read(path)?))
}

fn mode(m: GameMode) -> Mode {
    match m {
        GameMode::Black => Mode::Black,
        GameMode::Bw => Mode::BlackWhite,
    }
}

/// Sends the artifact to `-o` and the report to stdout, or the artifact to
/// stdout and the report to stderr.
fn emit(out: &Output, artifact: &str, report: &str) -> Result<()> {
    match &out.path {
        Some(path) => {
            write(path, artifact)?;
            print!("{report}");
        }
        None => {
            print!("{artifact}");
            eprint!("{report}");
        }
    }
    Ok(())
}

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Stats { file } => stats(&file),
        Command::Eval { file, assign } => eval(&file, &assign),
        Command::Layer { file, out } => {
            let lc = layer(&load_circuit(&file)?);
            let report = format!(
                "layers={}\nwidth={}\ncopies={}\n",
                lc.layers().len(),
                lc.width(),
                lc.copy_count()
            );
            emit(&out, &lc.to_text(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ToBp { file, out } => {
            let text = read(&file)?;
            let lc = if has_layers(&text) {
                parsed(&file, parse_layered(&text))?
            } else {
                layer(&parsed(&file, parse_circuit(&text))?)
            };
            let (bp, report) = circuit_to_bp(&lc).map_err(CliError::domain)?;
            emit(&out, &bp.to_text(), &report.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pebble { command } => pebble(command),
        Command::DepthReduce { file, target, out } => {
            let c = load_circuit(&file)?;
            let cut = valiant_cut(&c, target);
            let (lc, report) = cut_to_bounded_width(&c, &cut).map_err(CliError::domain)?;
            emit(&out, &lc.to_text(), &report.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sat {
            file,
            method,
            backend,
            jobs,
        } => sat(&file, method, backend, jobs),
    }
}

fn stats(file: &Path) -> Result<ExitCode> {
    let c = load_circuit(file)?;
    println!(
        "n={} m={} s={} depth={} width={}",
        c.num_actual(),
        c.num_guess(),
        c.size(),
        c.depth(),
        layer(&c).width()
    );
    for (v, k) in c.read_multiplicities() {
        println!("read {v}={k}");
    }
    Ok(ExitCode::SUCCESS)
}

fn eval(file: &Path, assign: &str) -> Result<ExitCode> {
    let c = load_circuit(file)?;
    let a: Assignment = assign.parse().map_err(CliError::domain)?;
    for name in a.names() {
        if !c.actual_vars().iter().chain(c.guess_vars()).any(|v| v == name) {
            return Err(CliError::Domain(format!("`{name}` is not a variable of the circuit")));
        }
    }
    let bound = c.guess_vars().iter().filter(|v| a.contains(v)).count();
    let value = if bound == 0 {
        c.evaluate_nondet(&a, SatCaps::default().max_guesses)
    } else if bound == c.num_guess() {
        c.evaluate_with_guesses(&a)
    } else {
        return Err(CliError::Domain("bind all guess variables or none".into()));
    }
    .map_err(CliError::domain)?;
    println!("value={}", u8::from(value));
    Ok(ExitCode::SUCCESS)
}

fn pebble(command: PebbleCommand) -> Result<ExitCode> {
    match command {
        PebbleCommand::Validate {
            graph,
            trace,
            mode: m,
        } => {
            let g = load_graph(&graph)?;
            let p = parsed(&trace, parse_trace(&read(&trace)?, &g))?;
            let measures = validate(&g, &p, mode(m)).map_err(CliError::domain)?;
            println!("ok time={} space={}", measures.time, measures.space);
        }
        PebbleCommand::Search {
            graph,
            mode: m,
            max_space,
            out,
        } => {
            let g = load_graph(&graph)?;
            let cap = match m {
                GameMode::Black => DEFAULT_BLACK_VERTEX_CAP,
                GameMode::Bw => DEFAULT_BW_VERTEX_CAP,
            };
            let found = search_min_space(&g, mode(m), max_space, cap).map_err(CliError::domain)?;
            let report = format!(
                "space={}\ntime={}\nstates={}\n",
                found.space,
                found.witness.moves.len(),
                found.states
            );
            emit(&out, &found.witness.to_text(&g), &report)?;
        }
        PebbleCommand::Gen {
            family,
            param,
            mode: m,
            output,
        } => {
            let family = match family {
                FamilyKind::Path => Family::Path(param),
                FamilyKind::Tree => Family::BinaryTree(param),
                FamilyKind::Pyramid => Family::Pyramid(param),
            };
            let (g, mut p) = generate_strategy(family).map_err(CliError::domain)?;
            if m == GameMode::Bw {
                p = guess_then_verify(&g, g.preds(g.sink())).map_err(CliError::domain)?;
            }
            let measures = validate(&g, &p, mode(m)).map_err(CliError::domain)?;
            match output {
                Some(stem) => {
                    write(&stem.with_extension("graph"), &g.to_text())?;
                    write(&stem.with_extension("trace"), &p.to_text(&g))?;
                    println!("family={family}\ntime={}\nspace={}", measures.time, measures.space);
                }
                None => print!("# graph\n{}# trace\n{}", g.to_text(), p.to_text(&g)),
            }
        }
        PebbleCommand::Compile {
            source,
            trace,
            mode: m,
            graph,
            out,
        } => {
            let c = if graph {
                realize_circuit(&load_graph(&source)?).map_err(CliError::domain)?
            } else {
                load_circuit(&source)?
            };
            let g = PebbleGraph::from_circuit(&c);
            let p = parsed(&trace, parse_trace(&read(&trace)?, &g))?;
            let compiled: std::result::Result<(LayeredCircuit, _), _> = match m {
                GameMode::Black => black_pebbling_to_circuit(&c, &p),
                GameMode::Bw => bw_pebbling_to_circuit(&c, &p),
            };
            let (lc, report) = compiled.map_err(CliError::domain)?;
            emit(&out, &lc.to_text(), &report.to_text())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sat(file: &Path, method: Method, backend: Backend, jobs: u16) -> Result<ExitCode> {
    let c = load_circuit(file)?;
    let result = match method {
        Method::Brute => brute_force_sat(&c, SatCaps::default()),
        Method::Width => {
            let backend = match backend {
                Backend::Enum => EnumerationBackend,
            };
            let options = SatOptions {
                jobs: usize::from(jobs),
                lex_first_witness: true,
                ..SatOptions::default()
            };
            bounded_width_sat(&c, &backend, options)
        }
    }
    .map_err(CliError::domain)?;
    print!("{}", result.to_text());
    Ok(if result.is_satisfiable() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(UNSATISFIABLE)
    })
}
