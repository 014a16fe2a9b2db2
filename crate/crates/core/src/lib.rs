//! Bounded-width Boolean circuits and the transformations around them.
//!
//! The crate covers:
//! - [`circuit`]: fan-in-two circuits with actual and guess inputs, layering
//!   with COPY gates, width, depth and read multiplicities;
//! - [`bp`]: nondeterministic branching programs and syntactic read-k audits;
//! - [`pebbling`]: the black and black-white pebble games;
//! - [`convert`]: circuit to branching program lowering, pebbling-driven
//!   circuit compilation, depth-reduction cuts and selector composition;
//! - [`sat`]: satisfiability by splitting variables into a brute-forced half
//!   and a read-k half solved on a branching program.

pub mod assignment;
pub mod bp;
pub mod circuit;
pub mod convert;
pub mod generate;
pub mod pebbling;
pub mod sat;
mod text;

pub use assignment::{Assignment, AssignmentError};
pub use bp::{BpError, BranchingProgram, EvalMode};
pub use circuit::{Circuit, CircuitBuilder, CircuitError, Gate, LayeredCircuit, NodeId};
pub use convert::{ConversionReport, ConvertError};
pub use pebbling::{Mode, Move, PebbleGraph, Pebbling};
pub use sat::{bounded_width_sat, brute_force_sat, EnumerationBackend, SatOptions, SatResult};
pub use text::{ParseError, ParseErrorKind};
