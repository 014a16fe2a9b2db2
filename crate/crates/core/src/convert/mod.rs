//! Transformations between circuits, branching programs and pebblings.
//!
//! Every conversion returns a [`ConversionReport`] holding the measured
//! input and output metrics and the bounds they were checked against. A
//! conversion whose output breaks a bound fails with
//! [`ConvertError::BoundViolated`] instead of returning it.

mod depth;
mod pebble;
mod select;
mod to_bp;

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::bp::BpError;
use crate::circuit::{CircuitError, LayerError};
use crate::pebbling::Violation;

pub use depth::{cut_to_bounded_width, gate_depth_without, valiant_cut, Edge};
pub use pebble::{black_pebbling_to_circuit, bw_pebbling_to_circuit, realize_circuit};
pub use select::select_compose;
pub use to_bp::{circuit_to_bp, MAX_BP_WIDTH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("width {width} exceeds the conversion cap of {cap}")]
    WidthCap { width: usize, cap: usize },
    #[error("invalid pebbling: {0}")]
    Pebbling(#[from] Violation),
    #[error("pebbling refers to `{0}`, which is not a node of the circuit's output cone")]
    UnknownVertex(String),
    #[error("the circuit has guess inputs; a deterministic circuit is required")]
    Nondeterministic,
    #[error("vertex `{vertex}` has {preds} predecessors; at most 2 can be realized as a gate")]
    FanIn { vertex: String, preds: usize },
    #[error("({from}, {to}) is not a gate-to-gate edge of the output cone")]
    NotACutEdge { from: usize, to: usize },
    #[error("x has {x} bits and z has {z}; both must have the same even length")]
    LengthMismatch { x: usize, z: usize },
    #[error("conversion broke its bound:\n{0}")]
    BoundViolated(Box<ConversionReport>),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Layer(#[from] LayerError),
    #[error(transparent)]
    Bp(#[from] BpError),
}

/// One checked inequality `value <= limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub quantity: &'static str,
    pub value: usize,
    pub limit: usize,
}

impl Check {
    pub fn new(quantity: &'static str, value: usize, limit: usize) -> Self {
        Check { quantity, value, limit }
    }

    pub fn holds(&self) -> bool {
        self.value <= self.limit
    }
}

/// Metrics of a conversion and the bounds checked on its output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionReport {
    /// Input size (non-COPY gates).
    pub s: usize,
    /// Input width.
    pub w: usize,
    pub n: usize,
    pub m: usize,
    /// Output size: node count for programs, non-COPY gates for circuits.
    pub out_size: usize,
    /// Output width: widest micro-level for programs, widest layer for
    /// circuits.
    pub out_width: usize,
    pub checks: Vec<Check>,
    /// Conversion-specific metrics, printed after the fixed keys.
    pub extras: Vec<(&'static str, String)>,
}

impl ConversionReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(Check::holds)
    }

    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extras.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }

    /// `key=value` lines: s, w, n, m, out_size, out_width, bound, ok, then
    /// the extras.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub(crate) fn into_result(self) -> Result<ConversionReport, ConvertError> {
        if self.ok() {
            Ok(self)
        } else {
            Err(ConvertError::BoundViolated(Box::new(self)))
        }
    }
}

impl fmt::Display for ConversionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut bound = String::new();
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                bound.push(',');
            }
            let _ = write!(bound, "{}<={}", c.quantity, c.limit);
        }
        writeln!(f, "s={}", self.s)?;
        writeln!(f, "w={}", self.w)?;
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "m={}", self.m)?;
        writeln!(f, "out_size={}", self.out_size)?;
        writeln!(f, "out_width={}", self.out_width)?;
        writeln!(f, "bound={bound}")?;
        writeln!(f, "ok={}", self.ok())?;
        for (k, v) in &self.extras {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_text() {
        let r = ConversionReport {
            s: 1,
            w: 1,
            n: 1,
            m: 0,
            out_size: 3,
            out_width: 1,
            checks: vec![Check::new("out_size", 3, 10)],
            extras: vec![("reads", "1".into())],
        };
        assert_eq!(
            r.to_text(),
            "s=1\nw=1\nn=1\nm=0\nout_size=3\nout_width=1\nbound=out_size<=10\nok=true\nreads=1\n"
        );
        let bad = ConversionReport {
            checks: vec![Check::new("out_width", 4, 3)],
            ..r
        };
        assert!(matches!(bad.into_result(), Err(ConvertError::BoundViolated(_))));
    }
}
