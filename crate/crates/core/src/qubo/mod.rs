//! QUBO compilation of the minimum-distance problem.
//!
//! Every instance is an integer upper-triangular coefficient table plus an
//! integer offset:
//!
//! ```text
//! energy(z) = offset + Σ_{i ≤ j} coeffs[i, j] · z_i · z_j
//! ```
//!
//! Coefficients are produced by symbolic expansion of the cost function
//! (see [`expr`]), so the stored table is the ground truth for evaluation.
//! The [`VariableLayout`] records what each variable means: a normalizer
//! coefficient `x`, a bit of one of the parity auxiliaries `t`, `u`, `v`, or a
//! bit of the penalty counter `e`.

mod build;
pub mod expr;
pub mod io;
mod ising;
mod layout;
pub mod pipeline;
mod transform;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{
    add_logical_penalty, add_nonzero_penalty, aux_widths, build_selfdual_qubo, build_weight_qubo,
    closed_form_aux, penalty_bits_logical, penalty_bits_nonzero, weight_qubo_for, AuxValues,
    AuxWidthMode,
};
pub use ising::{to_ising, IsingProblem};
pub use layout::{AuxWidths, Decoded, Role, VariableLayout};
pub use transform::{clamp, split_constraints};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuboError {
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("variable {index} assigned conflicting values")]
    ConflictingAssignment { index: usize },
    #[error("logical penalty requires k >= 1; use the nonzero penalty for self-dual codes")]
    PenaltyNeedsLogical,
    #[error("nonzero penalty requires a self-dual (k = 0) layout, found k = {0}")]
    PenaltyNeedsSelfDual(usize),
    #[error("operation requires an unclamped problem")]
    AlreadyClamped,
    #[error("prefix length {prefix} exceeds the {available} available x variables")]
    PrefixTooLong { prefix: usize, available: usize },
    #[error("adjacency matrix must be symmetric")]
    AsymmetricAdjacency,
    #[error("mode {mode} does not apply: {reason}")]
    ModeMismatch { mode: String, reason: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// A quadratic pseudo-Boolean function with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuboProblem {
    num_vars: usize,
    coeffs: BTreeMap<(usize, usize), i64>,
    offset: i64,
    layout: VariableLayout,
}

impl QuboProblem {
    /// Builds a problem, normalizing `(i, j)` to `i ≤ j` and dropping zeros.
    pub fn new(
        num_vars: usize,
        entries: impl IntoIterator<Item = ((usize, usize), i64)>,
        offset: i64,
        layout: VariableLayout,
    ) -> Result<Self, QuboError> {
        let mut coeffs = BTreeMap::new();
        for ((i, j), v) in entries {
            for idx in [i, j] {
                if idx >= num_vars {
                    return Err(QuboError::IndexOutOfRange { index: idx, num_vars });
                }
            }
            *coeffs.entry((i.min(j), i.max(j))).or_insert(0) += v;
        }
        coeffs.retain(|_, v| *v != 0);
        Ok(Self {
            num_vars,
            coeffs,
            offset,
            layout,
        })
    }

    /// A problem with anonymous variables, for generic solver use.
    pub fn from_entries(
        num_vars: usize,
        entries: impl IntoIterator<Item = ((usize, usize), i64)>,
        offset: i64,
    ) -> Result<Self, QuboError> {
        Self::new(num_vars, entries, offset, VariableLayout::anonymous(num_vars))
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn layout(&self) -> &VariableLayout {
        &self.layout
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> i64 {
        self.coeffs.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    pub fn num_diagonal(&self) -> usize {
        self.coeffs.keys().filter(|(i, j)| i == j).count()
    }

    pub fn num_off_diagonal(&self) -> usize {
        self.coeffs.len() - self.num_diagonal()
    }

    pub fn energy(&self, z: &[u8]) -> i64 {
        assert_eq!(z.len(), self.num_vars, "assignment length");
        self.offset
            + self
                .coeffs
                .iter()
                .filter(|((i, j), _)| z[*i] == 1 && z[*j] == 1)
                .map(|(_, v)| v)
                .sum::<i64>()
    }

    /// Interaction graph adjacency lists (off-diagonal terms only).
    pub fn neighbors(&self) -> Vec<Vec<(usize, i64)>> {
        let mut adj = vec![Vec::new(); self.num_vars];
        for (&(i, j), &v) in &self.coeffs {
            if i != j {
                adj[i].push((j, v));
                adj[j].push((i, v));
            }
        }
        adj
    }

    pub fn linear_terms(&self) -> Vec<i64> {
        (0..self.num_vars).map(|i| self.coeff(i, i)).collect()
    }
}
