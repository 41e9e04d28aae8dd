//! One-call construction of the solver-ready instances for a code.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    add_logical_penalty, add_nonzero_penalty, build_selfdual_qubo, clamp, split_constraints,
    weight_qubo_for, AuxWidthMode, QuboError, QuboProblem, Role,
};
use crate::codes::CodeSpec;

/// How the "nontrivial logical" constraint is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuildMode {
    /// One instance with a counter penalty (logical block for `k ≥ 1`, `x ≠ 0` for `k = 0`).
    Penalty,
    /// One clamped instance per position of the leading nonzero `x`.
    Split,
    /// Graph-code builder over `(x, u)` with the `x ≠ 0` penalty.
    SelfDual,
    /// Graph-code builder with `x_0 = 1` clamped; valid for circulant codes.
    Circulant,
}

impl BuildMode {
    pub const ALL: [BuildMode; 4] = [Self::Penalty, Self::Split, Self::SelfDual, Self::Circulant];
}

impl fmt::Display for BuildMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Penalty => "penalty",
            Self::Split => "split",
            Self::SelfDual => "selfdual",
            Self::Circulant => "circulant",
        })
    }
}

impl FromStr for BuildMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mode {s:?} (penalty, split, selfdual, circulant)"))
    }
}

fn mismatch(mode: BuildMode, reason: &str) -> QuboError {
    QuboError::ModeMismatch {
        mode: mode.to_string(),
        reason: reason.into(),
    }
}

/// Builds the instances whose overall minimum energy is the code distance.
pub fn build_instances(
    spec: &CodeSpec,
    mode: BuildMode,
    widths: AuxWidthMode,
) -> Result<Vec<QuboProblem>, QuboError> {
    match mode {
        BuildMode::Penalty => {
            let code = spec.stabilizer();
            let q = weight_qubo_for(&code, widths);
            let q = if code.k() > 0 {
                add_logical_penalty(&q, code.n(), code.k())?
            } else {
                add_nonzero_penalty(&q, code.n())?
            };
            Ok(vec![q])
        }
        BuildMode::Split => {
            let code = spec.stabilizer();
            let q = weight_qubo_for(&code, widths);
            let prefix = if code.k() > 0 { 2 * code.k() } else { code.n() };
            split_constraints(&q, prefix)
        }
        BuildMode::SelfDual => {
            let g = spec
                .graph()
                .ok_or_else(|| mismatch(mode, "requires a graph or circulant code"))?;
            let q = build_selfdual_qubo(&g, widths);
            Ok(vec![add_nonzero_penalty(&q, g.n())?])
        }
        BuildMode::Circulant => {
            let CodeSpec::Circulant(c) = spec else {
                return Err(mismatch(mode, "requires a circulant code"));
            };
            let q = build_selfdual_qubo(&c.to_graph(), widths);
            let x0 = q.layout().index_of(Role::X(0)).expect("n >= 1");
            Ok(vec![clamp(&q, &[(x0, 1)])?])
        }
    }
}
