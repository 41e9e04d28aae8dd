use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::build::AuxValues;

/// Meaning of one QUBO variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    /// Normalizer coefficient `x_j`.
    X(usize),
    /// Bit `bit` of the parity auxiliary for `a_row`.
    T { row: usize, bit: usize },
    /// Bit `bit` of the parity auxiliary for `b_row`.
    U { row: usize, bit: usize },
    /// Bit `bit` of the parity auxiliary for `a_row + b_row`.
    V { row: usize, bit: usize },
    /// Bit of the penalty counter `m = 1 + Σ 2^bit e_bit`.
    E(usize),
    /// Variable with no structural meaning.
    Free(usize),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Role::X(j) => write!(f, "x{j}"),
            Role::T { row, bit } => write!(f, "t{row}.{bit}"),
            Role::U { row, bit } => write!(f, "u{row}.{bit}"),
            Role::V { row, bit } => write!(f, "v{row}.{bit}"),
            Role::E(b) => write!(f, "e{b}"),
            Role::Free(i) => write!(f, "z{i}"),
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid role {s:?}");
        let mut chars = s.chars();
        let tag = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        let pair = || -> Result<(usize, usize), String> {
            let (a, b) = rest.split_once('.').ok_or_else(bad)?;
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
        };
        let single = || -> Result<usize, String> { rest.parse().map_err(|_| bad()) };
        Ok(match tag {
            'x' => Role::X(single()?),
            'e' => Role::E(single()?),
            'z' => Role::Free(single()?),
            't' => {
                let (row, bit) = pair()?;
                Role::T { row, bit }
            }
            'u' => {
                let (row, bit) = pair()?;
                Role::U { row, bit }
            }
            'v' => {
                let (row, bit) = pair()?;
                Role::V { row, bit }
            }
            _ => return Err(bad()),
        })
    }
}

/// Bit widths of the `t`, `u`, `v` auxiliaries (per row).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxWidths {
    pub t: usize,
    pub u: usize,
    pub v: usize,
}

/// Assignment decoded back into integer roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub x: Vec<u8>,
    pub aux: AuxValues,
    /// Penalty counter `m`, when the layout has penalty bits.
    pub m: Option<u64>,
}

/// Ordered roles of the variables of a [`QuboProblem`](super::QuboProblem).
///
/// Variables are ordered `x`, then `t`, `u`, `v` (bit-major: all rows for bit
/// 0, then bit 1, ...), then `e`. Clamped variables move to `fixed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableLayout {
    pub(crate) n: usize,
    pub(crate) k: usize,
    pub(crate) widths: AuxWidths,
    pub(crate) penalty_bits: usize,
    pub(crate) roles: Vec<Role>,
    pub(crate) fixed: Vec<(Role, u8)>,
}

impl VariableLayout {
    pub fn anonymous(num_vars: usize) -> Self {
        Self {
            n: 0,
            k: 0,
            widths: AuxWidths::default(),
            penalty_bits: 0,
            roles: (0..num_vars).map(Role::Free).collect(),
            fixed: Vec::new(),
        }
    }

    /// Layout of an unpenalized weight QUBO over `x, t, u, v`.
    pub fn weight(n: usize, k: usize, widths: AuxWidths) -> Self {
        let mut roles: Vec<Role> = (0..n + k).map(Role::X).collect();
        for bit in 0..widths.t {
            roles.extend((0..n).map(|row| Role::T { row, bit }));
        }
        for bit in 0..widths.u {
            roles.extend((0..n).map(|row| Role::U { row, bit }));
        }
        for bit in 0..widths.v {
            roles.extend((0..n).map(|row| Role::V { row, bit }));
        }
        Self {
            n,
            k,
            widths,
            penalty_bits: 0,
            roles,
            fixed: Vec::new(),
        }
    }

    pub(crate) fn with_penalty_bits(mut self, r: usize) -> Self {
        self.roles.extend((0..r).map(Role::E));
        self.penalty_bits = r;
        self
    }

    /// Reassembles a layout from its parts, as read back from a file.
    pub fn from_parts(
        n: usize,
        k: usize,
        widths: AuxWidths,
        penalty_bits: usize,
        roles: Vec<Role>,
        fixed: Vec<(Role, u8)>,
    ) -> Self {
        Self {
            n,
            k,
            widths,
            penalty_bits,
            roles,
            fixed,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn widths(&self) -> AuxWidths {
        self.widths
    }

    pub fn penalty_bits(&self) -> usize {
        self.penalty_bits
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn fixed(&self) -> &[(Role, u8)] {
        &self.fixed
    }

    pub fn num_vars(&self) -> usize {
        self.roles.len()
    }

    pub fn is_anonymous(&self) -> bool {
        self.roles.iter().all(|r| matches!(r, Role::Free(_))) && self.fixed.is_empty()
    }

    pub fn index_of(&self, role: Role) -> Option<usize> {
        self.roles.iter().position(|&r| r == role)
    }

    /// Current indices of the `x` and `e` variables, ascending.
    pub fn primary_indices(&self) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, Role::X(_) | Role::E(_)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Free `x` variables in order of their coefficient index.
    pub fn x_indices(&self) -> Vec<(usize, usize)> {
        self.roles
            .iter()
            .enumerate()
            .filter_map(|(i, r)| match r {
                Role::X(j) => Some((*j, i)),
                _ => None,
            })
            .collect()
    }

    /// `n + k + n (s_t + s_u + s_v) + r`.
    pub fn formula_count(&self) -> usize {
        self.n + self.k + self.n * (self.widths.t + self.widths.u + self.widths.v) + self.penalty_bits
    }

    /// Variables before clamping.
    pub fn total_count(&self) -> usize {
        self.roles.len() + self.fixed.len()
    }

    pub(crate) fn clamped(&self, assignment: &[(usize, u8)]) -> Self {
        let mut is_fixed = vec![None; self.roles.len()];
        for &(i, v) in assignment {
            is_fixed[i] = Some(v);
        }
        let mut out = self.clone();
        out.roles.clear();
        for (i, role) in self.roles.iter().enumerate() {
            match is_fixed[i] {
                Some(v) => out.fixed.push((*role, v)),
                None => out.roles.push(*role),
            }
        }
        out
    }

    fn all_bits<'a>(&'a self, z: &'a [u8]) -> impl Iterator<Item = (Role, u8)> + 'a {
        self.roles
            .iter()
            .copied()
            .zip(z.iter().copied())
            .chain(self.fixed.iter().copied())
    }

    /// Recovers `x`, the integer auxiliaries and `m` from an assignment.
    pub fn decode(&self, z: &[u8]) -> Decoded {
        assert_eq!(z.len(), self.roles.len(), "assignment length");
        let mut x = vec![0u8; self.n + self.k];
        let mut aux = AuxValues::zeros(self.n);
        let mut e = 0u64;
        for (role, bit) in self.all_bits(z) {
            let b = bit as u64;
            match role {
                Role::X(j) => x[j] = bit,
                Role::T { row, bit: l } => aux.t[row] |= b << l,
                Role::U { row, bit: l } => aux.u[row] |= b << l,
                Role::V { row, bit: l } => aux.v[row] |= b << l,
                Role::E(l) => e |= b << l,
                Role::Free(_) => {}
            }
        }
        let m = (self.penalty_bits > 0 || self.roles.iter().any(|r| matches!(r, Role::E(_))))
            .then_some(1 + e);
        Decoded { x, aux, m }
    }

    /// Encodes `x`, auxiliaries and `m` into an assignment of the free variables.
    ///
    /// Values that do not fit the layout widths are truncated; callers pick
    /// widths large enough for the closed-form auxiliaries.
    pub fn encode(&self, x: &[u8], aux: &AuxValues, m: Option<u64>) -> Vec<u8> {
        let e = m.map(|m| m.saturating_sub(1)).unwrap_or(0);
        self.roles
            .iter()
            .map(|role| match *role {
                Role::X(j) => x[j],
                Role::T { row, bit } => ((aux.t[row] >> bit) & 1) as u8,
                Role::U { row, bit } => ((aux.u[row] >> bit) & 1) as u8,
                Role::V { row, bit } => ((aux.v[row] >> bit) & 1) as u8,
                Role::E(bit) => ((e >> bit) & 1) as u8,
                Role::Free(_) => 0,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roles_round_trip_through_text() {
        for role in [
            Role::X(3),
            Role::T { row: 1, bit: 2 },
            Role::U { row: 0, bit: 0 },
            Role::V { row: 12, bit: 3 },
            Role::E(1),
            Role::Free(9),
        ] {
            assert_eq!(role.to_string().parse::<Role>().unwrap(), role);
        }
        assert!("q1".parse::<Role>().is_err());
        assert!("t1".parse::<Role>().is_err());
    }

    #[test]
    fn weight_layout_orders_bits_major() {
        let l = VariableLayout::weight(2, 1, AuxWidths { t: 1, u: 2, v: 0 });
        let expected = [
            Role::X(0),
            Role::X(1),
            Role::X(2),
            Role::T { row: 0, bit: 0 },
            Role::T { row: 1, bit: 0 },
            Role::U { row: 0, bit: 0 },
            Role::U { row: 1, bit: 0 },
            Role::U { row: 0, bit: 1 },
            Role::U { row: 1, bit: 1 },
        ];
        assert_eq!(l.roles(), expected);
        assert_eq!(l.formula_count(), 9);
    }
}
