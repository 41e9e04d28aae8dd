use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{QuboError, QuboProblem};

/// Spin-glass form `offset + Σ h_i σ_i + Σ_{i<j} J_ij σ_i σ_j`, `σ ∈ {−1, +1}`.
///
/// A QUBO assignment `x` corresponds to spins `σ = 2x − 1`. Coefficients
/// of integer QUBOs are multiples of 1/4 and therefore exact in `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingProblem {
    pub h: Vec<f64>,
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingProblem {
    pub fn zeros(num_spins: usize) -> Self {
        Self {
            h: vec![0.0; num_spins],
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.h.len(), "spin count");
        let field: f64 = self.h.iter().zip(spins).map(|(h, &s)| h * s as f64).sum();
        let coupling: f64 = self
            .j
            .iter()
            .map(|(&(a, b), &v)| v * (spins[a] * spins[b]) as f64)
            .sum();
        self.offset + field + coupling
    }

    /// Energy of the spin configuration with `σ_i = 2 bits_i − 1`.
    pub fn energy_of_bits(&self, bits: &[u8]) -> f64 {
        let spins: Vec<i8> = bits.iter().map(|&b| 2 * b as i8 - 1).collect();
        self.energy(&spins)
    }

    /// `Σ h_i σ_i + Σ J_ij σ_i σ_j` for basis state `state` (bit `i` = spin `i` up),
    /// i.e. the energy without the offset.
    pub fn diagonal_energy(&self, state: u64) -> f64 {
        let s = |i: usize| if (state >> i) & 1 == 1 { 1.0 } else { -1.0 };
        let field: f64 = self.h.iter().enumerate().map(|(i, h)| h * s(i)).sum();
        let coupling: f64 = self.j.iter().map(|(&(a, b), &v)| v * s(a) * s(b)).sum();
        field + coupling
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("spins {}\noffset {}\n", self.num_spins(), self.offset);
        for (i, h) in self.h.iter().enumerate() {
            if *h != 0.0 {
                let _ = writeln!(out, "h {i} {h}");
            }
        }
        for (&(a, b), v) in &self.j {
            let _ = writeln!(out, "J {a} {b} {v}");
        }
        out
    }

    /// Parses the line format written by [`IsingProblem::to_text`].
    pub fn parse(text: &str) -> Result<Self, QuboError> {
        let err = |line: usize, msg: String| QuboError::Parse { line, msg };
        let mut problem: Option<IsingProblem> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let tok: Vec<&str> = l.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(line, format!("invalid number {s:?}")));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("invalid index {s:?}")));
            match (tok[0], problem.as_mut()) {
                ("spins", None) if tok.len() == 2 => problem = Some(IsingProblem::zeros(idx(tok[1])?)),
                ("spins", Some(_)) => return Err(err(line, "duplicate spins line".into())),
                (_, None) => return Err(err(line, "expected `spins N` header".into())),
                ("offset", Some(p)) if tok.len() == 2 => p.offset = num(tok[1])?,
                ("h", Some(p)) if tok.len() == 3 => {
                    let i = idx(tok[1])?;
                    if i >= p.h.len() {
                        return Err(err(line, format!("spin {i} out of range")));
                    }
                    p.h[i] = num(tok[2])?;
                }
                ("J", Some(p)) if tok.len() == 4 => {
                    let (a, b) = (idx(tok[1])?, idx(tok[2])?);
                    if a == b || a.max(b) >= p.h.len() {
                        return Err(err(line, format!("invalid coupling ({a}, {b})")));
                    }
                    *p.j.entry((a.min(b), a.max(b))).or_insert(0.0) += num(tok[3])?;
                }
                _ => return Err(err(line, format!("unrecognized line {l:?}"))),
            }
        }
        problem.ok_or_else(|| err(1, "empty ising file".into()))
    }
}

/// Maps a QUBO to spins via `x = (1 + σ)/2`.
pub fn to_ising(q: &QuboProblem) -> IsingProblem {
    let mut ising = IsingProblem::zeros(q.num_vars());
    ising.offset = q.offset() as f64;
    for (&(i, j), &c) in q.coeffs() {
        let c = c as f64;
        if i == j {
            ising.offset += c / 2.0;
            ising.h[i] += c / 2.0;
        } else {
            ising.offset += c / 4.0;
            ising.h[i] += c / 4.0;
            ising.h[j] += c / 4.0;
            *ising.j.entry((i, j)).or_insert(0.0) += c / 4.0;
        }
    }
    ising.j.retain(|_, v| *v != 0.0);
    ising
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_diagonal_coefficient() {
        let q = QuboProblem::from_entries(1, [((0, 0), 2)], 0).unwrap();
        let s = to_ising(&q);
        assert_eq!(s.h, vec![1.0]);
        assert_eq!(s.offset, 1.0);
        assert!(s.j.is_empty());
    }

    #[test]
    fn zero_qubo_maps_to_zero_ising() {
        let q = QuboProblem::from_entries(3, [], 0).unwrap();
        assert_eq!(to_ising(&q), IsingProblem::zeros(3));
    }

    #[test]
    fn energies_agree_on_all_assignments() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let mut entries = Vec::new();
            for i in 0..8 {
                for j in i..8 {
                    entries.push(((i, j), rng.gen_range(-7..=7)));
                }
            }
            let q = QuboProblem::from_entries(8, entries, rng.gen_range(-3..=3)).unwrap();
            let s = to_ising(&q);
            for m in 0..256u32 {
                let x: Vec<u8> = (0..8).map(|b| ((m >> b) & 1) as u8).collect();
                assert_eq!(s.energy_of_bits(&x), q.energy(&x) as f64);
                assert_eq!(s.diagonal_energy(m as u64) + s.offset, q.energy(&x) as f64);
            }
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let q = QuboProblem::from_entries(3, [((0, 0), 3), ((0, 2), -2), ((1, 2), 5)], 4).unwrap();
        let s = to_ising(&q);
        assert_eq!(IsingProblem::parse(&s.to_text()).unwrap(), s);
        assert!(matches!(IsingProblem::parse("h 0 1\n"), Err(QuboError::Parse { line: 1, .. })));
        assert!(matches!(
            IsingProblem::parse("spins 2\nJ 0 0 1\n"),
            Err(QuboError::Parse { line: 2, .. })
        ));
    }
}
