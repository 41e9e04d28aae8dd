//! QUBO minimizers and result bookkeeping.

mod decompose;
mod exact;
mod sa;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::QuboProblem;

pub use decompose::{solve_decomposed, DecomposeParams, InnerSolver};
pub use exact::{solve_exact, solve_exact_branching, solve_exact_structured, DIRECT_MAX_VARS, EXACT_MAX_VARS};
pub use sa::{solve_sa, SaParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("{vars} free variables exceed the exact-solver limit of {limit}")]
    TooLarge { vars: usize, limit: usize },
    #[error("residual component of {size} variables exceeds the limit of {limit}")]
    ComponentTooLarge { size: usize, limit: usize },
    #[error("branch variable {0} out of range")]
    BadBranchVariable(usize),
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("reference value must be positive, got {0}")]
    NonPositiveReference(i64),
    #[error("no trials to aggregate")]
    NoTrials,
}

/// One round of the decomposition solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub round: usize,
    /// Incumbent energy after the round.
    pub energy: i64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solver: String,
    pub best_assignment: Vec<u8>,
    pub best_energy: i64,
    /// Upper bound on the distance: the energy under the builders' offset convention.
    pub distance_bound: i64,
    pub evaluations: u64,
    pub restarts_used: usize,
    pub seed: u64,
    /// Best energy of every restart, in restart order (SA only).
    pub restart_energies: Vec<i64>,
    /// Decomposition rounds (decomposed solver only).
    pub trace: Vec<TraceEntry>,
    /// Effective parameters, defaults included.
    pub params: serde_json::Value,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SolveResult {
    pub(crate) fn new(solver: &str, q: &QuboProblem, best_assignment: Vec<u8>, best_energy: i64) -> Self {
        let check = q.energy(&best_assignment);
        assert_eq!(check, best_energy, "{solver}: reported energy differs from re-evaluation");
        Self {
            solver: solver.into(),
            best_assignment,
            best_energy,
            distance_bound: best_energy,
            evaluations: 0,
            restarts_used: 1,
            seed: 0,
            restart_energies: Vec::new(),
            trace: Vec::new(),
            params: serde_json::Value::Null,
            wall_time: Duration::ZERO,
        }
    }
}

/// `found / exact`.
pub fn approximation_ratio(found: i64, exact: i64) -> Result<f64, SolverError> {
    if exact <= 0 {
        return Err(SolverError::NonPositiveReference(exact));
    }
    Ok(found as f64 / exact as f64)
}

/// Fraction of trials whose best energy equals `exact`.
pub fn success_rate(trials: &[SolveResult], exact: i64) -> Result<f64, SolverError> {
    if trials.is_empty() {
        return Err(SolverError::NoTrials);
    }
    let hits = trials.iter().filter(|t| t.best_energy == exact).count();
    Ok(hits as f64 / trials.len() as f64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` derived from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Adjacency-list form with per-variable linear terms, for incremental updates.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub n: usize,
    pub offset: i64,
    pub lin: Vec<i64>,
    start: Vec<usize>,
    nbr: Vec<(usize, i64)>,
}

impl Compiled {
    pub fn new(q: &QuboProblem) -> Self {
        let n = q.num_vars();
        let adj = q.neighbors();
        let mut start = Vec::with_capacity(n + 1);
        let mut nbr = Vec::new();
        start.push(0);
        for list in adj {
            nbr.extend(list);
            start.push(nbr.len());
        }
        Self {
            n,
            offset: q.offset(),
            lin: q.linear_terms(),
            start,
            nbr,
        }
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[(usize, i64)] {
        &self.nbr[self.start[i]..self.start[i + 1]]
    }

    /// Local fields `f_i = lin_i + Σ_j Q_ij z_j`; flipping `i` changes the energy by `(1 − 2z_i) f_i`.
    pub fn fields(&self, z: &[u8]) -> Vec<i64> {
        (0..self.n)
            .map(|i| {
                self.lin[i]
                    + self
                        .neighbors(i)
                        .iter()
                        .map(|&(j, w)| w * z[j] as i64)
                        .sum::<i64>()
            })
            .collect()
    }

    pub fn energy(&self, z: &[u8]) -> i64 {
        let mut e = self.offset;
        for i in 0..self.n {
            if z[i] == 1 {
                e += self.lin[i];
                e += self
                    .neighbors(i)
                    .iter()
                    .filter(|&&(j, _)| j > i && z[j] == 1)
                    .map(|&(_, w)| w)
                    .sum::<i64>();
            }
        }
        e
    }

    #[inline]
    pub fn delta(&self, fields: &[i64], z: &[u8], i: usize) -> i64 {
        if z[i] == 0 {
            fields[i]
        } else {
            -fields[i]
        }
    }

    /// Flips `z_i` and updates the fields of its neighbours.
    #[inline]
    pub fn flip(&self, fields: &mut [i64], z: &mut [u8], i: usize) {
        z[i] ^= 1;
        let sign = if z[i] == 1 { 1 } else { -1 };
        for &(j, w) in self.neighbors(i) {
            fields[j] += sign * w;
        }
    }
}

/// Steepest single-flip descent from `z` until no flip lowers the energy.
pub(crate) fn greedy_descent(c: &Compiled, z: &mut [u8]) -> u64 {
    let mut fields = c.fields(z);
    let mut evals = 0u64;
    loop {
        let mut best: Option<(i64, usize)> = None;
        for i in 0..c.n {
            let d = c.delta(&fields, z, i);
            evals += 1;
            if d < 0 && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        match best {
            Some((_, i)) => c.flip(&mut fields, z, i),
            None => return evals,
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ratio_and_rate() {
        assert_eq!(approximation_ratio(3, 3).unwrap(), 1.0);
        assert!((approximation_ratio(4, 3).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(approximation_ratio(4, 0), Err(SolverError::NonPositiveReference(0)));
        assert_eq!(success_rate(&[], 3), Err(SolverError::NoTrials));
        let q = QuboProblem::from_entries(1, [((0, 0), 3)], 0).unwrap();
        let hit = SolveResult::new("t", &q, vec![1], 3);
        let miss = SolveResult::new("t", &q, vec![0], 0);
        assert_eq!(success_rate(&[hit.clone(), hit.clone()], 3).unwrap(), 1.0);
        assert_eq!(success_rate(std::slice::from_ref(&miss), 3).unwrap(), 0.0);
        assert_eq!(success_rate(&[hit, miss], 3).unwrap(), 0.5);
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(0, 0), derive_seed(1, 0));
    }

    #[test]
    fn compiled_energy_and_fields_agree_with_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q = test_util::random_qubo(&mut rng, 9, 0.4);
            let c = Compiled::new(&q);
            let mut z: Vec<u8> = (0..9).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
            let mut f = c.fields(&z);
            let mut e = c.energy(&z);
            assert_eq!(e, q.energy(&z));
            for _ in 0..30 {
                let i = rand::Rng::gen_range(&mut rng, 0..9);
                e += c.delta(&f, &z, i);
                c.flip(&mut f, &mut z, i);
                assert_eq!(e, q.energy(&z));
                assert_eq!(f, c.fields(&z));
            }
        }
    }
}
