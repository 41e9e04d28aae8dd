use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::exact::EXACT_MAX_VARS;
use super::{derive_seed, greedy_descent, solve_exact, solve_sa, Compiled, SaParams, SolveResult, SolverError, TraceEntry};
use crate::qubo::{clamp, QuboProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerSolver {
    /// Exact enumeration up to `exact_threshold` variables, SA above.
    Auto,
    /// Always SA.
    Sa,
}

/// Iterative clamp-and-solve over variable subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeParams {
    pub subproblem_size: usize,
    pub inner: InnerSolver,
    pub exact_threshold: usize,
    pub rounds: usize,
    /// Stop after this many consecutive rounds without improvement.
    pub patience: usize,
    /// Rounds a selected variable stays excluded from selection.
    pub tabu_tenure: usize,
    /// Share of each subset drawn at random instead of by flip impact.
    pub random_fraction: f64,
    pub time_budget: Option<Duration>,
    pub inner_sa: SaParams,
    pub seed: u64,
}

impl Default for DecomposeParams {
    fn default() -> Self {
        Self {
            subproblem_size: 20,
            inner: InnerSolver::Auto,
            exact_threshold: 20,
            rounds: 200,
            patience: 30,
            tabu_tenure: 1,
            random_fraction: 0.25,
            time_budget: None,
            inner_sa: SaParams {
                sweeps: 200,
                restarts: 4,
                ..SaParams::default()
            },
            seed: 0,
        }
    }
}

impl DecomposeParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidParams(m.into()));
        if self.subproblem_size < 2 {
            return bad("subproblem size must be at least 2");
        }
        if self.exact_threshold > EXACT_MAX_VARS {
            return bad("exact threshold must not exceed 30");
        }
        if !(0.0..=1.0).contains(&self.random_fraction) {
            return bad("random fraction must lie in [0, 1]");
        }
        self.inner_sa.validate()
    }
}

fn solve_inner(q: &QuboProblem, p: &DecomposeParams, seed: u64) -> Result<SolveResult, SolverError> {
    if p.inner == InnerSolver::Auto && q.num_vars() <= p.exact_threshold {
        solve_exact(q)
    } else {
        solve_sa(q, &SaParams { seed, ..p.inner_sa })
    }
}

/// Picks the subset for one round: lowest single-flip deltas first, then a
/// random share, never a tabu variable.
fn select(
    c: &Compiled,
    z: &[u8],
    tabu_until: &[usize],
    round: usize,
    p: &DecomposeParams,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let fields = c.fields(z);
    let mut open: Vec<usize> = (0..c.n).filter(|&i| tabu_until[i] <= round).collect();
    let size = p.subproblem_size.min(open.len());
    let n_random = ((size as f64) * p.random_fraction).round() as usize;
    open.sort_by_key(|&i| (c.delta(&fields, z, i), i));
    let mut chosen: Vec<usize> = open[..size - n_random].to_vec();
    let mut rest = open[size - n_random..].to_vec();
    rest.shuffle(rng);
    chosen.extend_from_slice(&rest[..n_random]);
    chosen.sort_unstable();
    chosen
}

/// Improves a greedy incumbent by repeatedly re-solving variable subsets
/// with the complement clamped. Only strict improvements are accepted, so
/// the recorded incumbent energies never increase.
pub fn solve_decomposed(q: &QuboProblem, p: &DecomposeParams) -> Result<SolveResult, SolverError> {
    p.validate()?;
    let start = Instant::now();
    let n = q.num_vars();
    if n <= p.subproblem_size {
        let mut r = solve_inner(q, p, derive_seed(p.seed, 0))?;
        r.solver = "decomposed".into();
        r.seed = p.seed;
        r.trace = vec![TraceEntry {
            round: 0,
            energy: r.best_energy,
            accepted: true,
        }];
        r.params = serde_json::to_value(p).expect("serializable");
        r.wall_time = start.elapsed();
        return Ok(r);
    }
    let c = Compiled::new(q);
    let mut z = vec![0u8; n];
    let mut evaluations = greedy_descent(&c, &mut z);
    let mut energy = c.energy(&z);
    let mut trace = vec![TraceEntry {
        round: 0,
        energy,
        accepted: true,
    }];
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut tabu_until = vec![0usize; n];
    let mut stale = 0;
    for round in 1..=p.rounds {
        if p.time_budget.is_some_and(|b| start.elapsed() >= b) || stale >= p.patience {
            break;
        }
        let chosen = select(&c, &z, &tabu_until, round, p, &mut rng);
        let mut in_sub = vec![false; n];
        for &i in &chosen {
            in_sub[i] = true;
            tabu_until[i] = round + 1 + p.tabu_tenure;
        }
        let assignment: Vec<(usize, u8)> = (0..n).filter(|&i| !in_sub[i]).map(|i| (i, z[i])).collect();
        let sub = clamp(q, &assignment).expect("valid clamp");
        let r = solve_inner(&sub, p, derive_seed(p.seed, round as u64))?;
        evaluations += r.evaluations;
        let accepted = r.best_energy < energy;
        if accepted {
            for (&i, &v) in chosen.iter().zip(&r.best_assignment) {
                z[i] = v;
            }
            energy = r.best_energy;
            stale = 0;
        } else {
            stale += 1;
        }
        trace.push(TraceEntry {
            round,
            energy,
            accepted,
        });
    }
    let mut r = SolveResult::new("decomposed", q, z, energy);
    r.evaluations = evaluations;
    r.seed = p.seed;
    r.trace = trace;
    r.params = serde_json::to_value(p).expect("serializable");
    r.wall_time = start.elapsed();
    Ok(r)
}
