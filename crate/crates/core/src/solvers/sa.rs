use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, Compiled, SolveResult, SolverError};
use crate::qubo::QuboProblem;

/// Single-flip Metropolis annealing with geometric cooling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    pub sweeps: usize,
    pub restarts: usize,
    /// `None` tunes `T₀` so the mean uphill move is accepted with probability 0.8.
    pub initial_temperature: Option<f64>,
    /// Temperature multiplier per sweep.
    pub cooling: f64,
    pub final_temperature: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            restarts: 40,
            initial_temperature: None,
            cooling: 0.97,
            final_temperature: 1e-2,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidParams(m.into()));
        if self.sweeps == 0 || self.restarts == 0 {
            return bad("sweeps and restarts must be at least 1");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling factor must lie in (0, 1)");
        }
        if self.final_temperature.is_nan() || self.final_temperature <= 0.0 {
            return bad("final temperature must be positive");
        }
        if let Some(t) = self.initial_temperature {
            if t.is_nan() || t <= 0.0 {
                return bad("initial temperature must be positive");
            }
        }
        Ok(())
    }
}

const TUNING_SAMPLES: usize = 100;
const TUNING_ACCEPTANCE: f64 = 0.8;

/// `T₀` from the mean uphill move among random single flips of `z`.
fn auto_temperature(c: &Compiled, fields: &[i64], z: &[u8], rng: &mut impl Rng) -> f64 {
    let (mut sum, mut count) = (0i64, 0usize);
    for _ in 0..TUNING_SAMPLES {
        let d = c.delta(fields, z, rng.gen_range(0..c.n));
        if d > 0 {
            sum += d;
            count += 1;
        }
    }
    if count == 0 {
        return 1.0;
    }
    let mean = sum as f64 / count as f64;
    -mean / TUNING_ACCEPTANCE.ln()
}

struct Restart {
    energy: i64,
    state: Vec<u8>,
    evaluations: u64,
}

fn anneal_once(c: &Compiled, p: &SaParams, seed: u64) -> Restart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<u8> = (0..c.n).map(|_| rng.gen_range(0..2)).collect();
    let mut fields = c.fields(&z);
    let mut e = c.energy(&z);
    let (mut best, mut best_z) = (e, z.clone());
    if c.n == 0 {
        return Restart {
            energy: e,
            state: z,
            evaluations: 0,
        };
    }
    let mut t = p
        .initial_temperature
        .unwrap_or_else(|| auto_temperature(c, &fields, &z, &mut rng));
    let mut evaluations = 0u64;
    for _ in 0..p.sweeps {
        let beta = 1.0 / t.max(p.final_temperature);
        for i in 0..c.n {
            let d = c.delta(&fields, &z, i);
            evaluations += 1;
            if d <= 0 || rng.gen::<f64>() < (-(d as f64) * beta).exp() {
                e += d;
                c.flip(&mut fields, &mut z, i);
                if e < best {
                    best = e;
                    best_z.copy_from_slice(&z);
                }
            }
        }
        t = (t * p.cooling).max(p.final_temperature);
    }
    Restart {
        energy: best,
        state: best_z,
        evaluations,
    }
}

/// Best of `p.restarts` independent anneals.
///
/// Restart `i` draws from its own stream seeded by `derive_seed(p.seed, i)`,
/// so the result does not depend on how restarts are scheduled on threads.
/// Ties go to the lowest restart index.
pub fn solve_sa(q: &QuboProblem, p: &SaParams) -> Result<SolveResult, SolverError> {
    p.validate()?;
    let start = Instant::now();
    let c = Compiled::new(q);
    let runs: Vec<Restart> = (0..p.restarts)
        .into_par_iter()
        .map(|i| anneal_once(&c, p, derive_seed(p.seed, i as u64)))
        .collect();
    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .min_by_key(|(i, r)| (r.energy, *i))
        .expect("restarts >= 1");
    let mut r = SolveResult::new("sa", q, runs[best_idx].state.clone(), runs[best_idx].energy);
    r.evaluations = runs.iter().map(|x| x.evaluations).sum();
    r.restarts_used = p.restarts;
    r.seed = p.seed;
    r.restart_energies = runs.iter().map(|x| x.energy).collect();
    r.params = serde_json::to_value(p).expect("serializable");
    r.wall_time = start.elapsed();
    Ok(r)
}
