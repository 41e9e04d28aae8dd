//! State-vector simulation of transverse-field annealing.
//!
//! ```text
//! H(γ) = −A(γ)/2 Σ_i X_i + B(γ)/2 (Σ_i h_i Z_i + Σ_{i<j} J_ij Z_i Z_j)
//! ```
//!
//! Basis state `s` has spin `σ_i = 2 s_i − 1`, so bit `i` of `s` is the
//! QUBO variable `x_i`. The Ising offset is a global phase and is dropped.
//! Units have `ħ = 1`.

mod evolve;
mod schedule;
mod spectrum;

use num_complex::Complex64;
use thiserror::Error;

use crate::qubo::IsingProblem;

pub use evolve::{evolve, first_reaching, sweep_anneal_times, SimParams, SimResult};
pub use schedule::AnnealSchedule;
pub use spectrum::{adiabatic_time_estimate, dense_hamiltonian, gap_scan, AdiabaticEstimate, GapScan};

/// Largest spin count for time evolution.
pub const EVOLVE_MAX_SPINS: usize = 14;
/// Largest spin count for dense eigensolves.
pub const DENSE_MAX_SPINS: usize = 12;
/// Largest spin count for classical ground-space enumeration.
pub const GROUND_MAX_SPINS: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnealError {
    #[error("{spins} spins exceed the limit of {limit} for this operation")]
    TooLarge { spins: usize, limit: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("norm drift {drift:.3e} persists with {steps} steps; increase the integrator steps")]
    NormDrift { drift: f64, steps: usize },
    #[error("no spectral level above the {0}-fold ground space; the problem Hamiltonian is trivial")]
    NoExcitedLevel(usize),
    #[error("minimum gap vanishes on the scan grid")]
    VanishingGap,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

fn guard(ising: &IsingProblem, limit: usize) -> Result<usize, AnnealError> {
    let n = ising.num_spins();
    if n > limit {
        return Err(AnnealError::TooLarge { spins: n, limit });
    }
    Ok(n)
}

/// `Σ h_i σ_i + Σ J_ij σ_i σ_j` for every basis state, by Gray-code updates.
fn problem_diagonal(ising: &IsingProblem) -> Vec<f64> {
    let n = ising.num_spins();
    let mut nbrs = vec![Vec::new(); n];
    for (&(a, b), &v) in &ising.j {
        nbrs[a].push((b, v));
        nbrs[b].push((a, v));
    }
    let mut diag = vec![0.0; 1usize << n];
    let mut sigma = vec![-1.0f64; n];
    let mut e = ising.diagonal_energy(0);
    diag[0] = e;
    for s in 1usize..1 << n {
        let i = s.trailing_zeros() as usize;
        let local = ising.h[i] + nbrs[i].iter().map(|&(j, v)| v * sigma[j]).sum::<f64>();
        e -= 2.0 * sigma[i] * local;
        sigma[i] = -sigma[i];
        diag[s ^ (s >> 1)] = e;
    }
    diag
}

/// Matrix-free `H(γ)`: a precomputed problem diagonal plus `N` bit-flip strides.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n: usize,
    diag: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(ising: &IsingProblem) -> Result<Self, AnnealError> {
        let n = guard(ising, EVOLVE_MAX_SPINS)?;
        Ok(Self {
            n,
            diag: problem_diagonal(ising),
        })
    }

    pub fn num_spins(&self) -> usize {
        self.n
    }

    /// Classical energies (offset excluded) indexed by basis state.
    pub fn problem_diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `out = (−a/2 Σ X_i + b/2 D) ψ`.
    pub fn apply(&self, a: f64, b: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let (ha, hb) = (-0.5 * a, 0.5 * b);
        for (s, o) in out.iter_mut().enumerate() {
            let mut acc = psi[s] * (hb * self.diag[s]);
            for i in 0..self.n {
                acc += psi[s ^ (1 << i)] * ha;
            }
            *o = acc;
        }
    }

    /// `H(γ) ψ` under `schedule`.
    pub fn apply_at(&self, schedule: &AnnealSchedule, gamma: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let (a, b) = schedule.eval(gamma);
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply(a, b, psi, &mut out);
        out
    }
}

/// Basis states attaining the minimal classical energy.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSpace {
    /// Minimal Ising energy, offset included.
    pub energy: f64,
    pub states: Vec<u64>,
}

impl GroundSpace {
    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    /// Bit `i` of each ground state, as QUBO assignments.
    pub fn assignments(&self, num_spins: usize) -> Vec<Vec<u8>> {
        self.states
            .iter()
            .map(|&s| (0..num_spins).map(|i| ((s >> i) & 1) as u8).collect())
            .collect()
    }
}

const DEGENERACY_TOL: f64 = 1e-9;

pub fn ground_space(ising: &IsingProblem) -> Result<GroundSpace, AnnealError> {
    guard(ising, GROUND_MAX_SPINS)?;
    let diag = problem_diagonal(ising);
    Ok(ground_space_of(&diag, ising.offset))
}

fn ground_space_of(diag: &[f64], offset: f64) -> GroundSpace {
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let states = (0..diag.len() as u64)
        .filter(|&s| diag[s as usize] - min <= DEGENERACY_TOL)
        .collect();
    GroundSpace {
        energy: min + offset,
        states,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{to_ising, QuboProblem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single(h: f64) -> IsingProblem {
        IsingProblem {
            h: vec![h],
            j: Default::default(),
            offset: 0.0,
        }
    }

    #[test]
    fn diagonal_matches_direct_energies() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let mut entries = Vec::new();
        for i in 0..7 {
            for j in i..7 {
                entries.push(((i, j), rng.gen_range(-5..=5)));
            }
        }
        let ising = to_ising(&QuboProblem::from_entries(7, entries, 0).unwrap());
        let h = Hamiltonian::new(&ising).unwrap();
        for s in 0..128u64 {
            assert!((h.problem_diagonal()[s as usize] - ising.diagonal_energy(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn end_of_anneal_diagonal_is_half_problem_energy() {
        let ising = IsingProblem {
            h: vec![0.5, -1.0],
            j: [((0, 1), 0.75)].into_iter().collect(),
            offset: 2.0,
        };
        let h = Hamiltonian::new(&ising).unwrap();
        let sched = AnnealSchedule::linear();
        for s in 0..4usize {
            let mut e = vec![Complex64::new(0.0, 0.0); 4];
            e[s] = Complex64::new(1.0, 0.0);
            let out = h.apply_at(&sched, 1.0, &e);
            assert!((out[s].re - 0.5 * ising.diagonal_energy(s as u64)).abs() < 1e-12);
            assert!(out.iter().enumerate().all(|(t, v)| t == s || v.norm() == 0.0));
        }
    }

    #[test]
    fn initial_hamiltonian_single_qubit_spectrum() {
        let h = Hamiltonian::new(&single(1.0)).unwrap();
        let sched = AnnealSchedule::linear();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [Complex64::new(r, 0.0), Complex64::new(r, 0.0)];
        let minus = [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)];
        let hp = h.apply_at(&sched, 0.0, &plus);
        let hm = h.apply_at(&sched, 0.0, &minus);
        assert!((hp[0] - plus[0] * -0.5).norm() < 1e-12 && (hp[1] - plus[1] * -0.5).norm() < 1e-12);
        assert!((hm[0] - minus[0] * 0.5).norm() < 1e-12 && (hm[1] - minus[1] * 0.5).norm() < 1e-12);
    }

    #[test]
    fn ground_space_examples() {
        let zero = IsingProblem::zeros(3);
        assert_eq!(ground_space(&zero).unwrap().dimension(), 8);
        let g = ground_space(&single(1.0)).unwrap();
        assert_eq!(g.states, vec![0]);
        assert_eq!(g.energy, -1.0);
        assert!(matches!(
            ground_space(&IsingProblem::zeros(25)),
            Err(AnnealError::TooLarge { spins: 25, limit: 24 })
        ));
        assert!(Hamiltonian::new(&IsingProblem::zeros(15)).is_err());
    }
}
