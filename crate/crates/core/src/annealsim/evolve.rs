use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{ground_space_of, AnnealError, AnnealSchedule, Hamiltonian};
use crate::qubo::IsingProblem;

/// Per-step drift that is treated as an integration failure rather than round-off.
const STEP_DRIFT_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimParams {
    pub anneal_time: f64,
    /// `None` selects `max(2000, 200 t_a)`.
    pub steps: Option<usize>,
    /// Norm drift that triggers renormalization.
    pub tolerance: f64,
    /// Record `(γ, ⟨H⟩)` every this many steps.
    pub record_every: Option<usize>,
}

impl SimParams {
    pub fn new(anneal_time: f64) -> Self {
        Self {
            anneal_time,
            steps: None,
            tolerance: 1e-6,
            record_every: None,
        }
    }

    pub fn effective_steps(&self) -> usize {
        self.steps
            .unwrap_or_else(|| 2000usize.max((200.0 * self.anneal_time).ceil() as usize))
    }

    pub fn validate(&self) -> Result<(), AnnealError> {
        let bad = |m: &str| Err(AnnealError::InvalidParams(m.into()));
        if !(self.anneal_time > 0.0 && self.anneal_time.is_finite()) {
            return bad("anneal time must be positive");
        }
        if self.effective_steps() < 100 {
            return bad("at least 100 integrator steps are required");
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub anneal_time: f64,
    pub success_probability: f64,
    pub final_state_norm: f64,
    pub ground_space_dimension: usize,
    /// Largest norm deviation observed before any renormalization.
    pub max_norm_drift: f64,
    pub renormalizations: usize,
    pub steps: usize,
    /// `(γ, ⟨ψ|H(γ)|ψ⟩)` samples when requested.
    pub energy_trace: Vec<(f64, f64)>,
}

fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `dψ/dt = −i H ψ` evaluated into `out`.
fn derivative(h: &Hamiltonian, a: f64, b: f64, psi: &[Complex64], out: &mut [Complex64]) {
    h.apply(a, b, psi, out);
    for v in out.iter_mut() {
        *v = Complex64::new(v.im, -v.re);
    }
}

/// Integrates the Schrödinger equation from the uniform superposition over
/// `[0, t_a]` with fixed-step RK4 and returns the final overlap with the
/// classical ground space.
pub fn evolve(ising: &IsingProblem, schedule: &AnnealSchedule, p: &SimParams) -> Result<SimResult, AnnealError> {
    p.validate()?;
    let h = Hamiltonian::new(ising)?;
    let dim = 1usize << h.num_spins();
    let ground = ground_space_of(h.problem_diagonal(), ising.offset);
    let steps = p.effective_steps();
    let ta = p.anneal_time;
    let dt = ta / steps as f64;

    let amp = 1.0 / (dim as f64).sqrt();
    let mut psi = vec![Complex64::new(amp, 0.0); dim];
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![zero; dim],
        vec![zero; dim],
        vec![zero; dim],
        vec![zero; dim],
        vec![zero; dim],
    );
    let mut max_drift = 0.0f64;
    let mut renormalizations = 0;
    let mut trace = Vec::new();
    let expectation = |psi: &[Complex64], gamma: f64, buf: &mut [Complex64]| -> f64 {
        let (a, b) = schedule.eval(gamma);
        h.apply(a, b, psi, buf);
        psi.iter().zip(buf.iter()).map(|(x, y)| (x.conj() * y).re).sum()
    };

    for step in 0..steps {
        let t = step as f64 * dt;
        if let Some(every) = p.record_every {
            if step % every.max(1) == 0 {
                trace.push((t / ta, expectation(&psi, t / ta, &mut tmp)));
            }
        }
        let (a0, b0) = schedule.eval(t / ta);
        let (am, bm) = schedule.eval((t + 0.5 * dt) / ta);
        let (a1, b1) = schedule.eval((t + dt) / ta);

        derivative(&h, a0, b0, &psi, &mut k1);
        for i in 0..dim {
            tmp[i] = psi[i] + k1[i] * (0.5 * dt);
        }
        derivative(&h, am, bm, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = psi[i] + k2[i] * (0.5 * dt);
        }
        derivative(&h, am, bm, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        derivative(&h, a1, b1, &tmp, &mut k4);
        for i in 0..dim {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }

        let nrm = norm(&psi);
        let drift = (nrm - 1.0).abs();
        max_drift = max_drift.max(drift);
        if drift > STEP_DRIFT_LIMIT || !nrm.is_finite() {
            return Err(AnnealError::NormDrift { drift, steps });
        }
        if drift > p.tolerance {
            for v in psi.iter_mut() {
                *v /= nrm;
            }
            renormalizations += 1;
        }
    }
    if p.record_every.is_some() {
        trace.push((1.0, expectation(&psi, 1.0, &mut tmp)));
    }
    let success: f64 = ground.states.iter().map(|&s| psi[s as usize].norm_sqr()).sum();
    Ok(SimResult {
        anneal_time: ta,
        success_probability: success.clamp(0.0, 1.0),
        final_state_norm: norm(&psi),
        ground_space_dimension: ground.dimension(),
        max_norm_drift: max_drift,
        renormalizations,
        steps,
        energy_trace: trace,
    })
}

/// Runs [`evolve`] for every anneal time of `grid`, in grid order.
pub fn sweep_anneal_times(
    ising: &IsingProblem,
    schedule: &AnnealSchedule,
    grid: &[f64],
    template: &SimParams,
) -> Result<Vec<SimResult>, AnnealError> {
    grid.par_iter()
        .map(|&ta| {
            evolve(
                ising,
                schedule,
                &SimParams {
                    anneal_time: ta,
                    ..*template
                },
            )
        })
        .collect()
}

/// First anneal time whose success probability reaches `threshold`.
pub fn first_reaching(results: &[SimResult], threshold: f64) -> Option<f64> {
    results
        .iter()
        .find(|r| r.success_probability >= threshold)
        .map(|r| r.anneal_time)
}
