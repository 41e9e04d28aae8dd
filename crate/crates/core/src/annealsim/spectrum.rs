use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::{ground_space_of, guard, problem_diagonal, AnnealError, AnnealSchedule, DENSE_MAX_SPINS};
use crate::qubo::IsingProblem;

/// Dense `−a/2 Σ X_i + b/2 D` for `N ≤ 12` spins.
pub fn dense_hamiltonian(ising: &IsingProblem, a: f64, b: f64) -> Result<DMatrix<f64>, AnnealError> {
    let n = guard(ising, DENSE_MAX_SPINS)?;
    Ok(dense_from_diag(n, &problem_diagonal(ising), a, b))
}

fn dense_from_diag(n: usize, diag: &[f64], a: f64, b: f64) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        m[(s, s)] = 0.5 * b * diag[s];
        for i in 0..n {
            m[(s, s ^ (1 << i))] = -0.5 * a;
        }
    }
    m
}

/// Eigenpairs sorted by ascending eigenvalue.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<DVector<f64>>>());
    (values, vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapScan {
    pub gamma: Vec<f64>,
    /// `E₁ − E₀` on the grid.
    pub naive_gap: Vec<f64>,
    /// `E_D − E₀` on the grid, `D` the final ground-space dimension.
    pub degenerate_gap: Vec<f64>,
    pub ground_dimension: usize,
    pub g_min: f64,
    pub gamma_star: f64,
    pub g_min_degenerate: f64,
    pub gamma_star_degenerate: f64,
}

struct Context<'a> {
    n: usize,
    diag: Vec<f64>,
    schedule: &'a AnnealSchedule,
    level: usize,
}

impl Context<'_> {
    fn spectrum(&self, gamma: f64) -> (Vec<f64>, DMatrix<f64>) {
        let (a, b) = self.schedule.eval(gamma);
        sorted_eigen(dense_from_diag(self.n, &self.diag, a, b))
    }

    fn gaps(&self, gamma: f64) -> (f64, f64) {
        let (e, _) = self.spectrum(gamma);
        (e[1] - e[0], e[self.level] - e[0])
    }
}

fn grid(step: f64) -> Result<Vec<f64>, AnnealError> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(AnnealError::InvalidParams("grid step must lie in (0, 0.5]".into()));
    }
    let m = (1.0 / step).round() as usize;
    Ok((0..=m).map(|i| i as f64 / m as f64).collect())
}

/// Golden-section refinement of a grid minimum within one grid cell on each side.
fn refine(f: impl Fn(f64) -> f64, center: f64, step: f64, value: f64) -> (f64, f64) {
    let (mut lo, mut hi) = ((center - step).max(0.0), (center + step).min(1.0));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-9 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if fx < value {
        (x, fx)
    } else {
        (center, value)
    }
}

fn argmin(values: &[f64]) -> usize {
    (0..values.len())
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .expect("nonempty grid")
}

fn context<'a>(ising: &IsingProblem, schedule: &'a AnnealSchedule) -> Result<Context<'a>, AnnealError> {
    let n = guard(ising, DENSE_MAX_SPINS)?;
    let diag = problem_diagonal(ising);
    let d = ground_space_of(&diag, 0.0).dimension();
    if d >= diag.len() {
        return Err(AnnealError::NoExcitedLevel(d));
    }
    Ok(Context {
        n,
        diag,
        schedule,
        level: d,
    })
}

/// Scans the spectral gaps on a uniform `γ` grid and refines both minima.
pub fn gap_scan(ising: &IsingProblem, schedule: &AnnealSchedule, grid_step: f64) -> Result<GapScan, AnnealError> {
    let gamma = grid(grid_step)?;
    let ctx = context(ising, schedule)?;
    let (naive, degenerate): (Vec<f64>, Vec<f64>) = gamma.iter().map(|&g| ctx.gaps(g)).unzip();
    let i = argmin(&naive);
    let (gamma_star, g_min) = refine(|g| ctx.gaps(g).0, gamma[i], grid_step, naive[i]);
    let j = argmin(&degenerate);
    let (gamma_star_d, g_min_d) = refine(|g| ctx.gaps(g).1, gamma[j], grid_step, degenerate[j]);
    Ok(GapScan {
        gamma,
        naive_gap: naive,
        degenerate_gap: degenerate,
        ground_dimension: ctx.level,
        g_min,
        gamma_star,
        g_min_degenerate: g_min_d,
        gamma_star_degenerate: gamma_star_d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticEstimate {
    /// `max_γ |⟨D, γ| ∂_γ H |0, γ⟩|`.
    pub matrix_element: f64,
    pub g_min: f64,
    pub gamma_star: f64,
    /// `matrix_element / g_min²`.
    pub anneal_time: f64,
}

/// Adiabatic-condition anneal time `ℰ / g_min²` using the degeneracy-aware gap.
pub fn adiabatic_time_estimate(
    ising: &IsingProblem,
    schedule: &AnnealSchedule,
    grid_step: f64,
) -> Result<AdiabaticEstimate, AnnealError> {
    let scan = gap_scan(ising, schedule, grid_step)?;
    if scan.g_min_degenerate <= 1e-12 {
        return Err(AnnealError::VanishingGap);
    }
    let ctx = context(ising, schedule)?;
    let element = |g: f64| -> f64 {
        let (_, vecs) = ctx.spectrum(g);
        let (da, db) = schedule.slope(g);
        let dh = dense_from_diag(ctx.n, &ctx.diag, da, db);
        let v0 = vecs.column(0);
        let vd = vecs.column(ctx.level);
        (vd.transpose() * &dh * v0)[(0, 0)].abs()
    };
    let e = scan
        .gamma
        .iter()
        .copied()
        .chain([scan.gamma_star_degenerate])
        .map(element)
        .fold(0.0, f64::max);
    Ok(AdiabaticEstimate {
        matrix_element: e,
        g_min: scan.g_min_degenerate,
        gamma_star: scan.gamma_star_degenerate,
        anneal_time: e / (scan.g_min_degenerate * scan.g_min_degenerate),
    })
}
