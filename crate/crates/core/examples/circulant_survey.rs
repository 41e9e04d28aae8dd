//! Annealing-solver survey of optimal circulant codes against the exhaustive oracle.

use std::time::Instant;

use qdist::codes::CodeSpec;
use qdist::distance::best_circulant;
use qdist::qubo::pipeline::{build_instances, BuildMode};
use qdist::qubo::AuxWidthMode;
use qdist::solvers::{approximation_ratio, solve_sa, SaParams};

fn main() {
    println!(" n  d  vars  best   AR  hit-rate  ms");
    for n in 5..=14 {
        let (code, d) = best_circulant(n).unwrap();
        let q = build_instances(&CodeSpec::Circulant(code), BuildMode::Circulant, AuxWidthMode::Tight)
            .unwrap()
            .remove(0);
        let start = Instant::now();
        let r = solve_sa(&q, &SaParams { seed: n as u64, ..SaParams::default() }).unwrap();
        let hits = r.restart_energies.iter().filter(|&&e| e == d as i64).count() as f64;
        println!(
            "{n:>2} {d:>2} {:>5} {:>5} {:>4.2} {:>8.2} {:>4}",
            q.num_vars(),
            r.best_energy,
            approximation_ratio(r.best_energy, d as i64).unwrap(),
            hits / r.restart_energies.len() as f64,
            start.elapsed().as_millis()
        );
    }
}
