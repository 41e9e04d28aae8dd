//! Exact, annealing and decomposition solvers on the same distance QUBO.

use qdist::codes::{five_qubit_code, CodeSpec};
use qdist::qubo::pipeline::{build_instances, BuildMode};
use qdist::qubo::AuxWidthMode;
use qdist::solvers::{solve_decomposed, solve_exact_branching, solve_sa, DecomposeParams, SaParams};

fn main() {
    let spec = CodeSpec::Stabilizer(five_qubit_code());
    let q = build_instances(&spec, BuildMode::Penalty, AuxWidthMode::Tight).unwrap().remove(0);
    println!("{} variables, offset {}", q.num_vars(), q.offset());

    // Too many variables for plain enumeration: branch on x and the penalty
    // bits, then solve the decoupled auxiliaries row by row.
    let exact = solve_exact_branching(&q, &q.layout().primary_indices()).unwrap();
    println!("exact:      energy {} after {} evaluations", exact.best_energy, exact.evaluations);

    let sa = solve_sa(&q, &SaParams { seed: 7, ..SaParams::default() }).unwrap();
    let hits = sa.restart_energies.iter().filter(|&&e| e == exact.best_energy).count();
    println!("annealing:  energy {} ({hits}/{} restarts optimal)", sa.best_energy, sa.restart_energies.len());

    let p = DecomposeParams {
        subproblem_size: 12,
        exact_threshold: 12,
        seed: 7,
        ..DecomposeParams::default()
    };
    let dec = solve_decomposed(&q, &p).unwrap();
    println!("decomposed: energy {} in {} rounds", dec.best_energy, dec.trace.len());
    for t in dec.trace.iter().filter(|t| t.accepted) {
        println!("  round {:>3}: {}", t.round, t.energy);
    }

    let x = q.layout().decode(&exact.best_assignment).x;
    println!("optimal coefficients x = {x:?}");
}
