//! State-vector annealing of small circulant codes: success probability versus anneal time.

use qdist::annealsim::{first_reaching, ground_space, sweep_anneal_times, AnnealSchedule, SimParams};
use qdist::codes::CodeSpec;
use qdist::distance::best_circulant;
use qdist::qubo::pipeline::{build_instances, BuildMode};
use qdist::qubo::{to_ising, AuxWidthMode};

fn main() {
    let grid = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    let schedule = AnnealSchedule::linear();
    for n in 3..=5 {
        let (code, d) = best_circulant(n).unwrap();
        let q = build_instances(&CodeSpec::Circulant(code), BuildMode::Circulant, AuxWidthMode::Tight)
            .unwrap()
            .remove(0);
        let ising = to_ising(&q);
        let ground = ground_space(&ising).unwrap();
        println!("n={n} d={d} spins={} ground energy {} dimension {}", ising.num_spins(), ground.energy, ground.dimension());
        let results = sweep_anneal_times(&ising, &schedule, &grid, &SimParams::new(1.0)).unwrap();
        for r in &results {
            println!("  t_a {:>6} P_s {:.4} drift {:.1e}", r.anneal_time, r.success_probability, r.max_norm_drift);
        }
        match first_reaching(&results, 0.9) {
            Some(t) => println!("  P_s >= 0.9 from t_a = {t}"),
            None => println!("  P_s stays below 0.9 on this grid"),
        }
    }
}
