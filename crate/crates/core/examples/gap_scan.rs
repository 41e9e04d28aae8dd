//! Spectral gaps along the anneal and the resulting adiabatic time estimate.

use qdist::annealsim::{adiabatic_time_estimate, gap_scan, AnnealSchedule};
use qdist::codes::CodeSpec;
use qdist::distance::best_circulant;
use qdist::qubo::pipeline::{build_instances, BuildMode};
use qdist::qubo::{to_ising, AuxWidthMode, IsingProblem};

fn main() {
    let schedule = AnnealSchedule::linear();
    let single = IsingProblem {
        h: vec![1.0],
        j: Default::default(),
        offset: 0.0,
    };
    let s = gap_scan(&single, &schedule, 0.01).unwrap();
    println!("single spin: g_min {:.6} at gamma {:.4}", s.g_min, s.gamma_star);

    for n in 3..=5 {
        let (code, _) = best_circulant(n).unwrap();
        let q = build_instances(&CodeSpec::Circulant(code), BuildMode::Circulant, AuxWidthMode::Tight)
            .unwrap()
            .remove(0);
        let ising = to_ising(&q);
        let scan = gap_scan(&ising, &schedule, 0.02).unwrap();
        println!(
            "n={n}: E1-E0 min {:.4} at {:.3}; gap above the {}-fold ground space {:.4} at {:.3}",
            scan.g_min, scan.gamma_star, scan.ground_dimension, scan.g_min_degenerate, scan.gamma_star_degenerate
        );
        match adiabatic_time_estimate(&ising, &schedule, 0.02) {
            Ok(e) => println!("       matrix element {:.4}, estimated t_a {:.1}", e.matrix_element, e.anneal_time),
            Err(e) => println!("       no estimate: {e}"),
        }
    }
}
