//! Distance QUBOs for every construction mode, with variable counts.

use qdist::codes::{five_qubit_code, pentagon, CodeSpec};
use qdist::qubo::io::to_text;
use qdist::qubo::pipeline::{build_instances, BuildMode};
use qdist::qubo::AuxWidthMode;

fn main() {
    let codes = [
        ("five_qubit", CodeSpec::Stabilizer(five_qubit_code())),
        ("pentagon", CodeSpec::Circulant(pentagon())),
    ];
    for (name, spec) in &codes {
        for mode in BuildMode::ALL {
            for widths in [AuxWidthMode::Tight, AuxWidthMode::Uniform] {
                match build_instances(spec, mode, widths) {
                    Ok(qs) => {
                        let vars: Vec<usize> = qs.iter().map(|q| q.num_vars()).collect();
                        let l = qs[0].layout();
                        println!(
                            "{name:<10} {mode:<9} {widths:?}: {} instance(s), vars {vars:?}, formula {}",
                            qs.len(),
                            l.formula_count()
                        );
                    }
                    Err(e) => println!("{name:<10} {mode:<9} {widths:?}: {e}"),
                }
            }
        }
    }

    let q = build_instances(&codes[1].1, BuildMode::Circulant, AuxWidthMode::Tight).unwrap().remove(0);
    println!("\n{}", to_text(&q));
}
