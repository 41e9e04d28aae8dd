//! Exhaustive minimum distance and the optimal circulant codes for small n.

use qdist::codes::{five_qubit_code, to_pauli_string};
use qdist::distance::{best_circulant, min_distance_bruteforce};

fn main() {
    let report = min_distance_bruteforce(&five_qubit_code()).unwrap();
    println!(
        "[[5,1]]: d = {} with {} minimum-weight logical operators ({} coefficient vectors enumerated)",
        report.d,
        report.degeneracy(),
        report.enumerated
    );
    for c in report.minimizers.iter().take(6) {
        println!("  {}", to_pauli_string(c));
    }

    println!(" n  d  first row");
    for n in 3..=12 {
        let (code, d) = best_circulant(n).unwrap();
        let row: String = code.first_row().iter().map(|&b| char::from(b'0' + b)).collect();
        println!("{n:>2} {d:>2}  {row}");
    }
}
