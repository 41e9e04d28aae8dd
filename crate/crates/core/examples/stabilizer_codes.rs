//! Loading codes and inspecting their normalizer matrices.

use qdist::codes::{five_qubit_code, parse_code, pentagon, to_pauli_string, CodeSpec};

fn main() {
    let code = five_qubit_code();
    println!("[[{}, {}]] generators: {:?}", code.n(), code.k(), code.generators());

    // Columns of G are logical operators (first 2k) followed by stabilizers.
    let g = code.normalizer();
    for j in 0..g.cols() {
        let mut x = vec![0u8; g.cols()];
        x[j] = 1;
        let op = code.element(&x).unwrap();
        let tag = if j < 2 * code.k() { "logical" } else { "stabilizer" };
        println!("  column {j}: {} ({tag}, weight {})", to_pauli_string(&op), code.weight_of_element(&x).unwrap());
    }

    let ring = pentagon();
    let graph = ring.to_graph().to_stabilizer();
    println!("circulant row {:?} -> [[{}, {}]]", ring.first_row(), graph.n(), graph.k());

    let text = "graph 4\n0111\n1000\n1000\n1000\n";
    match parse_code(text).unwrap() {
        CodeSpec::Graph(g) => println!("star graph on {} vertices, generators {:?}", g.n(), g.to_stabilizer().generators()),
        other => unreachable!("{other:?}"),
    }

    let err = parse_code("XI\nZI\n").unwrap_err();
    println!("rejected: {err}");
}
