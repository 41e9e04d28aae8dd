//! Rank, kernel and reduced row echelon form over GF(2).

use qdist::gf2::BitMatrix;

fn show(m: &BitMatrix) {
    for r in 0..m.rows() {
        let row: String = m.row(r).iter().map(|&b| char::from(b'0' + b)).collect();
        println!("  {row}");
    }
}

fn main() {
    let m = BitMatrix::from_rows(&[[1, 1, 0, 1], [0, 1, 1, 0], [1, 0, 1, 1]], 4).unwrap();
    println!("M (rank {}):", m.rank());
    show(&m);

    let (r, pivots) = m.rref();
    println!("rref, pivots {pivots:?}:");
    show(&r);

    let k = m.kernel_basis();
    println!("kernel basis (one vector per column):");
    show(&k);
    for i in 0..k.cols() {
        let image = m.matvec_mod2(&k.column(i)).unwrap();
        assert!(image.iter().all(|&b| b == 0));
    }

    let product = m.mul(&m.transpose()).unwrap();
    println!("M Mᵀ:");
    show(&product);
}
