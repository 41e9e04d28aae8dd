//! Dense linear algebra over GF(2) with bit-packed rows.
//!
//! Rows are stored as runs of `u64` words. Every row-level operation
//! (XOR, dot products, elimination) works word-at-a-time. Binary vectors at
//! the public boundary are plain `&[u8]` slices holding `0`/`1`.
//!
//! Pivoting is always "first nonzero row at or below the current pivot row,
//! scanning columns left to right", so every result is deterministic.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

/// Errors raised by GF(2) operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry ({row}, {col}) is {value}, expected 0 or 1")]
    NonBinary { row: usize, col: usize, value: u8 },
}

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Packs a 0/1 slice into words. Any nonzero entry is treated as 1.
pub(crate) fn pack(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; words_for(bits.len())];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            words[i / WORD] |= 1 << (i % WORD);
        }
    }
    words
}

pub(crate) fn unpack(words: &[u64], len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| ((words[i / WORD] >> (i % WORD)) & 1) as u8)
        .collect()
}

/// A dense binary matrix with row-major, bit-packed storage.
///
/// Unused tail bits of each row are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from 0/1 rows. `cols` disambiguates the empty case.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R], cols: usize) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Gf2Error::RaggedRows {
                    row: r,
                    expected: cols,
                    found: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(r, c, true),
                    value => return Err(Gf2Error::NonBinary { row: r, col: c, value }),
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given 0/1 vectors, each of length `rows`.
    pub fn from_columns<C: AsRef<[u8]>>(columns: &[C], rows: usize) -> Result<Self, Gf2Error> {
        Ok(Self::from_rows(columns, rows)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of range");
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of range");
        let w = &mut self.data[r * self.stride + c / WORD];
        if value {
            *w |= 1 << (c % WORD);
        } else {
            *w &= !(1 << (c % WORD));
        }
    }

    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// Row `r` as a 0/1 vector.
    pub fn row(&self, r: usize) -> Vec<u8> {
        unpack(self.row_words(r), self.cols)
    }

    /// Column `c` as a 0/1 vector.
    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c) as u8).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `row[dst] ^= row[src]`.
    fn xor_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..dst * s + s])
        };
        for (d, w) in b.iter_mut().zip(a) {
            *d ^= *w;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Column indices of the set bits in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r)
            .iter()
            .enumerate()
            .flat_map(|(wi, &word)| {
                let mut w = word;
                std::iter::from_fn(move || {
                    if w == 0 {
                        return None;
                    }
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + bit)
                })
            })
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_ones(r) {
                let src = other.row_words(k);
                let dst = &mut out.data[r * out.stride..(r + 1) * out.stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= *s;
                }
            }
        }
        Ok(out)
    }

    /// `(M·x) mod 2`.
    pub fn matvec_mod2(&self, x: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        if x.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        let packed = pack(x);
        Ok((0..self.rows)
            .map(|r| {
                let ones: u32 = self
                    .row_words(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect())
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                out.set(r, c, true);
            }
            for c in other.row_ones(r) {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    /// Sub-matrix of the rows in `range`.
    pub fn row_block(&self, range: std::ops::Range<usize>) -> BitMatrix {
        assert!(range.end <= self.rows);
        BitMatrix {
            rows: range.len(),
            cols: self.cols,
            stride: self.stride,
            data: self.data[range.start * self.stride..range.end * self.stride].to_vec(),
        }
    }

    /// Sub-matrix of the columns in `range`.
    pub fn column_block(&self, range: std::ops::Range<usize>) -> BitMatrix {
        assert!(range.end <= self.cols);
        BitMatrix::from_fn(self.rows, range.len(), |r, c| self.get(r, range.start + c))
    }

    /// Reduced row-echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(found, pivot_row);
            for r in 0..m.rows {
                if r != pivot_row && m.get(r, col) {
                    m.xor_row(pivot_row, r);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `ker M`, returned as the columns of a `cols × (cols − rank)` matrix.
    pub fn kernel_basis(&self) -> BitMatrix {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = BitMatrix::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            basis.set(f, j, true);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, f) {
                    basis.set(p, j, true);
                }
            }
        }
        basis
    }

    /// True iff `Mx = c (mod 2)` has a solution.
    pub fn in_image(&self, c: &[u8]) -> Result<bool, Gf2Error> {
        if c.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows,
                found: c.len(),
            });
        }
        let column = BitMatrix::from_columns(&[c], self.rows)?;
        let augmented = self.hstack(&column)?;
        let (_, pivots) = augmented.rref();
        Ok(pivots.last() != Some(&self.cols))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix({}x{})", self.rows, self.cols)?;
        write!(f, "{self}")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> BitMatrix {
        BitMatrix::from_fn(rows, cols, |_, _| rng.gen_bool(0.5))
    }

    /// Unpacked reference elimination, written independently of `rref`.
    fn naive_rank(m: &BitMatrix) -> usize {
        let mut a: Vec<Vec<u8>> = (0..m.rows()).map(|r| m.row(r)).collect();
        let mut rank = 0;
        for col in 0..m.cols() {
            if let Some(p) = (rank..a.len()).find(|&r| a[r][col] == 1) {
                a.swap(rank, p);
                for r in 0..a.len() {
                    if r != rank && a[r][col] == 1 {
                        for c in 0..m.cols() {
                            a[r][c] ^= a[rank][c];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn bits_of(v: u32, len: usize) -> Vec<u8> {
        (0..len).map(|i| ((v >> i) & 1) as u8).collect()
    }

    #[test]
    fn matvec_small_cases() {
        let id = BitMatrix::identity(2);
        assert_eq!(id.matvec_mod2(&[1, 0]).unwrap(), vec![1, 0]);
        let m = BitMatrix::from_rows(&[[1, 1], [0, 1]], 2).unwrap();
        assert_eq!(m.matvec_mod2(&[1, 1]).unwrap(), vec![0, 1]);
    }

    #[test]
    fn matvec_matches_entrywise_dot_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 6, 4);
            let x: Vec<u8> = (0..4).map(|_| rng.gen_range(0..2)).collect();
            let expected: Vec<u8> = (0..6)
                .map(|r| (0..4).map(|c| m.get(r, c) as u8 * x[c]).sum::<u8>() % 2)
                .collect();
            assert_eq!(m.matvec_mod2(&x).unwrap(), expected);
        }
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let m = BitMatrix::identity(3);
        assert_eq!(
            m.matvec_mod2(&[1, 0]),
            Err(Gf2Error::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        let dup = BitMatrix::from_rows(&[[1, 1], [1, 1]], 2).unwrap();
        assert_eq!(dup.rank(), 1);
        assert_eq!(BitMatrix::zeros(0, 4).rank(), 0);
    }

    #[test]
    fn rank_matches_naive_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let m = random_matrix(&mut rng, 5, 8);
            assert_eq!(m.rank(), naive_rank(&m));
        }
    }

    #[test]
    fn rref_small_cases() {
        let (r, p) = BitMatrix::identity(2).rref();
        assert_eq!(r, BitMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
        let (r, p) = BitMatrix::from_rows(&[[1, 1], [1, 1]], 2).unwrap().rref();
        assert_eq!(r, BitMatrix::from_rows(&[[1, 1], [0, 0]], 2).unwrap());
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_small_cases() {
        let m = BitMatrix::from_rows(&[[1, 1]], 2).unwrap();
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![1, 1]);
        assert_eq!(BitMatrix::identity(2).kernel_basis().cols(), 0);
    }

    #[test]
    fn kernel_exhaustive_against_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let m = random_matrix(&mut rng, 4, 7);
            let basis = m.kernel_basis();
            assert_eq!(basis.cols(), 7 - m.rank());
            let kernel_size = (0..1u32 << 7)
                .filter(|&v| m.matvec_mod2(&bits_of(v, 7)).unwrap().iter().all(|&b| b == 0))
                .count();
            assert_eq!(kernel_size, 1 << basis.cols());
            for j in 0..basis.cols() {
                let b = basis.column(j);
                assert!(m.matvec_mod2(&b).unwrap().iter().all(|&v| v == 0));
            }
            assert_eq!(basis.rank(), basis.cols());
        }
    }

    #[test]
    fn in_image_small_cases() {
        let m = BitMatrix::from_rows(&[[1, 0], [0, 1], [0, 0]], 2).unwrap();
        assert!(m.in_image(&[0, 0, 0]).unwrap());
        assert!(!m.in_image(&[0, 0, 1]).unwrap());
        assert!(m.in_image(&[1, 1]).is_err());
    }

    #[test]
    fn in_image_matches_preimage_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let m = random_matrix(&mut rng, 6, 3);
            let c: Vec<u8> = (0..6).map(|_| rng.gen_range(0..2)).collect();
            let brute = (0..8u32).any(|v| m.matvec_mod2(&bits_of(v, 3)).unwrap() == c);
            assert_eq!(m.in_image(&c).unwrap(), brute);
        }
    }

    #[test]
    fn rref_preserves_row_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..30 {
            let m = random_matrix(&mut rng, 5, 9);
            let (r, _) = m.rref();
            let mt = m.transpose();
            let rt = r.transpose();
            for i in 0..5 {
                assert!(rt.in_image(&m.row(i)).unwrap());
                assert!(mt.in_image(&r.row(i)).unwrap());
            }
        }
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = random_matrix(&mut rng, 40, 150);
        assert_eq!(m.rank(), naive_rank(&m));
        let k = m.kernel_basis();
        assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn from_rows_rejects_bad_input() {
        assert!(matches!(
            BitMatrix::from_rows(&[vec![1, 0], vec![1]], 2),
            Err(Gf2Error::RaggedRows { row: 1, .. })
        ));
        assert!(matches!(
            BitMatrix::from_rows(&[[2, 0]], 2),
            Err(Gf2Error::NonBinary { value: 2, .. })
        ));
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c)
                .prop_map(move |bits| BitMatrix::from_fn(r, c, |i, j| bits[i * c + j]))
        })
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(m in arb_matrix(10, 70)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
        }

        #[test]
        fn kernel_columns_are_independent_solutions(m in arb_matrix(8, 12)) {
            let basis = m.kernel_basis();
            prop_assert_eq!(basis.cols(), m.cols() - m.rank());
            prop_assert!(m.mul(&basis).unwrap().is_zero());
            prop_assert_eq!(basis.rank(), basis.cols());
        }

        #[test]
        fn image_contains_every_product(m in arb_matrix(8, 12)) {
            for v in 0..(1u32 << m.cols()) {
                let x = bits_of(v, m.cols());
                prop_assert!(m.in_image(&m.matvec_mod2(&x).unwrap()).unwrap());
            }
        }
    }
}
