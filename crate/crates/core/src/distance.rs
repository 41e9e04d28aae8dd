//! Brute-force minimum distance.
//!
//! Enumerates every coefficient vector `x ∈ F₂^{n+k}` in Gray-code order,
//! updating the codeword `Gx` by one column XOR per step. Codewords are packed
//! as `α | β << n` in a `u64`, so the weight is `popcount(α | β)`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codes::{palindromic_circulants, CirculantCode, StabilizerCode};

/// Largest `n + k` the oracle enumerates.
pub const ORACLE_MAX_PRIMARY: usize = 26;

const CHUNK_BITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("n + k = {primary} exceeds the brute-force limit of {limit}; use the QUBO pipeline (qdist solve) instead")]
    TooLarge { primary: usize, limit: usize },
    #[error("code has no nontrivial element to minimize over")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Coefficient vectors `x` of the minimizers, lexicographically sorted.
    pub coefficients: Vec<Vec<u8>>,
    /// Symplectic codewords `Gx mod 2`, aligned with `coefficients`.
    pub minimizers: Vec<Vec<u8>>,
    /// Number of vectors whose weight was evaluated.
    pub enumerated: u64,
}

impl DistanceReport {
    pub fn degeneracy(&self) -> usize {
        self.minimizers.len()
    }
}

struct Chunk {
    d: u32,
    xs: Vec<u64>,
    enumerated: u64,
}

fn scan(columns: &[u64], n: usize, skip_mask: u64, high: usize, prefix: u64) -> Chunk {
    let m = columns.len();
    let low = m - high;
    let alpha = (1u64 << n) - 1;
    let mut x = prefix << low;
    let mut c = 0u64;
    for (j, &col) in columns.iter().enumerate() {
        if (x >> j) & 1 == 1 {
            c ^= col;
        }
    }
    let mut best = Chunk {
        d: u32::MAX,
        xs: Vec::new(),
        enumerated: 0,
    };
    for s in 0..1u64 << low {
        if s > 0 {
            let b = s.trailing_zeros() as usize;
            x ^= 1 << b;
            c ^= columns[b];
        }
        if x & skip_mask == 0 {
            continue;
        }
        best.enumerated += 1;
        let w = ((c & alpha) | (c >> n)).count_ones();
        if w < best.d {
            best.d = w;
            best.xs.clear();
        }
        if w == best.d {
            best.xs.push(x);
        }
    }
    best
}

/// Exact minimum distance by exhaustive enumeration.
///
/// For `k = 0` every nonzero `x` counts. For `k ≥ 1` only `x` with a nonzero
/// logical block (the first `2k` coefficients) counts; the remaining
/// coefficients multiply stabilizer generators.
pub fn min_distance_bruteforce(code: &StabilizerCode) -> Result<DistanceReport, DistanceError> {
    let (n, k) = (code.n(), code.k());
    let m = n + k;
    if m > ORACLE_MAX_PRIMARY {
        return Err(DistanceError::TooLarge {
            primary: m,
            limit: ORACLE_MAX_PRIMARY,
        });
    }
    let g = code.normalizer();
    let columns: Vec<u64> = (0..m)
        .map(|j| {
            g.column(j)
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | (b as u64) << i)
        })
        .collect();
    let skip_mask = if k == 0 { (1u64 << m) - 1 } else { (1u64 << (2 * k)) - 1 };
    let high = m.saturating_sub(14).min(CHUNK_BITS);
    let chunks: Vec<Chunk> = (0..1u64 << high)
        .into_par_iter()
        .map(|p| scan(&columns, n, skip_mask, high, p))
        .collect();
    let d = chunks.iter().map(|c| c.d).min().unwrap_or(u32::MAX);
    if d == u32::MAX {
        return Err(DistanceError::Empty);
    }
    let mut xs: Vec<Vec<u8>> = chunks
        .iter()
        .filter(|c| c.d == d)
        .flat_map(|c| c.xs.iter())
        .map(|&x| (0..m).map(|j| ((x >> j) & 1) as u8).collect())
        .collect();
    xs.sort();
    let minimizers = xs
        .iter()
        .map(|x| code.element(x).expect("sized by construction"))
        .collect();
    Ok(DistanceReport {
        n,
        k,
        d: d as usize,
        coefficients: xs,
        minimizers,
        enumerated: chunks.iter().map(|c| c.enumerated).sum(),
    })
}

/// Number of minimum-weight nontrivial elements.
pub fn degeneracy_count(code: &StabilizerCode) -> Result<usize, DistanceError> {
    Ok(min_distance_bruteforce(code)?.degeneracy())
}

/// Zero-diagonal palindromic circulant of length `n` with the largest
/// distance; ties go to the lexicographically first row. Returns `None` when
/// `n` is beyond the oracle limit or zero.
pub fn best_circulant(n: usize) -> Option<(CirculantCode, usize)> {
    if n == 0 || n > ORACLE_MAX_PRIMARY {
        return None;
    }
    let mut best: Option<(CirculantCode, usize)> = None;
    let mut candidates = palindromic_circulants(n, true);
    candidates.sort_by(|a, b| a.first_row().cmp(b.first_row()));
    for c in candidates {
        let d = min_distance_bruteforce(&c.to_graph().to_stabilizer()).ok()?.d;
        if best.as_ref().is_none_or(|(_, bd)| d > *bd) {
            best = Some((c, d));
        }
    }
    best
}
