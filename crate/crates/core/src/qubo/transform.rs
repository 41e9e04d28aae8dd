use std::collections::BTreeMap;

use super::layout::Role;
use super::{QuboError, QuboProblem};

/// Substitutes fixed values for some variables.
///
/// The free variables keep their relative order and are renumbered from 0.
/// For every completion `z` of the free variables, the clamped energy equals
/// the original energy at `z` merged with `assignments`.
pub fn clamp(q: &QuboProblem, assignments: &[(usize, u8)]) -> Result<QuboProblem, QuboError> {
    let n = q.num_vars();
    let mut value: Vec<Option<u8>> = vec![None; n];
    for &(i, v) in assignments {
        if i >= n {
            return Err(QuboError::IndexOutOfRange { index: i, num_vars: n });
        }
        let v = u8::from(v != 0);
        match value[i] {
            Some(prev) if prev != v => return Err(QuboError::ConflictingAssignment { index: i }),
            _ => value[i] = Some(v),
        }
    }
    let mut new_index = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if value[i].is_none() {
            new_index[i] = next;
            next += 1;
        }
    }
    let mut offset = q.offset();
    let mut coeffs: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for (&(i, j), &c) in q.coeffs() {
        match (value[i], value[j]) {
            (Some(a), Some(b)) => offset += c * (a & b) as i64,
            (Some(a), None) => {
                if a == 1 {
                    *coeffs.entry((new_index[j], new_index[j])).or_insert(0) += c;
                }
            }
            (None, Some(b)) => {
                if b == 1 {
                    *coeffs.entry((new_index[i], new_index[i])).or_insert(0) += c;
                }
            }
            (None, None) => *coeffs.entry((new_index[i], new_index[j])).or_insert(0) += c,
        }
    }
    let dedup: Vec<(usize, u8)> = value
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .collect();
    let layout = q.layout().clamped(&dedup);
    QuboProblem::new(next, coeffs, offset, layout)
}

/// Splits the nonzero-prefix constraint into `prefix_len` clamped instances.
///
/// Instance `i` fixes `x_0 = … = x_{i−1} = 0` and `x_i = 1`. The minimum over
/// the instances equals the minimum over `x` with a nonzero prefix.
pub fn split_constraints(q: &QuboProblem, prefix_len: usize) -> Result<Vec<QuboProblem>, QuboError> {
    let layout = q.layout();
    let mut idx = Vec::with_capacity(prefix_len);
    for j in 0..prefix_len {
        match layout.index_of(Role::X(j)) {
            Some(i) => idx.push(i),
            None => {
                return Err(QuboError::PrefixTooLong {
                    prefix: prefix_len,
                    available: layout.x_indices().len(),
                })
            }
        }
    }
    (0..prefix_len)
        .map(|i| {
            let assignment: Vec<(usize, u8)> = idx[..i]
                .iter()
                .map(|&v| (v, 0))
                .chain(std::iter::once((idx[i], 1)))
                .collect();
            clamp(q, &assignment)
        })
        .collect()
}
