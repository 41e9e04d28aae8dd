use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::{Compiled, SolveResult, SolverError};
use crate::qubo::QuboProblem;

/// Largest problem [`solve_exact`] will enumerate.
pub const EXACT_MAX_VARS: usize = 30;

/// Above this size [`solve_exact_structured`] branches on the primary variables.
pub const DIRECT_MAX_VARS: usize = 24;

/// Largest residual component [`solve_exact_branching`] will enumerate.
const COMPONENT_MAX_VARS: usize = 24;

/// Number of leading bits fixed per parallel chunk.
const CHUNK_BITS: usize = 6;

#[inline]
fn gray(s: u64) -> u64 {
    s ^ (s >> 1)
}

/// Gray-code walk over the low `low` variables with the rest fixed by `z`.
/// Returns the minimum energy and the Gray index attaining it first.
fn walk(c: &Compiled, z: &mut [u8], low: usize) -> (i64, u64) {
    let mut fields = c.fields(z);
    let mut e = c.energy(z);
    let (mut best, mut best_s) = (e, 0u64);
    for s in 1..1u64 << low {
        let b = s.trailing_zeros() as usize;
        e += c.delta(&fields, z, b);
        c.flip(&mut fields, z, b);
        if e < best {
            best = e;
            best_s = s;
        }
    }
    (best, best_s)
}

/// Global minimum by exhaustive Gray-code enumeration.
///
/// The leading variables are split into chunks that run in parallel; ties
/// resolve to the lowest chunk and then to the first state in Gray order.
pub fn solve_exact(q: &QuboProblem) -> Result<SolveResult, SolverError> {
    let n = q.num_vars();
    if n > EXACT_MAX_VARS {
        return Err(SolverError::TooLarge {
            vars: n,
            limit: EXACT_MAX_VARS,
        });
    }
    let start = Instant::now();
    let c = Compiled::new(q);
    let high = n.saturating_sub(16).min(CHUNK_BITS);
    let low = n - high;
    let (energy, chunk, s) = (0..1u64 << high)
        .into_par_iter()
        .map(|chunk| {
            let mut z = vec![0u8; n];
            for b in 0..high {
                z[low + b] = ((chunk >> b) & 1) as u8;
            }
            let (e, s) = walk(&c, &mut z, low);
            (e, chunk, s)
        })
        .min()
        .expect("at least one chunk");
    let mut z = vec![0u8; n];
    let g = gray(s);
    for b in 0..low {
        z[b] = ((g >> b) & 1) as u8;
    }
    for b in 0..high {
        z[low + b] = ((chunk >> b) & 1) as u8;
    }
    let mut r = SolveResult::new("exact", q, z, energy);
    r.evaluations = 1u64 << n;
    r.params = json!({ "max_vars": EXACT_MAX_VARS });
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Connected components of the interaction graph restricted to `free`.
fn components(c: &Compiled, free: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; c.n];
    let mut out = Vec::new();
    for s in 0..c.n {
        if !free[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &(w, _) in c.neighbors(v) {
                if free[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Minimizes one residual component given the fields induced by the branch.
/// Returns the minimal energy contribution and the Gray index attaining it.
fn solve_component(comp: &[usize], local: &[Vec<(usize, i64)>], fields: &[i64]) -> (i64, u64) {
    let m = comp.len();
    let mut f: Vec<i64> = comp.iter().map(|&v| fields[v]).collect();
    let mut y = vec![0u8; m];
    let (mut e, mut best, mut best_s) = (0i64, 0i64, 0u64);
    for s in 1..1u64 << m {
        let b = s.trailing_zeros() as usize;
        e += if y[b] == 0 { f[b] } else { -f[b] };
        y[b] ^= 1;
        let sign = if y[b] == 1 { 1 } else { -1 };
        for &(j, w) in &local[b] {
            f[j] += sign * w;
        }
        if e < best {
            best = e;
            best_s = s;
        }
    }
    (best, best_s)
}

/// Exact minimum by enumerating `branch` and solving the remaining variables
/// per connected component.
///
/// Once the branch variables are fixed the residual problem splits into
/// independent components (for the weight QUBOs, the auxiliary bits of one
/// row), each of which is enumerated exhaustively. The result is the global
/// minimum whenever every component fits the component limit.
pub fn solve_exact_branching(q: &QuboProblem, branch: &[usize]) -> Result<SolveResult, SolverError> {
    let n = q.num_vars();
    let mut is_branch = vec![false; n];
    for &b in branch {
        if b >= n {
            return Err(SolverError::BadBranchVariable(b));
        }
        is_branch[b] = true;
    }
    let mut branch: Vec<usize> = (0..n).filter(|&i| is_branch[i]).collect();
    branch.dedup();
    if branch.len() > EXACT_MAX_VARS {
        return Err(SolverError::TooLarge {
            vars: branch.len(),
            limit: EXACT_MAX_VARS,
        });
    }
    let start = Instant::now();
    let c = Compiled::new(q);
    let free: Vec<bool> = is_branch.iter().map(|b| !b).collect();
    let comps = components(&c, &free);
    if let Some(big) = comps.iter().find(|k| k.len() > COMPONENT_MAX_VARS) {
        return Err(SolverError::ComponentTooLarge {
            size: big.len(),
            limit: COMPONENT_MAX_VARS,
        });
    }
    let locals: Vec<Vec<Vec<(usize, i64)>>> = comps
        .iter()
        .map(|comp| {
            comp.iter()
                .map(|&v| {
                    c.neighbors(v)
                        .iter()
                        .filter_map(|&(w, wt)| comp.binary_search(&w).ok().map(|p| (p, wt)))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut z = vec![0u8; n];
    let mut fields = c.fields(&z);
    let mut e_branch = c.offset;
    let mut evaluations = 0u64;
    let residual = |fields: &[i64], evaluations: &mut u64| -> i64 {
        comps
            .iter()
            .zip(&locals)
            .map(|(comp, local)| {
                *evaluations += 1u64 << comp.len();
                solve_component(comp, local, fields).0
            })
            .sum()
    };
    let mut best = e_branch + residual(&fields, &mut evaluations);
    let mut best_s = 0u64;
    for s in 1..1u64 << branch.len() {
        let v = branch[s.trailing_zeros() as usize];
        e_branch += c.delta(&fields, &z, v);
        c.flip(&mut fields, &mut z, v);
        let e = e_branch + residual(&fields, &mut evaluations);
        if e < best {
            best = e;
            best_s = s;
        }
    }

    let mut z = vec![0u8; n];
    let g = gray(best_s);
    for (b, &v) in branch.iter().enumerate() {
        z[v] = ((g >> b) & 1) as u8;
    }
    let fields = c.fields(&z);
    for (comp, local) in comps.iter().zip(&locals) {
        let (_, s) = solve_component(comp, local, &fields);
        let g = gray(s);
        for (p, &v) in comp.iter().enumerate() {
            z[v] = ((g >> p) & 1) as u8;
        }
    }
    let mut r = SolveResult::new("exact-branching", q, z, best);
    r.evaluations = evaluations;
    r.params = json!({
        "branch_vars": branch.len(),
        "components": comps.len(),
        "largest_component": comps.iter().map(Vec::len).max().unwrap_or(0),
    });
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Exact minimum using the variable layout when it helps.
///
/// Small or anonymous problems are enumerated directly; larger structured
/// problems branch on their `x` and penalty bits via [`solve_exact_branching`].
pub fn solve_exact_structured(q: &QuboProblem) -> Result<SolveResult, SolverError> {
    if q.num_vars() <= DIRECT_MAX_VARS || q.layout().is_anonymous() {
        solve_exact(q)
    } else {
        solve_exact_branching(q, &q.layout().primary_indices())
    }
}
