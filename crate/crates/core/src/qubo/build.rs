//! Builders for the weight QUBO, the self-dual graph-code QUBO and the
//! constraint penalties.
//!
//! Parity is linearized with integer auxiliaries: `m mod 2 = min_t (m − 2t)²`.
//! Combined with `α² + β² − αβ = ½ (P(a) + P(b) + P(a+b))` this gives the
//! weight cost
//!
//! ```text
//! E = ½ Σ_i (a_i − 2t_i)² + (b_i − 2u_i)² + (a_i + b_i − 2v_i)²
//! ```
//!
//! with `a = A x`, `b = B x` over the integers. The builders expand `2E`
//! symbolically and halve the result, which is always integral.

use serde::{Deserialize, Serialize};

use super::expr::{LinearForm, QuadBuilder};
use super::layout::{AuxWidths, Role, VariableLayout};
use super::{QuboError, QuboProblem};
use crate::codes::{GraphCode, StabilizerCode};
use crate::gf2::BitMatrix;

/// How auxiliary bit widths are chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxWidthMode {
    /// Per-block widths from the maximal row sums of `A`, `B` and `A + B`.
    #[default]
    Tight,
    /// Uniform width `s` for `t`, `u` and `2s` for `v`.
    Uniform,
}

/// Integer values of the parity auxiliaries, one per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxValues {
    pub t: Vec<u64>,
    pub u: Vec<u64>,
    pub v: Vec<u64>,
}

impl AuxValues {
    pub fn zeros(n: usize) -> Self {
        Self {
            t: vec![0; n],
            u: vec![0; n],
            v: vec![0; n],
        }
    }
}

/// Bits needed to represent `m`.
fn bit_length(m: usize) -> usize {
    (usize::BITS - m.leading_zeros()) as usize
}

/// Smallest `r` with `2^r ≥ m`.
fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        bit_length(m - 1)
    }
}

fn max_row_weight(m: &BitMatrix) -> usize {
    (0..m.rows()).map(|r| m.row_weight(r)).max().unwrap_or(0)
}

pub fn aux_widths(a: &BitMatrix, b: &BitMatrix, mode: AuxWidthMode) -> AuxWidths {
    let max_a = max_row_weight(a);
    let max_b = max_row_weight(b);
    let max_ab = (0..a.rows())
        .map(|r| a.row_weight(r) + b.row_weight(r))
        .max()
        .unwrap_or(0);
    match mode {
        AuxWidthMode::Tight => AuxWidths {
            t: bit_length(max_a / 2),
            u: bit_length(max_b / 2),
            v: bit_length(max_ab / 2),
        },
        AuxWidthMode::Uniform => {
            let s = bit_length(max_a.max(max_b) / 2).max(1);
            AuxWidths { t: s, u: s, v: 2 * s }
        }
    }
}

/// Penalty bits for the logical-block constraint: `max(1, ⌈log₂ 2k⌉)`.
pub fn penalty_bits_logical(k: usize) -> usize {
    ceil_log2(2 * k).max(1)
}

/// Penalty bits for the `x ≠ 0` constraint: `⌈log₂ n⌉`.
pub fn penalty_bits_nonzero(n: usize) -> usize {
    ceil_log2(n)
}

fn row_form(m: &BitMatrix, row: usize) -> LinearForm {
    let mut f = LinearForm::new();
    for j in m.row_ones(row) {
        f.add_term(j, 1);
    }
    f
}

/// `Σ_l 2^l z_{base + l·n + row}`, the integer encoded by one auxiliary block row.
fn aux_form(base: usize, n: usize, row: usize, width: usize, scale: i64) -> LinearForm {
    let mut f = LinearForm::new();
    for bit in 0..width {
        f.add_term(base + bit * n + row, scale << bit);
    }
    f
}

fn sum_forms(a: &LinearForm, b: &LinearForm) -> LinearForm {
    let mut out = a.clone();
    for (v, c) in b.terms() {
        out.add_term(v, c);
    }
    out.add_constant(b.constant_term());
    out
}

/// Weight QUBO over `(x, t, u, v)` for `Gᵀ = (A | B)`, with `A`, `B` of size `n × (n+k)`.
pub fn build_weight_qubo(a: &BitMatrix, b: &BitMatrix, k: usize, mode: AuxWidthMode) -> QuboProblem {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()), "A and B must have equal shapes");
    let n = a.rows();
    let primary = a.cols();
    assert_eq!(primary, n + k, "blocks must have n + k columns");
    let widths = aux_widths(a, b, mode);
    let layout = VariableLayout::weight(n, k, widths);
    let t_base = primary;
    let u_base = t_base + widths.t * n;
    let v_base = u_base + widths.u * n;

    let mut twice = QuadBuilder::new();
    for i in 0..n {
        let ai = row_form(a, i);
        let bi = row_form(b, i);
        let abi = sum_forms(&ai, &bi);
        let t = aux_form(t_base, n, i, widths.t, -2);
        let u = aux_form(u_base, n, i, widths.u, -2);
        let v = aux_form(v_base, n, i, widths.v, -2);
        twice.add_square(&sum_forms(&ai, &t), 1);
        twice.add_square(&sum_forms(&bi, &u), 1);
        twice.add_square(&sum_forms(&abi, &v), 1);
    }
    let (coeffs, offset) = twice
        .divide_exact(2)
        .expect("a² + b² + (a+b)² expands to even coefficients")
        .into_parts();
    let num_vars = layout.num_vars();
    QuboProblem::new(num_vars, coeffs, offset, layout).expect("indices in range")
}

/// [`build_weight_qubo`] on the normalizer of a validated code.
pub fn weight_qubo_for(code: &StabilizerCode, mode: AuxWidthMode) -> QuboProblem {
    build_weight_qubo(&code.x_block(), &code.z_block(), code.k(), mode)
}

/// Optimal auxiliaries `t = ⌊a/2⌋`, `u = ⌊b/2⌋`, `v = ⌊(a+b)/2⌋` for a given `x`.
pub fn closed_form_aux(a: &BitMatrix, b: &BitMatrix, x: &[u8]) -> AuxValues {
    let n = a.rows();
    let int_dot = |m: &BitMatrix, r: usize| -> u64 { m.row_ones(r).map(|j| x[j] as u64).sum() };
    let mut aux = AuxValues::zeros(n);
    for i in 0..n {
        let (ai, bi) = (int_dot(a, i), int_dot(b, i));
        aux.t[i] = ai / 2;
        aux.u[i] = bi / 2;
        aux.v[i] = (ai + bi) / 2;
    }
    aux
}

/// QUBO over `(x, u)` for a graph code `Gᵀ = (I | B)`:
///
/// ```text
/// E = Σ_i x_i + (b_i − 2u_i)(b_i − 2u_i − x_i),   b = B x
/// ```
pub fn build_selfdual_qubo(g: &GraphCode, mode: AuxWidthMode) -> QuboProblem {
    build_selfdual_from_adjacency(g.adjacency(), mode).expect("graph codes are symmetric")
}

/// [`build_selfdual_qubo`] on a raw adjacency matrix, rejecting asymmetric input.
pub fn build_selfdual_from_adjacency(
    adjacency: &BitMatrix,
    mode: AuxWidthMode,
) -> Result<QuboProblem, QuboError> {
    let n = adjacency.rows();
    if adjacency.cols() != n || *adjacency != adjacency.transpose() {
        return Err(QuboError::AsymmetricAdjacency);
    }
    let tight = bit_length(max_row_weight(adjacency) / 2);
    let u_width = match mode {
        AuxWidthMode::Tight => tight,
        AuxWidthMode::Uniform => tight.max(1),
    };
    let widths = AuxWidths {
        t: 0,
        u: u_width,
        v: 0,
    };
    let layout = VariableLayout::weight(n, 0, widths);
    let u_base = n;
    let mut e = QuadBuilder::new();
    for i in 0..n {
        let mut xi = LinearForm::new();
        xi.add_term(i, 1);
        let y = sum_forms(&row_form(adjacency, i), &aux_form(u_base, n, i, u_width, -2));
        let mut y_minus_x = y.clone();
        y_minus_x.add_term(i, -1);
        e.add_linear(&xi, 1);
        e.add_product(&y, &y_minus_x, 1);
    }
    let (coeffs, offset) = e.into_parts();
    QuboProblem::new(layout.num_vars(), coeffs, offset, layout)
}

/// Appends `λ (Σ_{j<count} x_j − 1 − Σ_l 2^l e_l)²` with `r` fresh `e` bits.
fn add_counter_penalty(
    q: &QuboProblem,
    count: usize,
    lambda: i64,
    r: usize,
) -> Result<QuboProblem, QuboError> {
    let layout = q.layout();
    if !layout.fixed().is_empty() || layout.penalty_bits() > 0 {
        return Err(QuboError::AlreadyClamped);
    }
    let mut form = LinearForm::constant(-1);
    for j in 0..count {
        let idx = layout.index_of(Role::X(j)).ok_or(QuboError::PrefixTooLong {
            prefix: count,
            available: j,
        })?;
        form.add_term(idx, 1);
    }
    let e_base = q.num_vars();
    for l in 0..r {
        form.add_term(e_base + l, -(1i64 << l));
    }
    let mut penalty = QuadBuilder::new();
    penalty.add_square(&form, lambda);
    let (pc, po) = penalty.into_parts();
    let new_layout = layout.clone().with_penalty_bits(r);
    let entries = q
        .coeffs()
        .iter()
        .map(|(&ij, &v)| (ij, v))
        .chain(pc);
    QuboProblem::new(new_layout.num_vars(), entries, q.offset() + po, new_layout)
}

/// Penalizes `x` whose first `2k` (logical) coefficients all vanish; `λ = n + 1`.
pub fn add_logical_penalty(q: &QuboProblem, n: usize, k: usize) -> Result<QuboProblem, QuboError> {
    if k == 0 {
        return Err(QuboError::PenaltyNeedsLogical);
    }
    add_counter_penalty(q, 2 * k, n as i64 + 1, penalty_bits_logical(k))
}

/// Penalizes `x = 0` for a self-dual layout; `λ = n + 1`.
pub fn add_nonzero_penalty(q: &QuboProblem, n: usize) -> Result<QuboProblem, QuboError> {
    if q.layout().k() != 0 {
        return Err(QuboError::PenaltyNeedsSelfDual(q.layout().k()));
    }
    add_counter_penalty(q, n, n as i64 + 1, penalty_bits_nonzero(n))
}
