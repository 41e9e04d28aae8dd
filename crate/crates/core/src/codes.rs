//! Binary stabilizer codes in the symplectic representation.
//!
//! A Pauli operator on `n` qubits is a vector `c = (α|β)` of length `2n`:
//! `X → (1|0)`, `Z → (0|1)`, `Y → (1|1)`, `I → (0|0)`. Phases are ignored.
//! A code is given by its `(n−k) × 2n` parity-check matrix `H`; validation
//! derives the normalizer matrix `G = (L | Hᵀ)` whose first `2k` columns are
//! logical operators.

use std::fmt;
use std::path::Path;

use log::warn;
use rand::Rng;
use thiserror::Error;

use crate::gf2::{BitMatrix, Gf2Error};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("generators {0} and {1} anticommute")]
    NonCommuting(usize, usize),
    #[error("parity-check matrix has rank {actual}, expected n - k = {expected}")]
    RankDeficient { expected: usize, actual: usize },
    #[error("parity-check matrix is {rows}x{cols}, expected {exp_rows}x{exp_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        exp_rows: usize,
        exp_cols: usize,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("adjacency matrix is not symmetric at ({0}, {1})")]
    AsymmetricAdjacency(usize, usize),
    #[error("circulant first row is not palindromic: row[{0}] != row[{1}]")]
    AsymmetricCirculant(usize, usize),
    #[error("symplectic vector has odd length {0}")]
    OddLength(usize),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> CodeError {
    CodeError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Swaps the X and Z halves of every row, i.e. computes `M Λ`.
fn times_lambda(m: &BitMatrix) -> BitMatrix {
    let n = m.cols() / 2;
    BitMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, (c + n) % (2 * n)))
}

/// Symplectic inner product of two `(α|β)` vectors.
pub fn symplectic_product(a: &[u8], b: &[u8]) -> u8 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() / 2;
    let s: u32 = (0..n)
        .map(|i| (a[i] & b[n + i]) as u32 + (a[n + i] & b[i]) as u32)
        .sum();
    (s & 1) as u8
}

/// Weight of a Pauli operator: `α·α + β·β − α·β`.
pub fn pauli_weight(c: &[u8]) -> Result<usize, CodeError> {
    if !c.len().is_multiple_of(2) {
        return Err(CodeError::OddLength(c.len()));
    }
    let n = c.len() / 2;
    let (alpha, beta) = c.split_at(n);
    let dot = |u: &[u8], v: &[u8]| -> usize { u.iter().zip(v).map(|(&a, &b)| (a & b) as usize).sum() };
    Ok(dot(alpha, alpha) + dot(beta, beta) - dot(alpha, beta))
}

/// Renders `(α|β)` as a Pauli string such as `"XZZXI"`.
pub fn to_pauli_string(c: &[u8]) -> String {
    let n = c.len() / 2;
    (0..n)
        .map(|i| match (c[i], c[n + i]) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        })
        .collect()
}

/// Parses a Pauli string over `{I,X,Y,Z}` into `(α|β)`.
pub fn parse_pauli_string(s: &str) -> Option<Vec<u8>> {
    let n = s.chars().count();
    let mut c = vec![0u8; 2 * n];
    for (i, ch) in s.chars().enumerate() {
        let (a, b) = match ch.to_ascii_uppercase() {
            'I' => (0, 0),
            'X' => (1, 0),
            'Z' => (0, 1),
            'Y' => (1, 1),
            _ => return None,
        };
        c[i] = a;
        c[n + i] = b;
    }
    Some(c)
}

/// A validated `[[n, k]]` stabilizer code.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    h: BitMatrix,
    g: BitMatrix,
}

impl StabilizerCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `(n−k) × 2n` parity-check matrix.
    pub fn parity_check(&self) -> &BitMatrix {
        &self.h
    }

    /// `2n × (n+k)` normalizer matrix in the layout `(L | Hᵀ)`.
    pub fn normalizer(&self) -> &BitMatrix {
        &self.g
    }

    /// X half of the normalizer, `n × (n+k)`: `α = A x mod 2`.
    pub fn x_block(&self) -> BitMatrix {
        self.g.row_block(0..self.n)
    }

    /// Z half of the normalizer, `n × (n+k)`: `β = B x mod 2`.
    pub fn z_block(&self) -> BitMatrix {
        self.g.row_block(self.n..2 * self.n)
    }

    /// Number of normalizer coefficients `n + k`.
    pub fn num_primary(&self) -> usize {
        self.n + self.k
    }

    /// The codeword `G x mod 2`.
    pub fn element(&self, x: &[u8]) -> Result<Vec<u8>, CodeError> {
        Ok(self.g.matvec_mod2(x)?)
    }

    /// Pauli weight of `G x mod 2`.
    pub fn weight_of_element(&self, x: &[u8]) -> Result<usize, CodeError> {
        pauli_weight(&self.element(x)?)
    }

    /// True when `x` selects a stabilizer element (logical block zero).
    pub fn is_stabilizer_coefficient(&self, x: &[u8]) -> bool {
        x[..2 * self.k].iter().all(|&b| b == 0)
    }

    pub fn generators(&self) -> Vec<String> {
        (0..self.h.rows()).map(|r| to_pauli_string(&self.h.row(r))).collect()
    }
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StabilizerCode")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("generators", &self.generators())
            .finish()
    }
}

/// Checks commutation and rank of `H`, then derives the normalizer.
pub fn validate_stabilizer(h: BitMatrix, n: usize, k: usize) -> Result<StabilizerCode, CodeError> {
    if k > n || h.rows() != n - k || h.cols() != 2 * n {
        return Err(CodeError::Shape {
            rows: h.rows(),
            cols: h.cols(),
            exp_rows: n.saturating_sub(k),
            exp_cols: 2 * n,
        });
    }
    let gram = times_lambda(&h).mul(&h.transpose())?;
    for i in 0..h.rows() {
        if let Some(j) = ((i + 1)..h.rows()).find(|&j| gram.get(i, j)) {
            return Err(CodeError::NonCommuting(i, j));
        }
    }
    let rank = h.rank();
    if rank != n - k {
        return Err(CodeError::RankDeficient {
            expected: n - k,
            actual: rank,
        });
    }
    let g = normalizer_from_parity(&h, n, k);
    Ok(StabilizerCode { n, k, h, g })
}

/// Builds `G = (L | Hᵀ)` spanning `ker(HΛ)`.
///
/// `L` greedily extends the rows of `H` with kernel basis vectors taken in
/// pivot order. Expects an already validated `H`.
pub fn normalizer_from_parity(h: &BitMatrix, n: usize, k: usize) -> BitMatrix {
    let kernel = times_lambda(h).kernel_basis();
    debug_assert_eq!(kernel.cols(), n + k);
    let mut span = h.clone();
    let mut rank = span.rank();
    let mut logicals: Vec<Vec<u8>> = Vec::with_capacity(2 * k);
    for j in 0..kernel.cols() {
        if logicals.len() == 2 * k {
            break;
        }
        let candidate = kernel.column(j);
        let extended = span
            .vstack(&BitMatrix::from_rows(&[&candidate], 2 * n).expect("kernel column width"))
            .expect("same width");
        let r = extended.rank();
        if r > rank {
            span = extended;
            rank = r;
            logicals.push(candidate);
        }
    }
    debug_assert_eq!(logicals.len(), 2 * k);
    let l = BitMatrix::from_columns(&logicals, 2 * n).expect("column lengths");
    l.hstack(&h.transpose()).expect("same height")
}

/// Self-dual code whose generators are `X_j Z^{B_j}` for a symmetric adjacency `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCode {
    adjacency: BitMatrix,
}

impl GraphCode {
    /// Validates symmetry. Diagonal entries are accepted with a warning.
    pub fn new(adjacency: BitMatrix) -> Result<Self, CodeError> {
        let n = adjacency.rows();
        if adjacency.cols() != n {
            return Err(CodeError::Shape {
                rows: n,
                cols: adjacency.cols(),
                exp_rows: n,
                exp_cols: n,
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if adjacency.get(i, j) != adjacency.get(j, i) {
                    return Err(CodeError::AsymmetricAdjacency(i, j));
                }
            }
        }
        if (0..n).any(|i| adjacency.get(i, i)) {
            warn!("graph adjacency has nonzero diagonal; those generators contain Y");
        }
        Ok(Self { adjacency })
    }

    pub fn n(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adjacency
    }

    /// The `[[n, 0]]` code with `H = Gᵀ = (I | B)`.
    pub fn to_stabilizer(&self) -> StabilizerCode {
        let n = self.n();
        let h = BitMatrix::identity(n)
            .hstack(&self.adjacency)
            .expect("square adjacency");
        validate_stabilizer(h, n, 0).expect("symmetric adjacency yields a valid self-dual code")
    }
}

/// Graph code with circulant adjacency, given by its first row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CirculantCode {
    first_row: Vec<u8>,
}

impl CirculantCode {
    pub fn new(first_row: Vec<u8>) -> Result<Self, CodeError> {
        let n = first_row.len();
        if let Some((i, &v)) = first_row.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(CodeError::Gf2(Gf2Error::NonBinary { row: 0, col: i, value: v }));
        }
        for j in 1..n {
            if first_row[j] != first_row[n - j] {
                return Err(CodeError::AsymmetricCirculant(j, n - j));
            }
        }
        Ok(Self { first_row })
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[u8] {
        &self.first_row
    }

    /// `B[i][j] = firstRow[(j − i) mod n]`.
    pub fn to_graph(&self) -> GraphCode {
        let n = self.n();
        let b = BitMatrix::from_fn(n, n, |i, j| self.first_row[(j + n - i) % n] == 1);
        GraphCode::new(b).expect("palindromic first row gives a symmetric circulant")
    }
}

/// Standalone form of [`CirculantCode::to_graph`].
pub fn circulant_to_graph(c: &CirculantCode) -> GraphCode {
    c.to_graph()
}

/// A parsed code file in any of the supported text formats.
#[derive(Debug, Clone)]
pub enum CodeSpec {
    Stabilizer(StabilizerCode),
    Graph(GraphCode),
    Circulant(CirculantCode),
}

impl CodeSpec {
    pub fn stabilizer(&self) -> StabilizerCode {
        match self {
            CodeSpec::Stabilizer(c) => c.clone(),
            CodeSpec::Graph(g) => g.to_stabilizer(),
            CodeSpec::Circulant(c) => c.to_graph().to_stabilizer(),
        }
    }

    pub fn graph(&self) -> Option<GraphCode> {
        match self {
            CodeSpec::Stabilizer(_) => None,
            CodeSpec::Graph(g) => Some(g.clone()),
            CodeSpec::Circulant(c) => Some(c.to_graph()),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            CodeSpec::Stabilizer(c) => c.n(),
            CodeSpec::Graph(g) => g.n(),
            CodeSpec::Circulant(c) => c.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            CodeSpec::Stabilizer(c) => c.k(),
            _ => 0,
        }
    }
}

/// Non-empty lines with `#` comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

fn parse_bits(line: usize, s: &str, expected: usize) -> Result<Vec<u8>, CodeError> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    let chars: Vec<String> = if tokens.len() == 1 && expected > 1 {
        tokens[0].chars().map(String::from).collect()
    } else {
        tokens.iter().map(|t| t.to_string()).collect()
    };
    if chars.len() != expected {
        return Err(parse_err(line, format!("expected {expected} bits, found {}", chars.len())));
    }
    chars
        .iter()
        .map(|t| match t.as_str() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(parse_err(line, format!("invalid bit {other:?}"))),
        })
        .collect()
}

fn parse_count(line: usize, s: &str) -> Result<usize, CodeError> {
    s.parse()
        .map_err(|_| parse_err(line, format!("expected a nonnegative integer, found {s:?}")))
}

/// Parses Pauli generators, one per line over `{I,X,Y,Z}`, into `H`.
///
/// Returns `(H, n)`; `k` is `n` minus the number of generators.
pub fn parse_pauli_generators(text: &str) -> Result<(BitMatrix, usize), CodeError> {
    let lines = content_lines(text);
    let Some(&(_, first)) = lines.first() else {
        return Err(parse_err(1, "no generators found"));
    };
    let n = first.chars().count();
    let mut rows = Vec::with_capacity(lines.len());
    for (line, l) in lines {
        if l.chars().count() != n {
            return Err(parse_err(
                line,
                format!("generator has length {}, expected {n}", l.chars().count()),
            ));
        }
        let row = parse_pauli_string(l)
            .ok_or_else(|| parse_err(line, format!("illegal character in {l:?}")))?;
        rows.push(row);
    }
    Ok((BitMatrix::from_rows(&rows, 2 * n)?, n))
}

/// Parses any supported code format, detected from the first content line.
pub fn parse_code(text: &str) -> Result<CodeSpec, CodeError> {
    let lines = content_lines(text);
    let Some(&(first_line, first)) = lines.first() else {
        return Err(parse_err(1, "empty code file"));
    };
    let head: Vec<&str> = first.split_whitespace().collect();
    match head.as_slice() {
        ["graph", n] => {
            let n = parse_count(first_line, n)?;
            let rows = read_rows(&lines[1..], n, n, first_line)?;
            Ok(CodeSpec::Graph(GraphCode::new(BitMatrix::from_rows(&rows, n)?)?))
        }
        ["circulant", n] => {
            let n = parse_count(first_line, n)?;
            let rows = read_rows(&lines[1..], 1, n, first_line)?;
            Ok(CodeSpec::Circulant(CirculantCode::new(rows.into_iter().next().unwrap())?))
        }
        [n, k] if n.parse::<usize>().is_ok() => {
            let n = parse_count(first_line, n)?;
            let k = parse_count(first_line, k)?;
            if k > n {
                return Err(parse_err(first_line, format!("k = {k} exceeds n = {n}")));
            }
            let rows = read_rows(&lines[1..], n - k, 2 * n, first_line)?;
            let h = BitMatrix::from_rows(&rows, 2 * n)?;
            Ok(CodeSpec::Stabilizer(validate_stabilizer(h, n, k)?))
        }
        _ => {
            let (h, n) = parse_pauli_generators(text)?;
            if h.rows() > n {
                return Err(parse_err(first_line, format!("{} generators exceed n = {n}", h.rows())));
            }
            let k = n - h.rows();
            Ok(CodeSpec::Stabilizer(validate_stabilizer(h, n, k)?))
        }
    }
}

fn read_rows(
    lines: &[(usize, &str)],
    count: usize,
    width: usize,
    header_line: usize,
) -> Result<Vec<Vec<u8>>, CodeError> {
    if lines.len() != count {
        let at = lines.get(count).map(|l| l.0).unwrap_or(header_line);
        return Err(parse_err(at, format!("expected {count} rows, found {}", lines.len())));
    }
    lines.iter().map(|&(line, l)| parse_bits(line, l, width)).collect()
}

pub fn load_code(path: impl AsRef<Path>) -> Result<CodeSpec, CodeError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_err(0, format!("cannot read {}: {e}", path.display())))?;
    parse_code(&text)
}

/// Every palindromic first row of length `n`; with `simple`, only zero-diagonal ones.
pub fn palindromic_circulants(n: usize, simple: bool) -> Vec<CirculantCode> {
    if n == 0 {
        return Vec::new();
    }
    let free = n / 2; // positions 1..=n/2 determine the rest
    let diag_choices: &[u8] = if simple { &[0] } else { &[0, 1] };
    let mut out = Vec::new();
    for &d in diag_choices {
        for mask in 0..(1usize << free) {
            let mut row = vec![0u8; n];
            row[0] = d;
            for j in 1..=free {
                let bit = ((mask >> (j - 1)) & 1) as u8;
                row[j] = bit;
                row[n - j] = bit;
            }
            out.push(CirculantCode::new(row).expect("palindromic by construction"));
        }
    }
    out
}

/// Samples a random `[[n, k]]` code by growing an isotropic subspace.
pub fn random_code(n: usize, k: usize, rng: &mut impl Rng) -> StabilizerCode {
    assert!(k <= n && n > 0);
    let mut rows: Vec<Vec<u8>> = Vec::new();
    while rows.len() < n - k {
        let v: Vec<u8> = (0..2 * n).map(|_| rng.gen_range(0..2)).collect();
        if rows.iter().any(|r| symplectic_product(r, &v) == 1) {
            continue;
        }
        let mut candidate = rows.clone();
        candidate.push(v);
        let m = BitMatrix::from_rows(&candidate, 2 * n).expect("uniform widths");
        if m.rank() == candidate.len() {
            rows = candidate;
        }
    }
    let h = BitMatrix::from_rows(&rows, 2 * n).expect("uniform widths");
    validate_stabilizer(h, n, k).expect("isotropic independent rows")
}

/// The `[[5,1,3]]` code generated by the cyclic shifts of `XZZXI`.
pub fn five_qubit_code() -> StabilizerCode {
    let text = "XZZXI\nIXZZX\nXIXZZ\nZXIXZ\n";
    match parse_code(text).expect("valid code") {
        CodeSpec::Stabilizer(c) => c,
        _ => unreachable!(),
    }
}

/// The `[[2,0,2]]` code stabilized by `XX` and `ZZ`.
pub fn xx_zz_code() -> StabilizerCode {
    let h = BitMatrix::from_rows(&[[1, 1, 0, 0], [0, 0, 1, 1]], 4).expect("static");
    validate_stabilizer(h, 2, 0).expect("XX and ZZ commute")
}

/// The 5-cycle circulant graph code.
pub fn pentagon() -> CirculantCode {
    CirculantCode::new(vec![0, 1, 0, 0, 1]).expect("palindromic")
}
