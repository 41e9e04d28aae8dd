//! Text and JSON serialization of [`QuboProblem`].
//!
//! Text format:
//!
//! ```text
//! c <free comment>
//! c offset <integer>
//! c layout dims n=<n> k=<k> st=<s_t> su=<s_u> sv=<s_v> r=<r>
//! c layout roles x0 x1 t0.0 ...
//! c layout fixed x0=1
//! p qubo 0 <numVars> <nDiagonals> <nOffDiagonals>
//! i i <value>
//! i j <value>
//! ```
//!
//! Values are the stored upper-triangular integers. Layout lines are omitted
//! for anonymous problems.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::layout::{AuxWidths, Role, VariableLayout};
use super::{QuboError, QuboProblem};

pub fn to_text(q: &QuboProblem) -> String {
    let mut out = String::new();
    out.push_str("c qdist qubo\n");
    let _ = writeln!(out, "c offset {}", q.offset());
    let layout = q.layout();
    if !layout.is_anonymous() {
        let w = layout.widths();
        let _ = writeln!(
            out,
            "c layout dims n={} k={} st={} su={} sv={} r={}",
            layout.n(),
            layout.k(),
            w.t,
            w.u,
            w.v,
            layout.penalty_bits()
        );
        out.push_str("c layout roles");
        for r in layout.roles() {
            let _ = write!(out, " {r}");
        }
        out.push('\n');
        if !layout.fixed().is_empty() {
            out.push_str("c layout fixed");
            for (r, v) in layout.fixed() {
                let _ = write!(out, " {r}={v}");
            }
            out.push('\n');
        }
    }
    let _ = writeln!(
        out,
        "p qubo 0 {} {} {}",
        q.num_vars(),
        q.num_diagonal(),
        q.num_off_diagonal()
    );
    for (&(i, j), v) in q.coeffs().iter().filter(|((i, j), _)| i == j) {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    for (&(i, j), v) in q.coeffs().iter().filter(|((i, j), _)| i != j) {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    out
}

#[derive(Default)]
struct Sidecar {
    dims: Option<(usize, usize, AuxWidths, usize)>,
    roles: Option<Vec<Role>>,
    fixed: Vec<(Role, u8)>,
}

fn parse_layout_line(rest: &str, side: &mut Sidecar, line: usize) -> Result<(), QuboError> {
    let err = |msg: String| QuboError::Parse { line, msg };
    let mut tok = rest.split_whitespace();
    match tok.next() {
        Some("dims") => {
            let mut vals = [None; 6];
            for t in tok {
                let (key, val) = t.split_once('=').ok_or_else(|| err(format!("bad field {t:?}")))?;
                let slot = ["n", "k", "st", "su", "sv", "r"]
                    .iter()
                    .position(|&k| k == key)
                    .ok_or_else(|| err(format!("unknown field {key:?}")))?;
                vals[slot] = Some(val.parse::<usize>().map_err(|_| err(format!("bad value {val:?}")))?);
            }
            let get = |i: usize| vals[i].ok_or_else(|| err("incomplete dims".into()));
            side.dims = Some((
                get(0)?,
                get(1)?,
                AuxWidths {
                    t: get(2)?,
                    u: get(3)?,
                    v: get(4)?,
                },
                get(5)?,
            ));
        }
        Some("roles") => {
            let roles = tok.map(|t| t.parse::<Role>().map_err(&err)).collect::<Result<Vec<_>, _>>()?;
            side.roles = Some(roles);
        }
        Some("fixed") => {
            for t in tok {
                let (r, v) = t.split_once('=').ok_or_else(|| err(format!("bad fixed entry {t:?}")))?;
                let v = match v {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(err(format!("bad fixed value {v:?}"))),
                };
                side.fixed.push((r.parse::<Role>().map_err(&err)?, v));
            }
        }
        other => return Err(err(format!("unknown layout line {other:?}"))),
    }
    Ok(())
}

pub fn parse_text(text: &str) -> Result<QuboProblem, QuboError> {
    let err = |line: usize, msg: String| QuboError::Parse { line, msg };
    let mut offset = 0i64;
    let mut side = Sidecar::default();
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut entries: Vec<((usize, usize), i64)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix('c').filter(|r| r.is_empty() || r.starts_with(char::is_whitespace)) {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("offset ") {
                offset = v.trim().parse().map_err(|_| err(line, format!("bad offset {v:?}")))?;
            } else if let Some(v) = rest.strip_prefix("layout ") {
                parse_layout_line(v, &mut side, line)?;
            }
            continue;
        }
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok[0] == "p" {
            if header.is_some() {
                return Err(err(line, "duplicate program line".into()));
            }
            if tok.len() != 6 || tok[1] != "qubo" {
                return Err(err(line, "expected `p qubo 0 <nodes> <diag> <offdiag>`".into()));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad count {s:?}")));
            header = Some((num(tok[2])?, num(tok[3])?, num(tok[4])?, num(tok[5])?));
            continue;
        }
        let Some((_, nodes, _, _)) = header else {
            return Err(err(line, "coefficient before program line".into()));
        };
        if tok.len() != 3 {
            return Err(err(line, format!("expected `i j value`, found {l:?}")));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad index {s:?}")));
        let (i, j) = (idx(tok[0])?, idx(tok[1])?);
        let v: i64 = tok[2]
            .parse()
            .map_err(|_| err(line, format!("coefficient {:?} is not an integer", tok[2])))?;
        if i > j {
            return Err(err(line, format!("entry ({i}, {j}) is below the diagonal")));
        }
        if j >= nodes {
            return Err(err(line, format!("index {j} out of range for {nodes} variables")));
        }
        entries.push(((i, j), v));
    }
    let (_, nodes, n_diag, n_off) = header.ok_or_else(|| err(text.lines().count().max(1), "missing program line".into()))?;
    let diag = entries.iter().filter(|((i, j), _)| i == j).count();
    if diag != n_diag || entries.len() - diag != n_off {
        return Err(err(
            text.lines().count(),
            format!(
                "program line announces {n_diag}/{n_off} entries, found {diag}/{}",
                entries.len() - diag
            ),
        ));
    }
    let layout = match (side.dims, side.roles) {
        (None, None) => VariableLayout::anonymous(nodes),
        (Some((n, k, widths, r)), Some(roles)) => {
            if roles.len() != nodes {
                return Err(err(1, format!("{} roles for {nodes} variables", roles.len())));
            }
            VariableLayout::from_parts(n, k, widths, r, roles, side.fixed)
        }
        _ => return Err(err(1, "layout needs both dims and roles lines".into())),
    };
    QuboProblem::new(nodes, entries, offset, layout)
}

pub fn export_qubo(q: &QuboProblem, path: &Path) -> Result<(), QuboError> {
    std::fs::write(path, to_text(q)).map_err(|e| QuboError::Io(format!("{}: {e}", path.display())))
}

pub fn import_qubo(path: &Path) -> Result<QuboProblem, QuboError> {
    let text = std::fs::read_to_string(path).map_err(|e| QuboError::Io(format!("{}: {e}", path.display())))?;
    parse_text(&text)
}

/// Self-contained JSON document for external tooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboDocument {
    pub format: String,
    pub num_vars: usize,
    pub offset: i64,
    /// `(i, j, value)` with `i ≤ j`.
    pub coeffs: Vec<(usize, usize, i64)>,
    pub layout: VariableLayout,
    /// Free-form description of how the instance was produced.
    pub provenance: serde_json::Value,
}

impl QuboDocument {
    pub fn new(q: &QuboProblem, provenance: serde_json::Value) -> Self {
        Self {
            format: "qdist-qubo/1".into(),
            num_vars: q.num_vars(),
            offset: q.offset(),
            coeffs: q.coeffs().iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
            layout: q.layout().clone(),
            provenance,
        }
    }

    pub fn to_problem(&self) -> Result<QuboProblem, QuboError> {
        if self.layout.num_vars() != self.num_vars {
            return Err(QuboError::Parse {
                line: 0,
                msg: "layout size differs from num_vars".into(),
            });
        }
        QuboProblem::new(
            self.num_vars,
            self.coeffs.iter().map(|&(i, j, v)| ((i, j), v)),
            self.offset,
            self.layout.clone(),
        )
    }
}

pub fn to_json(q: &QuboProblem, provenance: serde_json::Value) -> String {
    serde_json::to_string_pretty(&QuboDocument::new(q, provenance)).expect("serializable")
}

pub fn from_json(text: &str) -> Result<QuboProblem, QuboError> {
    let doc: QuboDocument = serde_json::from_str(text).map_err(|e| QuboError::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    doc.to_problem()
}
