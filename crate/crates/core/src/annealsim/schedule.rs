use std::fmt::Write as _;
use std::path::Path;

use super::AnnealError;

/// Piecewise-linear `A(γ)`, `B(γ)` on sample points covering `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    gamma: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self::linear()
    }
}

impl AnnealSchedule {
    /// `A(γ) = 1 − γ`, `B(γ) = γ`.
    pub fn linear() -> Self {
        Self {
            gamma: vec![0.0, 1.0],
            a: vec![1.0, 0.0],
            b: vec![0.0, 1.0],
        }
    }

    pub fn from_points(gamma: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self, AnnealError> {
        let bad = |m: String| Err(AnnealError::InvalidSchedule(m));
        if gamma.len() != a.len() || gamma.len() != b.len() {
            return bad("column lengths differ".into());
        }
        if gamma.len() < 2 {
            return bad("need at least two sample points".into());
        }
        if gamma.iter().chain(&a).chain(&b).any(|v| !v.is_finite()) {
            return bad("non-finite value".into());
        }
        if gamma.windows(2).any(|w| w[1] <= w[0]) {
            return bad("gamma samples must be strictly increasing".into());
        }
        let last = gamma.len() - 1;
        if gamma[0] != 0.0 || gamma[last] != 1.0 {
            return bad("gamma samples must start at 0 and end at 1".into());
        }
        if a[0] <= b[0] {
            return bad(format!("A(0) = {} must exceed B(0) = {}", a[0], b[0]));
        }
        if a[last] >= b[last] {
            return bad(format!("A(1) = {} must be below B(1) = {}", a[last], b[last]));
        }
        Ok(Self { gamma, a, b })
    }

    /// Reads a whitespace-separated table with header `gamma A B`.
    pub fn parse(text: &str) -> Result<Self, AnnealError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let header_ok = lines
            .next()
            .map(|(_, l)| l.split_whitespace().collect::<Vec<_>>() == ["gamma", "A", "B"])
            .unwrap_or(false);
        if !header_ok {
            return Err(AnnealError::Parse {
                line: 1,
                msg: "expected header `gamma A B`".into(),
            });
        }
        let (mut g, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
        for (line, l) in lines {
            let vals: Result<Vec<f64>, _> = l.split_whitespace().map(str::parse).collect();
            match vals {
                Ok(v) if v.len() == 3 => {
                    g.push(v[0]);
                    a.push(v[1]);
                    b.push(v[2]);
                }
                _ => {
                    return Err(AnnealError::Parse {
                        line,
                        msg: format!("expected three numbers, found {l:?}"),
                    })
                }
            }
        }
        Self::from_points(g, a, b)
    }

    pub fn load(path: &Path) -> Result<Self, AnnealError> {
        let text = std::fs::read_to_string(path).map_err(|e| AnnealError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("gamma A B\n");
        for i in 0..self.gamma.len() {
            let _ = writeln!(out, "{} {} {}", self.gamma[i], self.a[i], self.b[i]);
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.gamma.len()).map(|i| (self.gamma[i], self.a[i], self.b[i]))
    }

    fn segment(&self, gamma: f64) -> usize {
        let g = gamma.clamp(0.0, 1.0);
        let idx = self.gamma.partition_point(|&x| x <= g);
        idx.clamp(1, self.gamma.len() - 1) - 1
    }

    /// `(A(γ), B(γ))`; `γ` is clamped to `[0, 1]`.
    pub fn eval(&self, gamma: f64) -> (f64, f64) {
        let s = self.segment(gamma);
        let g = gamma.clamp(0.0, 1.0);
        let t = (g - self.gamma[s]) / (self.gamma[s + 1] - self.gamma[s]);
        (
            self.a[s] + t * (self.a[s + 1] - self.a[s]),
            self.b[s] + t * (self.b[s + 1] - self.b[s]),
        )
    }

    /// `(A′(γ), B′(γ))` of the segment containing `γ` (the right one at breakpoints).
    pub fn slope(&self, gamma: f64) -> (f64, f64) {
        let s = self.segment(gamma);
        let dg = self.gamma[s + 1] - self.gamma[s];
        ((self.a[s + 1] - self.a[s]) / dg, (self.b[s + 1] - self.b[s]) / dg)
    }
}
