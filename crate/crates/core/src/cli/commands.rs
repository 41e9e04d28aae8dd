use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{BuildArgs, CliError, Command, Format, Settings, SolverArgs, SolverKind};
use crate::annealsim::{first_reaching, sweep_anneal_times, AnnealSchedule, SimParams, SimResult};
use crate::codes::{parse_code, to_pauli_string, CodeSpec};
use crate::distance::{best_circulant, min_distance_bruteforce, ORACLE_MAX_PRIMARY};
use crate::qubo::io::{parse_text, to_json, to_text};
use crate::qubo::pipeline::{build_instances, BuildMode};
use crate::qubo::{to_ising, IsingProblem, QuboProblem};
use crate::solvers::{
    approximation_ratio, derive_seed, solve_decomposed, solve_exact_structured, solve_sa, DecomposeParams,
    SaParams, SolveResult,
};

pub const BENCH_HEADER: &str = "n,code_id,solver,runs,best_energy,oracle_d,ar,success_rate,wall_ms";
const DEFAULT_TA_GRID: [f64; 9] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0];
const DEFAULT_RUNS: usize = 40;

enum Input {
    Code(CodeSpec),
    Qubo(QuboProblem),
    Ising(IsingProblem),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn classify(path: &Path) -> Result<Input, CliError> {
    let text = read(path)?;
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty() && !l.starts_with("c ") && *l != "c");
    let is_qubo = text.lines().any(|l| l.trim_start().starts_with("p qubo"));
    Ok(match first {
        Some(l) if l.starts_with("spins") => Input::Ising(IsingProblem::parse(&text)?),
        _ if is_qubo => Input::Qubo(parse_text(&text)?),
        _ => Input::Code(parse_code(&text)?),
    })
}

fn load_code(path: &Path) -> Result<CodeSpec, CliError> {
    Ok(parse_code(&read(path)?)?)
}

fn code_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn default_mode(spec: &CodeSpec) -> BuildMode {
    match spec {
        CodeSpec::Circulant(_) => BuildMode::Circulant,
        CodeSpec::Graph(_) => BuildMode::SelfDual,
        CodeSpec::Stabilizer(_) => BuildMode::Penalty,
    }
}

fn build(spec: &CodeSpec, b: &BuildArgs, s: &Settings) -> Result<(BuildMode, Vec<QuboProblem>), CliError> {
    let mode = s.mode(b)?.unwrap_or_else(|| default_mode(spec));
    Ok((mode, build_instances(spec, mode, s.widths(b))?))
}

/// `dir/stem_<i>.ext` for multi-instance outputs.
fn indexed_path(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{i}"),
    };
    path.with_file_name(name)
}

fn output_paths(path: &Path, count: usize) -> Vec<PathBuf> {
    if count == 1 {
        vec![path.to_path_buf()]
    } else {
        (0..count).map(|i| indexed_path(path, i)).collect()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_validate(codefile: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_code(codefile)?;
    let code = spec.stabilizer();
    let h = code.parity_check();
    let g = code.normalizer();
    writeln!(out, "n={} k={}", code.n(), code.k())?;
    let kind = match &spec {
        CodeSpec::Stabilizer(_) => "stabilizer",
        CodeSpec::Graph(_) => "graph",
        CodeSpec::Circulant(_) => "circulant",
    };
    writeln!(out, "kind: {kind}")?;
    writeln!(out, "generators: {} rank {}", h.rows(), h.rank())?;
    writeln!(out, "commutation: ok")?;
    writeln!(out, "normalizer: {}x{} rank {}", g.rows(), g.cols(), g.rank())?;
    Ok(())
}

pub fn cmd_qubo(
    codefile: &Path,
    b: &BuildArgs,
    path: &Path,
    s: &Settings,
    out: &mut dyn Write,
) -> Result<Vec<PathBuf>, CliError> {
    let spec = load_code(codefile)?;
    let (mode, instances) = build(&spec, b, s)?;
    let paths = output_paths(path, instances.len());
    for (q, p) in instances.iter().zip(&paths) {
        write_file(p, &to_text(q))?;
        writeln!(out, "{} mode={mode} vars={} fixed={}", p.display(), q.num_vars(), q.layout().fixed().len())?;
    }
    Ok(paths)
}

pub fn cmd_export(file: &Path, b: &BuildArgs, path: &Path, s: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let (mode, instances) = match classify(file)? {
        Input::Code(spec) => {
            let (m, v) = build(&spec, b, s)?;
            (Some(m.to_string()), v)
        }
        Input::Qubo(q) => (None, vec![q]),
        Input::Ising(_) => return Err(CliError::Input("export takes a code or QUBO file".into())),
    };
    let paths = output_paths(path, instances.len());
    let count = instances.len();
    for (i, (q, p)) in instances.iter().zip(&paths).enumerate() {
        let provenance = json!({
            "source": file.display().to_string(),
            "code_id": code_id(file),
            "mode": mode,
            "instance": i,
            "instances": count,
            "tool": concat!("qdist ", env!("CARGO_PKG_VERSION")),
        });
        write_file(p, &to_json(q, provenance))?;
        writeln!(out, "{}", p.display())?;
    }
    Ok(())
}

/// One `solve` invocation or one bench run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub code_id: String,
    pub mode: Option<String>,
    pub solver: String,
    pub params: serde_json::Value,
    pub instances: usize,
    pub best_instance: usize,
    pub result: SolveResult,
    /// Normalizer coefficients of the best assignment, when the layout records them.
    pub best_x: Option<Vec<u8>>,
    pub best_operator: Option<String>,
    pub oracle_d: Option<usize>,
    pub approximation_ratio: Option<f64>,
    pub timestamp_ms: u128,
    pub wall_ms: f64,
}

impl RunRecord {
    /// The record with its timing fields zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self {
            timestamp_ms: 0,
            wall_ms: 0.0,
            ..self.clone()
        }
    }
}

fn solve_one(
    q: &QuboProblem,
    kind: SolverKind,
    sa: &SaParams,
    dec: &DecomposeParams,
    seed: u64,
) -> Result<SolveResult, CliError> {
    Ok(match kind {
        SolverKind::Exact => solve_exact_structured(q)?,
        SolverKind::Sa => solve_sa(q, &SaParams { seed, ..*sa })?,
        SolverKind::Decomposed => solve_decomposed(
            q,
            &DecomposeParams {
                seed,
                ..dec.clone()
            },
        )?,
    })
}

/// Solves every instance; returns all results and the index of the best.
fn solve_all(
    instances: &[QuboProblem],
    kind: SolverKind,
    sa: &SaParams,
    dec: &DecomposeParams,
    seed: u64,
) -> Result<(usize, Vec<SolveResult>), CliError> {
    let results = instances
        .iter()
        .enumerate()
        .map(|(i, q)| solve_one(q, kind, sa, dec, derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let best = (0..results.len())
        .min_by_key(|&i| (results[i].best_energy, i))
        .ok_or_else(|| CliError::Internal("no instances to solve".into()))?;
    Ok((best, results))
}

fn solver_params(kind: SolverKind, sa: &SaParams, dec: &DecomposeParams, seed: u64) -> serde_json::Value {
    match kind {
        SolverKind::Exact => json!({ "seed": seed }),
        SolverKind::Sa => json!(SaParams { seed, ..*sa }),
        SolverKind::Decomposed => json!(DecomposeParams { seed, ..dec.clone() }),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn append_log(s: &Settings, records: &[RunRecord]) -> Result<(), CliError> {
    let Some(path) = &s.log else { return Ok(()) };
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Input(format!("cannot open log {}: {e}", path.display())))?;
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| CliError::Internal(e.to_string()))?;
        writeln!(f, "{line}")?;
    }
    Ok(())
}

struct Prepared {
    id: String,
    spec: Option<CodeSpec>,
    mode: Option<BuildMode>,
    instances: Vec<QuboProblem>,
    oracle: Option<usize>,
}

fn prepare_code(id: String, spec: CodeSpec, b: &BuildArgs, s: &Settings) -> Result<Prepared, CliError> {
    let (mode, instances) = build(&spec, b, s)?;
    let code = spec.stabilizer();
    let oracle = if code.n() + code.k() <= ORACLE_MAX_PRIMARY {
        Some(min_distance_bruteforce(&code)?.d)
    } else {
        None
    };
    Ok(Prepared {
        id,
        spec: Some(spec),
        mode: Some(mode),
        instances,
        oracle,
    })
}

fn record_for(p: &Prepared, kind: SolverKind, params: serde_json::Value, best: usize, results: &[SolveResult], wall_ms: f64) -> RunRecord {
    let mut result = results[best].clone();
    result.evaluations = results.iter().map(|r| r.evaluations).sum();
    let q = &p.instances[best];
    let (best_x, best_operator) = if q.layout().is_anonymous() {
        (None, None)
    } else {
        let x = q.layout().decode(&result.best_assignment).x;
        let op = p
            .spec
            .as_ref()
            .and_then(|s| s.stabilizer().element(&x).ok())
            .map(|c| to_pauli_string(&c));
        (Some(x), op)
    };
    let ar = p
        .oracle
        .and_then(|d| approximation_ratio(result.best_energy, d as i64).ok());
    RunRecord {
        code_id: p.id.clone(),
        mode: p.mode.map(|m| m.to_string()),
        solver: kind.to_string(),
        params,
        instances: p.instances.len(),
        best_instance: best,
        result,
        best_x,
        best_operator,
        oracle_d: p.oracle,
        approximation_ratio: ar,
        timestamp_ms: now_ms(),
        wall_ms,
    }
}

pub fn cmd_solve(
    file: &Path,
    b: &BuildArgs,
    sv: &SolverArgs,
    trace: Option<&Path>,
    s: &Settings,
    out: &mut dyn Write,
) -> Result<RunRecord, CliError> {
    let prepared = match classify(file)? {
        Input::Code(spec) => prepare_code(code_id(file), spec, b, s)?,
        Input::Qubo(q) => Prepared {
            id: code_id(file),
            spec: None,
            mode: None,
            instances: vec![q],
            oracle: None,
        },
        Input::Ising(_) => return Err(CliError::Input("solve takes a code or QUBO file".into())),
    };
    let kind = s.solver(sv, SolverKind::Exact)?;
    let (sa, dec) = (s.sa_params(sv), s.decompose_params(sv));
    let start = Instant::now();
    let (best, results) = solve_all(&prepared.instances, kind, &sa, &dec, s.seed)?;
    let wall_ms = elapsed_ms(start);
    let record = record_for(&prepared, kind, solver_params(kind, &sa, &dec, s.seed), best, &results, wall_ms);

    if let Some(path) = trace {
        let mut text = String::new();
        for (i, r) in results.iter().enumerate() {
            for t in &r.trace {
                let mut v = serde_json::to_value(t).map_err(|e| CliError::Internal(e.to_string()))?;
                v["instance"] = json!(i);
                text.push_str(&v.to_string());
                text.push('\n');
            }
        }
        write_file(path, &text)?;
    }
    match s.format.unwrap_or(Format::Structured) {
        Format::Structured => {
            let text = serde_json::to_string_pretty(&record).map_err(|e| CliError::Internal(e.to_string()))?;
            writeln!(out, "{text}")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["code_id", "mode", "solver", "instances", "best_energy", "distance_bound", "oracle_d", "ar", "wall_ms"])
                .map_err(csv_err)?;
            w.write_record([
                record.code_id.clone(),
                record.mode.clone().unwrap_or_default(),
                record.solver.clone(),
                record.instances.to_string(),
                record.result.best_energy.to_string(),
                record.result.distance_bound.to_string(),
                record.oracle_d.map(|d| d.to_string()).unwrap_or_default(),
                record.approximation_ratio.map(|a| format!("{a:?}")).unwrap_or_default(),
                format!("{:.3}", record.wall_ms),
            ])
            .map_err(csv_err)?;
            w.flush()?;
        }
    }
    append_log(s, std::slice::from_ref(&record))?;
    Ok(record)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Internal(format!("csv: {e}"))
}

#[derive(Debug, Serialize)]
struct DistanceOutput {
    code_id: String,
    n: usize,
    k: usize,
    d: usize,
    degeneracy: usize,
    enumerated: u64,
    minimizers: Vec<String>,
    coefficients: Vec<Vec<u8>>,
}

pub fn cmd_distance(codefile: &Path, s: &Settings, out: &mut dyn Write) -> Result<usize, CliError> {
    let spec = load_code(codefile)?;
    let r = min_distance_bruteforce(&spec.stabilizer())?;
    let doc = DistanceOutput {
        code_id: code_id(codefile),
        n: r.n,
        k: r.k,
        d: r.d,
        degeneracy: r.degeneracy(),
        enumerated: r.enumerated,
        minimizers: r.minimizers.iter().map(|c| to_pauli_string(c)).collect(),
        coefficients: r.coefficients.clone(),
    };
    match s.format.unwrap_or(Format::Structured) {
        Format::Structured => {
            let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
            writeln!(out, "{text}")?;
        }
        Format::Csv => {
            writeln!(out, "code_id,n,k,d,degeneracy,enumerated")?;
            writeln!(out, "{},{},{},{},{},{}", doc.code_id, doc.n, doc.k, doc.d, doc.degeneracy, doc.enumerated)?;
        }
    }
    Ok(r.d)
}

#[derive(Debug, Serialize)]
struct CurveRow {
    t_a: f64,
    #[serde(rename = "P_s")]
    p_s: f64,
}

/// Outcome of an anneal-time sweep.
#[derive(Debug, Clone)]
pub struct AnnealReport {
    pub results: Vec<SimResult>,
    pub reached: Option<f64>,
}

pub fn cmd_anneal(cmd: &Command, s: &Settings, out: &mut dyn Write) -> Result<AnnealReport, CliError> {
    let Command::Anneal {
        file,
        build: b,
        ta_grid,
        schedule,
        steps,
        threshold,
        out: out_path,
        summary,
    } = cmd
    else {
        return Err(CliError::Internal("cmd_anneal called with another command".into()));
    };
    let c = &s.config;
    let ising = match classify(file)? {
        Input::Ising(i) => i,
        Input::Qubo(q) => to_ising(&q),
        Input::Code(spec) => {
            let (mode, mut instances) = build(&spec, b, s)?;
            if instances.len() != 1 {
                return Err(CliError::Input(format!(
                    "mode {mode} yields {} instances; anneal needs exactly one (try --mode circulant)",
                    instances.len()
                )));
            }
            to_ising(&instances.remove(0))
        }
    };
    let grid: Vec<f64> = ta_grid
        .clone()
        .or_else(|| c.ta_grid.clone())
        .unwrap_or_else(|| DEFAULT_TA_GRID.to_vec());
    if grid.is_empty() {
        return Err(CliError::Input("empty anneal-time grid".into()));
    }
    if grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(CliError::Input("anneal times must be positive".into()));
    }
    let sched = match schedule.as_ref().or(c.schedule.as_ref()) {
        Some(p) => AnnealSchedule::load(p)?,
        None => AnnealSchedule::linear(),
    };
    let threshold = threshold.or(c.threshold).unwrap_or(0.9);
    let template = SimParams {
        steps: steps.or(c.steps),
        ..SimParams::new(1.0)
    };
    let results = sweep_anneal_times(&ising, &sched, &grid, &template)?;
    let reached = first_reaching(&results, threshold);

    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in &results {
            w.serialize(CurveRow {
                t_a: r.anneal_time,
                p_s: r.success_probability,
            })
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    match out_path {
        Some(p) => write_file(p, &String::from_utf8_lossy(&buf))?,
        None => out.write_all(&buf)?,
    }
    let degeneracy = results.first().map(|r| r.ground_space_dimension).unwrap_or(0);
    match reached {
        Some(t) => eprintln!("t_a@{threshold} = {t} (ground-space dimension {degeneracy})"),
        None => eprintln!("t_a@{threshold} not reached on the grid (ground-space dimension {degeneracy})"),
    }
    if let Some(p) = summary {
        let fresh = !p.exists();
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(p)
            .map_err(|e| CliError::Input(format!("cannot open {}: {e}", p.display())))?;
        if fresh {
            writeln!(f, "code_id,degeneracy,t_a_at_{threshold}")?;
        }
        writeln!(
            f,
            "{},{},{}",
            code_id(file),
            degeneracy,
            reached.map(|t| t.to_string()).unwrap_or_default()
        )?;
    }
    Ok(AnnealReport { results, reached })
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub code_id: String,
    pub solver: String,
    pub runs: usize,
    pub best_energy: i64,
    pub oracle_d: Option<usize>,
    pub ar: Option<f64>,
    pub success_rate: Option<f64>,
    pub wall_ms: f64,
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || CliError::Input(format!("invalid length range {text:?} (expected LO-HI)"));
    let (lo, hi) = match text.split_once('-') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

pub fn cmd_bench(cmd: &Command, s: &Settings, out: &mut dyn Write) -> Result<Vec<BenchRow>, CliError> {
    let Command::Bench {
        codefiles,
        circulants,
        runs,
        build: b,
        solver: sv,
        out: out_path,
    } = cmd
    else {
        return Err(CliError::Internal("cmd_bench called with another command".into()));
    };
    let mut codes: Vec<(String, CodeSpec)> = Vec::new();
    for f in codefiles {
        codes.push((code_id(f), load_code(f)?));
    }
    if let Some(r) = circulants {
        for n in parse_range(r)? {
            let (c, _) = best_circulant(n)
                .ok_or_else(|| CliError::SizeGuard(format!("no circulant catalog entry for n = {n}")))?;
            let row: String = c.first_row().iter().map(|b| char::from(b'0' + b)).collect();
            codes.push((format!("circ{n}_{row}"), CodeSpec::Circulant(c)));
        }
    }
    if codes.is_empty() {
        return Err(CliError::Input("no codes to benchmark".into()));
    }
    let runs = runs.or(s.config.runs).unwrap_or(DEFAULT_RUNS);
    if runs == 0 {
        return Err(CliError::Input("runs must be at least 1".into()));
    }
    let kind = s.solver(sv, SolverKind::Sa)?;
    let (sa, dec) = (s.sa_params(sv), s.decompose_params(sv));

    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (id, spec) in codes {
        let n = spec.n();
        let prepared = prepare_code(id, spec, b, s)?;
        let start = Instant::now();
        let per_run: Vec<RunRecord> = (0..runs)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(s.seed, r as u64);
                let t = Instant::now();
                let (best, results) = solve_all(&prepared.instances, kind, &sa, &dec, seed)?;
                let params = solver_params(kind, &sa, &dec, seed);
                Ok(record_for(&prepared, kind, params, best, &results, elapsed_ms(t)))
            })
            .collect::<Result<_, CliError>>()?;
        let wall_ms = elapsed_ms(start);
        let best_energy = per_run.iter().map(|r| r.result.best_energy).min().expect("runs >= 1");
        let oracle = prepared.oracle;
        rows.push(BenchRow {
            n,
            code_id: prepared.id.clone(),
            solver: kind.to_string(),
            runs,
            best_energy,
            oracle_d: oracle,
            ar: oracle.and_then(|d| approximation_ratio(best_energy, d as i64).ok()),
            success_rate: oracle.map(|d| {
                per_run.iter().filter(|r| r.result.best_energy == d as i64).count() as f64 / runs as f64
            }),
            wall_ms,
        });
        records.extend(per_run);
    }

    let mut buf = Vec::new();
    match s.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in &rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Structured => {
            buf = serde_json::to_vec_pretty(&rows).map_err(|e| CliError::Internal(e.to_string()))?;
            buf.push(b'\n');
        }
    }
    match out_path {
        Some(p) => write_file(p, &String::from_utf8_lossy(&buf))?,
        None => out.write_all(&buf)?,
    }
    append_log(s, &records)?;
    Ok(rows)
}
