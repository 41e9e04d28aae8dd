//! Acceptance criteria 1–10. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion fails.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use qdist::annealsim::{gap_scan, ground_space, sweep_anneal_times, AnnealSchedule, SimParams};
use qdist::codes::{palindromic_circulants, pauli_weight, random_code, CodeSpec, StabilizerCode};
use qdist::distance::{best_circulant, min_distance_bruteforce};
use qdist::gf2::BitMatrix;
use qdist::qubo::pipeline::{build_instances, BuildMode};
use qdist::qubo::{
    build_selfdual_qubo, build_weight_qubo, closed_form_aux, to_ising, weight_qubo_for, AuxWidthMode, QuboProblem, Role,
};
use qdist::solvers::{
    solve_decomposed, solve_exact, solve_exact_structured, solve_sa, DecomposeParams, SaParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Numeric outputs, compared across repeated runs.
    fingerprint: Vec<String>,
}

fn bits(v: u64, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((v >> i) & 1) as u8).collect()
}

fn parity(m: u64) -> u64 {
    m % 2
}

/// `G x mod 2` computed column by column.
fn element(code: &StabilizerCode, x: &[u8]) -> Vec<u8> {
    let g = code.normalizer();
    (0..g.rows())
        .map(|r| (0..g.cols()).fold(0u8, |acc, c| acc ^ (u8::from(g.get(r, c)) & x[c])))
        .collect()
}

fn support(c: &[u8]) -> usize {
    let n = c.len() / 2;
    (0..n).filter(|&j| c[j] | c[j + n] == 1).count()
}

/// `true` when `c` lies in the row space of the parity-check matrix.
fn in_stabilizer(code: &StabilizerCode, c: &[u8]) -> bool {
    let h = code.parity_check();
    let stacked = h.vstack(&BitMatrix::from_rows(&[c], c.len()).unwrap()).unwrap();
    stacked.rank() == h.rank()
}

/// Distance by enumerating every `x`, with the logical test done by a rank check.
fn naive_distance(code: &StabilizerCode) -> usize {
    let m = code.n() + code.k();
    (1..1u64 << m)
        .map(|v| element(code, &bits(v, m)))
        .filter(|c| if code.k() == 0 { c.contains(&1) } else { !in_stabilizer(code, c) })
        .map(|c| support(&c))
        .min()
        .expect("nonempty")
}

fn min_energy(q: &QuboProblem) -> i64 {
    solve_exact_structured(q).unwrap().best_energy
}

/// Minimum of `q` over its non-`x` variables with `x` fixed.
///
/// Asserts that auxiliaries of different rows never interact, then minimizes
/// each row's block independently against the all-zero auxiliary state.
fn min_over_aux(q: &QuboProblem, x: &[u8]) -> i64 {
    let roles = q.layout().roles();
    let row_of = |i: usize| match roles[i] {
        Role::T { row, .. } | Role::U { row, .. } | Role::V { row, .. } => Some(row),
        _ => None,
    };
    for &(i, j) in q.coeffs().keys() {
        if let (Some(a), Some(b)) = (row_of(i), row_of(j)) {
            assert_eq!(a, b, "auxiliaries of rows {a} and {b} are coupled");
        }
        assert!(
            matches!(roles[i], Role::X(_)) || row_of(i).is_some(),
            "unexpected role {:?}",
            roles[i]
        );
    }
    let mut z: Vec<u8> = roles.iter().map(|r| if let Role::X(j) = r { x[*j] } else { 0 }).collect();
    let base = q.energy(&z);
    let rows: BTreeSet<usize> = (0..roles.len()).filter_map(row_of).collect();
    let mut total = base;
    for row in rows {
        let idx: Vec<usize> = (0..roles.len()).filter(|&i| row_of(i) == Some(row)).collect();
        // Only terms touching this row's block change when its bits change.
        let terms: Vec<(usize, usize, i64)> = q
            .coeffs()
            .iter()
            .filter(|(&(i, j), _)| idx.contains(&i) || idx.contains(&j))
            .map(|(&(i, j), &c)| (i, j, c))
            .collect();
        let best = (0..1u64 << idx.len())
            .map(|m| {
                for (b, &i) in idx.iter().enumerate() {
                    z[i] = ((m >> b) & 1) as u8;
                }
                terms.iter().map(|&(i, j, c)| c * (z[i] & z[j]) as i64).sum::<i64>()
            })
            .min()
            .unwrap();
        for &i in &idx {
            z[i] = 0;
        }
        total += best;
    }
    total
}

/// 25 random codes with `n + k ≤ 8`, plus every palindromic circulant with `n ≤ 6`.
fn code_suite() -> Vec<(String, CodeSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let pairs: Vec<(usize, usize)> = (1..=8usize)
        .flat_map(|n| (0..n).map(move |k| (n, k)))
        .filter(|&(n, k)| n + k <= 8)
        .collect();
    let mut out = Vec::new();
    for i in 0..25 {
        let (n, k) = pairs[rng.gen_range(0..pairs.len())];
        out.push((format!("random{i}[[{n},{k}]]"), CodeSpec::Stabilizer(random_code(n, k, &mut rng))));
    }
    for n in 1..=6 {
        for c in palindromic_circulants(n, false) {
            let row: String = c.first_row().iter().map(|&b| char::from(b'0' + b)).collect();
            out.push((format!("circ{row}"), CodeSpec::Circulant(c)));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut fp = Vec::new();
    // One row whose a and b count ones in disjoint halves of x.
    let a_row: Vec<u8> = (0..16).map(|j| u8::from(j < 8)).collect();
    let b_row: Vec<u8> = (0..16).map(|j| u8::from(j >= 8)).collect();
    let a = BitMatrix::from_rows(&[a_row], 16).unwrap();
    let b = BitMatrix::from_rows(&[b_row], 16).unwrap();
    let q = build_weight_qubo(&a, &b, 15, AuxWidthMode::Tight);
    for av in 0..=8u64 {
        for bv in 0..=8u64 {
            let (alpha, beta) = (parity(av), parity(bv));
            let lhs = alpha * alpha + beta * beta - alpha * beta;
            let twice_rhs = parity(av) + parity(bv) + parity(av + bv);
            let weight = pauli_weight(&[alpha as u8, beta as u8]).unwrap() as u64;
            let x: Vec<u8> = (0..16).map(|j| u8::from(if j < 8 { j < av } else { j - 8 < bv })).collect();
            let qubo = min_over_aux(&q, &x);
            if 2 * lhs != twice_rhs || weight != lhs || qubo != lhs as i64 {
                failures.push(format!("(a,b)=({av},{bv})"));
            }
            fp.push(format!("{av},{bv}:{lhs}"));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() { "81 pairs".into() } else { format!("mismatch at {failures:?}") },
        fingerprint: fp,
    }
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for (name, spec) in code_suite() {
        let code = spec.stabilizer();
        let m = code.n() + code.k();
        let (a, b) = (code.x_block(), code.z_block());
        let mut builders = vec![
            ("weight/tight", weight_qubo_for(&code, AuxWidthMode::Tight), true),
            ("weight/uniform", weight_qubo_for(&code, AuxWidthMode::Uniform), true),
        ];
        if let Some(g) = spec.graph() {
            builders.push(("selfdual/tight", build_selfdual_qubo(&g, AuxWidthMode::Tight), false));
            builders.push(("selfdual/uniform", build_selfdual_qubo(&g, AuxWidthMode::Uniform), false));
        }
        for v in 0..1u64 << m {
            let x = bits(v, m);
            let w = support(&element(&code, &x)) as i64;
            for (label, q, weight_layout) in &builders {
                checked += 1;
                if min_over_aux(q, &x) != w {
                    failures.push(format!("{name} {label} x={x:?}"));
                }
                if *weight_layout {
                    let z = q.layout().encode(&x, &closed_form_aux(&a, &b, &x), None);
                    if q.energy(&z) != w {
                        failures.push(format!("{name} {label} closed form x={x:?}"));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} (code, builder, x) triples")
        } else {
            format!("{} mismatches, first {:?}", failures.len(), &failures[..failures.len().min(3)])
        },
        fingerprint: vec![checked.to_string()],
    }
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut fp = Vec::new();
    for (name, spec) in code_suite() {
        let code = spec.stabilizer();
        let d = naive_distance(&code);
        let oracle = min_distance_bruteforce(&code).unwrap().d;
        if oracle != d {
            failures.push(format!("{name}: oracle {oracle} vs naive {d}"));
        }
        let mut modes = vec![BuildMode::Penalty, BuildMode::Split];
        if matches!(spec, CodeSpec::Circulant(_)) {
            modes.extend([BuildMode::SelfDual, BuildMode::Circulant]);
        }
        for mode in modes {
            for widths in [AuxWidthMode::Tight, AuxWidthMode::Uniform] {
                let instances = build_instances(&spec, mode, widths).unwrap();
                let best = instances.iter().map(min_energy).min().unwrap();
                fp.push(format!("{name}/{mode}/{widths:?}:{best}"));
                if best != d as i64 {
                    failures.push(format!("{name} {mode} {widths:?}: {best} != {d}"));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} (code, mode, widths) families", fp.len())
        } else {
            format!("{failures:?}")
        },
        fingerprint: fp,
    }
}

fn bit_length(m: usize) -> usize {
    (usize::BITS - m.leading_zeros()) as usize
}

fn ceil_log2(m: usize) -> usize {
    (0..).find(|&r| 1usize << r >= m).unwrap()
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for (name, spec) in code_suite() {
        let code = spec.stabilizer();
        let (n, k) = (code.n(), code.k());
        let (a, b) = (code.x_block(), code.z_block());
        let max_a = (0..n).map(|i| a.row_weight(i)).max().unwrap();
        let max_b = (0..n).map(|i| b.row_weight(i)).max().unwrap();
        let max_ab = (0..n).map(|i| a.row_weight(i) + b.row_weight(i)).max().unwrap();
        for mode in BuildMode::ALL {
            for widths in [AuxWidthMode::Tight, AuxWidthMode::Uniform] {
                let Ok(instances) = build_instances(&spec, mode, widths) else { continue };
                let (st, su, sv) = match (mode, widths) {
                    (BuildMode::SelfDual | BuildMode::Circulant, _) => {
                        let g = spec.graph().unwrap();
                        let max = (0..n).map(|i| g.adjacency().row_weight(i)).max().unwrap();
                        let s = bit_length(max / 2);
                        (0, if widths == AuxWidthMode::Uniform { s.max(1) } else { s }, 0)
                    }
                    (_, AuxWidthMode::Tight) => (bit_length(max_a / 2), bit_length(max_b / 2), bit_length(max_ab / 2)),
                    (_, AuxWidthMode::Uniform) => {
                        let s = bit_length(max_a.max(max_b) / 2).max(1);
                        (s, s, 2 * s)
                    }
                };
                let r = match mode {
                    BuildMode::Penalty if k > 0 => ceil_log2(2 * k).max(1),
                    BuildMode::Penalty | BuildMode::SelfDual => ceil_log2(n),
                    BuildMode::Split | BuildMode::Circulant => 0,
                };
                let formula = n + k + n * (st + su + sv) + r;
                for q in &instances {
                    count += 1;
                    let built = q.num_vars() + q.layout().fixed().len();
                    if built != formula || q.layout().formula_count() != formula {
                        failures.push(format!("{name} {mode} {widths:?}: {built} != {formula}"));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() { format!("{count} instances") } else { format!("{failures:?}") },
        fingerprint: vec![count.to_string()],
    }
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut fp = Vec::new();
    for n in 5..=16 {
        let (code, d) = best_circulant(n).unwrap();
        let spec = CodeSpec::Circulant(code);
        let q = build_instances(&spec, BuildMode::Circulant, AuxWidthMode::Tight).unwrap().remove(0);
        let r = solve_sa(&q, &SaParams { seed: 1000 + n as u64, ..SaParams::default() }).unwrap();
        let hits = r.restart_energies.iter().filter(|&&e| e == d as i64).count();
        if r.restart_energies.len() != 40 || hits == 0 {
            failures.push(format!("n={n}: best {} vs d={d}", r.best_energy));
        }
        fp.push(format!("{n}:{:?}:{:?}", r.restart_energies, r.best_assignment));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() { "n = 5..16 all reach d".into() } else { format!("{failures:?}") },
        fingerprint: fp,
    }
}

fn random_qubo(rng: &mut ChaCha8Rng, n: usize) -> QuboProblem {
    let density = rng.gen_range(0.1..0.6);
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push(((i, i), rng.gen_range(-20..=20)));
        for j in i + 1..n {
            if rng.gen_bool(density) {
                entries.push(((i, j), rng.gen_range(-20..=20)));
            }
        }
    }
    QuboProblem::from_entries(n, entries, rng.gen_range(-5..=5)).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut failures = Vec::new();
    let mut fp = Vec::new();
    for i in 0..20 {
        let n = 8 + (i * 18) / 19; // 8..=26
        let q = random_qubo(&mut rng, n);
        let exact = solve_exact(&q).unwrap().best_energy;
        let p = DecomposeParams {
            exact_threshold: 26,
            seed: rng.gen(),
            ..DecomposeParams::default()
        };
        let r = solve_decomposed(&q, &p).unwrap();
        let monotone = r.trace.windows(2).all(|w| w[1].energy <= w[0].energy);
        if r.best_energy != exact || !monotone {
            failures.push(format!("n={n}: decomposed {} exact {exact} monotone {monotone}", r.best_energy));
        }
        fp.push(format!("{n}:{}:{:?}", r.best_energy, r.best_assignment));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() { "20 problems, n = 8..26".into() } else { format!("{failures:?}") },
        fingerprint: fp,
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut failures = 0usize;
    let mut checked = 0usize;
    for i in 0..50 {
        let n = 1 + i % 12;
        let q = random_qubo(&mut rng, n);
        let ising = to_ising(&q);
        for v in 0..1u64 << n {
            let x = bits(v, n);
            let sigma: Vec<i8> = x.iter().map(|&b| 2 * b as i8 - 1).collect();
            checked += 1;
            if ising.energy(&sigma) != q.energy(&x) as f64 {
                failures += 1;
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{checked} assignments, {failures} mismatches"),
        fingerprint: vec![checked.to_string()],
    }
}

const TA_GRID: [f64; 9] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0];

fn small_circulant_isings() -> Vec<(usize, usize, QuboProblem)> {
    (3..=5)
        .map(|n| {
            let (code, d) = best_circulant(n).unwrap();
            let spec = CodeSpec::Circulant(code);
            (n, d, build_instances(&spec, BuildMode::Circulant, AuxWidthMode::Tight).unwrap().remove(0))
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut fp = Vec::new();
    let schedule = AnnealSchedule::linear();
    let single = qdist::qubo::IsingProblem {
        h: vec![1.0],
        j: Default::default(),
        offset: 0.0,
    };
    let scan = gap_scan(&single, &schedule, 0.01).unwrap();
    let expected = 0.5f64.sqrt();
    if (scan.g_min - expected).abs() > 1e-6 || (scan.gamma_star - 0.5).abs() > 1e-6 {
        failures.push(format!("single qubit g_min {} at {}", scan.g_min, scan.gamma_star));
    }
    fp.push(format!("{:.12}", scan.g_min));
    let mut summary = Vec::new();
    for (n, _, q) in small_circulant_isings() {
        let ising = to_ising(&q);
        if ising.num_spins() > 13 {
            failures.push(format!("n={n}: {} spins", ising.num_spins()));
            continue;
        }
        let results = sweep_anneal_times(&ising, &schedule, &TA_GRID, &SimParams::new(1.0)).unwrap();
        let reached = results.iter().find(|r| r.success_probability >= 0.9).map(|r| r.anneal_time);
        let last = results.last().unwrap().success_probability;
        let drift = results.iter().map(|r| r.max_norm_drift.max((r.final_state_norm - 1.0).abs())).fold(0.0, f64::max);
        if reached.is_none() || last < 0.99 || drift > 1e-6 {
            failures.push(format!("n={n}: t_a@0.9 {reached:?}, P_s(500) {last}, drift {drift:e}"));
        }
        summary.push(format!("n={n} t_a@0.9={}", reached.unwrap_or(f64::NAN)));
        fp.extend(results.iter().map(|r| format!("{n}:{}:{:e}", r.anneal_time, r.success_probability)));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() { summary.join(", ") } else { format!("{failures:?}") },
        fingerprint: fp,
    }
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (n, d, q) in small_circulant_isings() {
        let code = CodeSpec::Circulant(best_circulant(n).unwrap().0).stabilizer();
        let report = min_distance_bruteforce(&code).unwrap();
        let ising = to_ising(&q);
        let ground = ground_space(&ising).unwrap();
        if ground.energy != d as f64 {
            failures.push(format!("n={n}: ground energy {} != d {d}", ground.energy));
        }
        let layout = q.layout();
        let decoded: Vec<Vec<u8>> = ground
            .assignments(ising.num_spins())
            .iter()
            .map(|z| layout.decode(z).x)
            .collect();
        // The clamp x_0 = 1 keeps exactly the oracle minimizers with x_0 = 1.
        let expected: BTreeSet<Vec<u8>> = report.coefficients.iter().filter(|x| x[0] == 1).cloned().collect();
        let got: BTreeSet<Vec<u8>> = decoded.iter().cloned().collect();
        for x in &decoded {
            if support(&element(&code, x)) != d {
                failures.push(format!("n={n}: member decodes to weight-{} x={x:?}", support(&element(&code, x))));
            }
        }
        if got != expected {
            failures.push(format!("n={n}: decoded set {got:?} != oracle {expected:?}"));
        }
        // Dimension: each minimizer contributes one ground state per optimal auxiliary setting.
        let aux: Vec<usize> = (0..q.num_vars()).filter(|&i| !matches!(layout.roles()[i], Role::X(_))).collect();
        let multiplicity: usize = expected
            .iter()
            .map(|x| {
                let mut z: Vec<u8> = layout.roles().iter().map(|r| if let Role::X(j) = r { x[*j] } else { 0 }).collect();
                (0..1u64 << aux.len())
                    .filter(|&m| {
                        for (b, &i) in aux.iter().enumerate() {
                            z[i] = ((m >> b) & 1) as u8;
                        }
                        q.energy(&z) == d as i64
                    })
                    .count()
            })
            .sum();
        if multiplicity != ground.dimension() {
            failures.push(format!("n={n}: dimension {} != {multiplicity}", ground.dimension()));
        }
        summary.push(format!("n={n} D={} codewords={}", ground.dimension(), expected.len()));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() { summary.join(", ") } else { format!("{failures:?}") },
        fingerprint: summary,
    }
}

fn cli_solve_record() -> serde_json::Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/five_qubit.code");
    let mut out = Vec::new();
    let code = qdist::cli::run(["qdist", "solve", path, "--solver", "sa", "--seed", "42", "--sweeps", "200"], &mut out);
    assert_eq!(code, 0);
    let mut v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let obj = v.as_object_mut().unwrap();
    obj.remove("timestamp_ms");
    obj.remove("wall_ms");
    v
}

fn criterion_10(first: &[(usize, Vec<String>)]) -> Outcome {
    let mut differing = Vec::new();
    for (id, fp) in first {
        let again = match id {
            3 => criterion_3().fingerprint,
            5 => criterion_5().fingerprint,
            6 => criterion_6().fingerprint,
            8 => criterion_8().fingerprint,
            9 => criterion_9().fingerprint,
            _ => continue,
        };
        if &again != fp {
            differing.push(*id);
        }
    }
    let cli_same = cli_solve_record() == cli_solve_record();
    Outcome {
        pass: differing.is_empty() && cli_same,
        detail: format!("reran criteria 3, 5, 6, 8, 9 and a seeded CLI solve; differing {differing:?}, cli identical {cli_same}"),
        fingerprint: Vec::new(),
    }
}

#[test]
fn acceptance() {
    type Criterion = fn() -> Outcome;
    let criteria: [(usize, Criterion, Duration); 9] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(60)),
        (3, criterion_3, Duration::from_secs(300)),
        (4, criterion_4, Duration::from_secs(300)),
        (5, criterion_5, Duration::from_secs(600)),
        (6, criterion_6, Duration::from_secs(300)),
        (7, criterion_7, Duration::from_secs(60)),
        (8, criterion_8, Duration::from_secs(1800)),
        (9, criterion_9, Duration::from_secs(300)),
    ];
    let mut all_pass = true;
    let mut fingerprints = Vec::new();
    let mut report = |id: usize, o: Outcome, elapsed: Duration, limit: Option<Duration>| {
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = o.pass && in_time;
        all_pass &= pass;
        let timing = if in_time { String::new() } else { format!(", exceeded {:?}", limit.unwrap()) };
        // Written to the raw handle so the line survives output capture.
        let _ = writeln!(
            std::io::stdout(),
            "criterion {id:>2}: {} ({}; {:.2} s{timing})",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
        o.fingerprint
    };
    for (id, f, limit) in criteria {
        let start = Instant::now();
        let o = f();
        let fp = report(id, o, start.elapsed(), Some(limit));
        fingerprints.push((id, fp));
    }
    let start = Instant::now();
    let o = criterion_10(&fingerprints);
    report(10, o, start.elapsed(), None);
    assert!(all_pass, "at least one acceptance criterion failed");
}
