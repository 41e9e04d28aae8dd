use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdist::codes::{pauli_weight, random_code};
use qdist::gf2::BitMatrix;
use qdist::qubo::io::{parse_text, to_text};
use qdist::qubo::{
    add_logical_penalty, clamp, closed_form_aux, to_ising, weight_qubo_for, AuxWidthMode, QuboProblem, Role,
};
use qdist::solvers::{solve_exact, solve_sa, SaParams};

fn random_qubo(seed: u64, n: usize) -> QuboProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j || rng.gen_bool(0.4) {
                entries.push(((i, j), rng.gen_range(-9..=9)));
            }
        }
    }
    QuboProblem::from_entries(n, entries, rng.gen_range(-3..=3)).unwrap()
}

fn widths(uniform: bool) -> AuxWidthMode {
    if uniform {
        AuxWidthMode::Uniform
    } else {
        AuxWidthMode::Tight
    }
}

/// `(n, k)` with `k < n` and `n + k ≤ 10`.
fn code_shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=7).prop_flat_map(|n| (Just(n), 0..n.min(11 - n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity_identity(a in 0u64..1000, b in 0u64..1000) {
        let (alpha, beta) = (a % 2, b % 2);
        prop_assert_eq!(2 * (alpha + beta - alpha * beta), a % 2 + b % 2 + (a + b) % 2);
        prop_assert_eq!(pauli_weight(&[alpha as u8, beta as u8]).unwrap() as u64, alpha + beta - alpha * beta);
    }

    #[test]
    fn closed_form_aux_is_a_minimum((n, k) in code_shape(), seed: u64, uniform: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(n, k, &mut rng);
        let q = weight_qubo_for(&code, widths(uniform));
        let (a, b) = (code.x_block(), code.z_block());
        let x: Vec<u8> = (0..n + k).map(|_| rng.gen_range(0..2)).collect();
        let w = code.weight_of_element(&x).unwrap() as i64;
        let layout = q.layout();
        prop_assert_eq!(q.energy(&layout.encode(&x, &closed_form_aux(&a, &b, &x), None)), w);
        // Any other auxiliary setting costs at least the weight.
        let aux: Vec<u8> = (0..q.num_vars()).map(|_| rng.gen_range(0..2)).collect();
        let z: Vec<u8> = layout
            .roles()
            .iter()
            .zip(&aux)
            .map(|(r, &bit)| if let Role::X(j) = r { x[*j] } else { bit })
            .collect();
        prop_assert!(q.energy(&z) >= w);
    }

    #[test]
    fn logical_penalty_separates((n, k) in code_shape().prop_filter("logical qubits", |s| s.1 > 0), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(n, k, &mut rng);
        let q = add_logical_penalty(&weight_qubo_for(&code, AuxWidthMode::Tight), n, k).unwrap();
        let mut z: Vec<u8> = (0..q.num_vars()).map(|_| rng.gen_range(0..2)).collect();
        for (i, r) in q.layout().roles().iter().enumerate() {
            if matches!(r, Role::X(j) if *j < 2 * k) {
                z[i] = 0;
            }
        }
        // Stabilizer-only coefficients cost more than any possible distance.
        prop_assert!(q.energy(&z) > n as i64);

        // A logical x with matching counter and closed-form auxiliaries costs its weight.
        let mut x: Vec<u8> = (0..n + k).map(|_| rng.gen_range(0..2)).collect();
        x[rng.gen_range(0..2 * k)] = 1;
        let m = x[..2 * k].iter().map(|&b| b as u64).sum::<u64>();
        let aux = closed_form_aux(&code.x_block(), &code.z_block(), &x);
        let z = q.layout().encode(&x, &aux, Some(m));
        prop_assert_eq!(q.energy(&z), code.weight_of_element(&x).unwrap() as i64);
    }

    #[test]
    fn clamp_preserves_energy(seed: u64, n in 2usize..12, mask: u16, values: u16) {
        let q = random_qubo(seed, n);
        let fixed: Vec<(usize, u8)> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| (i, (values >> i & 1) as u8)).collect();
        let c = clamp(&q, &fixed).unwrap();
        prop_assert_eq!(c.num_vars(), n - fixed.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let free: Vec<u8> = (0..c.num_vars()).map(|_| rng.gen_range(0..2)).collect();
        let mut it = free.iter();
        let full: Vec<u8> = (0..n)
            .map(|i| fixed.iter().find(|f| f.0 == i).map(|f| f.1).unwrap_or_else(|| *it.next().unwrap()))
            .collect();
        prop_assert_eq!(c.energy(&free), q.energy(&full));
    }

    #[test]
    fn ising_energy_matches(seed: u64, n in 1usize..16, state: u16) {
        let q = random_qubo(seed, n);
        let x: Vec<u8> = (0..n).map(|i| (state >> i & 1) as u8).collect();
        let sigma: Vec<i8> = x.iter().map(|&b| 2 * b as i8 - 1).collect();
        let ising = to_ising(&q);
        prop_assert_eq!(ising.energy(&sigma), q.energy(&x) as f64);
        prop_assert_eq!(ising.diagonal_energy(state as u64 & ((1 << n) - 1)) + ising.offset, q.energy(&x) as f64);
        prop_assert_eq!(qdist::qubo::IsingProblem::parse(&ising.to_text()).unwrap(), ising);
    }

    #[test]
    fn qubo_text_round_trip((n, k) in code_shape(), seed: u64, uniform: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = weight_qubo_for(&random_code(n, k, &mut rng), widths(uniform));
        prop_assert_eq!(parse_text(&to_text(&q)).unwrap(), q.clone());
        let anonymous = random_qubo(seed, 1 + n);
        prop_assert_eq!(parse_text(&to_text(&anonymous)).unwrap(), anonymous);
    }

    #[test]
    fn sa_never_beats_exact(seed: u64, n in 1usize..14) {
        let q = random_qubo(seed, n);
        let exact = solve_exact(&q).unwrap();
        let sa = solve_sa(&q, &SaParams { sweeps: 50, restarts: 4, seed, ..SaParams::default() }).unwrap();
        prop_assert!(sa.best_energy >= exact.best_energy);
        prop_assert_eq!(q.energy(&sa.best_assignment), sa.best_energy);
        prop_assert_eq!(q.energy(&exact.best_assignment), exact.best_energy);
    }

    #[test]
    fn rank_nullity(rows in 1usize..9, cols in 1usize..80, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = BitMatrix::from_fn(rows, cols, |_, _| rng.gen_bool(0.3));
        let ker = m.kernel_basis();
        prop_assert_eq!(m.rank() + ker.cols(), cols);
        prop_assert!(m.mul(&ker).unwrap().is_zero());
        prop_assert_eq!(ker.rank(), ker.cols());
    }
}

