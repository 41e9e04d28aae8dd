//! Symbolic expansion of sums of products of affine binary forms.

use std::collections::BTreeMap;

/// `Σ c_i z_i + constant` over binary variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearForm {
    terms: BTreeMap<usize, i64>,
    constant: i64,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn add_term(&mut self, var: usize, coeff: i64) -> &mut Self {
        let e = self.terms.entry(var).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.terms.remove(&var);
        }
        self
    }

    pub fn add_constant(&mut self, c: i64) -> &mut Self {
        self.constant += c;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.terms.iter().map(|(&v, &c)| (v, c))
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn eval(&self, z: &[u8]) -> i64 {
        self.constant + self.terms().map(|(v, c)| c * z[v] as i64).sum::<i64>()
    }
}

/// Accumulates a quadratic polynomial in binary variables (`z² = z`).
#[derive(Debug, Clone, Default)]
pub struct QuadBuilder {
    coeffs: BTreeMap<(usize, usize), i64>,
    constant: i64,
}

impl QuadBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_pair(&mut self, i: usize, j: usize, c: i64) {
        if c != 0 {
            *self.coeffs.entry((i.min(j), i.max(j))).or_insert(0) += c;
        }
    }

    pub fn add_constant(&mut self, c: i64) {
        self.constant += c;
    }

    pub fn add_linear(&mut self, form: &LinearForm, weight: i64) {
        for (v, c) in form.terms() {
            self.add_pair(v, v, weight * c);
        }
        self.constant += weight * form.constant_term();
    }

    /// Adds `weight · l1 · l2`.
    pub fn add_product(&mut self, l1: &LinearForm, l2: &LinearForm, weight: i64) {
        for (a, ca) in l1.terms() {
            for (b, cb) in l2.terms() {
                self.add_pair(a, b, weight * ca * cb);
            }
        }
        let mut cross = LinearForm::new();
        for (a, ca) in l1.terms() {
            cross.add_term(a, ca * l2.constant_term());
        }
        for (b, cb) in l2.terms() {
            cross.add_term(b, cb * l1.constant_term());
        }
        self.add_linear(&cross, weight);
        self.constant += weight * l1.constant_term() * l2.constant_term();
    }

    pub fn add_square(&mut self, l: &LinearForm, weight: i64) {
        self.add_product(l, l, weight);
    }

    /// Divides every coefficient by `divisor`, returning `None` if any is not divisible.
    pub fn divide_exact(mut self, divisor: i64) -> Option<Self> {
        for v in self.coeffs.values_mut() {
            if *v % divisor != 0 {
                return None;
            }
            *v /= divisor;
        }
        if self.constant % divisor != 0 {
            return None;
        }
        self.constant /= divisor;
        Some(self)
    }

    pub fn into_parts(self) -> (BTreeMap<(usize, usize), i64>, i64) {
        (self.coeffs, self.constant)
    }

    pub fn eval(&self, z: &[u8]) -> i64 {
        self.constant
            + self
                .coeffs
                .iter()
                .map(|(&(i, j), &c)| c * (z[i] & z[j]) as i64)
                .sum::<i64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_form(rng: &mut impl Rng, vars: usize) -> LinearForm {
        let mut f = LinearForm::constant(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..5) {
            f.add_term(rng.gen_range(0..vars), rng.gen_range(-4..=4));
        }
        f
    }

    #[test]
    fn product_expansion_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (l1, l2) = (random_form(&mut rng, 5), random_form(&mut rng, 5));
            let w = rng.gen_range(-3..=3);
            let mut b = QuadBuilder::new();
            b.add_product(&l1, &l2, w);
            for v in 0..32u32 {
                let z: Vec<u8> = (0..5).map(|i| ((v >> i) & 1) as u8).collect();
                assert_eq!(b.eval(&z), w * l1.eval(&z) * l2.eval(&z));
            }
        }
    }

    #[test]
    fn divide_exact_rejects_odd_coefficients() {
        let mut b = QuadBuilder::new();
        b.add_pair(0, 1, 3);
        assert!(b.clone().divide_exact(2).is_none());
        b.add_pair(0, 1, 1);
        assert_eq!(b.divide_exact(2).unwrap().into_parts().0[&(0, 1)], 2);
    }
}
