//! Seeded random generators for polynomials, tuples, and kernel elements.
//! Every suite that samples goes through here so runs reproduce from a seed.

use crate::algebra::{coeff_int, AlgebraContext, Coefficient, GradientVec, Poly, Word};
use crate::calculus::{commutator_sum, cyclic_gradient};
use crate::algebra::commutator;
use num_traits::Zero;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic sampler over `K<X1..Xn>`: uniform words of degree at most
/// `max_degree`, integer coefficients uniform in `[-coeff_bound, coeff_bound]`
/// excluding zero, at most `max_terms` terms per polynomial.
pub struct Sampler {
    ctx: AlgebraContext,
    max_degree: usize,
    max_terms: usize,
    coeff_bound: i64,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(ctx: AlgebraContext, max_degree: usize, seed: u64) -> Self {
        Sampler {
            ctx,
            max_degree,
            max_terms: 6,
            coeff_bound: 5,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms.max(1);
        self
    }

    pub fn with_coeff_bound(mut self, bound: i64) -> Self {
        self.coeff_bound = bound.max(1);
        self
    }

    pub fn context(&self) -> AlgebraContext {
        self.ctx
    }

    pub fn word_of_degree(&mut self, degree: usize) -> Word {
        let letters: Vec<u32> = (0..degree)
            .map(|_| self.rng.random_range(1..=self.ctx.arity()))
            .collect();
        Word::new(letters)
    }

    pub fn word(&mut self) -> Word {
        let degree = self.rng.random_range(0..=self.max_degree);
        self.word_of_degree(degree)
    }

    /// Nonzero integer coefficient in `[-coeff_bound, coeff_bound]`.
    pub fn coefficient(&mut self) -> Coefficient {
        loop {
            let value = self.rng.random_range(-self.coeff_bound..=self.coeff_bound);
            if value != 0 {
                return coeff_int(value);
            }
        }
    }

    pub fn poly(&mut self) -> Poly {
        let term_count = self.rng.random_range(0..=self.max_terms);
        let mut out = self.ctx.zero();
        for _ in 0..term_count {
            let word = self.word();
            let value = self.coefficient();
            out.add_term(word, value);
        }
        out
    }

    pub fn poly_without_constant(&mut self) -> Poly {
        let p = self.poly();
        &p - &self.ctx.constant(p.constant_term())
    }

    pub fn homogeneous_poly(&mut self, degree: usize) -> Poly {
        let term_count = self.rng.random_range(1..=self.max_terms);
        let mut out = self.ctx.zero();
        for _ in 0..term_count {
            let word = self.word_of_degree(degree);
            let value = self.coefficient();
            out.add_term(word, value);
        }
        out
    }

    /// Arbitrary tuple, usually not a gradient.
    pub fn tuple(&mut self) -> GradientVec {
        let entries = (0..self.ctx.arity()).map(|_| self.poly()).collect();
        GradientVec::new(entries).expect("sampled tuple matches context")
    }

    /// The cyclic gradient of a random polynomial; always in the kernel of
    /// the commutator sum.
    pub fn exact_gradient(&mut self) -> GradientVec {
        let v = cyclic_gradient(&self.poly());
        debug_assert!(commutator_sum(&v).is_zero());
        v
    }

    /// `c·1 + Σk [Xk, Rk]` for random `Rk`: a random element with vanishing
    /// cyclic gradient.
    pub fn kernel_element(&mut self) -> Poly {
        let mut out = if self.rng.random_range(0..2) == 0 {
            let value = self.coefficient();
            self.ctx.constant(value)
        } else {
            self.ctx.zero()
        };
        for j in self.ctx.indices() {
            let r = self.poly();
            out = &out + &commutator(&self.ctx.var(j), &r);
        }
        out
    }

    /// Uniform float in `[-1, 1]`.
    pub fn unit_float(&mut self) -> f64 {
        self.rng.random_range(-1.0..=1.0)
    }

    pub fn sub_seed(&mut self) -> u64 {
        self.rng.random()
    }
}

/// True when the coefficient is an integer (used by printers and tests).
pub fn is_integer(c: &Coefficient) -> bool {
    c.denom().is_one() || c.is_zero()
}

use num_traits::One;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_reproducible_from_seed() {
        let ctx = AlgebraContext::new(3).unwrap();
        let mut a = Sampler::new(ctx, 5, 99);
        let mut b = Sampler::new(ctx, 5, 99);
        for _ in 0..20 {
            assert_eq!(a.poly(), b.poly());
        }
    }

    #[test]
    fn words_respect_degree_bound_and_alphabet() {
        let ctx = AlgebraContext::new(2).unwrap();
        let mut sampler = Sampler::new(ctx, 4, 7);
        for _ in 0..200 {
            let w = sampler.word();
            assert!(w.degree() <= 4);
            assert!(w.max_index() <= 2);
        }
    }

    #[test]
    fn kernel_elements_have_zero_symmetrization() {
        let ctx = AlgebraContext::new(2).unwrap();
        let mut sampler = Sampler::new(ctx, 4, 11);
        for _ in 0..50 {
            let p = sampler.kernel_element();
            assert!(crate::calculus::cyclic_symmetrize(&p).is_zero());
        }
    }

    #[test]
    fn poly_without_constant_has_no_degree_zero_part() {
        let ctx = AlgebraContext::new(2).unwrap();
        let mut sampler = Sampler::new(ctx, 3, 13);
        for _ in 0..50 {
            assert!(sampler.poly_without_constant().constant_term().is_zero());
        }
    }
}
