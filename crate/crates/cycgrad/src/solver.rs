//! Decision procedures and constructive inverses for the gradient problem:
//! certify whether a tuple is a cyclic gradient (and return a potential),
//! test membership in the kernel of the gradient, decompose kernel elements
//! into a constant plus commutators, and replay the exact-sequence argument
//! on random inputs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraContext, Coefficient, GradientVec, Poly, Word};
use crate::calculus::{
    commutator_sum, cyclic_derivative, cyclic_gradient, cyclic_symmetrize, number_operator,
};
use crate::sampling::Sampler;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("the empty word has no cyclic class")]
    EmptyWord,
    #[error("tuple is not a cyclic gradient; commutator sum is nonzero")]
    Obstruction { obstruction: Poly },
    #[error("polynomial is not in the kernel of the cyclic gradient")]
    NotInKernel { symmetrization: Poly },
}

/// Canonical label of a cyclic class: the lexicographically minimal rotation
/// together with the number of distinct rotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicClassKey {
    representative: Word,
    period: usize,
}

impl CyclicClassKey {
    pub fn representative(&self) -> &Word {
        &self.representative
    }

    pub fn period(&self) -> usize {
        self.period
    }
}

/// Minimal rotation and period of a nonempty word, by brute force over all
/// rotations. Words stay short at this scale; a linear-time minimal-rotation
/// algorithm would change nothing observable.
pub fn canonical_rotation(word: &Word) -> Result<CyclicClassKey, SolverError> {
    if word.is_empty() {
        return Err(SolverError::EmptyWord);
    }
    let degree = word.degree();
    let mut representative = word.clone();
    let mut distinct = 0usize;
    for shift in 0..degree {
        let rotation = word.rotated_left(shift);
        if rotation == *word {
            distinct += 1; // counts shifts fixing the word; degree / count = period
        }
        if rotation < representative {
            representative = rotation;
        }
    }
    Ok(CyclicClassKey {
        representative,
        period: degree / distinct,
    })
}

/// Membership in the cyclic subspace: no constant term, and coefficients
/// constant along every rotation orbit.
pub fn is_cyclic(p: &Poly) -> bool {
    if !p.constant_term().is_zero() {
        return false;
    }
    p.terms().all(|(word, value)| {
        word.is_empty() || p.coefficient(&word.rotated_left(1)) == *value
    })
}

/// Outcome of the gradient test. The obstruction is the commutator sum of
/// the input tuple; it vanishes exactly when a potential exists, and then
/// the potential's cyclic gradient reproduces the tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientCertificate {
    pub obstruction: Poly,
    pub potential: Option<Poly>,
}

impl GradientCertificate {
    pub fn is_gradient(&self) -> bool {
        self.potential.is_some()
    }
}

/// Decides whether the tuple is a cyclic gradient by testing the commutator
/// sum, and on success reconstructs a potential.
///
/// On the affirmative path the two redundant characterizations — `Σ Xj·Pj`
/// lies in the cyclic subspace, and `δk(Σ Xj·Pj) = (N+I)Pk` — are asserted
/// as internal consistency checks; a violation is a bug, not an input state.
pub fn check_gradient(v: &GradientVec) -> GradientCertificate {
    let obstruction = commutator_sum(v);
    if !obstruction.is_zero() {
        return GradientCertificate {
            obstruction,
            potential: None,
        };
    }
    let ctx = v.context();
    let weighted = weighted_sum(v);
    assert!(
        is_cyclic(&weighted),
        "internal consistency: commutator sum vanishes but Σ Xj·Pj is not cyclic"
    );
    for k in ctx.indices() {
        let lhs = cyclic_derivative(k, &weighted);
        let rhs = &number_operator(v.entry(k)) + v.entry(k);
        assert!(
            lhs == rhs,
            "internal consistency: δ{k}(Σ Xj·Pj) differs from (N+I)P{k}"
        );
    }
    let potential = anti_gradient(v).expect("obstruction already verified zero");
    GradientCertificate {
        obstruction,
        potential: Some(potential),
    }
}

/// `Σj Xj · Pj`.
fn weighted_sum(v: &GradientVec) -> Poly {
    let ctx = v.context();
    let mut out = ctx.zero();
    for j in ctx.indices() {
        out = &out + &(&ctx.var(j) * v.entry(j));
    }
    out
}

/// Reconstructs a potential for a tuple with vanishing commutator sum:
/// each degree-d homogeneous component of `Σ Xj·Pj` is divided by d.
///
/// The result is the cyclically balanced potential — the canonical section
/// of the exact sequence; potentials are unique only modulo the kernel of
/// the gradient.
pub fn anti_gradient(v: &GradientVec) -> Result<Poly, SolverError> {
    let obstruction = commutator_sum(v);
    if !obstruction.is_zero() {
        return Err(SolverError::Obstruction { obstruction });
    }
    let weighted = weighted_sum(v);
    let mut potential = v.context().zero();
    for degree in 1..=weighted.max_degree() {
        let inverse = Coefficient::new(BigInt::from(1), BigInt::from(degree));
        potential = &potential + &weighted.homogeneous_component(degree).scaled(&inverse);
    }
    debug_assert!(potential.constant_term().is_zero());
    debug_assert!(cyclic_gradient(&potential) == *v);
    Ok(potential)
}

/// Membership in the kernel of the cyclic gradient, decided through the
/// symmetrization `C p = 0` and cross-checked against `δj p = 0` for all j.
pub fn in_kernel(p: &Poly) -> bool {
    let by_symmetrization = cyclic_symmetrize(p).is_zero();
    let by_gradient = cyclic_gradient(p).is_zero();
    assert!(
        by_symmetrization == by_gradient,
        "internal consistency: Ker C and Ker δ disagree"
    );
    by_symmetrization
}

/// Witness that a kernel element is a constant plus commutators:
/// `input = constant·1 + Σk [Xk, Qk]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDecomposition {
    pub constant: Coefficient,
    pub commutants: Vec<Poly>,
}

impl KernelDecomposition {
    pub fn arity(&self) -> u32 {
        self.commutants.len() as u32
    }

    /// `constant·1 + Σk [Xk, Qk]`; must reproduce the decomposed input.
    pub fn reassemble(&self) -> Poly {
        let ctx = self.commutants[0].context();
        let mut out = ctx.constant(self.constant.clone());
        for j in ctx.indices() {
            out = &out + &crate::algebra::commutator(&ctx.var(j), &self.commutants[(j - 1) as usize]);
        }
        out
    }
}

/// Decomposes a kernel element as `c·1 + Σk [Xk, Qk]`.
///
/// Within each cyclic class the coefficients sum to zero, so each word `w`
/// rewrites against the canonical representative `u`: walking the rotation
/// orbit from `u` to `w` by moving the first letter to the back, every step
/// through `Xa·v` contributes `-c_w·v` to `Qa`. The walk order is fixed, so
/// the witness is deterministic.
pub fn kernel_decompose(p: &Poly) -> Result<KernelDecomposition, SolverError> {
    let symmetrization = cyclic_symmetrize(p);
    if !symmetrization.is_zero() {
        return Err(SolverError::NotInKernel { symmetrization });
    }
    let ctx = p.context();
    let mut commutants: Vec<Poly> = (0..ctx.arity()).map(|_| ctx.zero()).collect();

    let mut classes: BTreeMap<Word, Vec<(&Word, &Coefficient)>> = BTreeMap::new();
    for (word, value) in p.terms() {
        if word.is_empty() {
            continue;
        }
        let key = canonical_rotation(word).expect("nonempty by filter");
        classes.entry(key.representative).or_default().push((word, value));
    }

    for (representative, members) in classes {
        debug_assert!(
            members
                .iter()
                .fold(Coefficient::zero(), |acc, (_, c)| acc + *c)
                .is_zero(),
            "class coefficient sum must vanish in the kernel"
        );
        for (word, value) in members {
            let mut current = representative.clone();
            let mut steps = 0usize;
            while current != *word {
                let head = current.indices()[0];
                let tail = current.rotated_left(1);
                let tail_word = Word::new(tail.indices()[..tail.degree() - 1].to_vec());
                // current = X_head · tail_word, and rotating sends it to
                // tail_word · X_head; the step difference is -[X_head, tail_word].
                commutants[(head - 1) as usize]
                    .add_term(tail_word, -value.clone());
                current = tail;
                steps += 1;
                assert!(
                    steps <= word.degree(),
                    "rotation walk failed to reach {word} from {representative}"
                );
            }
        }
    }

    let decomposition = KernelDecomposition {
        constant: p.constant_term(),
        commutants,
    };
    debug_assert!(decomposition.reassemble() == *p);
    Ok(decomposition)
}

/// Per-check tally inside an [`ExactnessReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passes: u64,
    pub failures: u64,
}

/// Randomized replay of the exact sequence
/// `0 → [K,K] → K → (K)^n → K`: the gradient of anything dies under the
/// commutator sum, kernel elements decompose into commutators, and tuples
/// killed by the commutator sum are reproduced from their reconstructed
/// potential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    pub arity: u32,
    pub trials: u64,
    pub max_degree: usize,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl ExactnessReport {
    pub fn total_failures(&self) -> u64 {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.total_failures() == 0
    }
}

pub fn exactness_witness(
    ctx: AlgebraContext,
    trials: u64,
    max_degree: usize,
    seed: u64,
) -> ExactnessReport {
    let mut sampler = Sampler::new(ctx, max_degree.max(1), seed);
    let mut theta_after_gradient = CheckOutcome {
        name: "theta-after-gradient".into(),
        passes: 0,
        failures: 0,
    };
    let mut kernel_decomposition = CheckOutcome {
        name: "kernel-decomposition".into(),
        passes: 0,
        failures: 0,
    };
    let mut anti_gradient_reproduction = CheckOutcome {
        name: "anti-gradient-reproduction".into(),
        passes: 0,
        failures: 0,
    };

    for _ in 0..trials {
        // (a) the composite θ∘δ vanishes.
        let p = sampler.poly();
        if commutator_sum(&cyclic_gradient(&p)).is_zero() {
            theta_after_gradient.passes += 1;
        } else {
            theta_after_gradient.failures += 1;
        }

        // (b) kernel elements decompose and reassemble exactly.
        let k = sampler.kernel_element();
        let ok = in_kernel(&k)
            && kernel_decompose(&k)
                .map(|d| d.reassemble() == k)
                .unwrap_or(false);
        if ok {
            kernel_decomposition.passes += 1;
        } else {
            kernel_decomposition.failures += 1;
        }

        // (c) tuples in the kernel of the commutator sum — gradients plus
        // gradient perturbations — are reproduced from their potential.
        let base = sampler.exact_gradient();
        let perturbation = sampler.exact_gradient();
        let scale = sampler.coefficient();
        let entries: Vec<Poly> = base
            .iter()
            .zip(perturbation.iter())
            .map(|(a, b)| a + &b.scaled(&scale))
            .collect();
        let tuple = GradientVec::new(entries).expect("entrywise sum keeps arity");
        let ok = match anti_gradient(&tuple) {
            Ok(potential) => cyclic_gradient(&potential) == tuple,
            Err(_) => false,
        };
        if ok {
            anti_gradient_reproduction.passes += 1;
        } else {
            anti_gradient_reproduction.failures += 1;
        }
    }

    ExactnessReport {
        arity: ctx.arity(),
        trials,
        max_degree,
        seed,
        checks: vec![
            theta_after_gradient,
            kernel_decomposition,
            anti_gradient_reproduction,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{coeff_int, coeff_ratio, commutator};

    fn ctx2() -> AlgebraContext {
        AlgebraContext::new(2).unwrap()
    }

    #[test]
    fn canonical_rotation_of_x2x1() {
        let key = canonical_rotation(&Word::from([2, 1])).unwrap();
        assert_eq!(key.representative(), &Word::from([1, 2]));
        assert_eq!(key.period(), 2);
    }

    #[test]
    fn canonical_rotation_of_periodic_word() {
        let key = canonical_rotation(&Word::from([1, 2, 1, 2])).unwrap();
        assert_eq!(key.representative(), &Word::from([1, 2, 1, 2]));
        assert_eq!(key.period(), 2);
    }

    #[test]
    fn canonical_rotation_of_constant_word() {
        let key = canonical_rotation(&Word::from([1, 1, 1])).unwrap();
        assert_eq!(key.representative(), &Word::from([1, 1, 1]));
        assert_eq!(key.period(), 1);
    }

    #[test]
    fn canonical_rotation_rejects_empty_word() {
        assert_eq!(
            canonical_rotation(&Word::empty()),
            Err(SolverError::EmptyWord)
        );
    }

    #[test]
    fn canonical_rotation_is_minimal_brute_force() {
        let word = Word::from([2, 1, 3, 1, 2]);
        let key = canonical_rotation(&word).unwrap();
        for shift in 0..word.degree() {
            assert!(*key.representative() <= word.rotated_left(shift));
        }
        assert_eq!(key.period(), 5);
    }

    #[test]
    fn is_cyclic_accepts_symmetrizations() {
        let ctx = ctx2();
        let p = cyclic_symmetrize(&(&ctx.var(1) * &ctx.var(2)));
        assert!(is_cyclic(&p));
    }

    #[test]
    fn is_cyclic_rejects_constants_and_lone_words() {
        let ctx = ctx2();
        assert!(!is_cyclic(&ctx.one()));
        assert!(!is_cyclic(&(&ctx.var(1) * &ctx.var(2))));
        assert!(is_cyclic(&ctx.zero()));
    }

    #[test]
    fn check_gradient_affirms_simple_gradient() {
        let ctx = ctx2();
        let v = GradientVec::new(vec![ctx.var(2), ctx.var(1)]).unwrap();
        let cert = check_gradient(&v);
        assert!(cert.is_gradient());
        assert!(cert.obstruction.is_zero());
        let potential = cert.potential.unwrap();
        assert_eq!(cyclic_gradient(&potential), v);
        let mut expected = ctx.zero();
        expected.add_term(Word::from([1, 2]), coeff_ratio(1, 2));
        expected.add_term(Word::from([2, 1]), coeff_ratio(1, 2));
        assert_eq!(potential, expected);
    }

    #[test]
    fn check_gradient_reports_obstruction() {
        let ctx = ctx2();
        let v = GradientVec::new(vec![ctx.var(2), ctx.zero()]).unwrap();
        let cert = check_gradient(&v);
        assert!(!cert.is_gradient());
        assert_eq!(cert.obstruction, commutator(&ctx.var(1), &ctx.var(2)));
        assert!(cert.potential.is_none());
    }

    #[test]
    fn constant_tuples_integrate_to_linear_potentials() {
        let ctx = ctx2();
        let v = GradientVec::new(vec![
            ctx.constant(coeff_int(3)),
            ctx.constant(coeff_ratio(-1, 2)),
        ])
        .unwrap();
        let cert = check_gradient(&v);
        let expected = &ctx.var(1).scaled(&coeff_int(3)) + &ctx.var(2).scaled(&coeff_ratio(-1, 2));
        assert_eq!(cert.potential.unwrap(), expected);
    }

    #[test]
    fn anti_gradient_of_zero_tuple() {
        let ctx = ctx2();
        assert!(anti_gradient(&GradientVec::zero(ctx)).unwrap().is_zero());
    }

    #[test]
    fn anti_gradient_golden_degree_four() {
        let ctx = ctx2();
        let v = GradientVec::new(vec![
            ctx.monomial(Word::from([2, 1, 2]), coeff_int(2)),
            ctx.monomial(Word::from([1, 2, 1]), coeff_int(2)),
        ])
        .unwrap();
        let potential = anti_gradient(&v).unwrap();
        let mut expected = ctx.zero();
        expected.add_term(Word::from([1, 2, 1, 2]), coeff_ratio(1, 2));
        expected.add_term(Word::from([2, 1, 2, 1]), coeff_ratio(1, 2));
        assert_eq!(potential, expected);
        assert_eq!(cyclic_gradient(&potential), v);
    }

    #[test]
    fn anti_gradient_returns_obstruction_payload() {
        let ctx = ctx2();
        let v = GradientVec::new(vec![ctx.var(2), ctx.zero()]).unwrap();
        match anti_gradient(&v) {
            Err(SolverError::Obstruction { obstruction }) => {
                assert_eq!(obstruction, commutator(&ctx.var(1), &ctx.var(2)));
            }
            other => panic!("expected obstruction error, got {other:?}"),
        }
    }

    #[test]
    fn anti_gradient_normalizes_cyclically() {
        // N·P of the reconstructed potential lies in the cyclic subspace.
        let ctx = ctx2();
        let mut sampler = Sampler::new(ctx, 5, 0xabcd);
        for _ in 0..50 {
            let v = sampler.exact_gradient();
            let potential = anti_gradient(&v).unwrap();
            assert!(potential.constant_term().is_zero());
            assert!(is_cyclic(&number_operator(&potential)) || potential.is_zero());
        }
    }

    #[test]
    fn kernel_membership_examples() {
        let ctx = ctx2();
        assert!(in_kernel(&ctx.constant(coeff_int(7))));
        assert!(in_kernel(&commutator(&ctx.var(1), &ctx.var(2))));
        assert!(!in_kernel(&(&ctx.var(1) * &ctx.var(2))));
    }

    #[test]
    fn kernel_decompose_single_commutator() {
        let ctx = ctx2();
        let p = commutator(&ctx.var(1), &ctx.var(2));
        let d = kernel_decompose(&p).unwrap();
        assert!(d.constant.is_zero());
        assert_eq!(d.commutants[0], ctx.var(2));
        assert!(d.commutants[1].is_zero());
        assert_eq!(d.reassemble(), p);
    }

    #[test]
    fn kernel_decompose_pure_constant() {
        let ctx = ctx2();
        let p = ctx.constant(coeff_int(5));
        let d = kernel_decompose(&p).unwrap();
        assert_eq!(d.constant, coeff_int(5));
        assert!(d.commutants.iter().all(Poly::is_zero));
        assert_eq!(d.reassemble(), p);
    }

    #[test]
    fn kernel_decompose_telescopes_longer_words() {
        let ctx = ctx2();
        let x1 = ctx.var(1);
        let p = commutator(&x1, &(&x1 * &ctx.var(2)));
        // p = X1X1X2 - X1X2X1 is in the kernel; the reassembly is the contract.
        let d = kernel_decompose(&p).unwrap();
        assert_eq!(d.reassemble(), p);

        let q = &ctx.monomial(Word::from([1, 1, 2]), coeff_int(1))
            - &ctx.monomial(Word::from([2, 1, 1]), coeff_int(1));
        let d = kernel_decompose(&q).unwrap();
        assert!(d.constant.is_zero());
        let mut expected_q1 = ctx.zero();
        expected_q1.add_term(Word::from([1, 2]), coeff_int(1));
        expected_q1.add_term(Word::from([2, 1]), coeff_int(1));
        assert_eq!(d.commutants[0], expected_q1);
        assert!(d.commutants[1].is_zero());
        assert_eq!(d.reassemble(), q);
    }

    #[test]
    fn kernel_decompose_rejects_non_kernel_input() {
        let ctx = ctx2();
        let p = &ctx.var(1) * &ctx.var(2);
        match kernel_decompose(&p) {
            Err(SolverError::NotInKernel { symmetrization }) => {
                assert_eq!(symmetrization, cyclic_symmetrize(&p));
            }
            other => panic!("expected kernel refusal, got {other:?}"),
        }
    }

    #[test]
    fn kernel_decompose_handles_periodic_classes() {
        let ctx = ctx2();
        let mut sampler = Sampler::new(ctx, 6, 0x9e11);
        for _ in 0..80 {
            let p = sampler.kernel_element();
            let d = kernel_decompose(&p).unwrap();
            assert_eq!(d.reassemble(), p);
        }
    }

    #[test]
    fn theorem_one_equivalence_on_samples() {
        for arity in 1..=3u32 {
            let ctx = AlgebraContext::new(arity).unwrap();
            let mut sampler = Sampler::new(ctx, 4, 41 + u64::from(arity));
            for trial in 0..60 {
                let v = if trial % 2 == 0 {
                    sampler.tuple()
                } else {
                    sampler.exact_gradient()
                };
                let via_potential = match anti_gradient(&v) {
                    Ok(p) => cyclic_gradient(&p) == v,
                    Err(_) => false,
                };
                let via_commutators = commutator_sum(&v).is_zero();
                let weighted = {
                    let mut out = ctx.zero();
                    for j in ctx.indices() {
                        out = &out + &(&ctx.var(j) * v.entry(j));
                    }
                    out
                };
                let via_cyclicity = is_cyclic(&weighted) || weighted.is_zero();
                let via_number_operator = ctx.indices().all(|k| {
                    cyclic_derivative(k, &weighted)
                        == &number_operator(v.entry(k)) + v.entry(k)
                });
                assert_eq!(via_potential, via_commutators);
                assert_eq!(via_commutators, via_cyclicity);
                assert_eq!(via_cyclicity, via_number_operator);
            }
        }
    }

    #[test]
    fn theorem_two_equivalence_on_samples() {
        let ctx = ctx2();
        let mut sampler = Sampler::new(ctx, 5, 0x7e07);
        for trial in 0..120 {
            let p = if trial % 2 == 0 {
                sampler.poly()
            } else {
                sampler.kernel_element()
            };
            let by_gradient = cyclic_gradient(&p).is_zero();
            let by_symmetrization = cyclic_symmetrize(&p).is_zero();
            let by_decomposition = kernel_decompose(&p)
                .map(|d| d.reassemble() == p)
                .is_ok();
            assert_eq!(by_gradient, by_symmetrization);
            assert_eq!(by_symmetrization, by_decomposition);
        }
    }

    #[test]
    fn exactness_witness_empty_run() {
        let ctx = ctx2();
        let report = exactness_witness(ctx, 0, 5, 1);
        assert_eq!(report.trials, 0);
        assert_eq!(report.total_failures(), 0);
        assert!(report.all_passed());
        assert_eq!(report.checks.len(), 3);
    }

    #[test]
    fn exactness_witness_hundred_trials() {
        let ctx = ctx2();
        let report = exactness_witness(ctx, 100, 5, 42);
        assert!(report.all_passed(), "failures: {report:?}");
        for check in &report.checks {
            assert_eq!(check.passes, 100);
            assert_eq!(check.failures, 0);
        }
    }

    #[test]
    fn exactness_witness_is_seed_reproducible() {
        let ctx = AlgebraContext::new(3).unwrap();
        let a = exactness_witness(ctx, 25, 4, 7);
        let b = exactness_witness(ctx, 25, 4, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn single_variable_algebra_degenerates_correctly() {
        // With one variable everything commutes: every tuple is a gradient
        // and the kernel is the constants.
        let ctx = AlgebraContext::new(1).unwrap();
        let x = ctx.var(1);
        let v = GradientVec::new(vec![&(&x * &x) + &x]).unwrap();
        let cert = check_gradient(&v);
        assert!(cert.is_gradient());
        assert!(in_kernel(&ctx.constant(coeff_int(3))));
        assert!(!in_kernel(&x));
    }
}
