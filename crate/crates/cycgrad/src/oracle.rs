//! Numerical cross-validation on matrix tuples: substitute matrices for the
//! indeterminates and confirm, in floating point, the identities the
//! symbolic layer proves exactly — commutator traces vanish, obstructions of
//! certified gradients evaluate to zero, and the cyclic gradient is the
//! derivative of trace functionals.

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AlgebraContext, GradientVec, Poly};
use crate::calculus::{commutator_sum, cyclic_derivative};
use crate::sampling::Sampler;

/// Tolerance factor for identities that hold exactly in the algebra;
/// multiplied by the operand norm scale, floored at one.
pub const ALGEBRAIC_TOLERANCE_FACTOR: f64 = 1e-9;
/// Tighter factor for the evaluation homomorphism check.
pub const HOMOMORPHISM_TOLERANCE_FACTOR: f64 = 1e-10;
/// Relative tolerance for central finite differences with the default step.
pub const FD_RELATIVE_TOLERANCE: f64 = 1e-5;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Matrix dimension cap.
pub const MAX_DIMENSION: usize = 8;
/// Degree cap for evaluated polynomials.
pub const MAX_EVAL_DEGREE: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("matrix tuple is empty")]
    EmptyTuple,
    #[error("matrix {index} is {rows}x{cols}, expected square of dimension {expected}")]
    DimensionMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("tuple has {found} matrices but the context has {expected} indeterminates")]
    ArityMismatch { expected: u32, found: u32 },
    #[error("finite-difference step must be positive, got {step}")]
    NonpositiveStep { step: f64 },
    #[error("dimension {dim} exceeds the cap {MAX_DIMENSION}")]
    DimensionTooLarge { dim: usize },
    #[error("degree {degree} exceeds the evaluation cap {MAX_EVAL_DEGREE}")]
    DegreeTooLarge { degree: usize },
}

/// An n-tuple of real square matrices of a common dimension, standing in for
/// the indeterminates.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    matrices: Vec<DMatrix<f64>>,
    dim: usize,
}

impl MatrixTuple {
    pub fn new(matrices: Vec<DMatrix<f64>>) -> Result<Self, OracleError> {
        let Some(first) = matrices.first() else {
            return Err(OracleError::EmptyTuple);
        };
        let dim = first.nrows();
        for (index, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(OracleError::DimensionMismatch {
                    index: index + 1,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    expected: dim,
                });
            }
        }
        Ok(MatrixTuple { matrices, dim })
    }

    pub fn arity(&self) -> u32 {
        self.matrices.len() as u32
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix substituted for `Xj`, 1-based.
    pub fn matrix(&self, j: u32) -> &DMatrix<f64> {
        &self.matrices[(j - 1) as usize]
    }

    /// Entries uniform in [-1, 1].
    pub fn random(arity: u32, dim: usize, sampler: &mut Sampler) -> Self {
        let matrices = (0..arity)
            .map(|_| DMatrix::from_fn(dim, dim, |_, _| sampler.unit_float()))
            .collect();
        MatrixTuple { matrices, dim }
    }

    /// Symmetric matrices with entries in [-1, 1], mirroring self-adjoint
    /// directions.
    pub fn random_symmetric(arity: u32, dim: usize, sampler: &mut Sampler) -> Self {
        let matrices = (0..arity)
            .map(|_| {
                let m = DMatrix::from_fn(dim, dim, |_, _| sampler.unit_float());
                (&m + &m.transpose()).scale(0.5)
            })
            .collect();
        MatrixTuple { matrices, dim }
    }

    /// `A + t·H`, entrywise along the tuple.
    pub fn perturbed(&self, direction: &MatrixTuple, t: f64) -> Result<Self, OracleError> {
        if direction.arity() != self.arity() || direction.dim != self.dim {
            return Err(OracleError::DimensionMismatch {
                index: 0,
                rows: direction.dim,
                cols: direction.dim,
                expected: self.dim,
            });
        }
        let matrices = self
            .matrices
            .iter()
            .zip(&direction.matrices)
            .map(|(a, h)| a + h.scale(t))
            .collect();
        Ok(MatrixTuple {
            matrices,
            dim: self.dim,
        })
    }

    fn frobenius_scale(&self, v: &GradientVec, evaluations: &[DMatrix<f64>]) -> f64 {
        v.iter()
            .zip(evaluations)
            .enumerate()
            .map(|(idx, (_, e))| self.matrices[idx].norm() * e.norm())
            .sum()
    }
}

/// Substitutes the tuple into the polynomial: words become matrix products
/// in order, coefficients become floats.
pub fn evaluate(p: &Poly, tuple: &MatrixTuple) -> Result<DMatrix<f64>, OracleError> {
    if tuple.arity() != p.arity() {
        return Err(OracleError::ArityMismatch {
            expected: p.arity(),
            found: tuple.arity(),
        });
    }
    let dim = tuple.dim();
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    for (word, value) in p.terms() {
        let mut product = DMatrix::<f64>::identity(dim, dim);
        for &letter in word.indices() {
            product = product * tuple.matrix(letter);
        }
        let value = value.to_f64().expect("rational converts to f64");
        out += product.scale(value);
    }
    Ok(out)
}

/// Outcome of a single numeric check. The pass flag is defined by
/// `deviation <= tolerance`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NumericReport {
    pub quantity: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub dim: usize,
    pub degree: usize,
}

impl NumericReport {
    pub fn new(
        quantity: impl Into<String>,
        deviation: f64,
        tolerance: f64,
        seed: Option<u64>,
        dim: usize,
        degree: usize,
    ) -> Self {
        NumericReport {
            quantity: quantity.into(),
            deviation,
            tolerance,
            pass: deviation <= tolerance,
            seed,
            dim,
            degree,
        }
    }
}

/// Both facets of the evaluated commutator-sum obstruction: the trace must
/// vanish for every tuple (commutators are traceless), the full matrix only
/// when the obstruction is symbolically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub symbolically_zero: bool,
    pub matrix: NumericReport,
    pub trace: NumericReport,
}

pub fn trace_obstruction_check(
    v: &GradientVec,
    tuple: &MatrixTuple,
) -> Result<ObstructionReport, OracleError> {
    if tuple.arity() != v.arity() {
        return Err(OracleError::ArityMismatch {
            expected: v.arity(),
            found: tuple.arity(),
        });
    }
    let obstruction = commutator_sum(v);
    let evaluated = evaluate(&obstruction, tuple)?;
    let evaluations: Vec<DMatrix<f64>> = v
        .iter()
        .map(|p| evaluate(p, tuple))
        .collect::<Result<_, _>>()?;
    let scale = tuple.frobenius_scale(v, &evaluations);
    let tolerance = ALGEBRAIC_TOLERANCE_FACTOR * scale.max(1.0);
    let degree = v.iter().map(Poly::max_degree).max().unwrap_or(0);
    let matrix_deviation = evaluated.amax();
    let trace_deviation = evaluated.trace().abs();
    Ok(ObstructionReport {
        symbolically_zero: obstruction.is_zero(),
        matrix: NumericReport::new(
            "obstruction-matrix",
            matrix_deviation,
            tolerance,
            None,
            tuple.dim(),
            degree,
        ),
        trace: NumericReport::new(
            "obstruction-trace",
            trace_deviation,
            tolerance,
            None,
            tuple.dim(),
            degree,
        ),
    })
}

/// Compares the central difference of `t ↦ tr p(A + tH)` at the given step
/// against the symbolic pairing `Σj tr(Hj · (δj p)(A))` in random symmetric
/// directions drawn from the seed.
///
/// The deviation is relative to the larger of the two sides, the pairing
/// scale `Σj ‖Hj‖·‖(δj p)(A)‖`, and one.
pub fn finite_difference_gradient_check(
    p: &Poly,
    tuple: &MatrixTuple,
    step: f64,
    seed: u64,
) -> Result<NumericReport, OracleError> {
    if !(step > 0.0) {
        return Err(OracleError::NonpositiveStep { step });
    }
    if tuple.arity() != p.arity() {
        return Err(OracleError::ArityMismatch {
            expected: p.arity(),
            found: tuple.arity(),
        });
    }
    let ctx = p.context();
    let mut direction_sampler = {
        let mut rng_sampler = Sampler::new(ctx, 1, seed);
        // consume nothing else from this sampler; it only feeds floats
        let _ = &mut rng_sampler;
        rng_sampler
    };
    let directions = MatrixTuple::random_symmetric(ctx.arity(), tuple.dim(), &mut direction_sampler);

    let plus = evaluate(p, &tuple.perturbed(&directions, step)?)?;
    let minus = evaluate(p, &tuple.perturbed(&directions, -step)?)?;
    let difference_quotient = (plus.trace() - minus.trace()) / (2.0 * step);

    let mut pairing = 0.0;
    let mut pairing_scale = 0.0;
    for j in ctx.indices() {
        let gradient_entry = evaluate(&cyclic_derivative(j, p), tuple)?;
        pairing += (directions.matrix(j) * &gradient_entry).trace();
        pairing_scale += directions.matrix(j).norm() * gradient_entry.norm();
    }

    let denominator = difference_quotient
        .abs()
        .max(pairing.abs())
        .max(pairing_scale)
        .max(1.0);
    let deviation = (difference_quotient - pairing).abs() / denominator;
    Ok(NumericReport::new(
        "finite-difference-gradient",
        deviation,
        FD_RELATIVE_TOLERANCE,
        Some(seed),
        tuple.dim(),
        p.max_degree(),
    ))
}

/// Configuration for the seeded numeric suite.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSuiteConfig {
    pub trials: u64,
    pub dim: usize,
    pub max_degree: usize,
    pub seed: u64,
    pub step: f64,
}

impl NumericSuiteConfig {
    pub fn new(trials: u64, dim: usize, seed: u64) -> Self {
        NumericSuiteConfig {
            trials,
            dim,
            max_degree: 4,
            seed,
            step: DEFAULT_FD_STEP,
        }
    }
}

/// Aggregated numeric trial results.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSuiteReport {
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub reports: Vec<NumericReport>,
}

impl NumericSuiteReport {
    pub fn failures(&self) -> u64 {
        self.reports.iter().filter(|r| !r.pass).count() as u64
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }
}

/// Runs the full numeric battery: finite-difference gradient pairing,
/// obstruction evaluation for certified gradients and arbitrary tuples,
/// trace-of-commutator vanishing, and the evaluation homomorphism.
/// Only contractually-zero facets contribute reports.
pub fn run_numeric_suite(
    ctx: AlgebraContext,
    config: &NumericSuiteConfig,
) -> Result<NumericSuiteReport, OracleError> {
    if config.dim == 0 || config.dim > MAX_DIMENSION {
        return Err(OracleError::DimensionTooLarge { dim: config.dim });
    }
    if config.max_degree > MAX_EVAL_DEGREE {
        return Err(OracleError::DegreeTooLarge {
            degree: config.max_degree,
        });
    }
    if !(config.step > 0.0) {
        return Err(OracleError::NonpositiveStep { step: config.step });
    }

    let mut sampler = Sampler::new(ctx, config.max_degree, config.seed);
    let mut reports = Vec::new();
    for _ in 0..config.trials {
        let tuple = MatrixTuple::random(ctx.arity(), config.dim, &mut sampler);

        let p = sampler.poly();
        reports.push(finite_difference_gradient_check(
            &p,
            &tuple,
            config.step,
            sampler.sub_seed(),
        )?);

        let gradient = sampler.exact_gradient();
        let certified = trace_obstruction_check(&gradient, &tuple)?;
        reports.push(certified.matrix);
        reports.push(certified.trace);

        let arbitrary = sampler.tuple();
        let evaluated = trace_obstruction_check(&arbitrary, &tuple)?;
        reports.push(evaluated.trace);

        let a = sampler.poly();
        let b = sampler.poly();
        let ea = evaluate(&a, &tuple)?;
        let eb = evaluate(&b, &tuple)?;
        let eab = evaluate(&(&a * &b), &tuple)?;
        let scale = ea.norm() * eb.norm();
        let commutator_trace = (&ea * &eb - &eb * &ea).trace().abs();
        reports.push(NumericReport::new(
            "commutator-trace",
            commutator_trace,
            ALGEBRAIC_TOLERANCE_FACTOR * scale.max(1.0),
            None,
            config.dim,
            a.max_degree() + b.max_degree(),
        ));
        let homomorphism_deviation = (&eab - &ea * &eb).amax();
        reports.push(NumericReport::new(
            "evaluation-homomorphism",
            homomorphism_deviation,
            HOMOMORPHISM_TOLERANCE_FACTOR * scale.max(1.0),
            None,
            config.dim,
            a.max_degree() + b.max_degree(),
        ));
    }
    Ok(NumericSuiteReport {
        dim: config.dim,
        trials: config.trials,
        seed: config.seed,
        reports,
    })
}

/// Seeded RNG for callers that need raw randomness tied to the suite seeds.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
