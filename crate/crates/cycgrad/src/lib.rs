//! Exact cyclic calculus on noncommutative polynomials.
//!
//! The crate implements the free associative algebra over the rationals
//! together with the cyclic differential calculus on it: partial difference
//! quotients into the tensor square, cyclic derivatives and gradients, the
//! number operator, and cyclic symmetrization. On top of the calculus sit
//! exact decision procedures — certify whether a tuple of polynomials is a
//! cyclic gradient and reconstruct a potential, test for vanishing cyclic
//! gradient, and decompose kernel elements into a constant plus commutators
//! — plus a floating-point matrix oracle that cross-checks the symbolic
//! identities on random matrix tuples.
//!
//! Text expressions are parsed and printed by [`io`], and every domain
//! object travels through the versioned `cycgrad/1` JSON documents of
//! [`doc`].

pub mod algebra;
pub mod calculus;
pub mod doc;
pub mod io;
pub mod oracle;
pub mod sampling;
pub mod solver;

pub use algebra::{
    coeff_int, coeff_ratio, commutator, AlgebraContext, AlgebraError, Coefficient, GradientVec,
    Poly, TensorPoly, Word,
};
pub use calculus::{
    commutator_sum, cyclic_derivative, cyclic_gradient, cyclic_symmetrize, difference_quotient,
    number_operator,
};
pub use doc::{DocError, Document, FORMAT_VERSION};
pub use io::{infer_arity, parse_poly, print_poly, ParseError, ParseErrorKind};
pub use oracle::{
    evaluate, finite_difference_gradient_check, run_numeric_suite, trace_obstruction_check,
    MatrixTuple, NumericReport, NumericSuiteConfig, NumericSuiteReport, ObstructionReport,
    OracleError,
};
pub use sampling::Sampler;
pub use solver::{
    anti_gradient, canonical_rotation, check_gradient, exactness_witness, in_kernel, is_cyclic,
    kernel_decompose, CheckOutcome, CyclicClassKey, ExactnessReport, GradientCertificate,
    KernelDecomposition, SolverError,
};
