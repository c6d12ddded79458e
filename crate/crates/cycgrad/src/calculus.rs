//! The operators of the cyclic calculus: partial difference quotients into
//! the tensor square, cyclic derivatives, the number operator, cyclic
//! symmetrization, and the commutator-sum map whose kernel the gradients
//! fill out.

use crate::algebra::{commutator, AlgebraContext, Coefficient, GradientVec, Poly, TensorPoly};
use num_bigint::BigInt;

fn assert_index(j: u32, ctx: AlgebraContext) {
    assert!(
        ctx.contains_index(j),
        "operator index {j} out of range 1..={}",
        ctx.arity()
    );
}

/// The partial difference quotient `∂j`: the derivation into the tensor
/// square with `∂j Xj = 1⊗1` and `∂j Xk = 0` for `k ≠ j`.
///
/// On a word it sums, over the occurrences of letter `j`, the tensor of the
/// prefix before and the suffix after that occurrence.
pub fn difference_quotient(j: u32, p: &Poly) -> TensorPoly {
    let ctx = p.context();
    assert_index(j, ctx);
    let mut out = ctx.tensor_zero();
    for (word, value) in p.terms() {
        for (position, &letter) in word.indices().iter().enumerate() {
            if letter == j {
                let (prefix, suffix) = word.split_around(position);
                out.add_term(prefix, suffix, value.clone());
            }
        }
    }
    out
}

/// The cyclic derivative `δj`: flipped multiplication after the difference
/// quotient. On a word this sums, over the occurrences of `Xj`, the rotation
/// that deletes the occurrence and wraps the prefix to the back.
pub fn cyclic_derivative(j: u32, p: &Poly) -> Poly {
    difference_quotient(j, p).flip_multiply()
}

/// The full tuple `(δ1 p, ..., δn p)`.
pub fn cyclic_gradient(p: &Poly) -> GradientVec {
    let ctx = p.context();
    let entries = ctx.indices().map(|j| cyclic_derivative(j, p)).collect();
    GradientVec::new(entries).expect("gradient tuple matches its context by construction")
}

/// The number operator: scales each homogeneous component by its degree.
/// Constants map to zero.
pub fn number_operator(p: &Poly) -> Poly {
    let mut out = p.context().zero();
    for (word, value) in p.terms() {
        let degree = Coefficient::from_integer(BigInt::from(word.degree()));
        out.add_term(word.clone(), value * degree);
    }
    out
}

/// Cyclic symmetrization: a degree-p word contributes all p of its
/// rotations, so rotations of periodic words accumulate multiplicity.
/// Constants map to zero.
pub fn cyclic_symmetrize(p: &Poly) -> Poly {
    let mut out = p.context().zero();
    for (word, value) in p.terms() {
        for shift in 1..=word.degree() {
            out.add_term(word.rotated_left(shift), value.clone());
        }
    }
    out
}

/// The commutator sum `(P1, ..., Pn) ↦ Σj [Xj, Pj]`. A tuple is a cyclic
/// gradient exactly when this vanishes.
pub fn commutator_sum(v: &GradientVec) -> Poly {
    let ctx = v.context();
    let mut out = ctx.zero();
    for j in ctx.indices() {
        out = &out + &commutator(&ctx.var(j), v.entry(j));
    }
    out
}
