//! Exact arithmetic in the free associative algebra over the rationals and in
//! its tensor square.
//!
//! Monomials are [`Word`]s (sequences of 1-based indeterminate indices),
//! polynomials are sparse maps from words to nonzero rational coefficients,
//! and [`TensorPoly`] carries the bimodule structure `a(b⊗c) = ab⊗c`,
//! `(b⊗c)d = b⊗cd` used by the difference quotients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational scalar. `num_rational` keeps the invariants we need:
/// reduced form, positive denominator, arbitrary-precision integers.
pub type Coefficient = num_rational::BigRational;

/// Coefficient from an integer.
pub fn coeff_int(value: i64) -> Coefficient {
    Coefficient::from_integer(BigInt::from(value))
}

/// Coefficient `num/den`. Panics if `den == 0`.
pub fn coeff_ratio(num: i64, den: i64) -> Coefficient {
    Coefficient::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("number of indeterminates must be at least 1")]
    EmptyAlphabet,
    #[error("variable index {index} out of range 1..={arity}")]
    IndexOutOfRange { index: u32, arity: u32 },
    #[error("expected a tuple of {expected} polynomials, found {found}")]
    ArityMismatch { expected: usize, found: usize },
}

/// The ambient algebra: polynomials in `n` noncommuting indeterminates
/// `X1, ..., Xn` with rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraContext {
    arity: u32,
}

impl AlgebraContext {
    pub fn new(arity: u32) -> Result<Self, AlgebraError> {
        if arity == 0 {
            return Err(AlgebraError::EmptyAlphabet);
        }
        Ok(AlgebraContext { arity })
    }

    /// Number of indeterminates.
    pub fn arity(&self) -> u32 {
        self.arity
    }

    /// 1-based variable indices `1..=n`.
    pub fn indices(&self) -> impl Iterator<Item = u32> {
        1..=self.arity
    }

    pub fn contains_index(&self, index: u32) -> bool {
        (1..=self.arity).contains(&index)
    }

    /// Validates every letter of `indices` against this context.
    pub fn word(&self, indices: impl Into<Vec<u32>>) -> Result<Word, AlgebraError> {
        let indices = indices.into();
        for &index in &indices {
            if !self.contains_index(index) {
                return Err(AlgebraError::IndexOutOfRange {
                    index,
                    arity: self.arity,
                });
            }
        }
        Ok(Word { indices })
    }

    pub fn zero(&self) -> Poly {
        Poly {
            arity: self.arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> Poly {
        self.constant(Coefficient::one())
    }

    pub fn constant(&self, value: Coefficient) -> Poly {
        let mut poly = self.zero();
        poly.add_term(Word::empty(), value);
        poly
    }

    /// The generator `Xj`. Panics when `j` is out of range; use
    /// [`AlgebraContext::word`] for validated construction from input data.
    pub fn var(&self, j: u32) -> Poly {
        assert!(
            self.contains_index(j),
            "variable index {j} out of range 1..={}",
            self.arity
        );
        self.monomial(Word::from([j]), Coefficient::one())
    }

    /// `value * word`. Panics when the word uses letters outside the context.
    pub fn monomial(&self, word: Word, value: Coefficient) -> Poly {
        assert!(
            word.max_index() <= self.arity,
            "word {word} exceeds context arity {}",
            self.arity
        );
        let mut poly = self.zero();
        poly.add_term(word, value);
        poly
    }

    pub fn tensor_zero(&self) -> TensorPoly {
        TensorPoly {
            arity: self.arity,
            terms: BTreeMap::new(),
        }
    }

    /// The elementary tensor `1 ⊗ 1`.
    pub fn tensor_unit(&self) -> TensorPoly {
        let mut t = self.tensor_zero();
        t.add_term(Word::empty(), Word::empty(), Coefficient::one());
        t
    }
}

/// A monomial: finite sequence of 1-based indeterminate indices. The empty
/// word is the unit monomial.
///
/// The ordering is degree-then-lexicographic, which fixes the canonical term
/// order used for printing and serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    indices: Vec<u32>,
}

impl Word {
    pub fn empty() -> Self {
        Word {
            indices: Vec::new(),
        }
    }

    /// Builds a word from raw letters. Letters must be ≥ 1; bounds against a
    /// particular context are checked by [`AlgebraContext::word`].
    pub fn new(indices: impl Into<Vec<u32>>) -> Self {
        let indices = indices.into();
        assert!(
            indices.iter().all(|&i| i >= 1),
            "word letters are 1-based indices"
        );
        Word { indices }
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn max_index(&self) -> u32 {
        self.indices.iter().copied().max().unwrap_or(0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut indices = Vec::with_capacity(self.degree() + other.degree());
        indices.extend_from_slice(&self.indices);
        indices.extend_from_slice(&other.indices);
        Word { indices }
    }

    /// The rotation that moves the first `count` letters to the back.
    pub fn rotated_left(&self, count: usize) -> Word {
        if self.is_empty() {
            return self.clone();
        }
        let split = count % self.indices.len();
        let mut indices = Vec::with_capacity(self.indices.len());
        indices.extend_from_slice(&self.indices[split..]);
        indices.extend_from_slice(&self.indices[..split]);
        Word { indices }
    }

    /// Prefix before position `at` (0-based) and suffix after it, the letter
    /// at `at` removed.
    pub fn split_around(&self, at: usize) -> (Word, Word) {
        let prefix = Word {
            indices: self.indices[..at].to_vec(),
        };
        let suffix = Word {
            indices: self.indices[at + 1..].to_vec(),
        };
        (prefix, suffix)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices
            .len()
            .cmp(&other.indices.len())
            .then_with(|| self.indices.cmp(&other.indices))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const N: usize> From<[u32; N]> for Word {
    fn from(indices: [u32; N]) -> Self {
        Word::new(indices.to_vec())
    }
}

impl From<Vec<u32>> for Word {
    fn from(indices: Vec<u32>) -> Self {
        Word::new(indices)
    }
}

impl From<&[u32]> for Word {
    fn from(indices: &[u32]) -> Self {
        Word::new(indices.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for index in &self.indices {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "X{index}")?;
            first = false;
        }
        Ok(())
    }
}

/// Sparse polynomial: finite map from words to nonzero coefficients. The map
/// never stores a zero coefficient, so structural equality is algebra
/// equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    arity: u32,
    terms: BTreeMap<Word, Coefficient>,
}

impl Poly {
    pub fn context(&self) -> AlgebraContext {
        AlgebraContext { arity: self.arity }
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (degree, then lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &Word) -> Coefficient {
        self.terms.get(word).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coefficient(&Word::empty())
    }

    /// Degree of the highest term, 0 for the zero polynomial.
    pub fn max_degree(&self) -> usize {
        self.terms
            .keys()
            .next_back()
            .map(Word::degree)
            .unwrap_or(0)
    }

    /// True when every term has degree `d`.
    pub fn is_homogeneous_of(&self, degree: usize) -> bool {
        self.terms.keys().all(|w| w.degree() == degree)
    }

    /// Adds `value * word` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, word: Word, value: Coefficient) {
        if value.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += value;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Sum of the terms of degree exactly `degree`.
    pub fn homogeneous_component(&self, degree: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.degree() == degree)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        Poly {
            arity: self.arity,
            terms,
        }
    }

    pub fn scaled(&self, factor: &Coefficient) -> Poly {
        if factor.is_zero() {
            return Poly {
                arity: self.arity,
                terms: BTreeMap::new(),
            };
        }
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c * factor))
            .collect();
        Poly {
            arity: self.arity,
            terms,
        }
    }

    fn assert_same_context(&self, other: &Poly) {
        assert_eq!(
            self.arity, other.arity,
            "context mismatch: K<{}> vs K<{}>",
            self.arity, other.arity
        );
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for (word, value) in &rhs.terms {
            out.add_term(word.clone(), value.clone());
        }
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for (word, value) in &rhs.terms {
            out.add_term(word.clone(), -value.clone());
        }
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;

    /// Noncommutative product: bilinear extension of word concatenation.
    fn mul(self, rhs: &Poly) -> Poly {
        self.assert_same_context(rhs);
        let mut out = Poly {
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for (left, a) in &self.terms {
            for (right, b) in &rhs.terms {
                out.add_term(left.concat(right), a * b);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), -c.clone()))
            .collect();
        Poly {
            arity: self.arity,
            terms,
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $trait<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

use std::ops::{Add, Mul, Neg, Sub};

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// `a*b - b*a`.
pub fn commutator(a: &Poly, b: &Poly) -> Poly {
    &(a * b) - &(b * a)
}

/// Sparse element of the tensor square, with the outer bimodule actions
/// `a(b⊗c) = ab⊗c` and `(b⊗c)d = b⊗cd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorPoly {
    arity: u32,
    terms: BTreeMap<(Word, Word), Coefficient>,
}

impl TensorPoly {
    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Coefficient)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, left: Word, right: Word, value: Coefficient) {
        if value.is_zero() {
            return;
        }
        match self.terms.entry((left, right)) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += value;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Bimodule action `left · self · right`, extended bilinearly.
    pub fn bimodule_act(&self, left: &Poly, right: &Poly) -> TensorPoly {
        assert_eq!(self.arity, left.arity, "context mismatch in bimodule action");
        assert_eq!(self.arity, right.arity, "context mismatch in bimodule action");
        let mut out = TensorPoly {
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for ((u, v), c) in &self.terms {
            for (lw, lc) in &left.terms {
                for (rw, rc) in &right.terms {
                    out.add_term(lw.concat(u), v.concat(rw), lc * c * rc);
                }
            }
        }
        out
    }

    /// The flipped multiplication `u ⊗ v ↦ v·u`, extended linearly.
    pub fn flip_multiply(&self) -> Poly {
        let mut out = Poly {
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for ((u, v), c) in &self.terms {
            out.add_term(v.concat(u), c.clone());
        }
        out
    }

    pub fn scaled(&self, factor: &Coefficient) -> TensorPoly {
        if factor.is_zero() {
            return TensorPoly {
                arity: self.arity,
                terms: BTreeMap::new(),
            };
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c * factor))
            .collect();
        TensorPoly {
            arity: self.arity,
            terms,
        }
    }

    fn assert_same_context(&self, other: &TensorPoly) {
        assert_eq!(
            self.arity, other.arity,
            "context mismatch: K<{}> vs K<{}>",
            self.arity, other.arity
        );
    }
}

impl Add<&TensorPoly> for &TensorPoly {
    type Output = TensorPoly;

    fn add(self, rhs: &TensorPoly) -> TensorPoly {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for ((u, v), c) in &rhs.terms {
            out.add_term(u.clone(), v.clone(), c.clone());
        }
        out
    }
}

impl Sub<&TensorPoly> for &TensorPoly {
    type Output = TensorPoly;

    fn sub(self, rhs: &TensorPoly) -> TensorPoly {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for ((u, v), c) in &rhs.terms {
            out.add_term(u.clone(), v.clone(), -c.clone());
        }
        out
    }
}

/// An ordered `n`-tuple of polynomials in `K<X1..Xn>`; the candidate
/// `(P1, ..., Pn)` of the gradient problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientVec {
    entries: Vec<Poly>,
}

impl GradientVec {
    /// The tuple length must equal the common context arity.
    pub fn new(entries: Vec<Poly>) -> Result<Self, AlgebraError> {
        let Some(first) = entries.first() else {
            return Err(AlgebraError::ArityMismatch {
                expected: 1,
                found: 0,
            });
        };
        let arity = first.arity;
        if entries.len() != arity as usize {
            return Err(AlgebraError::ArityMismatch {
                expected: arity as usize,
                found: entries.len(),
            });
        }
        if entries.iter().any(|p| p.arity != arity) {
            return Err(AlgebraError::ArityMismatch {
                expected: arity as usize,
                found: entries.len(),
            });
        }
        Ok(GradientVec { entries })
    }

    pub fn zero(ctx: AlgebraContext) -> Self {
        GradientVec {
            entries: (0..ctx.arity()).map(|_| ctx.zero()).collect(),
        }
    }

    pub fn arity(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn context(&self) -> AlgebraContext {
        self.entries[0].context()
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    /// Entry `Pj`, 1-based.
    pub fn entry(&self, j: u32) -> &Poly {
        &self.entries[(j - 1) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Poly> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn into_entries(self) -> Vec<Poly> {
        self.entries
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::print_poly(self))
    }
}
