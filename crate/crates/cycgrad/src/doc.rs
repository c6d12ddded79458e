//! The `cycgrad/1` interchange format: versioned JSON documents carrying the
//! context arity, the object kind, and term lists as
//! `(word-index-array, numerator, denominator)` triples in canonical order.
//! Serialization and deserialization invert each other exactly; rationals
//! travel as decimal strings so no precision is lost.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraContext, Coefficient, GradientVec, Poly, TensorPoly};
use crate::oracle::NumericReport;
use crate::solver::{CheckOutcome, ExactnessReport, KernelDecomposition};

pub const FORMAT_VERSION: &str = "cycgrad/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unsupported format version {found:?}, expected {FORMAT_VERSION:?}")]
    Version { found: String },
    #[error("unknown document kind {found:?}")]
    Kind { found: String },
    #[error("document holds a {found}, expected a {expected}")]
    WrongKind {
        expected: &'static str,
        found: String,
    },
    #[error("invalid document payload: {0}")]
    Invalid(String),
}

/// `(word letters, numerator, denominator)`.
pub type TermRecord = (Vec<u32>, String, String);
/// `(left letters, right letters, numerator, denominator)`.
pub type TensorTermRecord = (Vec<u32>, Vec<u32>, String, String);
/// `(numerator, denominator)`.
pub type RatioRecord = (String, String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessRecord {
    pub trials: u64,
    pub max_degree: usize,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passes: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Body {
    Poly {
        terms: Vec<TermRecord>,
    },
    TensorPoly {
        terms: Vec<TensorTermRecord>,
    },
    GradientVec {
        entries: Vec<Vec<TermRecord>>,
    },
    KernelDecomposition {
        constant: RatioRecord,
        commutants: Vec<Vec<TermRecord>>,
    },
    ExactnessReport(ExactnessRecord),
    NumericReport(NumericReport),
    VerifyReport {
        exactness: ExactnessRecord,
        numeric: Vec<NumericReport>,
    },
}

impl Body {
    fn kind_name(&self) -> &'static str {
        match self {
            Body::Poly { .. } => "poly",
            Body::TensorPoly { .. } => "tensor-poly",
            Body::GradientVec { .. } => "gradient-vec",
            Body::KernelDecomposition { .. } => "kernel-decomposition",
            Body::ExactnessReport(_) => "exactness-report",
            Body::NumericReport(_) => "numeric-report",
            Body::VerifyReport { .. } => "verify-report",
        }
    }
}

const KNOWN_KINDS: &[&str] = &[
    "poly",
    "tensor-poly",
    "gradient-vec",
    "kernel-decomposition",
    "exactness-report",
    "numeric-report",
    "verify-report",
];

/// A complete `cycgrad/1` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub version: String,
    pub n: u32,
    #[serde(flatten)]
    pub body: Body,
}

fn ratio_record(value: &Coefficient) -> RatioRecord {
    (value.numer().to_string(), value.denom().to_string())
}

fn ratio_from_record((numer, denom): &RatioRecord) -> Result<Coefficient, DocError> {
    let numer = BigInt::from_str(numer)
        .map_err(|_| DocError::Invalid(format!("bad numerator {numer:?}")))?;
    let denom = BigInt::from_str(denom)
        .map_err(|_| DocError::Invalid(format!("bad denominator {denom:?}")))?;
    if denom.is_zero() {
        return Err(DocError::Invalid("zero denominator".into()));
    }
    Ok(Coefficient::new(numer, denom))
}

fn poly_records(p: &Poly) -> Vec<TermRecord> {
    p.terms()
        .map(|(word, value)| {
            let (numer, denom) = ratio_record(value);
            (word.indices().to_vec(), numer, denom)
        })
        .collect()
}

fn poly_from_records(ctx: AlgebraContext, records: &[TermRecord]) -> Result<Poly, DocError> {
    let mut out = ctx.zero();
    for (letters, numer, denom) in records {
        let word = ctx
            .word(letters.clone())
            .map_err(|e| DocError::Invalid(e.to_string()))?;
        out.add_term(word, ratio_from_record(&(numer.clone(), denom.clone()))?);
    }
    Ok(out)
}

impl Document {
    pub fn from_poly(p: &Poly) -> Document {
        Document {
            version: FORMAT_VERSION.into(),
            n: p.arity(),
            body: Body::Poly {
                terms: poly_records(p),
            },
        }
    }

    pub fn from_tensor(t: &TensorPoly) -> Document {
        let terms = t
            .terms()
            .map(|((left, right), value)| {
                let (numer, denom) = ratio_record(value);
                (
                    left.indices().to_vec(),
                    right.indices().to_vec(),
                    numer,
                    denom,
                )
            })
            .collect();
        Document {
            version: FORMAT_VERSION.into(),
            n: t.arity(),
            body: Body::TensorPoly { terms },
        }
    }

    pub fn from_gradient(v: &GradientVec) -> Document {
        Document {
            version: FORMAT_VERSION.into(),
            n: v.arity(),
            body: Body::GradientVec {
                entries: v.iter().map(poly_records).collect(),
            },
        }
    }

    pub fn from_kernel_decomposition(d: &KernelDecomposition) -> Document {
        Document {
            version: FORMAT_VERSION.into(),
            n: d.arity(),
            body: Body::KernelDecomposition {
                constant: ratio_record(&d.constant),
                commutants: d.commutants.iter().map(poly_records).collect(),
            },
        }
    }

    pub fn from_exactness_report(report: &ExactnessReport) -> Document {
        Document {
            version: FORMAT_VERSION.into(),
            n: report.arity,
            body: Body::ExactnessReport(exactness_record(report)),
        }
    }

    pub fn from_numeric_report(arity: u32, report: &NumericReport) -> Document {
        Document {
            version: FORMAT_VERSION.into(),
            n: arity,
            body: Body::NumericReport(report.clone()),
        }
    }

    pub fn from_verify_report(
        exactness: &ExactnessReport,
        numeric: &[NumericReport],
    ) -> Document {
        Document {
            version: FORMAT_VERSION.into(),
            n: exactness.arity,
            body: Body::VerifyReport {
                exactness: exactness_record(exactness),
                numeric: numeric.to_vec(),
            },
        }
    }

    /// Pretty JSON; field order is fixed, so equal documents print equal text.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Parses and validates a document, reporting version and kind problems
    /// before structural ones.
    pub fn parse(text: &str) -> Result<Document, DocError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| DocError::Malformed(e.to_string()))?;
        let version = value
            .get("version")
            .and_then(|v| v.as_str())
            .ok_or_else(|| DocError::Malformed("missing version tag".into()))?;
        if version != FORMAT_VERSION {
            return Err(DocError::Version {
                found: version.to_string(),
            });
        }
        let kind = value
            .get("kind")
            .and_then(|v| v.as_str())
            .ok_or_else(|| DocError::Malformed("missing kind".into()))?;
        if !KNOWN_KINDS.contains(&kind) {
            return Err(DocError::Kind {
                found: kind.to_string(),
            });
        }
        serde_json::from_value(value).map_err(|e| DocError::Malformed(e.to_string()))
    }

    pub fn context(&self) -> Result<AlgebraContext, DocError> {
        AlgebraContext::new(self.n).map_err(|e| DocError::Invalid(e.to_string()))
    }

    pub fn kind(&self) -> &'static str {
        self.body.kind_name()
    }

    pub fn as_poly(&self) -> Result<Poly, DocError> {
        let ctx = self.context()?;
        match &self.body {
            Body::Poly { terms } => poly_from_records(ctx, terms),
            other => Err(DocError::WrongKind {
                expected: "poly",
                found: other.kind_name().to_string(),
            }),
        }
    }

    pub fn as_tensor(&self) -> Result<TensorPoly, DocError> {
        let ctx = self.context()?;
        match &self.body {
            Body::TensorPoly { terms } => {
                let mut out = ctx.tensor_zero();
                for (left, right, numer, denom) in terms {
                    let left = ctx
                        .word(left.clone())
                        .map_err(|e| DocError::Invalid(e.to_string()))?;
                    let right = ctx
                        .word(right.clone())
                        .map_err(|e| DocError::Invalid(e.to_string()))?;
                    out.add_term(
                        left,
                        right,
                        ratio_from_record(&(numer.clone(), denom.clone()))?,
                    );
                }
                Ok(out)
            }
            other => Err(DocError::WrongKind {
                expected: "tensor-poly",
                found: other.kind_name().to_string(),
            }),
        }
    }

    pub fn as_gradient(&self) -> Result<GradientVec, DocError> {
        let ctx = self.context()?;
        match &self.body {
            Body::GradientVec { entries } => {
                let entries = entries
                    .iter()
                    .map(|records| poly_from_records(ctx, records))
                    .collect::<Result<Vec<_>, _>>()?;
                GradientVec::new(entries).map_err(|e| DocError::Invalid(e.to_string()))
            }
            other => Err(DocError::WrongKind {
                expected: "gradient-vec",
                found: other.kind_name().to_string(),
            }),
        }
    }

    pub fn as_kernel_decomposition(&self) -> Result<KernelDecomposition, DocError> {
        let ctx = self.context()?;
        match &self.body {
            Body::KernelDecomposition {
                constant,
                commutants,
            } => {
                if commutants.len() != ctx.arity() as usize {
                    return Err(DocError::Invalid(format!(
                        "{} commutants for arity {}",
                        commutants.len(),
                        ctx.arity()
                    )));
                }
                Ok(KernelDecomposition {
                    constant: ratio_from_record(constant)?,
                    commutants: commutants
                        .iter()
                        .map(|records| poly_from_records(ctx, records))
                        .collect::<Result<Vec<_>, _>>()?,
                })
            }
            other => Err(DocError::WrongKind {
                expected: "kernel-decomposition",
                found: other.kind_name().to_string(),
            }),
        }
    }

    pub fn as_exactness_report(&self) -> Result<ExactnessReport, DocError> {
        match &self.body {
            Body::ExactnessReport(record) => Ok(exactness_from_record(self.n, record)),
            other => Err(DocError::WrongKind {
                expected: "exactness-report",
                found: other.kind_name().to_string(),
            }),
        }
    }

    pub fn as_numeric_report(&self) -> Result<NumericReport, DocError> {
        match &self.body {
            Body::NumericReport(report) => Ok(report.clone()),
            other => Err(DocError::WrongKind {
                expected: "numeric-report",
                found: other.kind_name().to_string(),
            }),
        }
    }

    pub fn as_verify_report(&self) -> Result<(ExactnessReport, Vec<NumericReport>), DocError> {
        match &self.body {
            Body::VerifyReport { exactness, numeric } => Ok((
                exactness_from_record(self.n, exactness),
                numeric.clone(),
            )),
            other => Err(DocError::WrongKind {
                expected: "verify-report",
                found: other.kind_name().to_string(),
            }),
        }
    }
}

fn exactness_record(report: &ExactnessReport) -> ExactnessRecord {
    ExactnessRecord {
        trials: report.trials,
        max_degree: report.max_degree,
        seed: report.seed,
        checks: report
            .checks
            .iter()
            .map(|c| CheckRecord {
                name: c.name.clone(),
                passes: c.passes,
                failures: c.failures,
            })
            .collect(),
    }
}

fn exactness_from_record(arity: u32, record: &ExactnessRecord) -> ExactnessReport {
    ExactnessReport {
        arity,
        trials: record.trials,
        max_degree: record.max_degree,
        seed: record.seed,
        checks: record
            .checks
            .iter()
            .map(|c| CheckOutcome {
                name: c.name.clone(),
                passes: c.passes,
                failures: c.failures,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{coeff_int, coeff_ratio};
    use crate::solver::{exactness_witness, kernel_decompose};

    fn ctx2() -> AlgebraContext {
        AlgebraContext::new(2).unwrap()
    }

    #[test]
    fn zero_poly_document_has_empty_terms() {
        let ctx = ctx2();
        let doc = Document::from_poly(&ctx.zero());
        match &doc.body {
            Body::Poly { terms } => assert!(terms.is_empty()),
            _ => panic!("wrong kind"),
        }
        assert_eq!(doc.as_poly().unwrap(), ctx.zero());
    }

    #[test]
    fn poly_round_trip_is_bit_exact() {
        let ctx = AlgebraContext::new(3).unwrap();
        let mut sampler = crate::sampling::Sampler::new(ctx, 5, 0xd0c);
        for _ in 0..100 {
            let p = sampler.poly();
            let json = Document::from_poly(&p).to_json();
            let doc = Document::parse(&json).unwrap();
            assert_eq!(doc.as_poly().unwrap(), p);
            assert_eq!(doc.to_json(), json);
        }
    }

    #[test]
    fn gradient_and_tensor_round_trips() {
        let ctx = ctx2();
        let mut sampler = crate::sampling::Sampler::new(ctx, 4, 0x7777);
        for _ in 0..40 {
            let v = sampler.tuple();
            let doc = Document::parse(&Document::from_gradient(&v).to_json()).unwrap();
            assert_eq!(doc.as_gradient().unwrap(), v);

            let t = crate::calculus::difference_quotient(1, &sampler.poly());
            let doc = Document::parse(&Document::from_tensor(&t).to_json()).unwrap();
            assert_eq!(doc.as_tensor().unwrap(), t);
        }
    }

    #[test]
    fn kernel_decomposition_round_trip() {
        let ctx = ctx2();
        let p = &ctx.constant(coeff_ratio(5, 3))
            + &crate::algebra::commutator(&ctx.var(1), &ctx.var(2));
        let d = kernel_decompose(&p).unwrap();
        let doc = Document::parse(&Document::from_kernel_decomposition(&d).to_json()).unwrap();
        assert_eq!(doc.as_kernel_decomposition().unwrap(), d);
    }

    #[test]
    fn report_round_trips() {
        let ctx = ctx2();
        let report = exactness_witness(ctx, 5, 4, 3);
        let doc = Document::parse(&Document::from_exactness_report(&report).to_json()).unwrap();
        assert_eq!(doc.as_exactness_report().unwrap(), report);

        let numeric = NumericReport::new("commutator-trace", 1e-12, 1e-9, Some(4), 3, 2);
        let doc = Document::parse(&Document::from_numeric_report(2, &numeric).to_json()).unwrap();
        assert_eq!(doc.as_numeric_report().unwrap(), numeric);

        let doc =
            Document::parse(&Document::from_verify_report(&report, &[numeric.clone()]).to_json())
                .unwrap();
        let (back_report, back_numeric) = doc.as_verify_report().unwrap();
        assert_eq!(back_report, report);
        assert_eq!(back_numeric, vec![numeric]);
    }

    #[test]
    fn rejects_corrupted_version_tag() {
        let ctx = ctx2();
        let json = Document::from_poly(&ctx.var(1)).to_json();
        let corrupted = json.replace("cycgrad/1", "cycgrad/9");
        match Document::parse(&corrupted) {
            Err(DocError::Version { found }) => assert_eq!(found, "cycgrad/9"),
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_kind_and_garbage() {
        let ctx = ctx2();
        let json = Document::from_poly(&ctx.var(1)).to_json();
        let corrupted = json.replace("\"poly\"", "\"nonsense\"");
        match Document::parse(&corrupted) {
            Err(DocError::Kind { found }) => assert_eq!(found, "nonsense"),
            other => panic!("expected kind error, got {other:?}"),
        }
        assert!(matches!(
            Document::parse("not json at all"),
            Err(DocError::Malformed(_))
        ));
    }

    #[test]
    fn wrong_kind_extraction_is_reported() {
        let ctx = ctx2();
        let doc = Document::from_poly(&ctx.var(1));
        match doc.as_gradient() {
            Err(DocError::WrongKind { expected, found }) => {
                assert_eq!(expected, "gradient-vec");
                assert_eq!(found, "poly");
            }
            other => panic!("expected wrong-kind error, got {other:?}"),
        }
    }

    #[test]
    fn validates_payload_words_and_ratios() {
        let bad_word = r#"{"version":"cycgrad/1","n":2,"kind":"poly","terms":[[[3],"1","1"]]}"#;
        assert!(matches!(
            Document::parse(bad_word).unwrap().as_poly(),
            Err(DocError::Invalid(_))
        ));
        let bad_denominator =
            r#"{"version":"cycgrad/1","n":2,"kind":"poly","terms":[[[1],"1","0"]]}"#;
        assert!(matches!(
            Document::parse(bad_denominator).unwrap().as_poly(),
            Err(DocError::Invalid(_))
        ));
    }

    #[test]
    fn big_coefficients_survive_the_trip() {
        let ctx = ctx2();
        let huge = Coefficient::new(
            BigInt::from_str("123456789012345678901234567890").unwrap(),
            BigInt::from_str("987654321098765432109876543211").unwrap(),
        );
        let p = ctx.monomial(Word::from([1, 2]), huge) + ctx.constant(coeff_int(-3));
        let doc = Document::parse(&Document::from_poly(&p).to_json()).unwrap();
        assert_eq!(doc.as_poly().unwrap(), p);
    }
}
