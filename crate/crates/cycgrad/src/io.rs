//! Text grammar for noncommutative polynomial expressions.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := coeff ('*' factor)* | factor ('*' factor)*
//! factor := var ('^' posint)? | '(' expr ')'
//! coeff  := integer | integer '/' posint
//! var    := 'X' posint
//! ```
//!
//! Whitespace is insignificant, `*` is mandatory between factors, `^` applies
//! to variables only, and products read left to right without reordering.
//! Printing emits the canonical form: terms in degree-then-lexicographic
//! order, coefficients as integers or `a/b`, letters spelled out with `*`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraContext, Coefficient, Poly, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    IndexOutOfRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Integer(BigInt),
    Var(u32),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Plus => write!(f, "'+'"),
            Token::Minus => write!(f, "'-'"),
            Token::Star => write!(f, "'*'"),
            Token::Caret => write!(f, "'^'"),
            Token::Slash => write!(f, "'/'"),
            Token::LParen => write!(f, "'('"),
            Token::RParen => write!(f, "')'"),
            Token::Integer(v) => write!(f, "integer {v}"),
            Token::Var(j) => write!(f, "variable X{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Position {
    line: u32,
    column: u32,
}

fn syntax_error(position: Position, message: impl Into<String>) -> ParseError {
    ParseError {
        line: position.line,
        column: position.column,
        kind: ParseErrorKind::Syntax,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Token, Position)>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1u32;
    let mut column = 1u32;
    let mut chars = text.chars().peekable();

    while let Some(&c) = chars.peek() {
        let position = Position { line, column };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '+' | '-' | '*' | '^' | '/' | '(' | ')' => {
                chars.next();
                column += 1;
                tokens.push((
                    match c {
                        '+' => Token::Plus,
                        '-' => Token::Minus,
                        '*' => Token::Star,
                        '^' => Token::Caret,
                        '/' => Token::Slash,
                        '(' => Token::LParen,
                        _ => Token::RParen,
                    },
                    position,
                ));
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                let value = digits.parse::<BigInt>().expect("digit run parses");
                tokens.push((Token::Integer(value), position));
            }
            'X' => {
                chars.next();
                column += 1;
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                if digits.is_empty() {
                    return Err(syntax_error(
                        position,
                        "expected a variable index after 'X'",
                    ));
                }
                let index: u32 = digits.parse().map_err(|_| ParseError {
                    line: position.line,
                    column: position.column,
                    kind: ParseErrorKind::IndexOutOfRange,
                    message: format!("variable index X{digits} is too large"),
                })?;
                if index == 0 {
                    return Err(ParseError {
                        line: position.line,
                        column: position.column,
                        kind: ParseErrorKind::IndexOutOfRange,
                        message: "variable index must be at least 1".into(),
                    });
                }
                tokens.push((Token::Var(index), position));
            }
            other => {
                return Err(syntax_error(
                    position,
                    format!("unexpected character {other:?}"),
                ));
            }
        }
    }
    Ok(tokens)
}

/// Cap on `^` exponents, keeping expansion size predictable.
const MAX_EXPONENT: u64 = 4096;

struct Parser {
    tokens: Vec<(Token, Position)>,
    cursor: usize,
    end: Position,
    ctx: AlgebraContext,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(t, _)| t)
    }

    fn position(&self) -> Position {
        self.tokens
            .get(self.cursor)
            .map(|&(_, p)| p)
            .unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.cursor).map(|(t, _)| t.clone());
        if token.is_some() {
            self.cursor += 1;
        }
        token
    }

    fn expect(&mut self, expected: &Token, what: &str) -> Result<(), ParseError> {
        let position = self.position();
        match self.advance() {
            Some(ref token) if token == expected => Ok(()),
            Some(token) => Err(syntax_error(position, format!("expected {what}, found {token}"))),
            None => Err(syntax_error(position, format!("expected {what}, found end of input"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Poly, ParseError> {
        let mut negate = false;
        match self.peek() {
            Some(Token::Plus) => {
                self.advance();
            }
            Some(Token::Minus) => {
                self.advance();
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.parse_term()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.advance();
                    let term = self.parse_term()?;
                    acc = &acc + &term;
                }
                Some(Token::Minus) => {
                    self.advance();
                    let term = self.parse_term()?;
                    acc = &acc - &term;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = if matches!(self.peek(), Some(Token::Integer(_))) {
            let value = self.parse_coefficient()?;
            self.ctx.constant(value)
        } else {
            self.parse_factor()?
        };
        while matches!(self.peek(), Some(Token::Star)) {
            self.advance();
            let factor = self.parse_factor()?;
            acc = &acc * &factor;
        }
        Ok(acc)
    }

    fn parse_coefficient(&mut self) -> Result<Coefficient, ParseError> {
        let position = self.position();
        let Some(Token::Integer(numerator)) = self.advance() else {
            return Err(syntax_error(position, "expected an integer coefficient"));
        };
        if matches!(self.peek(), Some(Token::Slash)) {
            self.advance();
            let position = self.position();
            match self.advance() {
                Some(Token::Integer(denominator)) => {
                    if denominator.is_zero() {
                        return Err(syntax_error(
                            position,
                            "denominator must be a positive integer",
                        ));
                    }
                    Ok(Coefficient::new(numerator, denominator))
                }
                Some(token) => Err(syntax_error(
                    position,
                    format!("expected a positive integer denominator, found {token}"),
                )),
                None => Err(syntax_error(
                    position,
                    "expected a positive integer denominator, found end of input",
                )),
            }
        } else {
            Ok(Coefficient::from_integer(numerator))
        }
    }

    fn parse_factor(&mut self) -> Result<Poly, ParseError> {
        let position = self.position();
        match self.advance() {
            Some(Token::Var(index)) => {
                if !self.ctx.contains_index(index) {
                    return Err(ParseError {
                        line: position.line,
                        column: position.column,
                        kind: ParseErrorKind::IndexOutOfRange,
                        message: format!(
                            "variable X{index} out of range: context has X1..=X{}",
                            self.ctx.arity()
                        ),
                    });
                }
                let exponent = if matches!(self.peek(), Some(Token::Caret)) {
                    self.advance();
                    let position = self.position();
                    match self.advance() {
                        Some(Token::Integer(value)) => {
                            if value.is_zero() || value.is_negative() {
                                return Err(syntax_error(
                                    position,
                                    "exponent must be a positive integer",
                                ));
                            }
                            let value: u64 = value.try_into().map_err(|_| {
                                syntax_error(position, "exponent too large")
                            })?;
                            if value > MAX_EXPONENT {
                                return Err(syntax_error(position, "exponent too large"));
                            }
                            value
                        }
                        Some(token) => {
                            return Err(syntax_error(
                                position,
                                format!("expected a positive integer exponent, found {token}"),
                            ));
                        }
                        None => {
                            return Err(syntax_error(
                                position,
                                "expected a positive integer exponent, found end of input",
                            ));
                        }
                    }
                } else {
                    1
                };
                let letters = vec![index; exponent as usize];
                Ok(self.ctx.monomial(Word::new(letters), Coefficient::one()))
            }
            Some(Token::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(&Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(token) => Err(syntax_error(
                position,
                format!("expected a variable or '(', found {token}"),
            )),
            None => Err(syntax_error(
                position,
                "expected a variable or '(', found end of input",
            )),
        }
    }
}

/// Parses an expression in the grammar above into a canonical polynomial.
pub fn parse_poly(text: &str, ctx: AlgebraContext) -> Result<Poly, ParseError> {
    let tokens = lex(text)?;
    let end_line = text.chars().filter(|&c| c == '\n').count() as u32 + 1;
    let end_column = text
        .rsplit('\n')
        .next()
        .map(|tail| tail.chars().count() as u32 + 1)
        .unwrap_or(1);
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end: Position {
            line: end_line,
            column: end_column,
        },
        ctx,
    };
    if parser.peek().is_none() {
        return Err(syntax_error(parser.end, "empty expression"));
    }
    let poly = parser.parse_expr()?;
    if let Some(extra) = parser.peek() {
        return Err(syntax_error(
            parser.position(),
            format!("expected '+', '-' or end of input, found {extra}"),
        ));
    }
    Ok(poly)
}

fn format_magnitude(value: &Coefficient) -> String {
    let magnitude = value.abs();
    if magnitude.denom().is_one() {
        magnitude.numer().to_string()
    } else {
        format!("{}/{}", magnitude.numer(), magnitude.denom())
    }
}

/// Canonical rendering: terms in degree-then-lexicographic order, unit
/// coefficient magnitudes omitted before a word, `a/b` rationals.
/// `parse_poly(print_poly(p)) == p` for every polynomial.
pub fn print_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (index, (word, value)) in p.terms().enumerate() {
        let negative = value.is_negative();
        if index == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let magnitude = format_magnitude(value);
        if word.is_empty() {
            out.push_str(&magnitude);
        } else if magnitude == "1" {
            out.push_str(&word.to_string());
        } else {
            out.push_str(&magnitude);
            out.push('*');
            out.push_str(&word.to_string());
        }
    }
    out
}

/// Largest variable index occurring in the given texts, at least 1. Used to
/// infer the context arity when none is supplied.
pub fn infer_arity(texts: &[&str]) -> u32 {
    let mut arity = 1u32;
    for text in texts {
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            if c == 'X' {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if let Ok(index) = digits.parse::<u32>() {
                    arity = arity.max(index);
                }
            }
        }
    }
    arity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{coeff_int, coeff_ratio, commutator};

    fn ctx2() -> AlgebraContext {
        AlgebraContext::new(2).unwrap()
    }

    #[test]
    fn parses_commutator_expression() {
        let ctx = ctx2();
        let p = parse_poly("X1*X2 - X2*X1", ctx).unwrap();
        assert_eq!(p, commutator(&ctx.var(1), &ctx.var(2)));
    }

    #[test]
    fn parses_rational_coefficient_and_power() {
        let ctx = ctx2();
        let p = parse_poly("1/2*X1^2", ctx).unwrap();
        assert_eq!(p, ctx.monomial(Word::from([1, 1]), coeff_ratio(1, 2)));
    }

    #[test]
    fn rejects_out_of_range_variable() {
        let ctx = ctx2();
        let err = parse_poly("X3", ctx).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::IndexOutOfRange);
        assert_eq!((err.line, err.column), (1, 1));
    }

    #[test]
    fn rejects_zero_index_variable() {
        let ctx = ctx2();
        let err = parse_poly("X0", ctx).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::IndexOutOfRange);
    }

    #[test]
    fn reports_position_of_syntax_errors() {
        let ctx = ctx2();
        let err = parse_poly("X1 + * X2", ctx).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!((err.line, err.column), (1, 6));
        assert!(err.message.contains("expected"));

        let err = parse_poly("X1 *", ctx).unwrap_err();
        assert!(err.message.contains("end of input"));
    }

    #[test]
    fn rejects_empty_and_trailing_input() {
        let ctx = ctx2();
        assert!(parse_poly("", ctx).is_err());
        assert!(parse_poly("   ", ctx).is_err());
        let err = parse_poly("X1 X2", ctx).unwrap_err();
        assert!(err.message.contains("expected '+', '-' or end of input"));
    }

    #[test]
    fn parses_constants_and_unary_minus() {
        let ctx = ctx2();
        assert_eq!(parse_poly("7", ctx).unwrap(), ctx.constant(coeff_int(7)));
        assert_eq!(parse_poly("0", ctx).unwrap(), ctx.zero());
        assert_eq!(
            parse_poly("-X1", ctx).unwrap(),
            -ctx.var(1)
        );
        assert_eq!(
            parse_poly("-1/2", ctx).unwrap(),
            ctx.constant(coeff_ratio(-1, 2))
        );
    }

    #[test]
    fn parses_parenthesized_groups() {
        let ctx = ctx2();
        let p = parse_poly("(X1 + X2) * (X1 - X2)", ctx).unwrap();
        assert_eq!(p, &(&ctx.var(1) + &ctx.var(2)) * &(&ctx.var(1) - &ctx.var(2)));
    }

    #[test]
    fn power_applies_to_variables_only() {
        let ctx = ctx2();
        assert!(parse_poly("(X1 + X2)^2", ctx).is_err());
        assert!(parse_poly("X1^0", ctx).is_err());
    }

    #[test]
    fn whitespace_is_insignificant() {
        let ctx = ctx2();
        assert_eq!(
            parse_poly(" X1\t*X2\n- X2 * X1 ", ctx).unwrap(),
            parse_poly("X1*X2-X2*X1", ctx).unwrap()
        );
    }

    #[test]
    fn prints_zero() {
        let ctx = ctx2();
        assert_eq!(print_poly(&ctx.zero()), "0");
    }

    #[test]
    fn prints_commutator_in_canonical_order() {
        let ctx = ctx2();
        let p = commutator(&ctx.var(1), &ctx.var(2));
        assert_eq!(print_poly(&p), "X1*X2 - X2*X1");
    }

    #[test]
    fn prints_rational_coefficients() {
        let ctx = ctx2();
        let mut p = ctx.zero();
        p.add_term(Word::from([1, 2]), coeff_ratio(1, 2));
        p.add_term(Word::from([2, 1]), coeff_ratio(1, 2));
        assert_eq!(print_poly(&p), "1/2*X1*X2 + 1/2*X2*X1");
    }

    #[test]
    fn prints_leading_negative_and_constant_terms() {
        let ctx = ctx2();
        let p = &ctx.constant(coeff_int(-3)) - &ctx.var(1);
        assert_eq!(print_poly(&p), "-3 - X1");
    }

    #[test]
    fn print_then_parse_round_trips() {
        let ctx = AlgebraContext::new(3).unwrap();
        let mut sampler = crate::sampling::Sampler::new(ctx, 6, 0x10);
        for _ in 0..200 {
            let p = sampler.poly();
            let text = print_poly(&p);
            let back = parse_poly(&text, ctx).unwrap();
            assert_eq!(back, p, "round trip failed for {text}");
        }
    }

    #[test]
    fn parse_then_print_is_idempotent() {
        let ctx = ctx2();
        for text in ["X2*X1 + X1*X2", "2*X1 - X1", "(X1+X2)*(X1-X2)", "3 + 0*X1"] {
            let once = print_poly(&parse_poly(text, ctx).unwrap());
            let twice = print_poly(&parse_poly(&once, ctx).unwrap());
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn infers_arity_from_largest_index() {
        assert_eq!(infer_arity(&["X1*X2 - X2*X1"]), 2);
        assert_eq!(infer_arity(&["X1", "X4*X2"]), 4);
        assert_eq!(infer_arity(&["7"]), 1);
        assert_eq!(infer_arity(&[]), 1);
    }
}
