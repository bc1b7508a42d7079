//! Text grammars for the command line: sequences, probes, moduli, and
//! field expressions. Malformed text is a usage error; a well-formed
//! request that fails numerically (an exhausted search, an undecidable
//! tie) is a domain error carrying the library's own description.

use std::collections::BTreeSet;

use ncreal::compression::{anti_cauchy, Compression};
use ncreal::extraction::quaternary_value;
use ncreal::field::{
    creal_add, creal_div, creal_mul, creal_neg, creal_scale, creal_sub, sqrt,
};
use ncreal::numeric::parse_rational;
use ncreal::{CauchyReal, Error, Modulus, Probe, Rational, Sequence};

/// Budget for value-dependent searches inside field expressions
/// (inversion witnesses, sign refinement).
pub const EXPR_BUDGET: u64 = 256;

#[derive(Debug)]
pub enum CliError {
    /// The request itself is malformed; reported with exit status 2.
    Usage(String),
    /// The computation failed for a stated numeric reason; exit status 1.
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A rational argument inside a spec string; parse failures are usage
/// errors.
pub fn rational_arg(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| usage(format!("{e}")))
}

fn nat_arg(s: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| usage(format!("expected a natural number, got {s:?}")))
}

/// Splits at top-level occurrences of `sep`, leaving parenthesized groups
/// intact.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// The text inside `name(...)` if `s` has that shape.
fn call_body<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    let rest = s.strip_prefix(name)?;
    let rest = rest.strip_prefix('(')?;
    rest.strip_suffix(')')
}

/// Parses `SPEC;THRESHOLD;PROBE` into a compression.
fn parse_compression(body: &str, horizon: u64) -> Result<Compression> {
    let parts = split_top(body, ';');
    if parts.len() != 3 {
        return Err(usage(format!(
            "compression takes `sequence;threshold;probe`, got {body:?}"
        )));
    }
    let seq = parse_sequence(parts[0].trim(), horizon)?;
    let threshold = nat_arg(parts[1])?;
    let probe = parse_probe(parts[2].trim())?;
    Ok(Compression::new(seq, threshold, probe, horizon))
}

/// Sequence grammar:
/// `nat` | `const:Q` | `geom:Q` | `one-minus-geom:Q` | `affine:Q,Q` |
/// `table:Q,...` | `table@FILE` | `quat:N,...` |
/// `compress(SEQ;N;PROBE)` | `anti-cauchy(PROBE,...)` | `field(EXPR)`.
pub fn parse_sequence(s: &str, horizon: u64) -> Result<Sequence> {
    if s == "nat" {
        return Ok(Sequence::naturals());
    }
    if let Some(arg) = s.strip_prefix("const:") {
        return Ok(Sequence::constant(rational_arg(arg)?));
    }
    if let Some(arg) = s.strip_prefix("geom:") {
        return Ok(Sequence::geometric(rational_arg(arg)?));
    }
    if let Some(arg) = s.strip_prefix("one-minus-geom:") {
        return Ok(Sequence::one_minus_geometric(rational_arg(arg)?));
    }
    if let Some(arg) = s.strip_prefix("affine:") {
        let (offset, slope) = two_rationals(arg)?;
        return Ok(Sequence::affine(offset, slope));
    }
    if let Some(arg) = s.strip_prefix("table:") {
        let values = arg
            .split(',')
            .map(|v| rational_arg(v.trim()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Sequence::from_table(values));
    }
    if let Some(path) = s.strip_prefix("table@") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read table file {path:?}: {e}")))?;
        let values = text
            .split_whitespace()
            .map(rational_arg)
            .collect::<Result<Vec<_>>>()?;
        return Ok(Sequence::from_table(values));
    }
    if let Some(arg) = s.strip_prefix("quat:") {
        let elements = arg
            .split(',')
            .map(nat_arg)
            .collect::<Result<BTreeSet<u64>>>()?;
        return Ok(Sequence::from_fn(move |k| {
            let cut: BTreeSet<u64> = elements.iter().copied().filter(|&p| p <= k).collect();
            quaternary_value(&cut)
        }));
    }
    if let Some(body) = call_body(s, "compress") {
        return Ok(parse_compression(body, horizon)?.compressed());
    }
    if let Some(body) = call_body(s, "anti-cauchy") {
        let probes = split_top(body, ',')
            .into_iter()
            .map(|p| parse_probe(p.trim()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(anti_cauchy(probes, horizon).q().clone());
    }
    if let Some(body) = call_body(s, "field") {
        return Ok(parse_field_expr(body)?.approximant().clone());
    }
    Err(usage(format!("unknown sequence spec {s:?}")))
}

fn two_rationals(arg: &str) -> Result<(Rational, Rational)> {
    let parts: Vec<&str> = arg.split(',').collect();
    if parts.len() != 2 {
        return Err(usage(format!("expected two comma-separated rationals, got {arg:?}")));
    }
    Ok((rational_arg(parts[0].trim())?, rational_arg(parts[1].trim())?))
}

fn two_naturals(arg: &str) -> Result<(u64, u64)> {
    let parts: Vec<&str> = arg.split(',').collect();
    if parts.len() != 2 {
        return Err(usage(format!("expected two comma-separated naturals, got {arg:?}")));
    }
    Ok((nat_arg(parts[0])?, nat_arg(parts[1])?))
}

/// Probe grammar: `id` | `double` | `square` | `tri` | `shift:K` |
/// `affine:C,D` (strictly increasing requires D >= 1).
pub fn parse_probe(s: &str) -> Result<Probe> {
    match s {
        "id" => return Ok(Probe::identity()),
        "double" => return Ok(Probe::doubling()),
        "square" => return Ok(Probe::squares()),
        "tri" => return Ok(Probe::triangular()),
        _ => {}
    }
    if let Some(arg) = s.strip_prefix("shift:") {
        return Ok(Probe::shift(nat_arg(arg)?));
    }
    if let Some(arg) = s.strip_prefix("affine:") {
        let (offset, slope) = two_naturals(arg)?;
        if slope == 0 {
            return Err(usage("a probe with slope 0 is not strictly increasing"));
        }
        return Ok(Probe::affine(offset, slope));
    }
    Err(usage(format!("unknown probe spec {s:?}")))
}

/// Modulus grammar: `id` | `const:K` | `shift:K` | `affine:C,D` |
/// `compress-g(SEQ;N;PROBE)`.
pub fn parse_modulus(s: &str, horizon: u64) -> Result<Modulus> {
    match s {
        "id" => return Ok(Modulus::identity()),
        _ => {}
    }
    if let Some(arg) = s.strip_prefix("const:") {
        return Ok(Modulus::constant(nat_arg(arg)?));
    }
    if let Some(arg) = s.strip_prefix("shift:") {
        return Ok(Modulus::shift(nat_arg(arg)?));
    }
    if let Some(arg) = s.strip_prefix("affine:") {
        let (offset, slope) = two_naturals(arg)?;
        return Ok(Modulus::affine(offset, slope));
    }
    if let Some(body) = call_body(s, "compress-g") {
        return Ok(parse_compression(body, horizon)?.modulus());
    }
    Err(usage(format!("unknown modulus spec {s:?}")))
}

// ---- field expressions ----

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Rational),
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Token>> {
    let bytes = s.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' => {
                // digits, optionally followed immediately by /digits: an
                // exact rational literal ("1/2"); with spaces around the
                // slash it lexes as division instead, same value
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut end = i;
                if i < bytes.len()
                    && bytes[i] == b'/'
                    && i + 1 < bytes.len()
                    && bytes[i + 1].is_ascii_digit()
                {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    end = i;
                }
                tokens.push(Token::Number(rational_arg(&s[start..end])?));
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_lowercase() {
                    i += 1;
                }
                match &s[start..i] {
                    "sqrt" => tokens.push(Token::Sqrt),
                    word => return Err(usage(format!("unknown function {word:?}"))),
                }
            }
            other => return Err(usage(format!("unexpected character {other:?} in expression"))),
        }
    }
    Ok(tokens)
}

/// An expression value: exact rationals stay exact as long as possible so
/// that constant subexpressions cost nothing and `sqrt` can insist on a
/// rational radicand.
#[derive(Clone)]
enum Value {
    Exact(Rational),
    Real(CauchyReal),
}

impl Value {
    fn into_real(self) -> CauchyReal {
        match self {
            Value::Exact(q) => CauchyReal::from_rational(q),
            Value::Real(x) => x,
        }
    }
}

struct ExprParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(usage(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    let rhs = self.term()?;
                    acc = add(acc, rhs);
                }
                Some(Token::Minus) => {
                    self.next();
                    let rhs = self.term()?;
                    acc = sub(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next();
                    let rhs = self.factor()?;
                    acc = mul(acc, rhs)?;
                }
                Some(Token::Slash) => {
                    self.next();
                    let rhs = self.factor()?;
                    acc = div(acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Value> {
        match self.next() {
            Some(Token::Number(q)) => Ok(Value::Exact(q)),
            Some(Token::Minus) => {
                let inner = self.factor()?;
                Ok(match inner {
                    Value::Exact(q) => Value::Exact(-q),
                    Value::Real(x) => Value::Real(creal_neg(&x)),
                })
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Sqrt) => {
                self.expect(Token::LParen)?;
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                match inner {
                    Value::Exact(q) => Ok(Value::Real(sqrt(&q)?)),
                    Value::Real(_) => Err(usage(
                        "sqrt takes a constant rational argument".to_string(),
                    )),
                }
            }
            got => Err(usage(format!("expected a value, found {got:?}"))),
        }
    }
}

fn add(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Exact(p), Value::Exact(q)) => Value::Exact(p + q),
        (a, b) => Value::Real(creal_add(&a.into_real(), &b.into_real())),
    }
}

fn sub(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Exact(p), Value::Exact(q)) => Value::Exact(p - q),
        (a, b) => Value::Real(creal_sub(&a.into_real(), &b.into_real())),
    }
}

fn mul(a: Value, b: Value) -> Result<Value> {
    Ok(match (a, b) {
        (Value::Exact(p), Value::Exact(q)) => Value::Exact(p * q),
        (Value::Exact(p), Value::Real(x)) | (Value::Real(x), Value::Exact(p)) => {
            Value::Real(creal_scale(&p, &x))
        }
        (Value::Real(x), Value::Real(y)) => Value::Real(creal_mul(&x, &y)?),
    })
}

fn div(a: Value, b: Value) -> Result<Value> {
    Ok(match (a, b) {
        (_, Value::Exact(q)) if q == Rational::from_integer(0.into()) => {
            return Err(CliError::Domain(Error::ZeroDenominator));
        }
        (Value::Exact(p), Value::Exact(q)) => Value::Exact(p / q),
        (Value::Real(x), Value::Exact(q)) => {
            Value::Real(creal_scale(&(Rational::from_integer(1.into()) / q), &x))
        }
        (a, Value::Real(y)) => Value::Real(creal_div(&a.into_real(), &y, EXPR_BUDGET)?),
    })
}

/// Field expression grammar: rational literals (`p/q` tight, or spaced as
/// division), `+ - * /`, unary minus, `sqrt(constant)`, parentheses.
pub fn parse_field_expr(s: &str) -> Result<CauchyReal> {
    let tokens = lex(s)?;
    let mut parser = ExprParser { tokens, pos: 0 };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(usage(format!(
            "trailing tokens after expression: {:?}",
            &parser.tokens[parser.pos..]
        )));
    }
    Ok(value.into_real())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncreal::numeric::rational;

    fn rat(p: i64, q: i64) -> Rational {
        rational(p, q).unwrap()
    }

    #[test]
    fn sequences_parse() {
        let s = parse_sequence("geom:1/2", 100).unwrap();
        assert_eq!(s.eval(3).unwrap(), rat(1, 8));
        let s = parse_sequence("table:1,2,3/2", 100).unwrap();
        assert_eq!(s.eval(2).unwrap(), rat(3, 2));
        let s = parse_sequence("quat:0,2", 100).unwrap();
        assert_eq!(s.eval(1).unwrap(), rat(1, 1));
        assert_eq!(s.eval(2).unwrap(), rat(17, 16));
        let s = parse_sequence("compress(nat;0;id)", 4096).unwrap();
        assert_eq!(s.eval(2).unwrap(), rat(3, 2));
        assert!(matches!(
            parse_sequence("mystery", 100),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn probes_and_moduli_parse() {
        assert_eq!(parse_probe("double").unwrap().eval(3).unwrap(), 6);
        assert_eq!(parse_probe("affine:1,3").unwrap().eval(2).unwrap(), 7);
        assert!(matches!(parse_probe("affine:1,0"), Err(CliError::Usage(_))));
        assert_eq!(parse_modulus("const:5", 100).unwrap().eval(9).unwrap(), 5);
        let g = parse_modulus("compress-g(nat;0;id)", 4096).unwrap();
        assert_eq!(g.eval(3).unwrap(), 7);
    }

    #[test]
    fn field_expressions_evaluate() {
        let x = parse_field_expr("1/2 + 1/3").unwrap();
        assert_eq!(x.refine(10).unwrap(), rat(5, 6));
        let x = parse_field_expr("(1 + 2) * 4 - 5").unwrap();
        assert_eq!(x.refine(4).unwrap(), rat(7, 1));
        let x = parse_field_expr("1 / 3").unwrap();
        assert_eq!(x.refine(4).unwrap(), rat(1, 3));
        let x = parse_field_expr("-sqrt(2) * sqrt(2)").unwrap();
        let drift = x.refine(20).unwrap() + rat(2, 1);
        assert!(drift < rat(1, 1000) && drift > rat(-1, 1000));
        assert!(matches!(
            parse_field_expr("sqrt(sqrt(2))"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_field_expr("1 / 0"),
            Err(CliError::Domain(Error::ZeroDenominator))
        ));
        assert!(matches!(
            parse_field_expr("2 +"),
            Err(CliError::Usage(_))
        ));
    }
}
