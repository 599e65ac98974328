//! Recursive-descent parser for the FOL surface syntax.
//!
//! Grammar (tightest first): `-` negation, `&`, `|`, `->`/`<->`; implications
//! associate right, `&`/`|` associate left, quantifier scope extends
//! maximally to the right, parentheses override. `~` is an alias for `-`
//! and `>>` for `->`. Multi-variable binders (`all x y.`) desugar into
//! nested single-variable quantifiers.
//!
//! Occurrences bound by an enclosing quantifier are variables. An unbound
//! identifier is treated as a free variable when it looks like one (a single
//! letter in `u..z`, optionally followed by digits, e.g. `x`, `y2`) and as a
//! constant otherwise (`mars`, `john`). Free variables are rejected:
//! downstream operations require closed sentences.

use super::{Formula, Term};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),
}

/// Parse one closed FOL sentence.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.parse_formula(&mut Vec::new())?;
    parser.expect_end()?;
    let free: Vec<String> = formula.free_variables().into_iter().collect();
    if !free.is_empty() {
        return Err(ParseError::FreeVariables(free));
    }
    Ok(formula)
}

fn is_variable_shaped(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('u'..='z')) && chars.all(|c| c.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Arrow,
    Iff,
    Neg,
    All,
    Exists,
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Neg => "-",
            Tok::All => "all",
            Tok::Exists => "exists",
            Tok::Ident(name) => return write!(f, "{name}"),
        };
        write!(f, "{s}")
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                tokens.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                tokens.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                tokens.push((Tok::Comma, i));
                i += 1;
            }
            b'.' => {
                tokens.push((Tok::Dot, i));
                i += 1;
            }
            b'&' => {
                tokens.push((Tok::And, i));
                i += 1;
            }
            b'|' => {
                tokens.push((Tok::Or, i));
                i += 1;
            }
            b'~' => {
                tokens.push((Tok::Neg, i));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    tokens.push((Tok::Neg, i));
                    i += 1;
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    tokens.push((Tok::Iff, i));
                    i += 3;
                } else {
                    return Err(ParseError::Syntax {
                        position: i,
                        message: "expected '<->'".to_string(),
                    });
                }
            }
            b'>' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        position: i,
                        message: "expected '>>'".to_string(),
                    });
                }
            }
            b'=' => {
                return Err(ParseError::Syntax {
                    position: i,
                    message: "equality is not supported".to_string(),
                });
            }
            b'A'..=b'Z' | b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "all" => Tok::All,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word.to_string()),
                };
                tokens.push((tok, start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: i,
                    message: format!("unexpected character {:?}", text[i..].chars().next().unwrap()),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or_else(|| self.tokens.last().map(|(_, p)| p + 1).unwrap_or(0))
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            position: self.position(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected '{want}', found '{t}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected trailing '{t}'"))),
        }
    }

    // Lowest tier: right-associative '->' / '<->' chains.
    fn parse_formula(&mut self, bound: &mut Vec<String>) -> Result<Formula, ParseError> {
        let left = self.parse_or(bound)?;
        match self.peek() {
            Some(Tok::Arrow) => {
                self.pos += 1;
                let right = self.parse_formula(bound)?;
                Ok(Formula::Implies(Box::new(left), Box::new(right)))
            }
            Some(Tok::Iff) => {
                self.pos += 1;
                let right = self.parse_formula(bound)?;
                Ok(Formula::Iff(Box::new(left), Box::new(right)))
            }
            _ => Ok(left),
        }
    }

    fn parse_or(&mut self, bound: &mut Vec<String>) -> Result<Formula, ParseError> {
        let mut left = self.parse_and(bound)?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let right = self.parse_and(bound)?;
            left = Formula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self, bound: &mut Vec<String>) -> Result<Formula, ParseError> {
        let mut left = self.parse_unary(bound)?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let right = self.parse_unary(bound)?;
            left = Formula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_unary(&mut self, bound: &mut Vec<String>) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Neg) => {
                self.pos += 1;
                let inner = self.parse_unary(bound)?;
                Ok(Formula::Not(Box::new(inner)))
            }
            Some(Tok::All) | Some(Tok::Exists) => self.parse_quantified(bound),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.parse_formula(bound)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(_)) => self.parse_atom(bound),
            Some(t) => Err(self.error(format!("expected a formula, found '{t}'"))),
            None => Err(self.error("expected a formula, found end of input")),
        }
    }

    fn parse_quantified(&mut self, bound: &mut Vec<String>) -> Result<Formula, ParseError> {
        let universal = matches!(self.bump(), Some(Tok::All));
        let mut vars = Vec::new();
        while let Some(Tok::Ident(name)) = self.peek() {
            vars.push(name.clone());
            self.pos += 1;
        }
        if vars.is_empty() {
            return Err(self.error("expected at least one quantified variable"));
        }
        self.expect(Tok::Dot)?;
        let depth = bound.len();
        bound.extend(vars.iter().cloned());
        // Body is parsed at the lowest tier: the scope extends maximally right.
        let body = self.parse_formula(bound)?;
        bound.truncate(depth);
        // Desugar `all x y.` into nested single-variable quantifiers.
        let mut formula = body;
        for var in vars.into_iter().rev() {
            formula = if universal {
                Formula::ForAll(vec![var], Box::new(formula))
            } else {
                Formula::Exists(vec![var], Box::new(formula))
            };
        }
        Ok(formula)
    }

    fn parse_atom(&mut self, bound: &mut Vec<String>) -> Result<Formula, ParseError> {
        let predicate = match self.bump() {
            Some(Tok::Ident(name)) => name,
            _ => unreachable!("parse_atom called without identifier lookahead"),
        };
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            if self.peek() == Some(&Tok::RParen) {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.parse_term(bound)?);
                    match self.peek() {
                        Some(Tok::Comma) => self.pos += 1,
                        Some(Tok::RParen) => {
                            self.pos += 1;
                            break;
                        }
                        Some(t) => return Err(self.error(format!("expected ',' or ')', found '{t}'"))),
                        None => return Err(self.error("unterminated argument list")),
                    }
                }
            }
        }
        Ok(Formula::Atom { predicate, args })
    }

    fn parse_term(&mut self, bound: &mut Vec<String>) -> Result<Term, ParseError> {
        let name = match self.bump() {
            Some(Tok::Ident(name)) => name,
            Some(t) => return Err(self.error(format!("expected a term, found '{t}'"))),
            None => return Err(self.error("expected a term, found end of input")),
        };
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let mut args = Vec::new();
            loop {
                args.push(self.parse_term(bound)?);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    Some(t) => return Err(self.error(format!("expected ',' or ')', found '{t}'"))),
                    None => return Err(self.error("unterminated argument list")),
                }
            }
            return Ok(Term::Function(name, args));
        }
        if bound.iter().any(|b| *b == name) || is_variable_shaped(&name) {
            Ok(Term::Variable(name))
        } else {
            Ok(Term::Constant(name))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::Formula as F;
    use crate::fol::Term as T;

    #[test]
    fn parses_quantified_implication() {
        let f = parse_formula("all x. (Harp(x) -> Instrument(x))").unwrap();
        let expected = F::forall(
            &["x"],
            F::implies(
                F::atom("Harp", vec![T::var("x")]),
                F::atom("Instrument", vec![T::var("x")]),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_ground_atom() {
        assert_eq!(
            parse_formula("Planet(mars)").unwrap(),
            F::atom("Planet", vec![T::constant("mars")])
        );
    }

    #[test]
    fn unbound_variable_is_reported() {
        match parse_formula("P(x)") {
            Err(ParseError::FreeVariables(vars)) => assert_eq!(vars, vec!["x".to_string()]),
            other => panic!("expected FreeVariables, got {other:?}"),
        }
    }

    #[test]
    fn precedence_neg_and_or_implies() {
        // A(c) & B(c) | C(c) parses as Or(And(A, B), C)
        let f = parse_formula("A(c) & B(c) | C(c)").unwrap();
        assert_eq!(
            f,
            F::or(
                F::and(
                    F::atom("A", vec![T::constant("c")]),
                    F::atom("B", vec![T::constant("c")])
                ),
                F::atom("C", vec![T::constant("c")])
            )
        );
        // -A(c) & B(c) parses as And(Not(A), B)
        let f = parse_formula("-A(c) & B(c)").unwrap();
        assert_eq!(
            f,
            F::and(
                F::not(F::atom("A", vec![T::constant("c")])),
                F::atom("B", vec![T::constant("c")])
            )
        );
        // A(c) -> B(c) -> C(c) associates right
        let f = parse_formula("A(c) -> B(c) -> C(c)").unwrap();
        assert_eq!(
            f,
            F::implies(
                F::atom("A", vec![T::constant("c")]),
                F::implies(
                    F::atom("B", vec![T::constant("c")]),
                    F::atom("C", vec![T::constant("c")])
                )
            )
        );
        // A(c) & B(c) -> C(c): & binds tighter than ->
        let f = parse_formula("A(c) & B(c) -> C(c)").unwrap();
        assert_eq!(
            f,
            F::implies(
                F::and(
                    F::atom("A", vec![T::constant("c")]),
                    F::atom("B", vec![T::constant("c")])
                ),
                F::atom("C", vec![T::constant("c")])
            )
        );
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula("all x. P(x) & Q(x)").unwrap();
        assert_eq!(
            f,
            F::forall(
                &["x"],
                F::and(
                    F::atom("P", vec![T::var("x")]),
                    F::atom("Q", vec![T::var("x")])
                )
            )
        );
    }

    #[test]
    fn multi_variable_binder_desugars() {
        let f = parse_formula("all x y. Likes(x, y)").unwrap();
        assert_eq!(
            f,
            F::forall(
                &["x"],
                F::forall(&["y"], F::atom("Likes", vec![T::var("x"), T::var("y")]))
            )
        );
    }

    #[test]
    fn operator_aliases_accepted() {
        assert_eq!(
            parse_formula("all x. (Human(x) >> Mortal(x))").unwrap(),
            parse_formula("all x. (Human(x) -> Mortal(x))").unwrap()
        );
        assert_eq!(
            parse_formula("~Planet(mars)").unwrap(),
            parse_formula("-Planet(mars)").unwrap()
        );
    }

    #[test]
    fn equality_is_a_syntax_error() {
        match parse_formula("all x. x = x") {
            Err(ParseError::Syntax { message, .. }) => {
                assert!(message.contains("equality"), "{message}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse_formula("P(") {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn binding_beats_lexical_shape() {
        // `person` is bound, so it is a variable despite not looking like one.
        let f = parse_formula("all person. (Human(person) -> Mortal(person))").unwrap();
        assert!(f.is_closed());
        // An identifier bound in one branch is still a constant elsewhere.
        let f = parse_formula("exists y. Holds(y, harp)").unwrap();
        assert_eq!(
            f,
            F::exists(&["y"], F::atom("Holds", vec![T::var("y"), T::constant("harp")]))
        );
    }

    #[test]
    fn function_terms_parse() {
        let f = parse_formula("all x. Taller(father(x), x)").unwrap();
        assert_eq!(
            f,
            F::forall(
                &["x"],
                F::atom(
                    "Taller",
                    vec![T::function("father", vec![T::var("x")]), T::var("x")]
                )
            )
        );
    }

    #[test]
    fn trailing_tokens_rejected() {
        assert!(matches!(
            parse_formula("Planet(mars) Planet(venus)"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn digit_suffixed_variables() {
        match parse_formula("P(x1, y2)") {
            Err(ParseError::FreeVariables(vars)) => {
                assert_eq!(vars, vec!["x1".to_string(), "y2".to_string()]);
            }
            other => panic!("expected FreeVariables, got {other:?}"),
        }
    }
}
