//! Canonical surface-syntax printing.
//!
//! `parse_formula(f.to_string())` reconstructs `f` for any parser-canonical
//! formula (quantifiers binding one variable each). The printer emits `-`
//! and `->`, keeps parentheses minimal, and always parenthesizes a binary
//! quantifier body, matching the corpus style `all x. (H(x) -> M(x))`.

use super::Formula;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl Formula {
    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) | Formula::Iff(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            Formula::Atom { .. } => 5,
            // Quantifiers are handled by tail-position rules, not precedence.
            Formula::ForAll(..) | Formula::Exists(..) => 0,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, tail: bool) -> fmt::Result {
        match self {
            Formula::Atom { predicate, args } => {
                write!(f, "{predicate}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                write!(f, ")")
            }
            Formula::Not(inner) => {
                write!(f, "-")?;
                // Quantifiers count as precedence 0 here: a bare quantified
                // body would swallow everything to the right of the negation.
                let parens = inner.precedence() < 4;
                if parens {
                    write!(f, "(")?;
                    inner.write(f, true)?;
                    write!(f, ")")
                } else {
                    inner.write(f, false)
                }
            }
            Formula::And(l, r) => {
                self.write_binary(f, l, r, " & ", tail)
            }
            Formula::Or(l, r) => {
                self.write_binary(f, l, r, " | ", tail)
            }
            Formula::Implies(l, r) => {
                self.write_binary(f, l, r, " -> ", tail)
            }
            Formula::Iff(l, r) => {
                self.write_binary(f, l, r, " <-> ", tail)
            }
            Formula::ForAll(vars, body) => {
                write!(f, "all {}. ", vars.join(" "))?;
                Self::write_quantifier_body(f, body, tail)
            }
            Formula::Exists(vars, body) => {
                write!(f, "exists {}. ", vars.join(" "))?;
                Self::write_quantifier_body(f, body, tail)
            }
        }
    }

    fn write_quantifier_body(f: &mut fmt::Formatter<'_>, body: &Formula, tail: bool) -> fmt::Result {
        if matches!(
            body,
            Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..)
        ) {
            write!(f, "(")?;
            body.write(f, true)?;
            write!(f, ")")
        } else {
            body.write(f, tail)
        }
    }

    fn write_binary(
        &self,
        f: &mut fmt::Formatter<'_>,
        left: &Formula,
        right: &Formula,
        op: &str,
        tail: bool,
    ) -> fmt::Result {
        self.write_child(f, left, Side::Left, false)?;
        write!(f, "{op}")?;
        self.write_child(f, right, Side::Right, tail)
    }

    fn write_child(
        &self,
        f: &mut fmt::Formatter<'_>,
        child: &Formula,
        side: Side,
        tail: bool,
    ) -> fmt::Result {
        let parens = if matches!(child, Formula::ForAll(..) | Formula::Exists(..)) {
            // Safe without parentheses only where the maximal scope is
            // exactly the remaining input.
            !tail
        } else {
            let parent = self.precedence();
            let prec = child.precedence();
            if prec < parent {
                true
            } else if prec > parent {
                false
            } else {
                // Equal tier: `&`/`|` associate left, `->`/`<->` associate right.
                match self {
                    Formula::And(..) | Formula::Or(..) => side == Side::Right,
                    Formula::Implies(..) | Formula::Iff(..) => side == Side::Left,
                    _ => false,
                }
            }
        };
        if parens {
            write!(f, "(")?;
            child.write(f, true)?;
            write!(f, ")")
        } else {
            child.write(f, tail)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, true)
    }
}
