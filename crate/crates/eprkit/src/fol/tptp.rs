//! TPTP FOF serialization.
//!
//! TPTP requires variables to be upper words and predicate/function/constant
//! symbols to be lower words. Source identifiers are mangled by flipping the
//! case of the first letter; when two distinct source symbols land on the
//! same lower word (`Harp` and `harp`), later ones get a numeric suffix.
//! The mapping is built per problem so that every formula in a bundle uses
//! the same symbol names, and is kept for reverse lookup.

use super::{Formula, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MangleError {
    #[error("cannot disambiguate TPTP identifier for source symbol {name:?}")]
    Collision { name: String },
    #[error("symbol {name:?} does not occur in the formulas this serializer was built from")]
    UnknownSymbol { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TptpRole {
    Axiom,
    Conjecture,
}

impl TptpRole {
    fn as_str(self) -> &'static str {
        match self {
            TptpRole::Axiom => "axiom",
            TptpRole::Conjecture => "conjecture",
        }
    }
}

const MAX_SUFFIX: usize = 10_000;

/// Serializes formulas of one TPTP problem with a shared symbol mapping.
pub struct TptpSerializer {
    forward: BTreeMap<String, String>,
    reverse: BTreeMap<String, String>,
}

impl TptpSerializer {
    /// Build the symbol mapping over every predicate, function, and constant
    /// occurring in `formulas`. All three share the lower-word namespace.
    pub fn for_formulas<'a, I>(formulas: I) -> Result<Self, MangleError>
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let mut symbols = BTreeSet::new();
        for f in formulas {
            collect_symbols(f, &mut symbols);
        }
        let mut forward = BTreeMap::new();
        let mut reverse = BTreeMap::new();
        for name in symbols {
            let base = lower_word_base(&name);
            let mut candidate = base.clone();
            let mut k = 2;
            while reverse.contains_key(&candidate) {
                if k > MAX_SUFFIX {
                    return Err(MangleError::Collision { name });
                }
                candidate = format!("{base}_{k}");
                k += 1;
            }
            reverse.insert(candidate.clone(), name.clone());
            forward.insert(name, candidate);
        }
        Ok(TptpSerializer { forward, reverse })
    }

    /// Emit one `fof(name, role, ...).` statement.
    pub fn serialize(&self, f: &Formula, role: TptpRole, name: &str) -> Result<String, MangleError> {
        debug_assert!(f.is_closed(), "TPTP serialization expects closed formulas");
        let vars = self.variable_map(f);
        let mut body = String::new();
        self.write_formula(f, &vars, &mut body)?;
        Ok(format!("fof({}, {}, {}).", quote_name(name), role.as_str(), body))
    }

    /// The source symbol a mangled lower word came from.
    pub fn source_symbol(&self, mangled: &str) -> Option<&str> {
        self.reverse.get(mangled).map(String::as_str)
    }

    fn variable_map(&self, f: &Formula) -> BTreeMap<String, String> {
        let mut binders = BTreeSet::new();
        collect_binders(f, &mut binders);
        let mut map = BTreeMap::new();
        let mut used = BTreeSet::new();
        for name in binders {
            let base = upper_word_base(&name);
            let mut candidate = base.clone();
            let mut k = 2;
            while used.contains(&candidate) {
                candidate = format!("{base}_{k}");
                k += 1;
            }
            used.insert(candidate.clone());
            map.insert(name, candidate);
        }
        map
    }

    fn mangled(&self, name: &str) -> Result<&str, MangleError> {
        self.forward
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| MangleError::UnknownSymbol { name: name.to_string() })
    }

    fn write_formula(
        &self,
        f: &Formula,
        vars: &BTreeMap<String, String>,
        out: &mut String,
    ) -> Result<(), MangleError> {
        match f {
            Formula::Atom { predicate, args } => {
                out.push_str(self.mangled(predicate)?);
                if !args.is_empty() {
                    out.push('(');
                    for (i, arg) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.write_term(arg, vars, out)?;
                    }
                    out.push(')');
                }
                Ok(())
            }
            Formula::Not(inner) => {
                out.push('~');
                self.write_formula(inner, vars, out)
            }
            Formula::And(l, r) => self.write_binary(l, r, "&", vars, out),
            Formula::Or(l, r) => self.write_binary(l, r, "|", vars, out),
            Formula::Implies(l, r) => self.write_binary(l, r, "=>", vars, out),
            Formula::Iff(l, r) => self.write_binary(l, r, "<=>", vars, out),
            Formula::ForAll(names, body) => self.write_quantified("!", names, body, vars, out),
            Formula::Exists(names, body) => self.write_quantified("?", names, body, vars, out),
        }
    }

    fn write_binary(
        &self,
        l: &Formula,
        r: &Formula,
        op: &str,
        vars: &BTreeMap<String, String>,
        out: &mut String,
    ) -> Result<(), MangleError> {
        out.push('(');
        self.write_formula(l, vars, out)?;
        write!(out, " {op} ").unwrap();
        self.write_formula(r, vars, out)?;
        out.push(')');
        Ok(())
    }

    fn write_quantified(
        &self,
        symbol: &str,
        names: &[String],
        body: &Formula,
        vars: &BTreeMap<String, String>,
        out: &mut String,
    ) -> Result<(), MangleError> {
        let list: Vec<&str> = names
            .iter()
            .map(|n| vars.get(n).map(String::as_str).unwrap_or("V"))
            .collect();
        write!(out, "{symbol} [{}] : ", list.join(",")).unwrap();
        self.write_formula(body, vars, out)
    }

    fn write_term(
        &self,
        term: &Term,
        vars: &BTreeMap<String, String>,
        out: &mut String,
    ) -> Result<(), MangleError> {
        match term {
            Term::Variable(name) => {
                match vars.get(name) {
                    Some(mangled) => out.push_str(mangled),
                    // Unbound variable in a non-closed formula; uppercase as-is.
                    None => out.push_str(&upper_word_base(name)),
                }
                Ok(())
            }
            Term::Constant(name) => {
                out.push_str(self.mangled(name)?);
                Ok(())
            }
            Term::Function(name, args) => {
                out.push_str(self.mangled(name)?);
                out.push('(');
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_term(arg, vars, out)?;
                }
                out.push(')');
                Ok(())
            }
        }
    }
}

/// Serialize a single formula as one TPTP FOF statement.
pub fn to_tptp(f: &Formula, role: TptpRole, name: &str) -> Result<String, MangleError> {
    TptpSerializer::for_formulas([f])?.serialize(f, role, name)
}

fn collect_symbols(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom { predicate, args } => {
            out.insert(predicate.clone());
            for arg in args {
                collect_term_symbols(arg, out);
            }
        }
        Formula::Not(inner) => collect_symbols(inner, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_symbols(l, out);
            collect_symbols(r, out);
        }
        Formula::ForAll(_, body) | Formula::Exists(_, body) => collect_symbols(body, out),
    }
}

fn collect_term_symbols(term: &Term, out: &mut BTreeSet<String>) {
    match term {
        Term::Variable(_) => {}
        Term::Constant(name) => {
            out.insert(name.clone());
        }
        Term::Function(name, args) => {
            out.insert(name.clone());
            for arg in args {
                collect_term_symbols(arg, out);
            }
        }
    }
}

fn collect_binders(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom { .. } => {}
        Formula::Not(inner) => collect_binders(inner, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_binders(l, out);
            collect_binders(r, out);
        }
        Formula::ForAll(names, body) | Formula::Exists(names, body) => {
            out.extend(names.iter().cloned());
            collect_binders(body, out);
        }
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

fn lower_word_base(name: &str) -> String {
    let cleaned = sanitize(name);
    let mut chars = cleaned.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {
            let mut s = c.to_ascii_lowercase().to_string();
            s.extend(chars);
            s
        }
        Some(_) | None => format!("s_{cleaned}"),
    }
}

fn upper_word_base(name: &str) -> String {
    let cleaned = sanitize(name);
    let mut chars = cleaned.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {
            let mut s = c.to_ascii_uppercase().to_string();
            s.extend(chars);
            s
        }
        Some(_) | None => format!("V_{cleaned}"),
    }
}

fn quote_name(name: &str) -> String {
    let valid = name
        .chars()
        .next()
        .map(|c| c.is_ascii_lowercase())
        .unwrap_or(false)
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if valid {
        name.to_string()
    } else {
        let escaped: String = name
            .chars()
            .flat_map(|c| match c {
                '\'' => vec!['\\', '\''],
                '\\' => vec!['\\', '\\'],
                c => vec![c],
            })
            .collect();
        format!("'{escaped}'")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_formula, Formula as F, Term as T};

    #[test]
    fn serializes_ground_atom() {
        let f = F::atom("Planet", vec![T::constant("mars")]);
        assert_eq!(
            to_tptp(&f, TptpRole::Axiom, "p1").unwrap(),
            "fof(p1, axiom, planet(mars))."
        );
    }

    #[test]
    fn serializes_quantified_conjecture() {
        let f = F::forall(
            &["x"],
            F::implies(
                F::atom("H", vec![T::var("x")]),
                F::atom("M", vec![T::var("x")]),
            ),
        );
        assert_eq!(
            to_tptp(&f, TptpRole::Conjecture, "h").unwrap(),
            "fof(h, conjecture, ! [X] : (h(X) => m(X)))."
        );
    }

    #[test]
    fn zero_arity_atom_has_no_parens() {
        let f = F::atom("Raining", vec![]);
        assert_eq!(
            to_tptp(&f, TptpRole::Axiom, "a").unwrap(),
            "fof(a, axiom, raining)."
        );
    }

    #[test]
    fn case_collisions_get_suffixes() {
        let f = F::atom("Harp", vec![T::constant("harp")]);
        let s = to_tptp(&f, TptpRole::Axiom, "a").unwrap();
        // "Harp" sorts before "harp": the predicate claims the base name.
        assert_eq!(s, "fof(a, axiom, harp(harp_2)).");
        let ser = TptpSerializer::for_formulas([&f]).unwrap();
        assert_eq!(ser.source_symbol("harp"), Some("Harp"));
        assert_eq!(ser.source_symbol("harp_2"), Some("harp"));
    }

    #[test]
    fn mangling_is_shared_across_a_problem() {
        let p1 = parse_formula("Harp(c)").unwrap();
        let p2 = parse_formula("all x. (Harp(x) -> Instrument(x))").unwrap();
        let ser = TptpSerializer::for_formulas([&p1, &p2]).unwrap();
        let s1 = ser.serialize(&p1, TptpRole::Axiom, "p1").unwrap();
        let s2 = ser.serialize(&p2, TptpRole::Axiom, "p2").unwrap();
        assert_eq!(s1, "fof(p1, axiom, harp(c)).");
        assert_eq!(s2, "fof(p2, axiom, ! [X] : (harp(X) => instrument(X))).");
    }

    #[test]
    fn statement_names_are_quoted_when_needed() {
        let f = F::atom("P", vec![T::constant("a")]);
        let s = to_tptp(&f, TptpRole::Axiom, "Pair-1").unwrap();
        assert_eq!(s, "fof('Pair-1', axiom, p(a)).");
    }

    #[test]
    fn nested_quantifiers_and_connectives() {
        let f = parse_formula("exists x y. (Female(x) & Harp(y) & Holds(x, y))").unwrap();
        let s = to_tptp(&f, TptpRole::Axiom, "p1").unwrap();
        assert_eq!(
            s,
            "fof(p1, axiom, ? [X] : ? [Y] : ((female(X) & harp(Y)) & holds(X,Y)))."
        );
    }
}
