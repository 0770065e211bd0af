//! First-order terms: the payload stored in subgoal tries and the shape of
//! retrieval queries.
//!
//! Terms are plain immutable trees. Variables are identified by a numeric id
//! that is only meaningful inside one call: `p(X, Y, X)` is
//! `p(Var(0), Var(1), Var(0))`.

mod format;
mod parse;
mod subsume;
pub(crate) mod symbol;

use std::fmt;
use std::sync::Arc;

pub use parse::{parse_term, ParseError};
pub use subsume::{is_variant, subsumes};
pub use symbol::{flatten, unflatten, TrieSymbol};

/// Interned-by-refcount name of an atom or functor.
pub type Name = Arc<str>;

/// A first-order term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Atom(Name),
    Int(i64),
    Var(u32),
    /// A compound term. `args` is never empty.
    Struct {
        functor: Name,
        args: Vec<Term>,
    },
    /// A list cell `[head | tail]`.
    List(Box<Term>, Box<Term>),
    EmptyList,
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Name::from(name))
    }

    /// Builds a compound term.
    ///
    /// Panics if `args` is empty: zero-arity functors are atoms.
    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        assert!(
            !args.is_empty(),
            "compound term `{functor}` needs at least one argument"
        );
        Term::Struct {
            functor: Name::from(functor),
            args,
        }
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::List(Box::new(head), Box::new(tail))
    }

    /// Builds a proper list from `items`, terminated by `[]`.
    pub fn list<I>(items: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .fold(Term::EmptyList, |tail, head| Term::cons(head, tail))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Name and arity of the principal functor. Atoms report arity 0;
    /// integers, variables, and lists report `None`.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(name) => Some((name, 0)),
            Term::Struct { functor, args } => Some((functor, args.len())),
            _ => None,
        }
    }

    /// Arguments of a compound term, or an empty slice for anything else.
    pub fn args(&self) -> &[Term] {
        match self {
            Term::Struct { args, .. } => args,
            _ => &[],
        }
    }

    /// True when no variable occurs in the term.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) | Term::EmptyList => true,
            Term::Struct { args, .. } => args.iter().all(Term::is_ground),
            Term::List(h, t) => h.is_ground() && t.is_ground(),
        }
    }

    /// Renumbers variables to `0, 1, ...` in order of first occurrence.
    /// Two terms are variants iff their canonical forms are equal.
    pub fn canonical(&self) -> Term {
        unflatten(&flatten(self)).expect("flatten output always rebuilds")
    }

    /// Preorder iterator over every subterm, starting with `self`.
    pub fn subterms(&self) -> Subterms<'_> {
        Subterms { stack: vec![self] }
    }

    /// Distinct variable ids in order of first occurrence.
    pub fn variables(&self) -> Vec<u32> {
        let mut seen = Vec::new();
        for t in self.subterms() {
            if let Term::Var(v) = t {
                if !seen.contains(v) {
                    seen.push(*v);
                }
            }
        }
        seen
    }
}

pub struct Subterms<'a> {
    stack: Vec<&'a Term>,
}

impl<'a> Iterator for Subterms<'a> {
    type Item = &'a Term;

    fn next(&mut self) -> Option<&'a Term> {
        let t = self.stack.pop()?;
        match t {
            Term::Struct { args, .. } => self.stack.extend(args.iter().rev()),
            Term::List(h, tl) => {
                self.stack.push(tl);
                self.stack.push(h);
            }
            _ => {}
        }
        Some(t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::format_term(self))
    }
}

pub use format::format_term;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_builder_is_right_nested() {
        let l = Term::list([Term::Int(1), Term::Int(2)]);
        assert_eq!(
            l,
            Term::cons(Term::Int(1), Term::cons(Term::Int(2), Term::EmptyList))
        );
    }

    #[test]
    fn subterms_preorder() {
        let t = parse_term("p(f(X),[a])").unwrap();
        let shown: Vec<String> = t.subterms().map(|s| s.to_string()).collect();
        assert_eq!(shown, ["p(f(A),[a])", "f(A)", "A", "[a]", "a", "[]"]);
    }

    #[test]
    fn canonical_renumbers_by_first_occurrence() {
        let t = Term::compound("p", vec![Term::Var(7), Term::Var(3), Term::Var(7)]);
        assert_eq!(
            t.canonical(),
            Term::compound("p", vec![Term::Var(0), Term::Var(1), Term::Var(0)])
        );
    }

    #[test]
    #[should_panic]
    fn zero_arity_compound_rejected() {
        Term::compound("f", vec![]);
    }
}
