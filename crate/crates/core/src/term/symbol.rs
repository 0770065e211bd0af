use std::collections::HashMap;
use std::fmt;

use super::{Name, Term};

/// One node label in a subgoal trie.
///
/// A call is stored as the preorder sequence of its symbols. Compound and
/// list symbols carry enough arity information that the sequence can be
/// rebuilt without delimiters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TrieSymbol {
    Atom(Name),
    Int(i64),
    Functor(Name, u32),
    /// The list pair constructor; followed by head then tail.
    Cons,
    EmptyList,
    /// A standardized-apart variable, numbered by first occurrence in the path.
    Var(u32),
}

impl TrieSymbol {
    /// Number of subterms that follow this symbol in preorder.
    pub fn arity(&self) -> usize {
        match self {
            TrieSymbol::Functor(_, n) => *n as usize,
            TrieSymbol::Cons => 2,
            _ => 0,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, TrieSymbol::Var(_))
    }

    /// Atoms, integers, and `[]`.
    pub fn is_constant(&self) -> bool {
        matches!(
            self,
            TrieSymbol::Atom(_) | TrieSymbol::Int(_) | TrieSymbol::EmptyList
        )
    }

    pub fn is_structured(&self) -> bool {
        matches!(self, TrieSymbol::Functor(..) | TrieSymbol::Cons)
    }
}

impl fmt::Display for TrieSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrieSymbol::Atom(a) => write!(f, "{a}"),
            TrieSymbol::Int(i) => write!(f, "{i}"),
            TrieSymbol::Functor(name, n) => write!(f, "{name}/{n}"),
            TrieSymbol::Cons => f.write_str("[|]/2"),
            TrieSymbol::EmptyList => f.write_str("[]"),
            TrieSymbol::Var(k) => write!(f, "VAR{k}"),
        }
    }
}

/// Preorder symbol sequence of `call`, with variables renamed to
/// `Var(0), Var(1), ...` in first-occurrence order.
pub fn flatten(call: &Term) -> Vec<TrieSymbol> {
    let mut out = Vec::new();
    let mut vars = HashMap::new();
    flatten_into(call, &mut vars, &mut out);
    out
}

pub(crate) fn flatten_into(term: &Term, vars: &mut HashMap<u32, u32>, out: &mut Vec<TrieSymbol>) {
    let mut stack = vec![term];
    while let Some(t) = stack.pop() {
        match t {
            Term::Atom(a) => out.push(TrieSymbol::Atom(a.clone())),
            Term::Int(i) => out.push(TrieSymbol::Int(*i)),
            Term::EmptyList => out.push(TrieSymbol::EmptyList),
            Term::Var(v) => {
                let next = vars.len() as u32;
                let k = *vars.entry(*v).or_insert(next);
                out.push(TrieSymbol::Var(k));
            }
            Term::Struct { functor, args } => {
                out.push(TrieSymbol::Functor(functor.clone(), args.len() as u32));
                stack.extend(args.iter().rev());
            }
            Term::List(h, tl) => {
                out.push(TrieSymbol::Cons);
                stack.push(tl);
                stack.push(h);
            }
        }
    }
}

/// Rebuilds the term spelled by a complete preorder symbol sequence.
/// Returns `None` if the sequence is truncated or has trailing symbols.
pub fn unflatten(symbols: &[TrieSymbol]) -> Option<Term> {
    let mut pos = 0;
    let t = unflatten_one(symbols, &mut pos)?;
    (pos == symbols.len()).then_some(t)
}

pub(crate) fn unflatten_one(symbols: &[TrieSymbol], pos: &mut usize) -> Option<Term> {
    let sym = symbols.get(*pos)?;
    *pos += 1;
    Some(match sym {
        TrieSymbol::Atom(a) => Term::Atom(a.clone()),
        TrieSymbol::Int(i) => Term::Int(*i),
        TrieSymbol::EmptyList => Term::EmptyList,
        TrieSymbol::Var(k) => Term::Var(*k),
        TrieSymbol::Functor(name, n) => {
            if *n == 0 {
                return None;
            }
            let args = (0..*n)
                .map(|_| unflatten_one(symbols, pos))
                .collect::<Option<Vec<_>>>()?;
            Term::Struct {
                functor: name.clone(),
                args,
            }
        }
        TrieSymbol::Cons => {
            let h = unflatten_one(symbols, pos)?;
            let tl = unflatten_one(symbols, pos)?;
            Term::cons(h, tl)
        }
    })
}
