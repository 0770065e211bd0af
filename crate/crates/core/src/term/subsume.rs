use std::collections::HashMap;

use super::{flatten, Term};

/// One-sided matching: true iff some substitution over the variables of
/// `general` alone turns it into `specific`.
///
/// The variables of `specific` are treated as rigid constants, distinct from
/// each other and from everything in `general`, so `p(X,X)` does not subsume
/// `p(X,Y)` while `p(X,Y)` subsumes `p(Z,Z)`.
pub fn subsumes(general: &Term, specific: &Term) -> bool {
    let mut bindings: HashMap<u32, &Term> = HashMap::new();
    let mut pending = vec![(general, specific)];
    while let Some((g, s)) = pending.pop() {
        match (g, s) {
            (Term::Var(v), _) => match bindings.get(v) {
                Some(bound) => {
                    if *bound != s {
                        return false;
                    }
                }
                None => {
                    bindings.insert(*v, s);
                }
            },
            (_, Term::Var(_)) => return false,
            (Term::Atom(a), Term::Atom(b)) if a == b => {}
            (Term::Int(a), Term::Int(b)) if a == b => {}
            (Term::EmptyList, Term::EmptyList) => {}
            (
                Term::Struct {
                    functor: f,
                    args: ga,
                },
                Term::Struct {
                    functor: h,
                    args: sa,
                },
            ) if f == h && ga.len() == sa.len() => pending.extend(ga.iter().zip(sa)),
            (Term::List(gh, gt), Term::List(sh, st)) => {
                pending.push((gt, st));
                pending.push((gh, sh));
            }
            _ => return false,
        }
    }
    true
}

/// True iff `a` and `b` are equal up to a consistent renaming of variables.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    flatten(a) == flatten(b)
}
