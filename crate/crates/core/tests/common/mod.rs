//! Generators and independent oracles shared by unit and integration tests.
//!
//! Nothing here calls into the trie's counters or the matchers; the oracles
//! only use terms, frame states, and parent links.
#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use rand::Rng;
use subsumption_trie::term::{subsumes, Term};
use subsumption_trie::trie::{FrameId, FrameState, NodeId, SubgoalTrie};

const ATOMS: [&str; 3] = ["a", "b", "c"];
const FUNCTORS: [(&str, usize); 4] = [("f", 1), ("g", 2), ("h", 3), ("k", 4)];

/// Proptest strategy for terms of at most `depth` levels over a small
/// vocabulary, so that random pairs often match.
pub fn arb_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..ATOMS.len()).prop_map(|i| Term::atom(ATOMS[i])),
        (0i64..4).prop_map(Term::Int),
        (0u32..3).prop_map(Term::Var),
        Just(Term::EmptyList),
    ];
    leaf.prop_recursive(depth, 48, 4, |inner| {
        prop_oneof![
            (0..FUNCTORS.len(), prop::collection::vec(inner.clone(), 4)).prop_map(
                |(i, mut args)| {
                    let (name, arity) = FUNCTORS[i];
                    args.truncate(arity);
                    Term::compound(name, args)
                }
            ),
            (inner.clone(), inner).prop_map(|(h, t)| Term::cons(h, t)),
        ]
    })
}

/// Random term with `rng`, same vocabulary as [`arb_term`].
pub fn random_term<R: Rng>(rng: &mut R, depth: u32, vars: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.45);
    if leaf {
        match rng.gen_range(0..10) {
            0..=2 => Term::atom(ATOMS[rng.gen_range(0..ATOMS.len())]),
            3..=5 => Term::Int(rng.gen_range(0..4)),
            6 => Term::EmptyList,
            _ => Term::Var(rng.gen_range(0..vars.max(1))),
        }
    } else if rng.gen_bool(0.8) {
        let (name, arity) = FUNCTORS[rng.gen_range(0..FUNCTORS.len())];
        let args = (0..arity)
            .map(|_| random_term(rng, depth - 1, vars))
            .collect();
        Term::compound(name, args)
    } else {
        Term::cons(
            random_term(rng, depth - 1, vars),
            random_term(rng, depth - 1, vars),
        )
    }
}

/// Random call `pred(a1..an)` with argument depth at most `depth`.
pub fn random_call<R: Rng>(rng: &mut R, pred: &str, arity: usize, depth: u32) -> Term {
    let vars = rng.gen_range(1..4);
    let args = (0..arity).map(|_| random_term(rng, depth, vars)).collect();
    Term::compound(pred, args)
}

/// Adds `by` to every variable id.
pub fn shift_vars(t: &Term, by: u32) -> Term {
    match t {
        Term::Var(v) => Term::Var(v + by),
        Term::Struct { functor, args } => Term::Struct {
            functor: functor.clone(),
            args: args.iter().map(|a| shift_vars(a, by)).collect(),
        },
        Term::List(h, tl) => Term::cons(shift_vars(h, by), shift_vars(tl, by)),
        other => other.clone(),
    }
}

/// Replaces subterms with variables according to the bits of `mask`,
/// reusing a variable when an identical subterm is replaced again. The
/// result always subsumes `t`.
pub fn generalize(t: &Term, mask: u64) -> Term {
    fn go(t: &Term, mask: &mut u64, seen: &mut HashMap<Term, u32>, next: &mut u32) -> Term {
        let bit = *mask & 1 == 1;
        *mask = mask.rotate_right(1);
        if bit {
            if let Some(v) = seen.get(t) {
                return Term::Var(*v);
            }
            let v = 10_000 + *next;
            *next += 1;
            seen.insert(t.clone(), v);
            return Term::Var(v);
        }
        match t {
            Term::Struct { functor, args } => Term::Struct {
                functor: functor.clone(),
                args: args.iter().map(|a| go(a, mask, seen, next)).collect(),
            },
            Term::List(h, tl) => {
                let h = go(h, mask, seen, next);
                Term::cons(h, go(tl, mask, seen, next))
            }
            Term::Var(v) => Term::Var(20_000 + v),
            other => other.clone(),
        }
    }
    // Variables of `t` must not be renamed inconsistently, so they map to a
    // disjoint id range and are never merged with replaced subterms.
    let mut seen = HashMap::new();
    let mut next = 0;
    let mut mask = mask;
    go(t, &mut mask, &mut seen, &mut next)
}

/// [`generalize`] applied below the principal functor, so a call stays a
/// call to the same predicate.
pub fn generalize_call(call: &Term, mask: u64) -> Term {
    match generalize(call, mask << 1) {
        Term::Struct { functor, args } => Term::Struct { functor, args },
        _ => unreachable!("bit 0 of the shifted mask is clear"),
    }
}

fn apply(t: &Term, subst: &HashMap<u32, Term>) -> Term {
    match t {
        Term::Var(v) => subst.get(v).cloned().unwrap_or(Term::Var(*v)),
        Term::Struct { functor, args } => Term::Struct {
            functor: functor.clone(),
            args: args.iter().map(|a| apply(a, subst)).collect(),
        },
        Term::List(h, tl) => Term::cons(apply(h, subst), apply(tl, subst)),
        other => other.clone(),
    }
}

/// Substitution search: tries every assignment of `general`'s variables to
/// subterms of `specific` and checks for syntactic equality. Exponential;
/// keep inputs small. Variable id spaces must be disjoint.
pub fn brute_force_subsumes(general: &Term, specific: &Term) -> bool {
    let vars = general.variables();
    let mut candidates: Vec<Term> = specific.subterms().cloned().collect();
    candidates.sort_by_key(|t| format!("{t:?}"));
    candidates.dedup();
    let mut choice = vec![0usize; vars.len()];
    loop {
        let subst: HashMap<u32, Term> = vars
            .iter()
            .zip(&choice)
            .map(|(v, &c)| (*v, candidates[c].clone()))
            .collect();
        if apply(general, &subst) == *specific {
            return true;
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return false;
            }
            choice[i] += 1;
            if choice[i] < candidates.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Frames of `trie` that are evaluating and subsumed by `call`, in frame
/// creation order, computed with the term-level matcher.
pub fn oracle_results(trie: &SubgoalTrie, call: &Term) -> Vec<FrameId> {
    let call = shift_vars(call, 1_000_000);
    trie.frames()
        .iter()
        .filter(|f| f.state() == FrameState::Evaluating && subsumes(&call, f.call()))
        .map(|f| f.id())
        .collect()
}

/// Number of evaluating frames whose leaf lies at or below each node,
/// computed by walking parent links from every evaluating leaf.
pub fn recount(trie: &SubgoalTrie) -> HashMap<NodeId, u32> {
    let mut counts: HashMap<NodeId, u32> = trie.node_ids().map(|n| (n, 0)).collect();
    for f in trie.frames() {
        if f.state() != FrameState::Evaluating {
            continue;
        }
        let mut cur = Some(f.leaf());
        while let Some(n) = cur {
            *counts.get_mut(&n).unwrap() += 1;
            cur = trie.parent(n);
        }
    }
    counts
}

pub fn sorted(mut v: Vec<FrameId>) -> Vec<FrameId> {
    v.sort();
    v
}
