//! Two slower retrieval strategies kept for comparison and cross-checking.
//!
//! * [`collect_nirs`] ignores the trie structure: it keeps a list of every
//!   leaf ever created, rebuilds each stored call from its leaf up to the
//!   root, and matches the query against it.
//! * [`collect_sirs`] runs the same backtracking search as
//!   [`collect_subsumed_subgoals`](crate::matcher::collect_subsumed_subgoals)
//!   but never looks at `in_eval`, so dead branches are explored too and
//!   variable terms at hash levels have to walk every bucket.
//!
//! Neither reads the evaluation counters; both filter leaves by frame state.

use std::collections::HashMap;

use crate::matcher::{BranchPolicy, MatcherState, Traversal};
use crate::term::{Term, TrieSymbol};
use crate::trie::{FrameId, FrameState, HashId, Level, NodeId, NodeStatus, SubgoalTrie, TrieError};

/// Append-only list of the leaf nodes created so far.
#[derive(Clone, Debug, Default)]
pub struct LeafRegistry {
    leaves: Vec<NodeId>,
}

impl LeafRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding every leaf of `trie`, in frame creation order.
    pub fn from_trie(trie: &SubgoalTrie) -> Self {
        LeafRegistry {
            leaves: trie.frames().iter().map(|f| f.leaf()).collect(),
        }
    }

    /// Records the leaf of a newly created frame.
    pub fn record(&mut self, trie: &SubgoalTrie, frame: FrameId) {
        self.leaves.push(trie.frame(frame).leaf());
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }
}

#[derive(Copy, Clone)]
enum Binding {
    /// Enumerated against trie variable `k`.
    Slot(u32),
    /// Bound to the stored subterm spanning these path positions.
    Span(usize, usize),
}

/// End position of the subterm starting at `pos`.
fn subterm_end(path: &[TrieSymbol], mut pos: usize) -> usize {
    let mut pending = 1;
    while pending > 0 {
        pending += path[pos].arity();
        pending -= 1;
        pos += 1;
    }
    pos
}

struct PathMatcher<'p> {
    path: &'p [TrieSymbol],
    pos: usize,
    bindings: HashMap<u32, Binding>,
}

impl PathMatcher<'_> {
    fn expect(&mut self, symbol: &TrieSymbol) -> bool {
        if self.path[self.pos] == *symbol {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self, t: &Term) -> bool {
        match t {
            Term::Var(v) => {
                let start = self.pos;
                match self.bindings.get(v).copied() {
                    None => {
                        let binding = match self.path[start] {
                            TrieSymbol::Var(k) => {
                                self.pos += 1;
                                Binding::Slot(k)
                            }
                            _ => {
                                self.pos = subterm_end(self.path, start);
                                Binding::Span(start, self.pos)
                            }
                        };
                        self.bindings.insert(*v, binding);
                        true
                    }
                    Some(Binding::Slot(k)) => self.expect(&TrieSymbol::Var(k)),
                    Some(Binding::Span(s, e)) => {
                        self.pos = subterm_end(self.path, start);
                        self.path[s..e] == self.path[start..self.pos]
                    }
                }
            }
            Term::Atom(a) => self.expect(&TrieSymbol::Atom(a.clone())),
            Term::Int(i) => self.expect(&TrieSymbol::Int(*i)),
            Term::EmptyList => self.expect(&TrieSymbol::EmptyList),
            Term::Struct { functor, args } => {
                self.expect(&TrieSymbol::Functor(functor.clone(), args.len() as u32))
                    && args.iter().all(|a| self.term(a))
            }
            Term::List(h, tl) => self.expect(&TrieSymbol::Cons) && self.term(h) && self.term(tl),
        }
    }
}

/// Matches call arguments against a stored argument path with the same
/// one-sided rules as the trie search.
fn path_matches(args: &[Term], path: &[TrieSymbol]) -> bool {
    let mut m = PathMatcher {
        path,
        pos: 0,
        bindings: HashMap::new(),
    };
    args.iter().all(|a| m.term(a)) && m.pos == path.len()
}

fn check_call<'t>(trie: &SubgoalTrie, call: &'t Term) -> Result<&'t [Term], TrieError> {
    match call.functor() {
        Some((name, arity)) if name == trie.name() && arity == trie.arity() => Ok(call.args()),
        _ => Err(TrieError::WrongPredicate {
            call: call.to_string(),
            name: trie.name().to_string(),
            arity: trie.arity(),
        }),
    }
}

/// Naive retrieval: every registered leaf is rebuilt bottom-up and matched
/// on its own. Results follow registry order.
pub fn collect_nirs(
    trie: &SubgoalTrie,
    registry: &LeafRegistry,
    call: &Term,
) -> Result<Vec<FrameId>, TrieError> {
    let args = check_call(trie, call)?;
    let mut path = Vec::new();
    let mut found = Vec::new();
    for &leaf in registry.leaves() {
        trie.path_symbols(leaf, &mut path);
        if path_matches(args, &path) {
            let frame = trie.node(leaf).frame().expect("registered node is a leaf");
            if trie.frame(frame).state() == FrameState::Evaluating {
                found.push(frame);
            }
        }
    }
    Ok(found)
}

/// Traversal without counters. Alternatives inside a hash table carry the
/// bucket they came from so the walk can move on to the next bucket.
struct BucketWalk;

impl BucketWalk {
    fn first_bucket_from(trie: &SubgoalTrie, h: HashId, from: usize) -> Option<(NodeId, usize)> {
        (from..trie.bucket_count(h)).find_map(|b| trie.bucket(h, b).map(|n| (n, b)))
    }

    fn next_in_hash(
        trie: &SubgoalTrie,
        h: HashId,
        bucket: usize,
        node: NodeId,
    ) -> Option<(NodeId, Option<(HashId, usize)>)> {
        match trie.node(node).sibling() {
            Some(s) => Some((s, Some((h, bucket)))),
            None => Self::first_bucket_from(trie, h, bucket + 1).map(|(n, b)| (n, Some((h, b)))),
        }
    }
}

impl BranchPolicy for BucketWalk {
    type Aux = Option<(HashId, usize)>;

    fn live(&self, _trie: &SubgoalTrie, _node: NodeId) -> bool {
        true
    }

    fn variable_branch(
        &mut self,
        trie: &SubgoalTrie,
        level: Level,
        resume: Option<Self::Aux>,
    ) -> Option<(NodeId, Option<(NodeId, Self::Aux)>)> {
        match level {
            Level::Empty => None,
            Level::Hash(h) => {
                let (current, b) = Self::first_bucket_from(trie, h, 0)?;
                Some((current, Self::next_in_hash(trie, h, b, current)))
            }
            Level::Chain(n) if trie.node(n).status().contains(NodeStatus::HASHED) => {
                let (h, b) = resume
                    .flatten()
                    .expect("hashed alternative carries its bucket");
                Some((n, Self::next_in_hash(trie, h, b, n)))
            }
            Level::Chain(n) => Some((n, trie.node(n).sibling().map(|s| (s, None)))),
        }
    }

    fn accept_leaf(&self, trie: &SubgoalTrie, frame: FrameId) -> bool {
        trie.frame(frame).state() == FrameState::Evaluating
    }
}

/// Semi-naive retrieval: the backtracking search without pruning.
pub fn collect_sirs(trie: &SubgoalTrie, call: &Term) -> Result<Vec<FrameId>, TrieError> {
    MatcherState::new().collect_sirs(trie, call)
}

impl MatcherState {
    /// [`collect_sirs`] reusing this state's allocations.
    pub fn collect_sirs(
        &mut self,
        trie: &SubgoalTrie,
        call: &Term,
    ) -> Result<Vec<FrameId>, TrieError> {
        Traversal::new(trie, self, BucketWalk).run(call)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::collect_subsumed_subgoals;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn args_path(call: &str) -> (Vec<Term>, Vec<TrieSymbol>) {
        let c = t(call);
        let mut path = crate::term::flatten(&c);
        path.remove(0);
        (c.args().to_vec(), path)
    }

    fn matches(query: &str, stored: &str) -> bool {
        let (_, path) = args_path(stored);
        path_matches(t(query).args(), &path)
    }

    #[test]
    fn path_matching_rules() {
        assert!(!matches("p(2,X)", "p(A,B)"));
        assert!(!matches("p(X,X)", "p(2,4)"));
        assert!(!matches("p(X,X)", "p(A,B)"));
        assert!(matches("p(X,X)", "p(A,A)"));
        assert!(matches("p(X,X,Y)", "p(f(A),f(A),A)"));
        assert!(!matches("p(X,X)", "p(f(A),f(B))"));
        assert!(matches("p(Y,1,Z)", "p(X,1,2)"));
        assert!(matches("p([H|T])", "p([a,b])"));
    }

    #[test]
    fn subterm_end_skips_nested_terms() {
        let (_, path) = args_path("p(f(g(1,2),[a]),3)");
        assert_eq!(subterm_end(&path, 0), path.len() - 1);
        assert_eq!(subterm_end(&path, path.len() - 1), path.len());
    }

    fn build(evaluating: &[&str], completed: &[&str]) -> (SubgoalTrie, LeafRegistry) {
        let mut trie = SubgoalTrie::new("p", 2).unwrap();
        let mut reg = LeafRegistry::new();
        for (calls, done) in [(evaluating, false), (completed, true)] {
            for c in calls {
                let (f, new) = trie.check_insert(&t(c)).unwrap();
                if new {
                    reg.record(&trie, f);
                }
                trie.mark_evaluating(f).unwrap();
                if done {
                    trie.mark_completed(f).unwrap();
                }
            }
        }
        (trie, reg)
    }

    #[test]
    fn single_leaf() {
        let (trie, reg) = build(&["p(1,2)"], &[]);
        assert_eq!(collect_nirs(&trie, &reg, &t("p(X,Y)")).unwrap().len(), 1);
        assert_eq!(collect_sirs(&trie, &t("p(X,Y)")).unwrap().len(), 1);
    }

    #[test]
    fn completed_only_trie_gives_nothing() {
        let (trie, reg) = build(&[], &["p(1,2)", "p(3,4)", "p(f(A),B)"]);
        assert!(collect_nirs(&trie, &reg, &t("p(X,Y)")).unwrap().is_empty());
        assert!(collect_sirs(&trie, &t("p(X,Y)")).unwrap().is_empty());
    }

    #[test]
    fn registry_from_trie_matches_incremental_registry() {
        let (trie, reg) = build(&["p(1,2)", "p(1,X)"], &["p(a,b)"]);
        assert_eq!(LeafRegistry::from_trie(&trie).leaves(), reg.leaves());
        assert_eq!(reg.len(), 3);
    }

    #[test]
    fn sirs_walks_every_bucket() {
        let calls: Vec<String> = (0..200).map(|i| format!("p({i},{})", i % 5)).collect();
        let refs: Vec<&str> = calls.iter().map(String::as_str).collect();
        let (mut trie, reg) = build(&refs, &[]);
        for f in 0..200u32 {
            if f % 4 != 0 {
                let id = trie.frames()[f as usize].id();
                trie.mark_completed(id).unwrap();
            }
        }
        for q in ["p(X,Y)", "p(X,3)", "p(17,Y)", "p(16,1)"] {
            let q = t(q);
            let mut eirs = collect_subsumed_subgoals(&trie, &q).unwrap();
            let mut sirs = collect_sirs(&trie, &q).unwrap();
            let nirs = collect_nirs(&trie, &reg, &q).unwrap();
            eirs.sort();
            sirs.sort();
            assert_eq!(eirs, sirs);
            assert_eq!(eirs, nirs);
        }
        assert_eq!(collect_sirs(&trie, &t("p(X,Y)")).unwrap().len(), 50);
    }

    #[test]
    fn state_reuse_does_not_leak() {
        let (trie, _) = build(&["p(1,2)", "p(f(A),A)"], &["p(3,3)"]);
        let mut state = MatcherState::new();
        for q in ["p(X,Y)", "p(X,X)", "p(f(Z),Z)"] {
            state.collect_sirs(&trie, &t(q)).unwrap();
            assert_eq!(state.marks(), Default::default());
        }
    }
}
