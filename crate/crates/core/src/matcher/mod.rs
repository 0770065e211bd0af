//! Retrieval of the evaluating subgoals that are instances of a call.
//!
//! The search walks the subgoal trie depth-first, matching the call's
//! arguments against trie symbols one at a time. Query variables may match
//! any symbol, so every level where a variable is matched may leave a choice
//! point; constants and structured terms match at most one sibling and never
//! do. Branches whose `in_eval` count is zero hold no evaluating subgoal and
//! are skipped outright.
//!
//! Matching is one-sided. A query variable that meets a trie variable is
//! *enumerated* against it and from then on only matches that same trie
//! variable, since the stored call must be an instance of the query.

mod state;

pub use state::{ChoicePointFrame, MatcherState, StateMarks};

use crate::term::{Term, TrieSymbol};
use crate::trie::{FrameId, Level, NodeId, NodeStatus, SubgoalTrie, TrieError};
use state::{Addr, Cell, LoggedTerm};

/// Alternative node to push as a choice point, with the policy's bookkeeping.
pub(crate) type Alternative<A> = (NodeId, A);

/// Selects which siblings a traversal may enter.
pub(crate) trait BranchPolicy {
    /// Bookkeeping carried alongside each choice point.
    type Aux;

    /// Whether a node matched by a constant or structured term may be entered.
    fn live(&self, trie: &SubgoalTrie, node: NodeId) -> bool;

    /// For a variable term at `level`, the node to try now and, if any, the
    /// alternative to push as a choice point. `resume` is the bookkeeping of
    /// the choice point just restored, when `level` is its alternative node.
    fn variable_branch(
        &mut self,
        trie: &SubgoalTrie,
        level: Level,
        resume: Option<Self::Aux>,
    ) -> Option<(NodeId, Option<Alternative<Self::Aux>>)>;

    fn accept_leaf(&self, trie: &SubgoalTrie, frame: FrameId) -> bool;
}

/// Pruning by `in_eval`, with evaluation indexes at hash levels.
struct InEvalPruning;

impl InEvalPruning {
    /// First node from `cur` along a plain chain with a positive count.
    fn next_valid_node(trie: &SubgoalTrie, mut cur: Option<NodeId>) -> Option<NodeId> {
        while let Some(n) = cur {
            if trie.effective_in_eval(n) > 0 {
                return Some(n);
            }
            cur = trie.node(n).sibling();
        }
        None
    }
}

impl BranchPolicy for InEvalPruning {
    type Aux = ();

    fn live(&self, trie: &SubgoalTrie, node: NodeId) -> bool {
        trie.effective_in_eval(node) > 0
    }

    fn variable_branch(
        &mut self,
        trie: &SubgoalTrie,
        level: Level,
        _resume: Option<()>,
    ) -> Option<(NodeId, Option<(NodeId, ())>)> {
        let (current, alt) = match level {
            Level::Empty => return None,
            Level::Hash(h) => {
                let current = trie.index_head(h)?;
                (current, trie.next_indexed(current))
            }
            Level::Chain(n) if trie.node(n).status().contains(NodeStatus::HASHED) => {
                (n, trie.next_indexed(n))
            }
            Level::Chain(n) => {
                let current = Self::next_valid_node(trie, Some(n))?;
                let alt = Self::next_valid_node(trie, trie.node(current).sibling());
                (current, alt)
            }
        };
        Some((current, alt.map(|a| (a, ()))))
    }

    fn accept_leaf(&self, _trie: &SubgoalTrie, _frame: FrameId) -> bool {
        true
    }
}

/// Outcome of matching one popped term at one trie level.
enum Step {
    Matched(NodeId),
    Failed,
}

pub(crate) struct Traversal<'a, P: BranchPolicy> {
    trie: &'a SubgoalTrie,
    state: &'a mut MatcherState,
    policy: P,
    /// One entry per choice point, pushed and popped in lockstep.
    aux_stack: Vec<P::Aux>,
    resume: Option<P::Aux>,
}

impl<'a, P: BranchPolicy> Traversal<'a, P> {
    pub(crate) fn new(trie: &'a SubgoalTrie, state: &'a mut MatcherState, policy: P) -> Self {
        Traversal {
            trie,
            state,
            policy,
            aux_stack: Vec::new(),
            resume: None,
        }
    }

    fn try_constant_term(&self, symbol: &TrieSymbol, level: Level) -> Option<NodeId> {
        let node = self
            .trie
            .scan_chain(self.trie.candidates(level, symbol), symbol)?;
        self.policy.live(self.trie, node).then_some(node)
    }

    fn try_structured_term(&mut self, term: Addr, level: Level) -> Option<NodeId> {
        let (symbol, args) = self.state.principal(term);
        let node = self.try_constant_term(&symbol, level)?;
        self.state.push_arguments(args);
        Some(node)
    }

    fn try_variable_term(&mut self, var: Addr, level: Level, height: usize) -> Option<NodeId> {
        let resume = self.resume.take();
        let (current, alt) = self.policy.variable_branch(self.trie, level, resume)?;
        if let Some((alt, aux)) = alt {
            self.state.push_choice_point(alt, height);
            self.aux_stack.push(aux);
        }
        let symbol = self.trie.node(current).symbol();
        self.state
            .try_variable_matching(var, symbol)
            .then_some(current)
    }

    fn step(&mut self, term: Addr, level: Level, height: usize) -> Step {
        let cell = self.state.deref(term);
        let matched = match &self.state.arena[cell] {
            Cell::Const(symbol) => {
                let symbol = symbol.clone();
                self.try_constant_term(&symbol, level)
            }
            Cell::Str(_) | Cell::Cons(_) => self.try_structured_term(cell, level),
            Cell::Var | Cell::Enum(_) => self.try_variable_term(cell, level, height),
            other => unreachable!("dereferenced to {other:?}"),
        };
        match matched {
            Some(n) => Step::Matched(n),
            None => Step::Failed,
        }
    }

    /// Runs the search for `call` and returns the accepted leaves' frames in
    /// discovery order. The state is returned to its entry marks.
    pub(crate) fn run(mut self, call: &Term) -> Result<Vec<FrameId>, TrieError> {
        let trie = self.trie;
        let args = match call.functor() {
            Some((name, arity)) if name == trie.name() && arity == trie.arity() => call.args(),
            _ => {
                return Err(TrieError::WrongPredicate {
                    call: call.to_string(),
                    name: trie.name().to_string(),
                    arity: trie.arity(),
                })
            }
        };
        let entry = self.state.marks();
        self.state.clear_trace();
        let mut found = Vec::new();
        let mut level = trie.node(trie.root()).child();
        self.state.push_call_arguments(args);
        loop {
            let term = self
                .state
                .term_stack
                .pop()
                .expect("term stack holds the next term");
            let height = self.state.term_stack.len();
            match self.step(term, level, height) {
                Step::Matched(node) => {
                    self.state.term_log.push(LoggedTerm { term, height });
                    self.state.record_entry(node);
                    level = trie.node(node).child();
                    if self.state.term_stack.len() > entry.term_stack {
                        continue;
                    }
                    let frame = trie
                        .node(node)
                        .frame()
                        .expect("a full match ends at a leaf");
                    if self.policy.accept_leaf(trie, frame) {
                        found.push(frame);
                    }
                }
                Step::Failed => self.state.term_stack.push(term),
            }
            if self.state.cp_stack.len() == entry.choice_points {
                self.state.reset_to(&entry);
                debug_assert_eq!(self.state.marks(), entry);
                return Ok(found);
            }
            let frame = self.state.cp_stack.pop().unwrap();
            self.resume = self.aux_stack.pop();
            self.state.restore_computation(&frame);
            level = Level::Chain(frame.alt_node);
        }
    }
}

impl MatcherState {
    /// All evaluating subgoals in `trie` that are instances of `call`, in
    /// the order the search reaches them.
    pub fn collect_subsumed_subgoals(
        &mut self,
        trie: &SubgoalTrie,
        call: &Term,
    ) -> Result<Vec<FrameId>, TrieError> {
        Traversal::new(trie, self, InEvalPruning).run(call)
    }
}

/// One-shot form of [`MatcherState::collect_subsumed_subgoals`].
pub fn collect_subsumed_subgoals(
    trie: &SubgoalTrie,
    call: &Term,
) -> Result<Vec<FrameId>, TrieError> {
    MatcherState::new().collect_subsumed_subgoals(trie, call)
}
