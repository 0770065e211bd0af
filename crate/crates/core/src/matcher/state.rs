//! Working storage of a retrieval: a small heap of term cells, the binding
//! trail, the term stack and its log, the variable enumerator vector, and the
//! choice point stack.

use std::collections::HashMap;

use crate::term::{Name, Term, TrieSymbol};
use crate::trie::NodeId;

pub(crate) type Addr = usize;

/// One heap cell. Compound terms occupy a `Functor` cell followed by one
/// cell per argument; list pairs occupy two cells (head, tail).
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Cell {
    /// An unbound variable.
    Var,
    Ref(Addr),
    /// A variable matched against trie variable `k`; it points at slot `k`
    /// of the variable enumerator vector.
    Enum(u32),
    Const(TrieSymbol),
    Str(Addr),
    Functor(Name, u32),
    Cons(Addr),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum TrailEntry {
    Bind(Addr),
    Slot(u32),
}

/// A popped term together with the term stack height it was popped at.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) struct LoggedTerm {
    pub term: Addr,
    pub height: usize,
}

/// Everything needed to resume the search at an alternative node.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ChoicePointFrame {
    pub alt_node: NodeId,
    /// Term stack height before the variable that created this frame was
    /// popped.
    pub term_stack_top: usize,
    pub term_log_top: usize,
    pub trail_top: usize,
    /// Heap top at frame creation; cells above it are discarded on restore.
    pub arena_mark: usize,
}

/// Sizes of every stack in a [`MatcherState`]. Two equal snapshots taken
/// before and after a query show that nothing leaked.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub struct StateMarks {
    pub term_stack: usize,
    pub term_log: usize,
    pub trail: usize,
    pub arena: usize,
    pub choice_points: usize,
    pub enumerated_slots: usize,
}

/// Reusable working set for retrievals. Allocations survive across queries;
/// contents never do.
#[derive(Debug, Default)]
pub struct MatcherState {
    pub(crate) arena: Vec<Cell>,
    pub(crate) term_stack: Vec<Addr>,
    pub(crate) term_log: Vec<LoggedTerm>,
    /// Slot `k` holds the first query variable matched against trie
    /// variable `k`.
    pub(crate) var_enum: Vec<Option<Addr>>,
    trail: Vec<TrailEntry>,
    pub(crate) cp_stack: Vec<ChoicePointFrame>,
    trace: Option<Vec<NodeId>>,
}

impl MatcherState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn marks(&self) -> StateMarks {
        StateMarks {
            term_stack: self.term_stack.len(),
            term_log: self.term_log.len(),
            trail: self.trail.len(),
            arena: self.arena.len(),
            choice_points: self.cp_stack.len(),
            enumerated_slots: self.var_enum.iter().filter(|s| s.is_some()).count(),
        }
    }

    /// Starts recording every trie node the search descends into.
    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    /// Nodes entered during the last query, in order. Empty unless
    /// [`enable_trace`](Self::enable_trace) was called.
    pub fn entered_nodes(&self) -> &[NodeId] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub(crate) fn clear_trace(&mut self) {
        if let Some(t) = &mut self.trace {
            t.clear();
        }
    }

    pub(crate) fn record_entry(&mut self, node: NodeId) {
        if let Some(t) = &mut self.trace {
            t.push(node);
        }
    }

    /// Copies the arguments of a call onto the heap and pushes them on the
    /// term stack, leftmost on top.
    pub(crate) fn push_call_arguments(&mut self, args: &[Term]) {
        let mut vars = HashMap::new();
        let base = self.put_args(args.iter(), &mut vars);
        for i in (0..args.len()).rev() {
            self.term_stack.push(base + i);
        }
    }

    fn put_args<'t>(
        &mut self,
        args: impl ExactSizeIterator<Item = &'t Term>,
        vars: &mut HashMap<u32, Addr>,
    ) -> Addr {
        let base = self.arena.len();
        self.arena
            .extend(std::iter::repeat_n(Cell::Var, args.len()));
        for (i, a) in args.enumerate() {
            let cell = self.put(a, base + i, vars);
            self.arena[base + i] = cell;
        }
        base
    }

    fn put(&mut self, t: &Term, at: Addr, vars: &mut HashMap<u32, Addr>) -> Cell {
        match t {
            Term::Var(v) => match vars.get(v) {
                Some(&first) => Cell::Ref(first),
                None => {
                    vars.insert(*v, at);
                    Cell::Var
                }
            },
            Term::Atom(a) => Cell::Const(TrieSymbol::Atom(a.clone())),
            Term::Int(i) => Cell::Const(TrieSymbol::Int(*i)),
            Term::EmptyList => Cell::Const(TrieSymbol::EmptyList),
            Term::Struct { functor, args } => {
                let f = self.arena.len();
                self.arena
                    .push(Cell::Functor(functor.clone(), args.len() as u32));
                self.put_args(args.iter(), vars);
                Cell::Str(f)
            }
            Term::List(h, tl) => {
                let base = self.put_args([&**h, &**tl].into_iter(), vars);
                Cell::Cons(base)
            }
        }
    }

    pub(crate) fn deref(&self, mut a: Addr) -> Addr {
        while let Cell::Ref(next) = self.arena[a] {
            a = next;
        }
        a
    }

    /// Principal symbol of a dereferenced structured cell and its argument
    /// addresses, first argument first.
    pub(crate) fn principal(&self, a: Addr) -> (TrieSymbol, std::ops::Range<Addr>) {
        match self.arena[a] {
            Cell::Str(f) => match &self.arena[f] {
                Cell::Functor(name, n) => (
                    TrieSymbol::Functor(name.clone(), *n),
                    f + 1..f + 1 + *n as usize,
                ),
                other => unreachable!("Str points at {other:?}"),
            },
            Cell::Cons(h) => (TrieSymbol::Cons, h..h + 2),
            ref other => unreachable!("not a structured cell: {other:?}"),
        }
    }

    pub(crate) fn push_arguments(&mut self, args: std::ops::Range<Addr>) {
        self.term_stack.extend(args.rev());
    }

    fn bind(&mut self, var: Addr, value: Cell) {
        debug_assert_eq!(self.arena[var], Cell::Var);
        self.arena[var] = value;
        self.trail.push(TrailEntry::Bind(var));
    }

    /// Matches a dereferenced query variable against a trie symbol, binding
    /// it on success. Structured symbols are built on the heap and their
    /// fresh argument variables pushed on the term stack.
    pub(crate) fn try_variable_matching(&mut self, var: Addr, symbol: &TrieSymbol) -> bool {
        let enumerated = match self.arena[var] {
            Cell::Enum(k) => Some(k),
            Cell::Var => None,
            ref other => unreachable!("variable matching on {other:?}"),
        };
        match symbol {
            TrieSymbol::Var(k) => match enumerated {
                Some(j) => j == *k,
                None => {
                    self.bind(var, Cell::Enum(*k));
                    let slot = *k as usize;
                    if self.var_enum.len() <= slot {
                        self.var_enum.resize(slot + 1, None);
                    }
                    if self.var_enum[slot].is_none() {
                        self.var_enum[slot] = Some(var);
                        self.trail.push(TrailEntry::Slot(*k));
                    }
                    true
                }
            },
            _ if enumerated.is_some() => false,
            TrieSymbol::Functor(name, n) => {
                let f = self.arena.len();
                self.arena.push(Cell::Functor(name.clone(), *n));
                self.arena
                    .extend(std::iter::repeat_n(Cell::Var, *n as usize));
                self.bind(var, Cell::Str(f));
                self.push_arguments(f + 1..f + 1 + *n as usize);
                true
            }
            TrieSymbol::Cons => {
                let h = self.arena.len();
                self.arena.extend([Cell::Var, Cell::Var]);
                self.bind(var, Cell::Cons(h));
                self.push_arguments(h..h + 2);
                true
            }
            constant => {
                self.bind(var, Cell::Const(constant.clone()));
                true
            }
        }
    }

    pub(crate) fn push_choice_point(&mut self, alt_node: NodeId, popped_height: usize) {
        self.cp_stack.push(ChoicePointFrame {
            alt_node,
            term_stack_top: popped_height + 1,
            term_log_top: self.term_log.len(),
            trail_top: self.trail.len(),
            arena_mark: self.arena.len(),
        });
    }

    fn unwind_trail(&mut self, top: usize) {
        while self.trail.len() > top {
            match self.trail.pop().unwrap() {
                TrailEntry::Bind(a) => self.arena[a] = Cell::Var,
                TrailEntry::Slot(k) => self.var_enum[k as usize] = None,
            }
        }
    }

    /// Restores the state saved in `frame`.
    ///
    /// Terms popped since the frame was pushed are all on the term log
    /// (matched terms) or back on the term stack (the term that just failed).
    /// Replaying the log from the top down and writing each term back at the
    /// height it was popped from leaves the oldest occupant of every slot,
    /// which is the term stack as it was when the frame was created.
    pub(crate) fn restore_computation(&mut self, frame: &ChoicePointFrame) {
        let top = frame.term_stack_top;
        self.term_stack.truncate(top);
        self.term_stack.resize(top, Addr::MAX);
        for logged in self.term_log.drain(frame.term_log_top..).rev() {
            if logged.height < top {
                self.term_stack[logged.height] = logged.term;
            }
        }
        debug_assert!(!self.term_stack.contains(&Addr::MAX));
        self.unwind_trail(frame.trail_top);
        self.arena.truncate(frame.arena_mark);
    }

    /// Undoes everything down to `marks`, which were taken when the query
    /// started.
    pub(crate) fn reset_to(&mut self, marks: &StateMarks) {
        self.unwind_trail(marks.trail);
        self.arena.truncate(marks.arena);
        self.term_stack.truncate(marks.term_stack);
        self.term_log.truncate(marks.term_log);
        self.cp_stack.truncate(marks.choice_points);
    }

    #[cfg(test)]
    /// Rebuilds the term at `a` with its current bindings. Variables
    /// enumerated against trie variable `k` come back as `Var(k)`; free
    /// variables get ids above every slot.
    pub(crate) fn read_back(&self, a: Addr) -> Term {
        let a = self.deref(a);
        match &self.arena[a] {
            Cell::Var => Term::Var(1_000_000 + a as u32),
            Cell::Enum(k) => Term::Var(*k),
            Cell::Const(TrieSymbol::Atom(n)) => Term::Atom(n.clone()),
            Cell::Const(TrieSymbol::Int(i)) => Term::Int(*i),
            Cell::Const(TrieSymbol::EmptyList) => Term::EmptyList,
            Cell::Str(_) | Cell::Cons(_) => {
                let (sym, args) = self.principal(a);
                match sym {
                    TrieSymbol::Functor(name, _) => Term::Struct {
                        functor: name,
                        args: args.map(|x| self.read_back(x)).collect(),
                    },
                    _ => Term::cons(self.read_back(args.start), self.read_back(args.start + 1)),
                }
            }
            other => unreachable!("unexpected cell {other:?}"),
        }
    }
}
