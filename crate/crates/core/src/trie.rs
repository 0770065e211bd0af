//! Subgoal tries annotated with evaluation counters.
//!
//! Every node carries an `in_eval` field: the number of evaluating subgoals
//! stored at or below it. Plain nodes keep the count inline. Once a sibling
//! chain grows past [`TrieConfig::hash_threshold`] its nodes move into a
//! [`SiblingHash`], and from then on a node's `in_eval` is either unset
//! (count zero) or a link to an entry of the hash's *evaluation index*, a
//! doubly-linked list of exactly those members with a positive count. The
//! index lets a retrieval enumerate the live branches of a wide level without
//! scanning its buckets.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::{self, Write};
use std::hash::{Hash, Hasher};

use bitflags::bitflags;
use thiserror::Error;

use crate::term::{symbol::flatten_into, Name, Term, TrieSymbol};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameId(u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct HashId(u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct IndexId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl FrameId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

bitflags! {
    #[derive(Copy, Clone, Debug, PartialEq, Eq)]
    pub struct NodeStatus: u8 {
        const ROOT = 0b001;
        const LEAF = 0b010;
        /// The node lives in a bucket of a [`SiblingHash`].
        const HASHED = 0b100;
    }
}

/// What a node's `child` field points at.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Level {
    Empty,
    /// First node of a plain sibling chain.
    Chain(NodeId),
    Hash(HashId),
}

/// The `in_eval` field. Which variant is live is decided by
/// [`NodeStatus::HASHED`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum InEval {
    Count(u32),
    /// `None` means the node is not indexed and has no evaluating subgoals.
    Index(Option<IndexId>),
}

#[derive(Clone, Debug)]
pub struct TrieNode {
    symbol: TrieSymbol,
    child: Level,
    parent: Option<NodeId>,
    sibling: Option<NodeId>,
    status: NodeStatus,
    in_eval: InEval,
    frame: Option<FrameId>,
}

impl TrieNode {
    pub fn symbol(&self) -> &TrieSymbol {
        &self.symbol
    }

    pub fn status(&self) -> NodeStatus {
        self.status
    }

    pub fn child(&self) -> Level {
        self.child
    }

    pub fn sibling(&self) -> Option<NodeId> {
        self.sibling
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn frame(&self) -> Option<FrameId> {
        self.frame
    }
}

/// Hash table replacing a long sibling chain. Buckets chain their nodes
/// through the ordinary `sibling` links.
#[derive(Clone, Debug)]
pub struct SiblingHash {
    buckets: Vec<Option<NodeId>>,
    entries: usize,
    /// Head of the evaluation index.
    index: Option<IndexId>,
}

#[derive(Clone, Debug)]
struct IndexNode {
    prev: Option<IndexId>,
    next: Option<IndexId>,
    node: NodeId,
    in_eval: u32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FrameState {
    /// Inserted but never marked evaluating.
    New,
    Evaluating,
    Completed,
}

/// Per-subgoal record hanging off a leaf.
#[derive(Clone, Debug)]
pub struct SubgoalFrame {
    id: FrameId,
    call: Term,
    leaf: NodeId,
    state: FrameState,
}

impl SubgoalFrame {
    pub fn id(&self) -> FrameId {
        self.id
    }

    /// The stored call, with variables renumbered by first occurrence.
    pub fn call(&self) -> &Term {
        &self.call
    }

    pub fn leaf(&self) -> NodeId {
        self.leaf
    }

    pub fn state(&self) -> FrameState {
        self.state
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TrieConfig {
    /// A sibling chain longer than this is converted into a hash table.
    pub hash_threshold: usize,
    /// Bucket count of a freshly created hash table; must be a power of two.
    pub initial_buckets: usize,
}

impl Default for TrieConfig {
    fn default() -> Self {
        TrieConfig {
            hash_threshold: 8,
            initial_buckets: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrieError {
    #[error("`{call}` is not a call to {name}/{arity}")]
    WrongPredicate {
        call: String,
        name: String,
        arity: usize,
    },
    #[error("tabled predicates need at least one argument")]
    ZeroArity,
    #[error("subgoal `{0}` is already being evaluated")]
    AlreadyEvaluating(String),
    #[error("subgoal `{0}` is not being evaluated")]
    NotEvaluating(String),
}

/// A structural invariant that does not hold. Returned by
/// [`SubgoalTrie::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trie invariant violated: {0}")]
pub struct InvariantViolation(pub String);

/// The subgoal trie of one tabled predicate.
///
/// The root stands for the predicate itself; paths below it spell the
/// flattened arguments of each stored call.
#[derive(Clone, Debug)]
pub struct SubgoalTrie {
    name: Name,
    arity: usize,
    config: TrieConfig,
    nodes: Vec<TrieNode>,
    hashes: Vec<SiblingHash>,
    index_nodes: Vec<IndexNode>,
    free_index_nodes: Vec<IndexId>,
    frames: Vec<SubgoalFrame>,
}

const ROOT: NodeId = NodeId(0);

fn symbol_hash(symbol: &TrieSymbol) -> u64 {
    // DefaultHasher::new() uses fixed keys, so bucket order is reproducible.
    let mut h = DefaultHasher::new();
    symbol.hash(&mut h);
    h.finish()
}

impl SubgoalTrie {
    pub fn new(name: &str, arity: usize) -> Result<Self, TrieError> {
        Self::with_config(name, arity, TrieConfig::default())
    }

    pub fn with_config(name: &str, arity: usize, config: TrieConfig) -> Result<Self, TrieError> {
        if arity == 0 {
            return Err(TrieError::ZeroArity);
        }
        assert!(
            config.initial_buckets.is_power_of_two(),
            "bucket count must be a power of two"
        );
        let root = TrieNode {
            symbol: TrieSymbol::Functor(Name::from(name), arity as u32),
            child: Level::Empty,
            parent: None,
            sibling: None,
            status: NodeStatus::ROOT,
            in_eval: InEval::Count(0),
            frame: None,
        };
        Ok(SubgoalTrie {
            name: Name::from(name),
            arity,
            config,
            nodes: vec![root],
            hashes: Vec::new(),
            index_nodes: Vec::new(),
            free_index_nodes: Vec::new(),
            frames: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn config(&self) -> TrieConfig {
        self.config
    }

    pub fn root(&self) -> NodeId {
        ROOT
    }

    /// Number of nodes, not counting the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn node(&self, id: NodeId) -> &TrieNode {
        &self.nodes[id.index()]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn frames(&self) -> &[SubgoalFrame] {
        &self.frames
    }

    pub fn frame(&self, id: FrameId) -> &SubgoalFrame {
        &self.frames[id.index()]
    }

    /// Number of frames currently evaluating, read off the root counter.
    pub fn evaluating_count(&self) -> u32 {
        self.effective_in_eval(ROOT)
    }

    pub fn hash_count(&self) -> usize {
        self.hashes.len()
    }

    pub fn hash_ids(&self) -> impl Iterator<Item = HashId> {
        (0..self.hashes.len() as u32).map(HashId)
    }

    fn check_call<'t>(&self, call: &'t Term) -> Result<&'t [Term], TrieError> {
        match call.functor() {
            Some((name, arity)) if name == &*self.name && arity == self.arity => Ok(call.args()),
            _ => Err(TrieError::WrongPredicate {
                call: call.to_string(),
                name: self.name.to_string(),
                arity: self.arity,
            }),
        }
    }

    /// Flattened argument symbols of `call`, variables numbered across all
    /// arguments.
    fn path_of(args: &[Term]) -> Vec<TrieSymbol> {
        let mut vars = HashMap::new();
        let mut out = Vec::new();
        for a in args {
            flatten_into(a, &mut vars, &mut out);
        }
        out
    }

    /// Looks up `call`, inserting it if no variant is stored yet. Returns the
    /// frame and whether it was created by this call. New frames start in
    /// [`FrameState::New`].
    pub fn check_insert(&mut self, call: &Term) -> Result<(FrameId, bool), TrieError> {
        let args = self.check_call(call)?;
        let path = Self::path_of(args);
        let mut parent = ROOT;
        for symbol in path {
            parent = match self.find_child(parent, &symbol) {
                Some(n) => n,
                None => self.add_child(parent, symbol),
            };
        }
        if let Some(f) = self.nodes[parent.index()].frame {
            return Ok((f, false));
        }
        let id = FrameId(self.frames.len() as u32);
        self.frames.push(SubgoalFrame {
            id,
            call: call.canonical(),
            leaf: parent,
            state: FrameState::New,
        });
        let leaf = &mut self.nodes[parent.index()];
        leaf.status |= NodeStatus::LEAF;
        leaf.frame = Some(id);
        Ok((id, true))
    }

    /// The frame stored for a variant of `call`, if any. Never mutates.
    pub fn lookup_variant(&self, call: &Term) -> Option<FrameId> {
        let args = self.check_call(call).ok()?;
        let mut cur = ROOT;
        for symbol in Self::path_of(args) {
            cur = self.find_child(cur, &symbol)?;
        }
        self.nodes[cur.index()].frame
    }

    fn bucket_of(&self, hash: HashId, symbol: &TrieSymbol) -> usize {
        let buckets = self.hashes[hash.0 as usize].buckets.len();
        (symbol_hash(symbol) as usize) & (buckets - 1)
    }

    /// Start of the chain that may hold `symbol` at `level`: the chain itself,
    /// or the matching bucket of a hash.
    pub fn candidates(&self, level: Level, symbol: &TrieSymbol) -> Option<NodeId> {
        match level {
            Level::Empty => None,
            Level::Chain(head) => Some(head),
            Level::Hash(h) => self.hashes[h.0 as usize].buckets[self.bucket_of(h, symbol)],
        }
    }

    /// Walks a sibling chain (plain or bucket) for the node labelled `symbol`.
    pub fn scan_chain(&self, mut cur: Option<NodeId>, symbol: &TrieSymbol) -> Option<NodeId> {
        while let Some(n) = cur {
            let node = &self.nodes[n.index()];
            if node.symbol == *symbol {
                return Some(n);
            }
            cur = node.sibling;
        }
        None
    }

    fn find_child(&self, parent: NodeId, symbol: &TrieSymbol) -> Option<NodeId> {
        let level = self.nodes[parent.index()].child;
        self.scan_chain(self.candidates(level, symbol), symbol)
    }

    fn add_child(&mut self, parent: NodeId, symbol: TrieSymbol) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        let level = self.nodes[parent.index()].child;
        let hashed = matches!(level, Level::Hash(_));
        self.nodes.push(TrieNode {
            symbol,
            child: Level::Empty,
            parent: Some(parent),
            sibling: None,
            status: if hashed {
                NodeStatus::HASHED
            } else {
                NodeStatus::empty()
            },
            in_eval: if hashed {
                InEval::Index(None)
            } else {
                InEval::Count(0)
            },
            frame: None,
        });
        match level {
            Level::Empty => self.nodes[parent.index()].child = Level::Chain(id),
            Level::Chain(head) => {
                // New siblings go to the end of the chain.
                let mut len = 1;
                let mut tail = head;
                while let Some(next) = self.nodes[tail.index()].sibling {
                    tail = next;
                    len += 1;
                }
                self.nodes[tail.index()].sibling = Some(id);
                if len + 1 > self.config.hash_threshold {
                    self.migrate_to_hash(parent, head);
                }
            }
            Level::Hash(h) => {
                self.bucket_insert(h, id);
                let table = &mut self.hashes[h.0 as usize];
                table.entries += 1;
                if table.entries > table.buckets.len() {
                    self.grow_hash(h);
                }
            }
        }
        id
    }

    fn bucket_insert(&mut self, h: HashId, node: NodeId) {
        let b = self.bucket_of(h, &self.nodes[node.index()].symbol);
        let table = &mut self.hashes[h.0 as usize];
        self.nodes[node.index()].sibling = table.buckets[b];
        table.buckets[b] = Some(node);
    }

    fn migrate_to_hash(&mut self, parent: NodeId, head: NodeId) {
        let h = HashId(self.hashes.len() as u32);
        let mut members = Vec::new();
        let mut cur = Some(head);
        while let Some(n) = cur {
            members.push(n);
            cur = self.nodes[n.index()].sibling;
        }
        let mut buckets = self.config.initial_buckets;
        while buckets < members.len() {
            buckets *= 2;
        }
        self.hashes.push(SiblingHash {
            buckets: vec![None; buckets],
            entries: members.len(),
            index: None,
        });
        self.nodes[parent.index()].child = Level::Hash(h);
        for n in members {
            let count = match self.nodes[n.index()].in_eval {
                InEval::Count(c) => c,
                InEval::Index(_) => unreachable!("chain member already hashed"),
            };
            let node = &mut self.nodes[n.index()];
            node.status |= NodeStatus::HASHED;
            node.in_eval = InEval::Index(None);
            if count > 0 {
                let ix = self.add_index_node(h, n, count);
                self.nodes[n.index()].in_eval = InEval::Index(Some(ix));
            }
            self.bucket_insert(h, n);
        }
    }

    fn grow_hash(&mut self, h: HashId) {
        let table = &mut self.hashes[h.0 as usize];
        let doubled = vec![None; table.buckets.len() * 2];
        let old = std::mem::replace(&mut table.buckets, doubled);
        for head in old {
            let mut cur = head;
            while let Some(n) = cur {
                cur = self.nodes[n.index()].sibling;
                self.bucket_insert(h, n);
            }
        }
    }

    fn add_index_node(&mut self, h: HashId, node: NodeId, in_eval: u32) -> IndexId {
        let head = self.hashes[h.0 as usize].index;
        let entry = IndexNode {
            prev: None,
            next: head,
            node,
            in_eval,
        };
        let ix = match self.free_index_nodes.pop() {
            Some(ix) => {
                self.index_nodes[ix.0 as usize] = entry;
                ix
            }
            None => {
                self.index_nodes.push(entry);
                IndexId(self.index_nodes.len() as u32 - 1)
            }
        };
        if let Some(old) = head {
            self.index_nodes[old.0 as usize].prev = Some(ix);
        }
        self.hashes[h.0 as usize].index = Some(ix);
        ix
    }

    fn remove_index_node(&mut self, h: HashId, ix: IndexId) {
        let IndexNode { prev, next, .. } = self.index_nodes[ix.0 as usize];
        match prev {
            Some(p) => self.index_nodes[p.0 as usize].next = next,
            None => self.hashes[h.0 as usize].index = next,
        }
        if let Some(n) = next {
            self.index_nodes[n.0 as usize].prev = prev;
        }
        self.free_index_nodes.push(ix);
    }

    /// The hash table a hashed node belongs to.
    fn owning_hash(&self, node: NodeId) -> HashId {
        let parent = self.nodes[node.index()]
            .parent
            .expect("hashed node has a parent");
        match self.nodes[parent.index()].child {
            Level::Hash(h) => h,
            _ => unreachable!("hashed node under a non-hash level"),
        }
    }

    /// Marks a frame as evaluating and increments `in_eval` from its leaf up
    /// to the root, indexing hashed nodes that become live.
    pub fn mark_evaluating(&mut self, frame: FrameId) -> Result<(), TrieError> {
        let f = &self.frames[frame.index()];
        if f.state == FrameState::Evaluating {
            return Err(TrieError::AlreadyEvaluating(f.call.to_string()));
        }
        let mut cur = f.leaf;
        while cur != ROOT {
            match self.nodes[cur.index()].in_eval {
                InEval::Index(None) => {
                    let h = self.owning_hash(cur);
                    let ix = self.add_index_node(h, cur, 1);
                    self.nodes[cur.index()].in_eval = InEval::Index(Some(ix));
                }
                InEval::Index(Some(ix)) => self.index_nodes[ix.0 as usize].in_eval += 1,
                InEval::Count(c) => self.nodes[cur.index()].in_eval = InEval::Count(c + 1),
            }
            cur = self.nodes[cur.index()]
                .parent
                .expect("non-root node has a parent");
        }
        self.bump_root(1);
        self.frames[frame.index()].state = FrameState::Evaluating;
        Ok(())
    }

    /// Inverse of [`mark_evaluating`](Self::mark_evaluating); hashed nodes
    /// whose count drops to zero leave the evaluation index.
    pub fn mark_completed(&mut self, frame: FrameId) -> Result<(), TrieError> {
        let f = &self.frames[frame.index()];
        if f.state != FrameState::Evaluating {
            return Err(TrieError::NotEvaluating(f.call.to_string()));
        }
        let mut cur = f.leaf;
        while cur != ROOT {
            match self.nodes[cur.index()].in_eval {
                InEval::Index(Some(ix)) => {
                    if self.index_nodes[ix.0 as usize].in_eval == 1 {
                        let h = self.owning_hash(cur);
                        self.remove_index_node(h, ix);
                        self.nodes[cur.index()].in_eval = InEval::Index(None);
                    } else {
                        self.index_nodes[ix.0 as usize].in_eval -= 1;
                    }
                }
                InEval::Index(None) => unreachable!("evaluating path through an unindexed node"),
                InEval::Count(c) => self.nodes[cur.index()].in_eval = InEval::Count(c - 1),
            }
            cur = self.nodes[cur.index()]
                .parent
                .expect("non-root node has a parent");
        }
        self.bump_root(-1);
        self.frames[frame.index()].state = FrameState::Completed;
        Ok(())
    }

    fn bump_root(&mut self, delta: i32) {
        if let InEval::Count(c) = &mut self.nodes[ROOT.index()].in_eval {
            *c = c.checked_add_signed(delta).expect("root count underflow");
        }
    }

    /// Number of evaluating subgoals at or below `node`.
    pub fn effective_in_eval(&self, node: NodeId) -> u32 {
        match self.nodes[node.index()].in_eval {
            InEval::Count(c) => c,
            InEval::Index(None) => 0,
            InEval::Index(Some(ix)) => self.index_nodes[ix.0 as usize].in_eval,
        }
    }

    /// First node of the evaluation index of `h`.
    pub fn index_head(&self, h: HashId) -> Option<NodeId> {
        self.hashes[h.0 as usize]
            .index
            .map(|ix| self.index_nodes[ix.0 as usize].node)
    }

    /// The node after `node` in its hash's evaluation index. `node` must be
    /// indexed.
    pub fn next_indexed(&self, node: NodeId) -> Option<NodeId> {
        match self.nodes[node.index()].in_eval {
            InEval::Index(Some(ix)) => self.index_nodes[ix.0 as usize]
                .next
                .map(|n| self.index_nodes[n.0 as usize].node),
            _ => None,
        }
    }

    /// Nodes of the evaluation index of `h`, head first.
    pub fn index_entries(&self, h: HashId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.hashes[h.0 as usize].index;
        while let Some(ix) = cur {
            let e = &self.index_nodes[ix.0 as usize];
            out.push(e.node);
            cur = e.next;
        }
        out
    }

    pub fn bucket_count(&self, h: HashId) -> usize {
        self.hashes[h.0 as usize].buckets.len()
    }

    pub fn bucket(&self, h: HashId, i: usize) -> Option<NodeId> {
        self.hashes[h.0 as usize].buckets[i]
    }

    pub fn hash_entries(&self, h: HashId) -> usize {
        self.hashes[h.0 as usize].entries
    }

    /// Which node owns `h` as its child level.
    pub fn hash_owner(&self, h: HashId) -> NodeId {
        self.node_ids()
            .find(|n| self.nodes[n.index()].child == Level::Hash(h))
            .expect("every hash has an owner")
    }

    /// All children of `node` regardless of organization: chain order, or
    /// bucket order for hash levels.
    pub fn children(&self, node: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut walk = |mut cur: Option<NodeId>| {
            while let Some(n) = cur {
                out.push(n);
                cur = self.nodes[n.index()].sibling;
            }
        };
        match self.nodes[node.index()].child {
            Level::Empty => {}
            Level::Chain(head) => walk(Some(head)),
            Level::Hash(h) => {
                for b in &self.hashes[h.0 as usize].buckets {
                    walk(*b);
                }
            }
        }
        out
    }

    /// Symbols from the root down to `node`, root excluded.
    pub fn path_symbols(&self, node: NodeId, out: &mut Vec<TrieSymbol>) {
        out.clear();
        let mut cur = node;
        while cur != ROOT {
            let n = &self.nodes[cur.index()];
            out.push(n.symbol.clone());
            cur = n.parent.expect("non-root node has a parent");
        }
        out.reverse();
    }

    /// Checks the structural invariants: sibling symbols are distinct, each
    /// internal count is the sum of its children's, leaf counts agree with
    /// frame states, and every evaluation index is a well-formed list holding
    /// exactly the positive members of its hash.
    pub fn validate(&self) -> Result<(), InvariantViolation> {
        let fail = |msg: String| Err(InvariantViolation(msg));
        for id in self.node_ids() {
            let node = &self.nodes[id.index()];
            let kids = self.children(id);
            let mut symbols: Vec<_> = kids.iter().map(|k| &self.nodes[k.index()].symbol).collect();
            let before = symbols.len();
            symbols.sort_by_key(|s| format!("{s:?}"));
            symbols.dedup();
            if symbols.len() != before {
                return fail(format!("duplicate sibling symbols under node {}", id.0));
            }
            let hashed_level = matches!(node.child, Level::Hash(_));
            for k in &kids {
                let kn = &self.nodes[k.index()];
                if kn.parent != Some(id) {
                    return fail(format!("node {} has a wrong parent link", k.0));
                }
                if kn.status.contains(NodeStatus::HASHED) != hashed_level {
                    return fail(format!("node {} has a stale HASHED flag", k.0));
                }
                if matches!(kn.in_eval, InEval::Index(_)) != hashed_level {
                    return fail(format!("node {} has the wrong in_eval form", k.0));
                }
            }
            let own = self.effective_in_eval(id);
            match node.frame {
                Some(f) => {
                    if !kids.is_empty() {
                        return fail(format!("leaf {} has children", id.0));
                    }
                    let expect = (self.frames[f.index()].state == FrameState::Evaluating) as u32;
                    if own != expect {
                        return fail(format!("leaf {} count {own}, frame says {expect}", id.0));
                    }
                }
                None if id != ROOT || !kids.is_empty() => {
                    let sum: u32 = kids.iter().map(|k| self.effective_in_eval(*k)).sum();
                    if own != sum {
                        return fail(format!("node {} count {own} but children sum {sum}", id.0));
                    }
                }
                None => {}
            }
        }
        for h in self.hash_ids() {
            let table = &self.hashes[h.0 as usize];
            let mut prev = None;
            let mut cur = table.index;
            let mut listed = Vec::new();
            while let Some(ix) = cur {
                let e = &self.index_nodes[ix.0 as usize];
                if e.prev != prev {
                    return fail(format!(
                        "evaluation index of hash {} has a bad prev link",
                        h.0
                    ));
                }
                if e.in_eval == 0 {
                    return fail(format!("index entry for node {} has count 0", e.node.0));
                }
                if self.nodes[e.node.index()].in_eval != InEval::Index(Some(ix)) {
                    return fail(format!(
                        "node {} does not link back to its index entry",
                        e.node.0
                    ));
                }
                listed.push(e.node);
                if listed.len() > table.entries {
                    return fail(format!("evaluation index of hash {} is cyclic", h.0));
                }
                prev = Some(ix);
                cur = e.next;
            }
            let owner = self.hash_owner(h);
            let mut positive: Vec<NodeId> = self
                .children(owner)
                .into_iter()
                .filter(|k| self.effective_in_eval(*k) > 0)
                .collect();
            listed.sort();
            positive.sort();
            if listed != positive {
                return fail(format!(
                    "evaluation index of hash {} has the wrong members",
                    h.0
                ));
            }
            if self.children(owner).len() != table.entries {
                return fail(format!("hash {} entry count is stale", h.0));
            }
        }
        Ok(())
    }

    /// Indented listing of the trie with each node's `in_eval` count.
    /// Nodes inside hash tables are marked with `#`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_node(ROOT, 0, &mut out);
        out
    }

    fn dump_node(&self, id: NodeId, depth: usize, out: &mut String) {
        let node = &self.nodes[id.index()];
        let mark = if node.status.contains(NodeStatus::HASHED) {
            " #"
        } else {
            ""
        };
        writeln!(
            out,
            "{:indent$}{} [{}]{mark}",
            "",
            node.symbol,
            self.effective_in_eval(id),
            indent = depth * 2
        )
        .unwrap();
        for k in self.children(id) {
            self.dump_node(k, depth + 1, out);
        }
    }
}

impl fmt::Display for SubgoalTrie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
