//! Subgoal tries with evaluation counters, and retrieval of the evaluating
//! subgoals that are instances of a more general call.
//!
//! A tabled logic-programming engine stores every subgoal call it has seen in
//! a trie. When a new, more general call arrives, the engine may want all
//! *currently evaluating* subgoals that the new call subsumes. This crate
//! keeps a per-node count of evaluating subgoals below each trie node so
//! that search can skip whole branches of completed work, and uses a small
//! WAM-style backtracking matcher to walk what remains.
//!
//! ```
//! use subsumption_trie::{collect_subsumed_subgoals, parse_term, SubgoalTrie};
//!
//! let mut trie = SubgoalTrie::new("p", 2).unwrap();
//! for call in ["p(1,1)", "p(1,2)", "p(a,b)"] {
//!     let (frame, _) = trie.check_insert(&parse_term(call).unwrap()).unwrap();
//!     trie.mark_evaluating(frame).unwrap();
//! }
//! let found = collect_subsumed_subgoals(&trie, &parse_term("p(1,X)").unwrap()).unwrap();
//! let calls: Vec<String> = found.iter().map(|f| trie.frame(*f).call().to_string()).collect();
//! assert_eq!(calls, ["p(1,1)", "p(1,2)"]);
//! ```
//!
//! Modules:
//! * [`term`]: terms, parsing and printing, flattening into trie symbols, and
//!   a term-level subsumption check.
//! * [`trie`]: the subgoal trie, hash levels, evaluation indexes, frames.
//! * [`matcher`]: the pruned backtracking retrieval.
//! * [`baseline`]: naive and unpruned retrievals for comparison.
//! * [`bench`]: synthetic workloads and timing.
//! * [`script`]: the line-oriented command language used by the CLI.

extern crate self as subsumption_trie;

pub mod baseline;
pub mod bench;
pub mod matcher;
pub mod script;
pub mod term;
pub mod trie;

pub use baseline::{collect_nirs, collect_sirs, LeafRegistry};
pub use matcher::{collect_subsumed_subgoals, MatcherState};
pub use term::{format_term, parse_term, subsumes, Term, TrieSymbol};
pub use trie::{FrameId, FrameState, SubgoalFrame, SubgoalTrie, TrieError};

/// Which retrieval to run.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Pruned by `in_eval`.
    Eirs,
    /// Leaf list, each subgoal matched separately.
    Nirs,
    /// Backtracking without pruning.
    Sirs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Eirs, Algorithm::Nirs, Algorithm::Sirs];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Eirs => "eirs",
            Algorithm::Nirs => "nirs",
            Algorithm::Sirs => "sirs",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eirs" => Ok(Algorithm::Eirs),
            "nirs" => Ok(Algorithm::Nirs),
            "sirs" => Ok(Algorithm::Sirs),
            other => Err(format!(
                "unknown algorithm `{other}` (expected eirs, nirs or sirs)"
            )),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
#[path = "../tests/common/mod.rs"]
pub(crate) mod testing;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    struct Intro;
    #[doc = include_str!("../../../book/src/terms.md")]
    struct Terms;
    #[doc = include_str!("../../../book/src/trie.md")]
    struct Trie;
    #[doc = include_str!("../../../book/src/retrieval.md")]
    struct Retrieval;
    #[doc = include_str!("../../../book/src/baselines.md")]
    struct Baselines;
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    struct Benchmarks;
    #[doc = include_str!("../../../book/src/scripts.md")]
    struct Scripts;
}
