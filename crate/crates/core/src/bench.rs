//! Synthetic retrieval workloads and their timing.
//!
//! Three program shapes, each parameterized by a subgoal count `n`:
//!
//! * `empty`: `n` subgoals are called and completed one after another, then
//!   a general call finds nothing evaluating.
//! * `one`: like `empty`, plus one subgoal that stays evaluating; the final
//!   general call finds exactly that one.
//! * `end`: `n` subgoals are called and left evaluating; the final general
//!   call subsumes all of them.
//!
//! Every subgoal call is followed by a retrieval with that call, as a
//! tabling engine does for each new generator. Subgoals are `p(i, n-i)` and
//! the final call is `p(X,Y)`, so the first trie level is wide and hashed.

use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::baseline::{collect_nirs, LeafRegistry};
use crate::matcher::MatcherState;
use crate::term::Term;
use crate::trie::SubgoalTrie;
use crate::Algorithm;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Program {
    Empty,
    One,
    End,
}

impl Program {
    pub const ALL: [Program; 3] = [Program::Empty, Program::One, Program::End];

    pub fn name(self) -> &'static str {
        match self {
            Program::Empty => "empty",
            Program::One => "one",
            Program::End => "end",
        }
    }

    pub fn workload(self, n: usize) -> Workload {
        match self {
            Program::Empty => gen_empty(n),
            Program::One => gen_one(n),
            Program::End => gen_end(n),
        }
    }
}

impl FromStr for Program {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "empty" => Ok(Program::Empty),
            "one" => Ok(Program::One),
            "end" => Ok(Program::End),
            other => Err(format!(
                "unknown program `{other}` (expected empty, one or end)"
            )),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// Insert the call (if new) and mark it evaluating.
    Call(Term),
    Complete(Term),
    Retrieve(Term),
}

/// A scripted sequence of operations on one `p/2` table.
#[derive(Clone, Debug, PartialEq)]
pub struct Workload {
    pub steps: Vec<Step>,
}

impl Workload {
    pub fn retrieval_calls(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Retrieve(_)))
            .count()
    }
}

fn subgoal(i: usize, n: usize) -> Term {
    Term::compound(
        "p",
        vec![Term::Int(i as i64), Term::Int(n as i64 - i as i64)],
    )
}

fn general_call() -> Term {
    Term::compound("p", vec![Term::Var(0), Term::Var(1)])
}

/// Call `p(i, n-i)` then retrieve with it; optionally complete it after.
fn push_generator(steps: &mut Vec<Step>, call: Term, complete: bool) {
    steps.push(Step::Call(call.clone()));
    steps.push(Step::Retrieve(call.clone()));
    if complete {
        steps.push(Step::Complete(call));
    }
}

pub fn gen_empty(n: usize) -> Workload {
    assert!(n > 0, "workloads need at least one subgoal");
    let mut steps = Vec::with_capacity(3 * n + 1);
    for i in 1..=n {
        push_generator(&mut steps, subgoal(i, n), true);
    }
    steps.push(Step::Retrieve(general_call()));
    Workload { steps }
}

pub fn gen_one(n: usize) -> Workload {
    assert!(n > 0, "workloads need at least one subgoal");
    let mut steps = Vec::with_capacity(3 * n + 3);
    push_generator(&mut steps, subgoal(0, n), false);
    for i in 1..=n {
        push_generator(&mut steps, subgoal(i, n), true);
    }
    steps.push(Step::Retrieve(general_call()));
    Workload { steps }
}

pub fn gen_end(n: usize) -> Workload {
    assert!(n > 0, "workloads need at least one subgoal");
    let mut steps = Vec::with_capacity(2 * n + 1);
    for i in 1..=n {
        push_generator(&mut steps, subgoal(i, n), false);
    }
    steps.push(Step::Retrieve(general_call()));
    Workload { steps }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BenchSpec {
    pub program: Program,
    pub n: usize,
    pub algorithm: Algorithm,
    pub repeats: usize,
}

impl BenchSpec {
    pub fn new(program: Program, n: usize, algorithm: Algorithm) -> Self {
        BenchSpec {
            program,
            n,
            algorithm,
            repeats: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("subgoal count must be positive")]
    ZeroSubgoals,
    #[error("repeat count must be positive")]
    ZeroRepeats,
}

/// Measurements of one workload execution.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RunTimes {
    pub calls: usize,
    /// Time inside retrievals, plus counter maintenance for EIRS.
    pub retrieval: Duration,
    pub total: Duration,
    /// Result count of the last retrieval.
    pub results_found: usize,
}

/// Executes `workload` once with `algorithm`.
pub fn run_workload(workload: &Workload, algorithm: Algorithm) -> RunTimes {
    let started = Instant::now();
    let mut trie = SubgoalTrie::new("p", 2).expect("p/2 is a valid table");
    let mut registry = LeafRegistry::new();
    let mut state = MatcherState::new();
    let mut retrieval = Duration::ZERO;
    let mut calls = 0;
    let mut results_found = 0;
    let counts_maintenance = algorithm == Algorithm::Eirs;
    for step in &workload.steps {
        match step {
            Step::Call(call) => {
                let (frame, new) = trie.check_insert(call).expect("workload call fits p/2");
                if new {
                    registry.record(&trie, frame);
                }
                let t = Instant::now();
                trie.mark_evaluating(frame)
                    .expect("workload calls each subgoal once");
                if counts_maintenance {
                    retrieval += t.elapsed();
                }
            }
            Step::Complete(call) => {
                let frame = trie
                    .lookup_variant(call)
                    .expect("completed subgoal was called");
                let t = Instant::now();
                trie.mark_completed(frame)
                    .expect("completed subgoal was evaluating");
                if counts_maintenance {
                    retrieval += t.elapsed();
                }
            }
            Step::Retrieve(call) => {
                let t = Instant::now();
                let found = match algorithm {
                    Algorithm::Eirs => state.collect_subsumed_subgoals(&trie, call),
                    Algorithm::Nirs => collect_nirs(&trie, &registry, call),
                    Algorithm::Sirs => state.collect_sirs(&trie, call),
                }
                .expect("workload call fits p/2");
                retrieval += t.elapsed();
                calls += 1;
                results_found = found.len();
            }
        }
    }
    RunTimes {
        calls,
        retrieval,
        total: started.elapsed(),
        results_found,
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub spec: BenchSpec,
    pub calls: usize,
    /// Mean over the measured repeats, in milliseconds.
    pub retrieval_ms: f64,
    pub total_ms: f64,
    pub results_found: usize,
}

/// Runs the workload once to warm up, then `spec.repeats` measured times.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchResult, BenchError> {
    if spec.n == 0 {
        return Err(BenchError::ZeroSubgoals);
    }
    if spec.repeats == 0 {
        return Err(BenchError::ZeroRepeats);
    }
    let workload = spec.program.workload(spec.n);
    run_workload(&workload, spec.algorithm);
    let runs: Vec<RunTimes> = (0..spec.repeats)
        .map(|_| run_workload(&workload, spec.algorithm))
        .collect();
    let mean_ms = |f: fn(&RunTimes) -> Duration| {
        runs.iter().map(|r| f(r).as_secs_f64() * 1e3).sum::<f64>() / runs.len() as f64
    };
    Ok(BenchResult {
        spec: *spec,
        calls: runs[0].calls,
        retrieval_ms: mean_ms(|r| r.retrieval),
        total_ms: mean_ms(|r| r.total),
        results_found: runs[0].results_found,
    })
}

#[derive(Serialize)]
struct CsvRow {
    program: Program,
    n: usize,
    algorithm: Algorithm,
    calls: usize,
    retrieval_ms: String,
    total_ms: String,
    results_found: usize,
}

/// Writes results as CSV with columns
/// `program,n,algorithm,calls,retrieval_ms,total_ms,results_found`.
pub fn write_csv<W: io::Write>(
    results: &[BenchResult],
    out: W,
    with_header: bool,
) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(with_header)
        .from_writer(out);
    for r in results {
        w.serialize(CsvRow {
            program: r.spec.program,
            n: r.spec.n,
            algorithm: r.spec.algorithm,
            calls: r.calls,
            retrieval_ms: format!("{:.4}", r.retrieval_ms),
            total_ms: format!("{:.4}", r.total_ms),
            results_found: r.results_found,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::oracle_results;
    use crate::trie::FrameState;

    /// Replays a workload with plain trie operations and returns the oracle
    /// answer to its last retrieval.
    fn oracle_final(workload: &Workload) -> usize {
        let mut trie = SubgoalTrie::new("p", 2).unwrap();
        let mut last = 0;
        for step in &workload.steps {
            match step {
                Step::Call(c) => {
                    let f = trie.check_insert(c).unwrap().0;
                    trie.mark_evaluating(f).unwrap();
                }
                Step::Complete(c) => {
                    let f = trie.lookup_variant(c).unwrap();
                    trie.mark_completed(f).unwrap();
                }
                Step::Retrieve(c) => last = oracle_results(&trie, c).len(),
            }
        }
        last
    }

    #[test]
    fn call_counts() {
        assert_eq!(gen_empty(100).retrieval_calls(), 101);
        assert_eq!(gen_one(100).retrieval_calls(), 102);
        assert_eq!(gen_end(100).retrieval_calls(), 101);
        assert_eq!(gen_empty(1).retrieval_calls(), 2);
    }

    #[test]
    fn final_retrieval_counts_match_oracle() {
        for n in [1, 7, 50] {
            assert_eq!(oracle_final(&gen_empty(n)), 0);
            assert_eq!(oracle_final(&gen_one(n)), 1);
            assert_eq!(oracle_final(&gen_end(n)), n);
        }
    }

    #[test]
    fn all_algorithms_agree_on_results() {
        for program in Program::ALL {
            let w = program.workload(40);
            let expected = oracle_final(&w);
            for alg in Algorithm::ALL {
                let r = run_workload(&w, alg);
                assert_eq!(r.results_found, expected, "{program} {alg}");
                assert_eq!(r.calls, w.retrieval_calls());
                assert!(r.retrieval <= r.total);
            }
        }
    }

    #[test]
    fn one_leaves_exactly_one_evaluating() {
        let w = gen_one(1);
        let mut trie = SubgoalTrie::new("p", 2).unwrap();
        for step in &w.steps {
            match step {
                Step::Call(c) => {
                    let f = trie.check_insert(c).unwrap().0;
                    trie.mark_evaluating(f).unwrap();
                }
                Step::Complete(c) => {
                    let f = trie.lookup_variant(c).unwrap();
                    trie.mark_completed(f).unwrap();
                }
                Step::Retrieve(_) => {}
            }
        }
        let states: Vec<_> = trie.frames().iter().map(|f| f.state()).collect();
        assert_eq!(states, [FrameState::Evaluating, FrameState::Completed]);
    }

    #[test]
    fn bench_rejects_bad_specs() {
        let mut spec = BenchSpec::new(Program::Empty, 0, Algorithm::Eirs);
        assert_eq!(run_bench(&spec), Err(BenchError::ZeroSubgoals));
        spec.n = 1;
        spec.repeats = 0;
        assert_eq!(run_bench(&spec), Err(BenchError::ZeroRepeats));
    }

    #[test]
    fn empty_one_subgoal_finds_nothing() {
        for alg in Algorithm::ALL {
            let r = run_bench(&BenchSpec::new(Program::Empty, 1, alg)).unwrap();
            assert_eq!(r.results_found, 0);
            assert_eq!(r.calls, 2);
        }
    }

    #[test]
    fn csv_columns() {
        let r = BenchResult {
            spec: BenchSpec::new(Program::End, 1000, Algorithm::Eirs),
            calls: 1001,
            retrieval_ms: 1.5,
            total_ms: 2.25,
            results_found: 1000,
        };
        let mut out = Vec::new();
        write_csv(&[r], &mut out, true).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "program,n,algorithm,calls,retrieval_ms,total_ms,results_found\n\
             end,1000,eirs,1001,1.5000,2.2500,1000\n"
        );
    }
}
