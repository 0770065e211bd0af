//! A small line-oriented command language for building tables and running
//! retrievals.
//!
//! ```text
//! # comment
//! table p/3
//! call p(1,2,3)
//! complete p(1,2,3)
//! retrieve p(X,2,X) nirs
//! dump
//! ```
//!
//! `call` inserts the subgoal if it is new and marks it evaluating.
//! `retrieve` is read-only and defaults to `eirs`.

use std::collections::BTreeMap;
use std::io;

use thiserror::Error;

use crate::baseline::{collect_nirs, LeafRegistry};
use crate::matcher::MatcherState;
use crate::term::{format_term, parse_term, Term};
use crate::trie::SubgoalTrie;
use crate::Algorithm;

#[derive(Clone, Debug, PartialEq)]
pub enum ScriptCommand {
    Table { name: String, arity: usize },
    Call(Term),
    Complete(Term),
    Retrieve(Term, Algorithm),
    Dump,
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ScriptError {
    /// 1-based line number, if the error came from a script line.
    pub fn line(&self) -> Option<usize> {
        match self {
            ScriptError::Line { line, .. } => Some(*line),
            ScriptError::Io(_) => None,
        }
    }
}

/// Parses one line. Blank lines and comments give `Ok(None)`.
pub fn parse_command(line: &str) -> Result<Option<ScriptCommand>, String> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (word, rest) = match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim()),
        None => (line, ""),
    };
    let term = |text: &str| parse_term(text).map_err(|e| e.to_string());
    let cmd = match word {
        "table" => {
            let (name, arity) = rest
                .rsplit_once('/')
                .ok_or_else(|| format!("expected `table name/arity`, got `{rest}`"))?;
            let arity = arity
                .trim()
                .parse()
                .map_err(|_| format!("bad arity `{}`", arity.trim()))?;
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(format!("bad predicate name `{name}`"));
            }
            ScriptCommand::Table {
                name: name.to_string(),
                arity,
            }
        }
        "call" => ScriptCommand::Call(term(rest)?),
        "complete" => ScriptCommand::Complete(term(rest)?),
        "retrieve" => {
            let (text, alg) = match rest.rsplit_once(char::is_whitespace) {
                Some((t, a)) if a.parse::<Algorithm>().is_ok() => (t, a.parse().unwrap()),
                _ => (rest, Algorithm::Eirs),
            };
            ScriptCommand::Retrieve(term(text.trim())?, alg)
        }
        "dump" if rest.is_empty() => ScriptCommand::Dump,
        "dump" => return Err("`dump` takes no arguments".to_string()),
        other => return Err(format!("unknown command `{other}`")),
    };
    Ok(Some(cmd))
}

struct Table {
    trie: SubgoalTrie,
    registry: LeafRegistry,
}

/// Tables declared so far, keyed by `(name, arity)`.
#[derive(Default)]
pub struct Session {
    tables: BTreeMap<(String, usize), Table>,
    state: MatcherState,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list()
            .entries(self.tables.keys().map(|(n, a)| format!("{n}/{a}")))
            .finish()
    }
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trie(&self, name: &str, arity: usize) -> Option<&SubgoalTrie> {
        self.tables.get(&(name.to_string(), arity)).map(|t| &t.trie)
    }

    fn table_for(&mut self, call: &Term) -> Result<&mut Table, String> {
        let (name, arity) = call
            .functor()
            .ok_or_else(|| format!("`{call}` is not a predicate call"))?;
        self.tables
            .get_mut(&(name.to_string(), arity))
            .ok_or_else(|| format!("no table declared for {name}/{arity}"))
    }

    /// Runs one command, returning the lines it prints.
    pub fn execute(&mut self, cmd: &ScriptCommand) -> Result<Vec<String>, String> {
        match cmd {
            ScriptCommand::Table { name, arity } => {
                let key = (name.clone(), *arity);
                if self.tables.contains_key(&key) {
                    return Err(format!("table {name}/{arity} declared twice"));
                }
                let trie = SubgoalTrie::new(name, *arity).map_err(|e| e.to_string())?;
                self.tables.insert(
                    key,
                    Table {
                        trie,
                        registry: LeafRegistry::new(),
                    },
                );
                Ok(Vec::new())
            }
            ScriptCommand::Call(call) => {
                let table = self.table_for(call)?;
                let (frame, new) = table.trie.check_insert(call).map_err(|e| e.to_string())?;
                if new {
                    table.registry.record(&table.trie, frame);
                }
                table
                    .trie
                    .mark_evaluating(frame)
                    .map_err(|e| e.to_string())?;
                Ok(Vec::new())
            }
            ScriptCommand::Complete(call) => {
                let table = self.table_for(call)?;
                let frame = table
                    .trie
                    .lookup_variant(call)
                    .ok_or_else(|| format!("subgoal `{call}` was never called"))?;
                table
                    .trie
                    .mark_completed(frame)
                    .map_err(|e| e.to_string())?;
                Ok(Vec::new())
            }
            ScriptCommand::Retrieve(call, alg) => {
                let (name, arity) = call
                    .functor()
                    .ok_or_else(|| format!("`{call}` is not a predicate call"))?;
                let table = self
                    .tables
                    .get(&(name.to_string(), arity))
                    .ok_or_else(|| format!("no table declared for {name}/{arity}"))?;
                let found = match alg {
                    Algorithm::Eirs => self.state.collect_subsumed_subgoals(&table.trie, call),
                    Algorithm::Nirs => collect_nirs(&table.trie, &table.registry, call),
                    Algorithm::Sirs => self.state.collect_sirs(&table.trie, call),
                }
                .map_err(|e| e.to_string())?;
                Ok(found
                    .into_iter()
                    .map(|f| format_term(table.trie.frame(f).call()))
                    .collect())
            }
            ScriptCommand::Dump => Ok(self
                .tables
                .values()
                .flat_map(|t| {
                    t.trie
                        .dump()
                        .lines()
                        .map(str::to_string)
                        .collect::<Vec<_>>()
                })
                .collect()),
        }
    }
}

/// Parses and runs `text`, writing output lines to `out`. Stops at the first
/// failing line.
pub fn run_script<W: io::Write>(text: &str, out: &mut W) -> Result<Session, ScriptError> {
    let mut session = Session::new();
    for (i, line) in text.lines().enumerate() {
        let at = |message| ScriptError::Line {
            line: i + 1,
            message,
        };
        let Some(cmd) = parse_command(line).map_err(at)? else {
            continue;
        };
        for printed in session.execute(&cmd).map_err(at)? {
            writeln!(out, "{printed}")?;
        }
    }
    Ok(session)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = "\
table p/3
call p(f(3),2,Y)
call p(f(X),2,f(X))
call p(3,a,b)
complete p(3,a,b)
call p(5,2,7)
complete p(5,2,7)
call p(5,2,5)
";

    fn run(text: &str) -> Result<String, ScriptError> {
        let mut out = Vec::new();
        run_script(text, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn parses_each_command() {
        assert_eq!(
            parse_command("table p/3").unwrap(),
            Some(ScriptCommand::Table {
                name: "p".into(),
                arity: 3
            })
        );
        assert_eq!(parse_command("  # note").unwrap(), None);
        assert_eq!(parse_command("").unwrap(), None);
        assert_eq!(
            parse_command("dump # all").unwrap(),
            Some(ScriptCommand::Dump)
        );
        assert_eq!(
            parse_command("retrieve p(X, Y) sirs").unwrap(),
            Some(ScriptCommand::Retrieve(
                parse_term("p(X,Y)").unwrap(),
                Algorithm::Sirs
            ))
        );
        assert_eq!(
            parse_command("retrieve p(X, Y)").unwrap(),
            Some(ScriptCommand::Retrieve(
                parse_term("p(X,Y)").unwrap(),
                Algorithm::Eirs
            ))
        );
        assert!(parse_command("table p").is_err());
        assert!(parse_command("table p/x").is_err());
        assert!(parse_command("frobnicate").is_err());
        assert!(parse_command("call p(").is_err());
    }

    #[test]
    fn running_example_retrieval() {
        let out = run(&format!("{RUNNING}retrieve p(X,2,X) eirs\n")).unwrap();
        assert_eq!(out, "p(f(A),2,f(A))\np(5,2,5)\n");
    }

    #[test]
    fn baselines_print_the_same_set() {
        let mut expected: Vec<String> = run(&format!("{RUNNING}retrieve p(X,2,X)\n"))
            .unwrap()
            .lines()
            .map(String::from)
            .collect();
        expected.sort();
        for alg in ["nirs", "sirs"] {
            let mut got: Vec<String> = run(&format!("{RUNNING}retrieve p(X,2,X) {alg}\n"))
                .unwrap()
                .lines()
                .map(String::from)
                .collect();
            got.sort();
            assert_eq!(got, expected, "{alg}");
        }
    }

    #[test]
    fn retrieve_on_empty_table() {
        assert_eq!(run("table q/2\nretrieve q(X,Y)\n").unwrap(), "");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = run("table p/1\n\ncomplete p(1)\n").unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(err.to_string().contains("never called"), "{err}");

        let err = run("table p/1\ncall p(1)\ncall p(1)\n").unwrap_err();
        assert_eq!(err.line(), Some(3));

        let err = run("call p(1)\n").unwrap_err();
        assert!(err.to_string().contains("no table"), "{err}");

        let err = run("table p/1\ncall p(\n").unwrap_err();
        assert_eq!(err.line(), Some(2));

        assert!(run("table p/0\n").is_err());
        assert!(run("table p/1\ntable p/1\n").is_err());
    }

    #[test]
    fn dump_shows_counts() {
        let out = run("table p/2\ncall p(1,a)\ncall p(1,b)\ncomplete p(1,b)\ndump\n").unwrap();
        assert_eq!(out, "p/2 [1]\n  1 [1]\n    a [1]\n    b [0]\n");
    }

    #[test]
    fn output_is_deterministic() {
        let text = format!("{RUNNING}dump\nretrieve p(A,B,C) sirs\n");
        assert_eq!(run(&text).unwrap(), run(&text).unwrap());
    }
}
