use std::collections::HashMap;

use thiserror::Error;

use super::{Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {}: {message}", .position + 1)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

/// Parses a term in a small Prolog-like syntax.
///
/// Lowercase-initial names are atoms (or functors when followed by `(`),
/// uppercase- or underscore-initial names are variables, and lists use
/// `[a,b]`, `[H|T]`, `[]`. Variables are numbered by first textual
/// occurrence; each `_` is a fresh variable.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: HashMap::new(),
        next_var: 0,
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: HashMap<&'a str, u32>,
    next_var: u32,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        // Only ASCII bytes were consumed.
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn fresh_var(&mut self) -> u32 {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'[') => self.list(),
            Some(c) if c.is_ascii_digit() || c == b'-' => self.integer(),
            Some(c) if c.is_ascii_uppercase() || c == b'_' => {
                let name = self.ident();
                if name == "_" {
                    return Ok(Term::Var(self.fresh_var()));
                }
                let id = match self.vars.get(name) {
                    Some(&id) => id,
                    None => {
                        let id = self.fresh_var();
                        self.vars.insert(name, id);
                        id
                    }
                };
                Ok(Term::Var(id))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let name = self.ident();
                if self.src.get(self.pos) == Some(&b'(') {
                    self.pos += 1;
                    let args = self.sequence(b')')?;
                    Ok(Term::Struct {
                        functor: Name::from(name),
                        args,
                    })
                } else {
                    Ok(Term::Atom(Name::from(name)))
                }
            }
            Some(c) => Err(self.error(format!("unexpected character `{}`", c as char))),
        }
    }

    /// Comma-separated terms up to and including `close`; at least one.
    fn sequence(&mut self, close: u8) -> Result<Vec<Term>, ParseError> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    items.push(self.term()?);
                }
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                _ => return Err(self.error(format!("expected `,` or `{}`", close as char))),
            }
        }
    }

    fn integer(&mut self) -> Result<Term, ParseError> {
        let start = self.pos;
        if self.src[self.pos] == b'-' {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(self.error("expected digits"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map(Term::Int).map_err(|_| ParseError {
            position: start,
            message: "integer out of range".into(),
        })
    }

    fn list(&mut self) -> Result<Term, ParseError> {
        self.expect(b'[')?;
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(Term::EmptyList);
        }
        let mut items = vec![self.term()?];
        let tail = loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    items.push(self.term()?);
                }
                Some(b'|') => {
                    self.pos += 1;
                    let tail = self.term()?;
                    self.expect(b']')?;
                    break tail;
                }
                Some(b']') => {
                    self.pos += 1;
                    break Term::EmptyList;
                }
                _ => return Err(self.error("expected `,`, `|` or `]`")),
            }
        };
        Ok(items
            .into_iter()
            .rev()
            .fold(tail, |tl, h| Term::cons(h, tl)))
    }
}
