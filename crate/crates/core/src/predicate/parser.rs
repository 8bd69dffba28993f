use super::ast::{Atom, CfgPredicate};
use super::lexer::{Tok, Token};
use super::PredicateError;

const MAX_DEPTH: usize = 128;

pub(crate) struct TokenParser<'t> {
    toks: &'t [Token],
    pos: usize,
    end: usize,
}

impl<'t> TokenParser<'t> {
    pub fn new(toks: &'t [Token], end: usize) -> Self {
        Self { toks, pos: 0, end }
    }

    pub fn peek(&self) -> Option<&'t Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.offset)
    }

    pub fn next(&mut self) -> Option<&'t Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn err(&self, message: impl Into<String>) -> PredicateError {
        PredicateError::Syntax { offset: self.offset(), message: message.into() }
    }

    pub fn expect(&mut self, want: &Tok, what: &str) -> Result<(), PredicateError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    pub fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// `pred := all(pred,+) | any(pred,+) | not(pred) | ident | ident = "str"`
    pub fn predicate(&mut self) -> Result<CfgPredicate, PredicateError> {
        self.predicate_at(0)
    }

    fn predicate_at(&mut self, depth: usize) -> Result<CfgPredicate, PredicateError> {
        if depth > MAX_DEPTH {
            return Err(self.err("predicate nested too deeply"));
        }
        let key = match self.peek() {
            Some(Tok::Ident(name)) => name.clone(),
            _ => return Err(self.err("expected identifier")),
        };
        self.pos += 1;
        match (key.as_str(), self.peek()) {
            ("all" | "any", Some(Tok::LParen)) => {
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    children.push(self.predicate_at(depth + 1)?);
                    if !self.eat(&Tok::Comma) {
                        self.expect(&Tok::RParen, "`,` or `)`")?;
                        break;
                    }
                }
                if children.is_empty() {
                    return Err(self.err(format!("`{key}` needs at least one predicate")));
                }
                Ok(if key == "all" { CfgPredicate::All(children) } else { CfgPredicate::Any(children) })
            }
            ("not", Some(Tok::LParen)) => {
                self.pos += 1;
                let inner = self.predicate_at(depth + 1)?;
                self.eat(&Tok::Comma);
                self.expect(&Tok::RParen, "`)` closing `not`")?;
                Ok(CfgPredicate::not(inner))
            }
            (_, Some(Tok::LParen)) => Err(self.err(format!("`{key}` is not a predicate combinator"))),
            (_, Some(Tok::Eq)) => {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Str(v)) => Ok(CfgPredicate::Atom(Atom::pair(key, v.clone()))),
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        Err(self.err("expected string literal after `=`"))
                    }
                }
            }
            _ => Ok(CfgPredicate::Atom(Atom::flag(key))),
        }
    }
}
