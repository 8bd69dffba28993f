//! Conditional-compilation predicates: parsing, DNF normalization, atom
//! classification and the corpus function deciding whether a dependency edge
//! turns a gated unstable feature on.

mod ast;
mod classify;
mod dnf;
mod lexer;
mod parser;
mod scan;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use ast::{Atom, CfgPredicate};
pub use classify::{classify_atom, corpus, ruf_enabled, AtomClass, Classifier, DepEdgeAttrs};
pub use dnf::{eval_dnf, to_dnf, to_dnf_capped, DnfClause, Literal, DEFAULT_CLAUSE_CAP};
pub use scan::{extract_ruf_configs, render_ruf_configs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredicateError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("DNF would exceed {cap} clauses")]
    ClauseExplosion { cap: usize },
    #[error("scan error at byte {offset}: {message}")]
    Scan { offset: usize, message: String },
    #[error("bad convention entry on line {line}: {text}")]
    Convention { line: usize, text: String },
}

/// Parse the predicate portion of a `cfg`/`cfg_attr` attribute.
pub fn parse_predicate(text: &str) -> Result<CfgPredicate, PredicateError> {
    let toks = lexer::lex(text, 0)?;
    let mut p = parser::TokenParser::new(&toks, text.len());
    let pred = p.predicate()?;
    if !p.is_done() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(pred)
}

/// One gated use of an unstable feature by a package.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RufConfiguration {
    ruf: String,
    predicate: Option<CfgPredicate>,
    clauses: Vec<DnfClause>,
}

impl RufConfiguration {
    pub fn new(ruf: impl Into<String>, predicate: Option<CfgPredicate>) -> Result<Self, PredicateError> {
        let clauses = match &predicate {
            None => vec![DnfClause::always()],
            Some(p) => to_dnf(p)?,
        };
        Ok(Self { ruf: ruf.into(), predicate, clauses })
    }

    pub fn unconditional(ruf: impl Into<String>) -> Self {
        Self { ruf: ruf.into(), predicate: None, clauses: vec![DnfClause::always()] }
    }

    pub fn ruf(&self) -> &str {
        &self.ruf
    }

    pub fn predicate(&self) -> Option<&CfgPredicate> {
        self.predicate.as_ref()
    }

    pub fn clauses(&self) -> &[DnfClause] {
        &self.clauses
    }

    /// DNF is the single always-true clause.
    pub fn is_unconditional(&self) -> bool {
        self.clauses.len() == 1 && self.clauses[0].is_empty()
    }

    /// Every clause was contradictory.
    pub fn is_never(&self) -> bool {
        self.clauses.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigRecord {
    ruf: String,
    pred: Option<String>,
}

impl Serialize for RufConfiguration {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConfigRecord { ruf: self.ruf.clone(), pred: self.predicate.as_ref().map(ToString::to_string) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RufConfiguration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = ConfigRecord::deserialize(d)?;
        let pred = rec.pred.as_deref().map(parse_predicate).transpose().map_err(serde::de::Error::custom)?;
        RufConfiguration::new(rec.ruf, pred).map_err(serde::de::Error::custom)
    }
}
