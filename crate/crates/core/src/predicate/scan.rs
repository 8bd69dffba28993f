//! Crate-level attribute scanner for unstable-feature configurations.

use super::ast::CfgPredicate;
use super::lexer::{lex, Tok};
use super::parser::TokenParser;
use super::{PredicateError, RufConfiguration};
use crate::source::CodeCursor;

fn inner_attr_opener(s: &str) -> Option<usize> {
    let rest = s.strip_prefix("#!")?;
    let ws = rest.len() - rest.trim_start().len();
    rest[ws..].starts_with('[').then_some(2 + ws)
}

fn leading_path(body: &str) -> &str {
    let t = body.trim_start();
    let end = t.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == ':')).unwrap_or(t.len());
    &t[..end]
}

/// Extract every `#![feature(..)]` and `#![cfg_attr(pred, feature(..))]`
/// from a library root, in source order.
pub fn extract_ruf_configs(source: &str) -> Result<Vec<RufConfiguration>, PredicateError> {
    let mut out = Vec::new();
    let mut cur = CodeCursor::new(source);
    while let Some((pos, len)) = cur.find(inner_attr_opener) {
        cur.advance_to(pos + len);
        let (start, end) = cur.balanced_group().map_err(|offset| PredicateError::Scan {
            offset,
            message: "unbalanced delimiter in crate-level attribute".into(),
        })?;
        let body = &source[start + 1..end - 1];
        let path = leading_path(body);
        if path != "feature" && path != "cfg_attr" {
            continue;
        }
        let toks = lex(body, start + 1).map_err(into_scan)?;
        let mut p = TokenParser::new(&toks, end - 1);
        meta_item(&mut p, None, &mut out).map_err(into_scan)?;
        if !p.is_done() {
            return Err(PredicateError::Scan { offset: p.offset(), message: "trailing tokens in attribute".into() });
        }
    }
    Ok(out)
}

fn into_scan(e: PredicateError) -> PredicateError {
    match e {
        PredicateError::Syntax { offset, message } => PredicateError::Scan { offset, message },
        other => other,
    }
}

fn conjoin(outer: Option<&CfgPredicate>, inner: CfgPredicate) -> CfgPredicate {
    match outer {
        None => inner,
        Some(o) => CfgPredicate::All(vec![o.clone(), inner]),
    }
}

/// One meta item under an optional enclosing predicate. Items other than
/// `feature` and `cfg_attr` are consumed and ignored.
fn meta_item(
    p: &mut TokenParser<'_>,
    gate: Option<&CfgPredicate>,
    out: &mut Vec<RufConfiguration>,
) -> Result<(), PredicateError> {
    let mut path = match p.next() {
        Some(Tok::Ident(name)) => name.clone(),
        _ => return Err(p.err("expected attribute path")),
    };
    while p.eat(&Tok::PathSep) {
        match p.next() {
            Some(Tok::Ident(seg)) => {
                path.push_str("::");
                path.push_str(seg);
            }
            _ => return Err(p.err("expected path segment")),
        }
    }
    match (path.as_str(), p.peek()) {
        ("feature", Some(Tok::LParen)) => {
            p.next();
            loop {
                if p.eat(&Tok::RParen) {
                    break;
                }
                let name = match p.next() {
                    Some(Tok::Ident(name)) => name.clone(),
                    _ => return Err(p.err("expected feature name")),
                };
                out.push(RufConfiguration::new(name, gate.cloned())?);
                if !p.eat(&Tok::Comma) {
                    p.expect(&Tok::RParen, "`,` or `)` in feature list")?;
                    break;
                }
            }
            Ok(())
        }
        ("cfg_attr", Some(Tok::LParen)) => {
            p.next();
            let pred = p.predicate()?;
            let gate = conjoin(gate, pred);
            p.expect(&Tok::Comma, "`,` after cfg_attr predicate")?;
            loop {
                if p.eat(&Tok::RParen) {
                    break;
                }
                meta_item(p, Some(&gate), out)?;
                if !p.eat(&Tok::Comma) {
                    p.expect(&Tok::RParen, "`,` or `)` in cfg_attr")?;
                    break;
                }
            }
            Ok(())
        }
        (_, Some(Tok::LParen)) => skip_group(p),
        (_, Some(Tok::Eq)) => {
            p.next();
            // value runs to the next top-level comma or the end
            while let Some(t) = p.peek() {
                match t {
                    Tok::Comma | Tok::RParen => break,
                    Tok::LParen => skip_group(p)?,
                    _ => {
                        p.next();
                    }
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn skip_group(p: &mut TokenParser<'_>) -> Result<(), PredicateError> {
    p.expect(&Tok::LParen, "`(`")?;
    let mut depth = 1usize;
    while depth > 0 {
        match p.next() {
            Some(Tok::LParen) => depth += 1,
            Some(Tok::RParen) => depth -= 1,
            Some(_) => {}
            None => return Err(p.err("unbalanced parentheses")),
        }
    }
    Ok(())
}

/// Render configurations back to crate-level attribute source.
pub fn render_ruf_configs(configs: &[RufConfiguration]) -> String {
    let mut out = String::new();
    for c in configs {
        match c.predicate() {
            None => out.push_str(&format!("#![feature({})]\n", c.ruf())),
            Some(p) => out.push_str(&format!("#![cfg_attr({p}, feature({}))]\n", c.ruf())),
        }
    }
    out
}
