//! Library stability attributes: `#[stable(feature = "..", since = "..")]` and
//! `#[unstable(feature = "..", issue = "..")]`.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

use super::{Diagnostic, FeatureSite, LifetimeError, RufStatus};
use crate::source::{line_of, CodeCursor};

static PAIR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*"((?:[^"\\]|\\.)*)""#).unwrap());

/// Matches `#[stable` / `#[unstable` up to and excluding the `(`.
fn attr_opener(s: &str) -> Option<usize> {
    let rest = s.strip_prefix("#[")?;
    let ws = rest.len() - rest.trim_start().len();
    let body = &rest[ws..];
    let ident = if body.starts_with("unstable") {
        "unstable"
    } else if body.starts_with("stable") {
        "stable"
    } else {
        return None;
    };
    let after = &body[ident.len()..];
    let ws2 = after.len() - after.trim_start().len();
    after[ws2..].starts_with('(').then_some(2 + ws + ident.len() + ws2)
}

pub(super) struct LibScan {
    pub sites: Vec<FeatureSite>,
    pub diagnostics: Vec<Diagnostic>,
}

pub(super) fn scan(text: &str, file: &str) -> Result<LibScan, LifetimeError> {
    let mut sites: Vec<FeatureSite> = Vec::new();
    let mut by_name: BTreeMap<String, usize> = BTreeMap::new();
    let mut mixed: BTreeMap<String, usize> = BTreeMap::new();
    let mut cur = CodeCursor::new(text);
    while let Some((pos, len)) = cur.find(attr_opener) {
        let line = line_of(text, pos);
        let malformed = |message: &str| LifetimeError::MalformedAttribute {
            file: file.to_string(),
            line,
            message: message.to_string(),
        };
        let status = if text[pos..].trim_start_matches("#[").trim_start().starts_with("stable") {
            RufStatus::Accepted
        } else {
            RufStatus::Active
        };
        cur.advance_to(pos + len);
        let (start, end) = cur.balanced_group().map_err(|_| malformed("unterminated attribute"))?;
        let body = &text[start + 1..end - 1];
        let feature = PAIR
            .captures_iter(body)
            .find(|c| &c[1] == "feature")
            .map(|c| c[2].to_string())
            .ok_or_else(|| malformed("missing `feature = \"..\"`"))?;
        if feature.is_empty() {
            return Err(malformed("empty feature name"));
        }
        match by_name.get(&feature) {
            Some(&idx) => {
                if sites[idx].status != status {
                    mixed.entry(feature.clone()).or_insert(line);
                    if status == RufStatus::Accepted {
                        sites[idx].status = status;
                        sites[idx].line = line;
                    }
                }
            }
            None => {
                by_name.insert(feature.clone(), sites.len());
                sites.push(FeatureSite { name: feature, status, file: file.to_string(), line });
            }
        }
    }
    let diagnostics = mixed
        .into_iter()
        .map(|(name, line)| Diagnostic::new(file, line, format!("feature `{name}` is partially stabilized")))
        .collect();
    Ok(LibScan { sites, diagnostics })
}

/// Stability attributes in one library source file. Stable wins when a name
/// carries both.
pub fn parse_library_features(text: &str) -> Result<Vec<(String, RufStatus)>, LifetimeError> {
    Ok(scan(text, "<input>")?.sites.into_iter().map(|s| (s.name, s.status)).collect())
}
