//! Language feature tables: tuples such as `(active, box_syntax, "1.0.0", None)`
//! or `("llvm_asm", "1.26.0", None, Removed)`.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

use super::{Diagnostic, FeatureSite, LifetimeError, RufStatus};

static CAPITALIZED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"^\(\s*"([A-Za-z0-9_]+)"\s*,.+,\s*(Active|Accepted|Removed|Incomplete)\s*\)"#).unwrap()
});
static LOWERCASE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\(\s*(active|accepted|removed|incomplete)\s*,\s*([A-Za-z0-9_]+)\s*,.+\)").unwrap()
});
static CANDIDATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"^\(\s*("[^"]*"|[A-Za-z_]+)\s*,"#).unwrap());
static INCOMPLETE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bincomplete\b").unwrap());

/// Tuples longer than this many lines are reported instead of joined.
const MAX_TUPLE_LINES: usize = 64;

fn status_token(s: &str) -> RufStatus {
    match s.to_ascii_lowercase().as_str() {
        "accepted" => RufStatus::Accepted,
        "removed" => RufStatus::Removed,
        "incomplete" => RufStatus::Incomplete,
        _ => RufStatus::Active,
    }
}

/// Paren depth change of a line, ignoring string contents and `//` comments.
fn depth_delta(line: &str) -> i64 {
    let mut depth = 0;
    let mut in_str = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        if in_str {
            match c {
                '\\' => {
                    chars.next();
                }
                '"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if chars.peek() == Some(&'/') => break,
            _ => {}
        }
    }
    depth
}

/// Copy of `text` with string literal contents blanked.
fn strip_strings(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_str = false;
    let mut escaped = false;
    for c in text.chars() {
        if in_str {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_str = false;
                out.push('"');
            }
            continue;
        }
        if c == '"' {
            in_str = true;
        }
        out.push(c);
    }
    out
}

fn classify_tuple(tuple: &str) -> Option<(String, RufStatus)> {
    let found = if let Some(c) = LOWERCASE.captures(tuple) {
        Some((c[2].to_string(), status_token(&c[1])))
    } else {
        CAPITALIZED.captures(tuple).map(|c| (c[1].to_string(), status_token(&c[2])))
    };
    let (name, status) = found?;
    if INCOMPLETE.is_match(&strip_strings(tuple)) {
        return Some((name, RufStatus::Incomplete));
    }
    Some((name, status))
}

pub(super) struct LangScan {
    pub sites: Vec<FeatureSite>,
    pub diagnostics: Vec<Diagnostic>,
}

pub(super) fn scan(text: &str, file: &str) -> Result<LangScan, LifetimeError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut sites: Vec<FeatureSite> = Vec::new();
    let mut by_name: BTreeMap<String, usize> = BTreeMap::new();
    let mut diagnostics = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let first = lines[i].trim_start();
        let bare_open = first.trim_end() == "(";
        if !bare_open && !CANDIDATE.is_match(first) {
            i += 1;
            continue;
        }
        let start = i;
        let mut joined = String::from(first);
        let mut depth = depth_delta(first);
        while depth > 0 && i + 1 < lines.len() && i + 1 - start < MAX_TUPLE_LINES {
            i += 1;
            joined.push(' ');
            joined.push_str(lines[i].trim());
            depth += depth_delta(lines[i]);
        }
        i += 1;
        let line = start + 1;
        if bare_open && (depth > 0 || !CANDIDATE.is_match(&joined)) {
            i = start + 1;
            continue;
        }
        if depth > 0 {
            diagnostics.push(Diagnostic::new(file, line, "unterminated feature tuple"));
            continue;
        }
        let Some((name, status)) = classify_tuple(&joined) else {
            diagnostics.push(Diagnostic::new(file, line, format!("unrecognized feature tuple: {}", first.trim_end())));
            continue;
        };
        match by_name.get(&name) {
            Some(&idx) if sites[idx].status != status => {
                return Err(LifetimeError::ConflictingStatus {
                    name,
                    first: sites[idx].status,
                    second: status,
                    file: file.to_string(),
                    line,
                });
            }
            Some(_) => {}
            None => {
                by_name.insert(name.clone(), sites.len());
                sites.push(FeatureSite { name, status, file: file.to_string(), line });
            }
        }
    }
    Ok(LangScan { sites, diagnostics })
}

/// Every feature declared in a language feature table, in file order.
pub fn parse_language_features(text: &str) -> Result<Vec<(String, RufStatus)>, LifetimeError> {
    Ok(scan(text, "<input>")?.sites.into_iter().map(|s| (s.name, s.status)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_tuple_shapes() {
        let text = r#"
declare_features! (
    /// Allows `box` expressions.
    (active, box_syntax, "1.0.0", Some(49733), None),
    (accepted, proc_macro, "1.15.0", None, None),
    (removed, plugin_registrar, "1.54.0", None, None),
    ("llvm_asm", "1.26.0", Some(70173), Removed),
    ("asm_const", "1.58.0", Some(93332), Active),
);
"#;
        let got = parse_language_features(text).unwrap();
        assert_eq!(
            got,
            vec![
                ("box_syntax".to_string(), RufStatus::Active),
                ("proc_macro".to_string(), RufStatus::Accepted),
                ("plugin_registrar".to_string(), RufStatus::Removed),
                ("llvm_asm".to_string(), RufStatus::Removed),
                ("asm_const".to_string(), RufStatus::Active),
            ]
        );
    }

    #[test]
    fn incomplete_markers() {
        let text = "(incomplete, generic_const_exprs, \"1.56.0\", Some(76560), None),\n\
                    (active, specialization, \"1.7.0\", Some(31844), None, incomplete),\n\
                    (active, note, \"1.0.0\", None, Some(\"incomplete\")),\n";
        let got = parse_language_features(text).unwrap();
        assert_eq!(got[0].1, RufStatus::Incomplete);
        assert_eq!(got[1].1, RufStatus::Incomplete);
        assert_eq!(got[2].1, RufStatus::Active);
    }

    #[test]
    fn multi_line_tuples_are_joined() {
        let text = "    (\n        active,\n        let_chains,\n        \"1.37.0\",\n        Some(53667),\n        None\n    ),\n";
        assert_eq!(parse_language_features(text).unwrap(), vec![("let_chains".into(), RufStatus::Active)]);
        let text = "(active, let_chains,\n    \"1.37.0\",\n    Some(53667), None),\n";
        assert_eq!(parse_language_features(text).unwrap(), vec![("let_chains".into(), RufStatus::Active)]);
    }

    #[test]
    fn conflicting_statuses_error() {
        let text = "(active, foo, \"1.0.0\", None, None),\n(\"foo\", \"1.0.0\", None, Accepted),\n";
        match parse_language_features(text) {
            Err(LifetimeError::ConflictingStatus { name, line, .. }) => assert_eq!((name.as_str(), line), ("foo", 2)),
            other => panic!("{other:?}"),
        }
        let same = "(active, foo, \"1.0.0\", None, None),\n(\"foo\", \"1.0.0\", None, Active),\n";
        assert_eq!(parse_language_features(same).unwrap().len(), 1);
    }

    #[test]
    fn unmatched_candidates_become_diagnostics() {
        let got = scan("(active, \"1.0.0\"),\n(stable, foo, \"1.0\", None),\n", "f.txt").unwrap();
        assert!(got.sites.is_empty());
        assert_eq!(got.diagnostics.iter().map(|d| d.line).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn empty_input() {
        assert!(parse_language_features("").unwrap().is_empty());
    }
}
