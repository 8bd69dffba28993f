use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use super::ast::Atom;
use super::dnf::{DnfClause, Literal};
use super::{PredicateError, RufConfiguration};

const BUILTIN_CONVENTIONS: &str = include_str!("../../data/cfg_conventions.txt");

static BUILTIN: LazyLock<Classifier> =
    LazyLock::new(|| Classifier::from_conventions(BUILTIN_CONVENTIONS).expect("builtin convention list parses"));

/// Compile-environment options set by the compiler itself.
const TARGET_KEYS: &[&str] = &[
    "target",
    "target_abi",
    "target_arch",
    "target_endian",
    "target_env",
    "target_family",
    "target_feature",
    "target_has_atomic",
    "target_os",
    "target_pointer_width",
    "target_thread_local",
    "target_vendor",
    "debug_assertions",
    "overflow_checks",
    "panic",
    "proc_macro",
    "relocation_model",
    "sanitize",
    "ub_checks",
];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AtomClass {
    FeatureFlag(String),
    TargetAttr { key: String, value: Option<String> },
    TestOrDocOnly,
    ConventionFalse,
    Unknown,
}

/// Attributes carried by a dependency edge that decide whether a gated
/// configuration in the dependency is active.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DepEdgeAttrs {
    pub enabled_features: BTreeSet<String>,
    pub target_env: BTreeMap<String, String>,
    pub build_mode_flags: BTreeSet<String>,
}

impl DepEdgeAttrs {
    pub fn with_features<I, S>(features: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { enabled_features: features.into_iter().map(Into::into).collect(), ..Self::default() }
    }

    pub fn target(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.target_env.insert(key.into(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Convention {
    key: String,
    value: Option<String>,
}

/// Atom classifier backed by a convention list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classifier {
    conventions: Vec<Convention>,
}

impl Default for Classifier {
    fn default() -> Self {
        Self::builtin().clone()
    }
}

impl Classifier {
    /// The shipped convention list.
    pub fn builtin() -> &'static Classifier {
        &BUILTIN
    }

    pub fn from_conventions(text: &str) -> Result<Self, PredicateError> {
        let mut conventions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || PredicateError::Convention { line: idx + 1, text: raw.to_string() };
            let mut parts = line.split_whitespace();
            let (Some(entry), Some("false"), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad());
            };
            let (key, value) = match entry.split_once('=') {
                Some((k, v)) => (k, Some(v.trim_matches('"').to_string())),
                None => (entry, None),
            };
            if key.is_empty() || !key.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                return Err(bad());
            }
            conventions.push(Convention { key: key.to_string(), value });
        }
        Ok(Self { conventions })
    }

    pub fn load(path: &Path) -> Result<Self, PredicateError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PredicateError::Convention { line: 0, text: format!("{}: {e}", path.display()) })?;
        Self::from_conventions(&text)
    }

    pub fn classify(&self, atom: &Atom) -> AtomClass {
        let key = atom.key.as_str();
        let value = atom.value.as_deref();
        if key == "feature" {
            return match value {
                Some(v) => AtomClass::FeatureFlag(v.to_string()),
                None => AtomClass::Unknown,
            };
        }
        if value.is_none() && (key == "test" || key == "doc") {
            return AtomClass::TestOrDocOnly;
        }
        if self
            .conventions
            .iter()
            .any(|c| c.key == key && (c.value.is_none() || c.value.as_deref() == value))
        {
            return AtomClass::ConventionFalse;
        }
        match (key, value) {
            ("unix" | "windows" | "wasm", None) => {
                AtomClass::TargetAttr { key: "target_family".into(), value: Some(key.to_string()) }
            }
            _ if TARGET_KEYS.contains(&key) => {
                AtomClass::TargetAttr { key: key.to_string(), value: value.map(str::to_string) }
            }
            _ => AtomClass::Unknown,
        }
    }

    /// Truth value of one atom under edge attributes.
    pub fn atom_holds(&self, attrs: &DepEdgeAttrs, atom: &Atom) -> bool {
        match self.classify(atom) {
            AtomClass::FeatureFlag(name) => attrs.enabled_features.contains(&name),
            AtomClass::TargetAttr { key, value: Some(v) } => attrs.target_env.get(&key) == Some(&v),
            AtomClass::TargetAttr { key, value: None } => attrs.target_env.contains_key(&key),
            // only set when the root itself is built for tests or docs
            AtomClass::TestOrDocOnly => attrs.build_mode_flags.contains(&atom.key),
            AtomClass::ConventionFalse | AtomClass::Unknown => false,
        }
    }

    pub fn literal_holds(&self, attrs: &DepEdgeAttrs, lit: &Literal) -> bool {
        self.atom_holds(attrs, &lit.atom) != lit.negated
    }

    /// The corpus function: does this edge satisfy every literal of the clause?
    pub fn corpus(&self, attrs: &DepEdgeAttrs, clause: &DnfClause) -> bool {
        clause.literals().all(|l| self.literal_holds(attrs, l))
    }

    pub fn ruf_enabled(&self, attrs: &DepEdgeAttrs, config: &RufConfiguration) -> bool {
        config.clauses().iter().any(|c| self.corpus(attrs, c))
    }
}

pub fn classify_atom(atom: &Atom) -> AtomClass {
    Classifier::builtin().classify(atom)
}

pub fn corpus(attrs: &DepEdgeAttrs, clause: &DnfClause) -> bool {
    Classifier::builtin().corpus(attrs, clause)
}

pub fn ruf_enabled(attrs: &DepEdgeAttrs, config: &RufConfiguration) -> bool {
    Classifier::builtin().ruf_enabled(attrs, config)
}
