use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A single configuration option: `unix`, `feature = "pf"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub key: String,
    pub value: Option<String>,
}

impl Atom {
    pub fn flag(key: impl Into<String>) -> Self {
        Self { key: key.into(), value: None }
    }

    pub fn pair(key: impl Into<String>, value: impl Into<String>) -> Self {
        Self { key: key.into(), value: Some(value.into()) }
    }

    pub fn feature(name: impl Into<String>) -> Self {
        Self::pair("feature", name)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            None => f.write_str(&self.key),
            Some(v) => {
                write!(f, "{} = \"", self.key)?;
                for ch in v.chars() {
                    match ch {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

/// Conditional-compilation predicate tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CfgPredicate {
    Atom(Atom),
    All(Vec<CfgPredicate>),
    Any(Vec<CfgPredicate>),
    Not(Box<CfgPredicate>),
}

impl CfgPredicate {
    pub fn atom(key: impl Into<String>) -> Self {
        Self::Atom(Atom::flag(key))
    }

    pub fn pair(key: impl Into<String>, value: impl Into<String>) -> Self {
        Self::Atom(Atom::pair(key, value))
    }

    pub fn feature(name: impl Into<String>) -> Self {
        Self::Atom(Atom::feature(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: CfgPredicate) -> Self {
        Self::Not(Box::new(inner))
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Atom(_) => 1,
            Self::All(cs) | Self::Any(cs) => 1 + cs.iter().map(Self::depth).max().unwrap_or(0),
            Self::Not(c) => 1 + c.depth(),
        }
    }

    /// Every atom in the tree, in left-to-right order, duplicates included.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Self::Atom(a) => out.push(a),
            Self::All(cs) | Self::Any(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
            Self::Not(c) => c.collect_atoms(out),
        }
    }

    /// Direct evaluation under an assignment of atoms.
    pub fn eval<F: Fn(&Atom) -> bool + Copy>(&self, truth: F) -> bool {
        match self {
            Self::Atom(a) => truth(a),
            Self::All(cs) => cs.iter().all(|c| c.eval(truth)),
            Self::Any(cs) => cs.iter().any(|c| c.eval(truth)),
            Self::Not(c) => !c.eval(truth),
        }
    }
}

impl fmt::Display for CfgPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, cs: &[CfgPredicate]| {
            write!(f, "{name}(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        };
        match self {
            Self::Atom(a) => write!(f, "{a}"),
            Self::All(cs) => list(f, "all", cs),
            Self::Any(cs) => list(f, "any", cs),
            Self::Not(c) => write!(f, "not({c})"),
        }
    }
}

impl Serialize for CfgPredicate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CfgPredicate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_predicate(&text).map_err(serde::de::Error::custom)
    }
}
