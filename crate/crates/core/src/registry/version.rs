use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RegistryError;

/// Semantic version. Build metadata is kept for rendering but ignored by
/// equality and ordering.
#[derive(Clone, Debug)]
pub struct SemVer(semver::Version);

impl SemVer {
    pub fn new(major: u64, minor: u64, patch: u64) -> Self {
        Self(semver::Version::new(major, minor, patch))
    }

    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        semver::Version::parse(text.trim())
            .map(Self)
            .map_err(|e| RegistryError::MalformedVersion { text: text.to_string(), reason: e.to_string() })
    }

    pub fn major(&self) -> u64 {
        self.0.major
    }

    pub fn minor(&self) -> u64 {
        self.0.minor
    }

    pub fn patch(&self) -> u64 {
        self.0.patch
    }

    /// Pre-release identifiers, empty for a release.
    pub fn pre(&self) -> &str {
        self.0.pre.as_str()
    }

    pub fn is_prerelease(&self) -> bool {
        !self.0.pre.is_empty()
    }

    /// The semver-compatibility class this version belongs to.
    pub fn bucket(&self) -> Bucket {
        match (self.0.major, self.0.minor) {
            (0, 0) => Bucket::Patch(self.0.patch),
            (0, m) => Bucket::Minor(m),
            (m, _) => Bucket::Major(m),
        }
    }

    pub(crate) fn inner(&self) -> &semver::Version {
        &self.0
    }
}

impl PartialEq for SemVer {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SemVer {}

impl PartialOrd for SemVer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SemVer {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        (a.major, a.minor, a.patch).cmp(&(b.major, b.minor, b.patch)).then_with(|| a.pre.cmp(&b.pre))
    }
}

impl Hash for SemVer {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.major, self.0.minor, self.0.patch, self.0.pre.as_str()).hash(state);
    }
}

impl fmt::Display for SemVer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for SemVer {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for SemVer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SemVer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Self::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Semver-compatibility class: `major` for 1.x and up, `0.minor`, `0.0.patch`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bucket {
    Major(u64),
    Minor(u64),
    Patch(u64),
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bucket::Major(m) => write!(f, "{m}"),
            Bucket::Minor(m) => write!(f, "0.{m}"),
            Bucket::Patch(p) => write!(f, "0.0.{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReqOp {
    Caret,
    Tilde,
    Exact,
    Greater,
    GreaterEq,
    Less,
    LessEq,
    Wildcard,
}

/// One comparator of a requirement, with its partial version.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparator {
    pub op: ReqOp,
    pub major: Option<u64>,
    pub minor: Option<u64>,
    pub patch: Option<u64>,
    pub pre: String,
}

/// Cargo version requirement: a conjunction of comparators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VersionReq(semver::VersionReq);

impl VersionReq {
    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        semver::VersionReq::parse(text)
            .map(Self)
            .map_err(|e| RegistryError::MalformedRequirement { text: text.to_string(), reason: e.to_string() })
    }

    pub fn any() -> Self {
        Self(semver::VersionReq::STAR)
    }

    pub fn exact(v: &SemVer) -> Self {
        Self::parse(&format!("={v}")).expect("rendered version parses")
    }

    pub fn caret(v: &SemVer) -> Self {
        Self::parse(&format!("^{v}")).expect("rendered version parses")
    }

    pub fn matches(&self, v: &SemVer) -> bool {
        self.0.matches(v.inner())
    }

    pub fn comparators(&self) -> Vec<Comparator> {
        if self.0.comparators.is_empty() {
            return vec![Comparator { op: ReqOp::Wildcard, major: None, minor: None, patch: None, pre: String::new() }];
        }
        self.0
            .comparators
            .iter()
            .map(|c| {
                let op = match c.op {
                    semver::Op::Exact => ReqOp::Exact,
                    semver::Op::Greater => ReqOp::Greater,
                    semver::Op::GreaterEq => ReqOp::GreaterEq,
                    semver::Op::Less => ReqOp::Less,
                    semver::Op::LessEq => ReqOp::LessEq,
                    semver::Op::Tilde => ReqOp::Tilde,
                    semver::Op::Wildcard => ReqOp::Wildcard,
                    _ => ReqOp::Caret,
                };
                Comparator { op, major: Some(c.major), minor: c.minor, patch: c.patch, pre: c.pre.to_string() }
            })
            .collect()
    }
}

impl fmt::Display for VersionReq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for VersionReq {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

pub fn parse_version(text: &str) -> Result<SemVer, RegistryError> {
    SemVer::parse(text)
}

pub fn parse_requirement(text: &str) -> Result<VersionReq, RegistryError> {
    VersionReq::parse(text)
}

pub fn matches(req: &VersionReq, v: &SemVer) -> bool {
    req.matches(v)
}
