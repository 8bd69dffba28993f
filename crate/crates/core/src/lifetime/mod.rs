//! Unstable-feature lifetimes across compiler releases.

mod lang;
mod lib_attrs;
mod snapshot;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry::SemVer;

pub use lang::parse_language_features;
pub use lib_attrs::parse_library_features;
pub use snapshot::{load_release, load_releases, ReleaseSnapshot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RufStatus {
    Accepted,
    Active,
    Incomplete,
    Removed,
    Unknown,
}

impl RufStatus {
    pub const ALL: [RufStatus; 5] =
        [RufStatus::Accepted, RufStatus::Active, RufStatus::Incomplete, RufStatus::Removed, RufStatus::Unknown];

    /// Can a compiler of this release still build code using the feature?
    pub fn is_usable(self) -> bool {
        !matches!(self, RufStatus::Removed | RufStatus::Unknown)
    }
}

impl fmt::Display for RufStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RufStatus::Accepted => "Accepted",
            RufStatus::Active => "Active",
            RufStatus::Incomplete => "Incomplete",
            RufStatus::Removed => "Removed",
            RufStatus::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LifetimeError {
    #[error("{file}:{line}: feature `{name}` declared {first} and {second}")]
    ConflictingStatus { name: String, first: RufStatus, second: RufStatus, file: String, line: usize },
    #[error("{file}:{line}: malformed stability attribute: {message}")]
    MalformedAttribute { file: String, line: usize, message: String },
    #[error("feature `{name}` defined twice in {release}: {first} and {second}")]
    DuplicateDefinition { name: String, release: String, first: String, second: String },
    #[error("release {0} ingested twice")]
    DuplicateReleaseVersion(SemVer),
    #[error("no compiler releases")]
    NoReleases,
    #[error("unknown release {0}")]
    UnknownRelease(SemVer),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Something skipped during ingestion that a human should look at.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(file: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Self { file: file.into(), line, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FeatureSite {
    pub name: String,
    pub status: RufStatus,
    pub file: String,
    pub line: usize,
}

impl FeatureSite {
    fn location(&self) -> String {
        format!("{}:{}", self.file, self.line)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilerRelease {
    pub version: SemVer,
    pub table: BTreeMap<String, RufStatus>,
}

impl CompilerRelease {
    pub fn new<I, S>(version: SemVer, table: I) -> Self
    where
        I: IntoIterator<Item = (S, RufStatus)>,
        S: Into<String>,
    {
        Self { version, table: table.into_iter().map(|(n, s)| (n.into(), s)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RufLifetime {
    pub name: String,
    pub timeline: Vec<(SemVer, RufStatus)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AbnormalKind {
    AcceptedRegressed,
    RemovedRevived,
    Disappeared,
}

impl fmt::Display for AbnormalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbnormalKind::AcceptedRegressed => "AcceptedRegressed",
            AbnormalKind::RemovedRevived => "RemovedRevived",
            AbnormalKind::Disappeared => "Disappeared",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbnormalTransition {
    pub name: String,
    pub kind: AbnormalKind,
    pub at: SemVer,
    pub from: RufStatus,
    pub to: RufStatus,
}

/// Abnormal kinds for one step, in reporting order.
pub fn transition_kinds(from: RufStatus, to: RufStatus) -> Vec<AbnormalKind> {
    use RufStatus::*;
    let mut kinds = Vec::new();
    if from == Accepted && to != Accepted {
        kinds.push(AbnormalKind::AcceptedRegressed);
    }
    if from == Removed && !matches!(to, Removed | Unknown) {
        kinds.push(AbnormalKind::RemovedRevived);
    }
    if from != Unknown && to == Unknown {
        kinds.push(AbnormalKind::Disappeared);
    }
    kinds
}

pub fn detect_abnormal(lt: &RufLifetime) -> Vec<AbnormalTransition> {
    lt.timeline
        .windows(2)
        .flat_map(|w| {
            let ((_, from), (at, to)) = (&w[0], &w[1]);
            transition_kinds(*from, *to).into_iter().map(move |kind| AbnormalTransition {
                name: lt.name.clone(),
                kind,
                at: at.clone(),
                from: *from,
                to: *to,
            })
        })
        .collect()
}

/// Per-feature lifetimes over a fixed, sorted set of releases.
#[derive(Clone, Debug, Default)]
pub struct LifetimeStore {
    releases: Vec<SemVer>,
    lifetimes: BTreeMap<String, RufLifetime>,
}

pub fn build_lifetimes(mut releases: Vec<CompilerRelease>) -> Result<LifetimeStore, LifetimeError> {
    if releases.is_empty() {
        return Err(LifetimeError::NoReleases);
    }
    releases.sort_by(|a, b| a.version.cmp(&b.version));
    if let Some(w) = releases.windows(2).find(|w| w[0].version == w[1].version) {
        return Err(LifetimeError::DuplicateReleaseVersion(w[1].version.clone()));
    }
    let versions: Vec<SemVer> = releases.iter().map(|r| r.version.clone()).collect();
    let mut lifetimes: BTreeMap<String, RufLifetime> = BTreeMap::new();
    for name in releases.iter().flat_map(|r| r.table.keys()) {
        if lifetimes.contains_key(name) {
            continue;
        }
        let timeline = releases
            .iter()
            .map(|r| (r.version.clone(), r.table.get(name).copied().unwrap_or(RufStatus::Unknown)))
            .collect();
        lifetimes.insert(name.clone(), RufLifetime { name: name.clone(), timeline });
    }
    Ok(LifetimeStore { releases: versions, lifetimes })
}

impl LifetimeStore {
    pub fn releases(&self) -> &[SemVer] {
        &self.releases
    }

    pub fn newest(&self) -> Option<&SemVer> {
        self.releases.last()
    }

    pub fn get(&self, name: &str) -> Option<&RufLifetime> {
        self.lifetimes.get(name)
    }

    pub fn len(&self) -> usize {
        self.lifetimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifetimes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RufLifetime> {
        self.lifetimes.values()
    }

    pub fn release_index(&self, v: &SemVer) -> Result<usize, LifetimeError> {
        self.releases.binary_search(v).map_err(|_| LifetimeError::UnknownRelease(v.clone()))
    }

    pub fn status_at(&self, name: &str, v: &SemVer) -> Result<RufStatus, LifetimeError> {
        let idx = self.release_index(v)?;
        Ok(self.lifetimes.get(name).map_or(RufStatus::Unknown, |lt| lt.timeline[idx].1))
    }

    /// Per-release tables with the filled-in `Unknown` entries dropped.
    pub fn to_releases(&self) -> Vec<CompilerRelease> {
        self.releases
            .iter()
            .enumerate()
            .map(|(i, v)| CompilerRelease {
                version: v.clone(),
                table: self
                    .lifetimes
                    .values()
                    .filter(|lt| lt.timeline[i].1 != RufStatus::Unknown)
                    .map(|lt| (lt.name.clone(), lt.timeline[i].1))
                    .collect(),
            })
            .collect()
    }

    pub fn abnormal(&self) -> Vec<AbnormalTransition> {
        self.lifetimes.values().flat_map(detect_abnormal).collect()
    }

    /// `name,version,status` rows, sorted by name then release.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,version,status\n");
        for lt in self.lifetimes.values() {
            for (v, s) in &lt.timeline {
                out.push_str(&format!("{},{v},{s}\n", lt.name));
            }
        }
        out
    }
}

pub fn abnormal_csv(transitions: &[AbnormalTransition]) -> String {
    let mut out = String::from("name,kind,at,from,to\n");
    for t in transitions {
        out.push_str(&format!("{},{},{},{},{}\n", t.name, t.kind, t.at, t.from, t.to));
    }
    out
}
