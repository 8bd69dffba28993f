//! Cargo-style dependency resolution and Ecosystem Dependency Graph
//! generation.

mod edg;
mod features;
mod resolve;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::predicate::{CfgPredicate, DepEdgeAttrs};
use crate::registry::{Bucket, DepKind, DependencyDecl, PackageId, RegistryIndex, SemVer};

pub use edg::{dependents, generate_edg, read_edg, EdgEdge, Edg, EdgError, EdgOptions, Unresolved};
pub use features::{activate_features, Activation};
pub use resolve::{resolve, resolve_with_cap};

/// Dependency kinds a resolution may follow. Dev dependencies are never
/// representable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KindSet {
    pub normal: bool,
    pub build: bool,
}

impl KindSet {
    pub const ALL: KindSet = KindSet { normal: true, build: true };

    pub fn contains(self, kind: DepKind) -> bool {
        match kind {
            DepKind::Normal => self.normal,
            DepKind::Build => self.build,
            DepKind::Dev => false,
        }
    }
}

impl Default for KindSet {
    fn default() -> Self {
        Self::ALL
    }
}

/// The virtual package a root is resolved through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualPackConfig {
    pub root: (String, SemVer),
    /// `None` enables every package feature of the root, implicit ones included.
    pub enabled_pfs: Option<BTreeSet<String>>,
    pub included_kinds: KindSet,
    pub include_optional: bool,
    pub include_target: bool,
}

impl VirtualPackConfig {
    pub fn new(name: impl Into<String>, version: SemVer) -> Self {
        Self {
            root: (name.into(), version),
            enabled_pfs: None,
            included_kinds: KindSet::ALL,
            include_optional: true,
            include_target: true,
        }
    }

    pub fn for_id(reg: &RegistryIndex, id: PackageId) -> Option<Self> {
        reg.get(id).map(|p| Self::new(p.name.clone(), p.version.clone()))
    }

    pub fn with_features<I, S>(mut self, features: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.enabled_pfs = Some(features.into_iter().map(Into::into).collect());
        self
    }

    /// Whether a declaration is followed at all, ignoring optional activation.
    pub(crate) fn admits(&self, decl: &DependencyDecl) -> bool {
        self.included_kinds.contains(decl.kind)
            && (!decl.optional || self.include_optional)
            && (decl.target.is_none() || self.include_target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("root {0} {1} is not in the registry")]
    UnknownRoot(String, SemVer),
    #[error("no package named `{0}`")]
    MissingPackage(String),
    #[error("no version of {name} in bucket {} satisfies {}", bucket.map_or("-".to_string(), |b| b.to_string()), reqs.join(", "))]
    UnsatisfiableRequirement { name: String, bucket: Option<Bucket>, reqs: Vec<String> },
    #[error("feature cycle in {package} through `{feature}`")]
    FeatureCycle { package: String, feature: String },
    #[error("{package} has no feature `{feature}`")]
    UnknownFeature { package: String, feature: String },
    #[error("resolution did not converge within {steps} steps")]
    NonConvergence { steps: usize },
}

impl ResolveError {
    /// Stable short name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            ResolveError::UnknownRoot(..) => "unknown_root",
            ResolveError::MissingPackage(_) => "missing_package",
            ResolveError::UnsatisfiableRequirement { .. } => "unsatisfiable",
            ResolveError::FeatureCycle { .. } => "feature_cycle",
            ResolveError::UnknownFeature { .. } => "unknown_feature",
            ResolveError::NonConvergence { .. } => "non_convergence",
        }
    }
}

/// A direct edge of a resolved tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    /// Platform gate; `None` when at least one declaration is unconditional.
    pub target: Option<CfgPredicate>,
}

/// One root's resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyTree {
    root: PackageId,
    nodes: BTreeMap<PackageId, BTreeSet<String>>,
    edges: BTreeMap<(PackageId, PackageId), TreeEdge>,
}

impl DependencyTree {
    pub(crate) fn new(
        root: PackageId,
        nodes: BTreeMap<PackageId, BTreeSet<String>>,
        edges: BTreeMap<(PackageId, PackageId), TreeEdge>,
    ) -> Self {
        Self { root, nodes, edges }
    }

    pub fn root(&self) -> PackageId {
        self.root
    }

    /// Every node, root included, with its activated features.
    pub fn nodes(&self) -> &BTreeMap<PackageId, BTreeSet<String>> {
        &self.nodes
    }

    pub fn contains(&self, id: PackageId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn features(&self, id: PackageId) -> Option<&BTreeSet<String>> {
        self.nodes.get(&id)
    }

    pub fn edges(&self) -> &BTreeMap<(PackageId, PackageId), TreeEdge> {
        &self.edges
    }

    pub fn is_direct(&self, from: PackageId, to: PackageId) -> bool {
        self.edges.contains_key(&(from, to))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Attributes a dependency sees: its own activated features plus the host.
    pub fn node_attrs(&self, id: PackageId, host: &BTreeMap<String, String>) -> Option<DepEdgeAttrs> {
        self.nodes.get(&id).map(|f| DepEdgeAttrs {
            enabled_features: f.clone(),
            target_env: host.clone(),
            build_mode_flags: BTreeSet::new(),
        })
    }

    pub fn direct_edges(&self, host: &BTreeMap<String, String>) -> Vec<(PackageId, PackageId, DepEdgeAttrs)> {
        self.edges
            .keys()
            .filter_map(|&(a, b)| self.node_attrs(b, host).map(|attrs| (a, b, attrs)))
            .collect()
    }

    /// Selected version and features per `(name, bucket)` slot.
    pub fn slots(&self, reg: &RegistryIndex) -> BTreeMap<(String, Bucket), (SemVer, BTreeSet<String>)> {
        self.nodes
            .iter()
            .filter_map(|(id, f)| reg.get(*id).map(|p| ((p.name.clone(), p.version.bucket()), (p.version.clone(), f.clone()))))
            .collect()
    }
}

/// A typical Linux host, used when no target environment is given.
pub fn default_host() -> BTreeMap<String, String> {
    [
        ("target", "x86_64-unknown-linux-gnu"),
        ("target_arch", "x86_64"),
        ("target_endian", "little"),
        ("target_env", "gnu"),
        ("target_family", "unix"),
        ("target_os", "linux"),
        ("target_pointer_width", "64"),
        ("target_vendor", "unknown"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

impl fmt::Display for TreeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.target {
            Some(p) => write!(f, "cfg({p})"),
            None => f.write_str("*"),
        }
    }
}
