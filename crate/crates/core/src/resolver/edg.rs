//! Ecosystem Dependency Graph: one edge per (root, member of the root's tree).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use super::{default_host, resolve, DependencyTree, ResolveError, VirtualPackConfig};
use crate::predicate::DepEdgeAttrs;
use crate::registry::{PackageId, RegistryIndex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgEdge {
    pub direct: bool,
    /// Set by the second pass on edges into packages that carry gated
    /// unstable-feature configurations.
    pub attrs: Option<DepEdgeAttrs>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unresolved {
    pub id: PackageId,
    pub error: ResolveError,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Edg {
    node_count: usize,
    edges: BTreeMap<(PackageId, PackageId), EdgEdge>,
    unresolved: Vec<Unresolved>,
    root_attrs: BTreeMap<PackageId, DepEdgeAttrs>,
}

#[derive(Clone, Debug)]
pub struct EdgOptions {
    pub host: BTreeMap<String, String>,
}

impl Default for EdgOptions {
    fn default() -> Self {
        Self { host: default_host() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdgError {
    #[error("package id {0} is not an EDG node")]
    UnknownId(PackageId),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

impl Edg {
    pub fn new(node_count: usize) -> Self {
        Self { node_count, ..Self::default() }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &BTreeMap<(PackageId, PackageId), EdgEdge> {
        &self.edges
    }

    pub fn edge(&self, root: PackageId, dep: PackageId) -> Option<&EdgEdge> {
        self.edges.get(&(root, dep))
    }

    pub fn insert(&mut self, root: PackageId, dep: PackageId, edge: EdgEdge) {
        self.edges.insert((root, dep), edge);
    }

    pub fn remove(&mut self, root: PackageId, dep: PackageId) -> Option<EdgEdge> {
        self.edges.remove(&(root, dep))
    }

    pub fn unresolved(&self) -> &[Unresolved] {
        &self.unresolved
    }

    /// Attributes the root itself was resolved with, for roots that carry
    /// configurations.
    pub fn root_attrs(&self, id: PackageId) -> Option<&DepEdgeAttrs> {
        self.root_attrs.get(&id)
    }

    pub fn set_root_attrs(&mut self, id: PackageId, attrs: DepEdgeAttrs) {
        self.root_attrs.insert(id, attrs);
    }

    /// Roots that resolved.
    pub fn resolved_roots(&self) -> Vec<PackageId> {
        let failed: BTreeSet<PackageId> = self.unresolved.iter().map(|u| u.id).collect();
        (0..self.node_count as u32).map(PackageId).filter(|id| !failed.contains(id)).collect()
    }

    /// Reverse adjacency: dependency -> roots depending on it.
    pub fn reverse(&self) -> BTreeMap<PackageId, Vec<(PackageId, &EdgEdge)>> {
        let mut rev: BTreeMap<PackageId, Vec<(PackageId, &EdgEdge)>> = BTreeMap::new();
        for ((a, b), e) in &self.edges {
            rev.entry(*b).or_default().push((*a, e));
        }
        rev
    }

    /// `edg-v1` text serialization.
    pub fn to_csv(&self) -> String {
        let mut out = format!("edg-v1 {}\n", self.node_count);
        for ((a, b), e) in &self.edges {
            let features = match &e.attrs {
                None => "-".to_string(),
                Some(attrs) => attrs.enabled_features.iter().cloned().collect::<Vec<_>>().join(";"),
            };
            let _ = writeln!(out, "{a},{b},{},{features}", u8::from(e.direct));
        }
        out
    }

    pub fn unresolved_csv(&self) -> String {
        let mut out = String::from("id,error_kind\n");
        for u in &self.unresolved {
            let _ = writeln!(out, "{},{}", u.id, u.error.kind());
        }
        out
    }
}

/// Parse the `edg-v1` format. Attributed edges get `target_env` from `host`.
pub fn read_edg(text: &str, host: &BTreeMap<String, String>) -> Result<Edg, EdgError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let n = header
        .strip_prefix("edg-v1 ")
        .and_then(|n| n.trim().parse::<usize>().ok())
        .ok_or_else(|| EdgError::Format { line: 1, message: format!("bad header `{header}`") })?;
    let mut edg = Edg::new(n);
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |message: &str| EdgError::Format { line: i + 2, message: message.to_string() };
        let fields: Vec<&str> = line.splitn(4, ',').collect();
        let [a, b, direct, features] = fields[..] else { return Err(bad("expected 4 fields")) };
        let id = |s: &str| -> Result<PackageId, EdgError> {
            let v: u32 = s.parse().map_err(|_| bad("bad id"))?;
            if v as usize >= n {
                return Err(bad("id out of range"));
            }
            Ok(PackageId(v))
        };
        let direct = match direct {
            "0" => false,
            "1" => true,
            _ => return Err(bad("direct must be 0 or 1")),
        };
        let attrs = match features {
            "-" => None,
            "" => Some(DepEdgeAttrs { target_env: host.clone(), ..DepEdgeAttrs::default() }),
            list => Some(DepEdgeAttrs {
                enabled_features: list.split(';').map(str::to_string).collect(),
                target_env: host.clone(),
                build_mode_flags: BTreeSet::new(),
            }),
        };
        edg.insert(id(a)?, id(b)?, EdgEdge { direct, attrs });
    }
    Ok(edg)
}

/// Roots that depend on `id`.
pub fn dependents(edg: &Edg, id: PackageId) -> Result<BTreeSet<PackageId>, EdgError> {
    if id.index() >= edg.node_count {
        return Err(EdgError::UnknownId(id));
    }
    Ok(edg.edges.keys().filter(|(_, b)| *b == id).map(|(a, _)| *a).collect())
}

fn root_id(reg: &RegistryIndex, cfg: &VirtualPackConfig) -> Option<PackageId> {
    reg.find(&cfg.root.0, &cfg.root.1).map(|p| p.id)
}

fn carries_configs(reg: &RegistryIndex, id: PackageId) -> bool {
    reg.get(id).is_some_and(|p| !p.ruf_configs.is_empty())
}

/// Build the EDG from one virtual configuration per root. Runs on the
/// current rayon pool.
pub fn generate_edg<I>(reg: &RegistryIndex, cfgs: I, opts: &EdgOptions) -> Edg
where
    I: IntoIterator<Item = VirtualPackConfig>,
{
    let cfgs: Vec<VirtualPackConfig> = cfgs.into_iter().collect();
    let mut edg = Edg::new(reg.len());

    let first: Vec<(Option<PackageId>, Result<DependencyTree, ResolveError>)> =
        cfgs.par_iter().map(|cfg| (root_id(reg, cfg), resolve(reg, cfg))).collect();

    let mut second = Vec::new();
    for (cfg, (id, result)) in cfgs.iter().zip(first) {
        match result {
            Ok(tree) => {
                for &dep in tree.nodes().keys() {
                    if dep != tree.root() {
                        edg.insert(tree.root(), dep, EdgEdge { direct: tree.is_direct(tree.root(), dep), attrs: None });
                    }
                }
                if tree.nodes().keys().any(|&n| carries_configs(reg, n)) {
                    second.push(cfg);
                }
            }
            Err(error) => {
                if let Some(id) = id {
                    edg.unresolved.push(Unresolved { id, error });
                }
            }
        }
    }

    let attributed: Vec<Result<DependencyTree, ResolveError>> = second.par_iter().map(|cfg| resolve(reg, cfg)).collect();
    for tree in attributed.into_iter().flatten() {
        let root = tree.root();
        for &dep in tree.nodes().keys() {
            if !carries_configs(reg, dep) {
                continue;
            }
            let attrs = tree.node_attrs(dep, &opts.host);
            if dep == root {
                if let Some(attrs) = attrs {
                    edg.root_attrs.insert(root, attrs);
                }
            } else if let Some(edge) = edg.edges.get_mut(&(root, dep)) {
                edge.attrs = attrs;
            }
        }
    }
    edg.unresolved.sort_by_key(|u| u.id);
    edg
}
