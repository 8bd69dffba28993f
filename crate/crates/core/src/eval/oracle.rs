//! Brute-force reference resolver. Enumerates version assignments per
//! `(name, bucket)` slot and keeps those that are consistent with the
//! resolution rules when derived from scratch. Shares no code with
//! `resolver::resolve`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::predicate::CfgPredicate;
use crate::registry::{Bucket, DepKind, FeatureItem, PackageId, PackageVersion, RegistryIndex, VersionReq};
use crate::resolver::{DependencyTree, TreeEdge, VirtualPackConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub max_packages: usize,
    pub max_versions: usize,
    /// Upper bound on search nodes visited per root.
    pub budget: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { max_packages: 30, max_versions: 8, budget: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("registry has {packages} packages and up to {versions} versions per package, over the oracle cap")]
    SizeCapExceeded { packages: usize, versions: usize },
    #[error("root is not in the registry")]
    UnknownRoot,
    #[error("no package named `{0}`")]
    MissingPackage(String),
    #[error("no consistent version assignment: {0}")]
    UnsatisfiableRequirement(String),
    #[error("feature error: {0}")]
    Feature(String),
    #[error("search budget of {0} nodes exhausted")]
    SearchBudgetExceeded(usize),
}

type Slot = (String, Bucket);

struct Closure {
    features: BTreeSet<String>,
    optional_deps: BTreeSet<String>,
    dep_features: BTreeMap<String, BTreeSet<String>>,
}

fn implicit_names(pkg: &PackageVersion) -> BTreeSet<String> {
    let mut referenced = BTreeSet::new();
    for def in pkg.features.values() {
        for item in &def.items {
            if let FeatureItem::OptionalDep(d) = item {
                referenced.insert(d.clone());
            }
        }
    }
    pkg.deps
        .iter()
        .filter(|d| d.optional && !referenced.contains(&d.name) && !pkg.features.contains_key(&d.name))
        .map(|d| d.name.clone())
        .collect()
}

/// Set-based fixpoint, with a separate cycle check over the reached
/// explicit features.
fn closure(pkg: &PackageVersion, requested: &BTreeSet<String>) -> Result<Closure, OracleError> {
    let implicit = implicit_names(pkg);
    let known = |f: &str| pkg.features.contains_key(f) || implicit.contains(f);
    let optional = |x: &str| pkg.deps.iter().any(|d| d.optional && d.name == x);
    let required = |x: &str| pkg.deps.iter().any(|d| !d.optional && d.name == x);
    let mut features = requested.clone();
    loop {
        let before = features.len();
        for f in features.clone() {
            if !known(&f) {
                return Err(OracleError::Feature(format!("{} has no feature `{f}`", pkg.label())));
            }
            let Some(def) = pkg.features.get(&f) else { continue };
            for item in &def.items {
                match item {
                    FeatureItem::Feature(g) => {
                        features.insert(g.clone());
                    }
                    FeatureItem::DepFeature { dep, weak: false, .. } if implicit.contains(dep) => {
                        features.insert(dep.clone());
                    }
                    FeatureItem::OptionalDep(d) if implicit.contains(d) => {
                        features.insert(d.clone());
                    }
                    _ => {}
                }
            }
        }
        if features.len() == before {
            break;
        }
    }

    // Kahn over the explicit features reached; leftovers sit on a cycle
    let reached: Vec<&String> = features.iter().filter(|f| pkg.features.contains_key(*f)).collect();
    let mut indegree: BTreeMap<&str, usize> = reached.iter().map(|f| (f.as_str(), 0)).collect();
    for f in &reached {
        for item in &pkg.features[*f].items {
            if let FeatureItem::Feature(g) = item {
                if let Some(n) = indegree.get_mut(g.as_str()) {
                    *n += 1;
                }
            }
        }
    }
    let mut ready: Vec<&str> = indegree.iter().filter(|(_, n)| **n == 0).map(|(f, _)| *f).collect();
    let mut done = 0;
    while let Some(f) = ready.pop() {
        done += 1;
        for item in &pkg.features[f].items {
            if let FeatureItem::Feature(g) = item {
                if let Some(n) = indegree.get_mut(g.as_str()) {
                    *n -= 1;
                    if *n == 0 {
                        ready.push(g.as_str());
                    }
                }
            }
        }
    }
    if done != indegree.len() {
        return Err(OracleError::Feature(format!("feature cycle in {}", pkg.label())));
    }

    let mut optional_deps: BTreeSet<String> = features.iter().filter(|f| implicit.contains(*f)).cloned().collect();
    for f in &features {
        let Some(def) = pkg.features.get(f) else { continue };
        for item in &def.items {
            match item {
                FeatureItem::OptionalDep(d) => {
                    optional_deps.insert(d.clone());
                }
                FeatureItem::DepFeature { dep, weak: false, .. } if optional(dep) => {
                    optional_deps.insert(dep.clone());
                }
                _ => {}
            }
        }
    }
    let mut dep_features: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in &features {
        let Some(def) = pkg.features.get(f) else { continue };
        for item in &def.items {
            if let FeatureItem::DepFeature { dep, feature, weak } = item {
                if !*weak || required(dep) || optional_deps.contains(dep) {
                    dep_features.entry(dep.clone()).or_default().insert(feature.clone());
                }
            }
        }
    }
    Ok(Closure { features, optional_deps, dep_features })
}

/// What a (possibly partial) assignment implies when derived from the root.
#[derive(Default)]
struct Derivation {
    /// Slots reached, whether assigned or not.
    reached: BTreeSet<Slot>,
    reqs: BTreeMap<Slot, Vec<VersionReq>>,
    features: BTreeMap<Slot, BTreeSet<String>>,
    edges: BTreeMap<(Slot, Slot), Vec<Option<CfgPredicate>>>,
}

struct Oracle<'a> {
    reg: &'a RegistryIndex,
    cfg: &'a VirtualPackConfig,
    root: &'a PackageVersion,
    root_slot: Slot,
    /// Kahn position of each package name; cyclic names and their
    /// descendants have none.
    topo: BTreeMap<String, usize>,
    visited: usize,
    budget: usize,
    solutions: Vec<BTreeMap<Slot, PackageId>>,
    feature_error: Option<OracleError>,
}

impl<'a> Oracle<'a> {
    fn target(&self, name: &str, req: &VersionReq) -> Result<Slot, OracleError> {
        let list = self.reg.versions(name).ok_or_else(|| OracleError::MissingPackage(name.to_string()))?;
        let top = list
            .iter()
            .filter(|p| req.matches(&p.version))
            .max_by(|a, b| a.version.cmp(&b.version))
            .ok_or_else(|| OracleError::UnsatisfiableRequirement(format!("{name} {req} matches nothing")))?;
        Ok((name.to_string(), top.version.bucket()))
    }

    fn root_request(&self) -> BTreeSet<String> {
        match &self.cfg.enabled_pfs {
            Some(pfs) => pfs.clone(),
            None => {
                let mut all: BTreeSet<String> = self.root.features.keys().cloned().collect();
                all.extend(implicit_names(self.root));
                all
            }
        }
    }

    /// Least fixpoint of reachability and feature demands with versions held
    /// at `assign`; unassigned slots are reached but not expanded.
    fn derive(&self, assign: &BTreeMap<Slot, PackageId>) -> Result<Derivation, OracleError> {
        let mut demanded: BTreeMap<Slot, (BTreeSet<String>, bool)> = BTreeMap::new();
        demanded.insert(self.root_slot.clone(), (self.root_request(), false));
        loop {
            let mut d = Derivation::default();
            let mut next: BTreeMap<Slot, (BTreeSet<String>, bool)> = BTreeMap::new();
            next.insert(self.root_slot.clone(), (self.root_request(), false));
            for (slot, (feats, defaults)) in &demanded {
                d.reached.insert(slot.clone());
                let Some(id) = assign.get(slot) else { continue };
                let pkg = self.reg.get(*id).expect("assigned ids exist");
                let mut request = feats.clone();
                if *defaults && pkg.features.contains_key("default") {
                    request.insert("default".to_string());
                }
                let c = closure(pkg, &request)?;
                d.features.insert(slot.clone(), c.features.clone());
                for decl in &pkg.deps {
                    let kind_ok = match decl.kind {
                        DepKind::Normal => self.cfg.included_kinds.normal,
                        DepKind::Build => self.cfg.included_kinds.build,
                        DepKind::Dev => false,
                    };
                    if !kind_ok
                        || (decl.target.is_some() && !self.cfg.include_target)
                        || (decl.optional && (!self.cfg.include_optional || !c.optional_deps.contains(&decl.name)))
                    {
                        continue;
                    }
                    let t = self.target(&decl.name, &decl.req)?;
                    d.reqs.entry(t.clone()).or_default().push(decl.req.clone());
                    d.edges.entry((slot.clone(), t.clone())).or_default().push(decl.target.clone());
                    let entry = next.entry(t).or_default();
                    entry.0.extend(decl.features.iter().cloned());
                    if let Some(extra) = c.dep_features.get(&decl.name) {
                        entry.0.extend(extra.iter().cloned());
                    }
                    entry.1 |= decl.default_features;
                }
            }
            if next == demanded {
                return Ok(d);
            }
            for (slot, (feats, defaults)) in next {
                let e = demanded.entry(slot).or_default();
                e.0.extend(feats);
                e.1 |= defaults;
            }
        }
    }

    fn candidates(&self, slot: &Slot, reqs: &[VersionReq]) -> Vec<PackageId> {
        if *slot == self.root_slot {
            return if reqs.iter().all(|r| r.matches(&self.root.version)) { vec![self.root.id] } else { vec![] };
        }
        let mut fits: Vec<&PackageVersion> = self
            .reg
            .versions(&slot.0)
            .unwrap_or_default()
            .iter()
            .filter(|p| p.version.bucket() == slot.1 && reqs.iter().all(|r| r.matches(&p.version)))
            .collect();
        fits.sort_by(|a, b| b.version.cmp(&a.version));
        fits.into_iter().map(|p| p.id).collect()
    }

    fn consistent(&self, assign: &BTreeMap<Slot, PackageId>, d: &Derivation) -> bool {
        if d.reached.len() != assign.len() || !d.reached.iter().all(|s| assign.contains_key(s)) {
            return false;
        }
        assign.iter().all(|(slot, id)| {
            let reqs = d.reqs.get(slot).map(Vec::as_slice).unwrap_or_default();
            self.candidates(slot, reqs).first() == Some(id)
        })
    }

    fn search(&mut self, assign: &mut BTreeMap<Slot, PackageId>) -> Result<(), OracleError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(OracleError::SearchBudgetExceeded(self.budget));
        }
        let d = match self.derive(assign) {
            Ok(d) => d,
            Err(e @ OracleError::Feature(_)) => {
                self.feature_error.get_or_insert(e);
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let open: Vec<&Slot> = d.reached.iter().filter(|s| !assign.contains_key(*s)).collect();
        let Some(&slot) = open.iter().min_by_key(|s| (self.topo.get(&s.0).copied().unwrap_or(usize::MAX), (**s).clone()))
        else {
            if self.consistent(assign, &d) {
                self.solutions.push(assign.clone());
            }
            return Ok(());
        };
        let reqs = d.reqs.get(slot).map(Vec::as_slice).unwrap_or_default();
        let mut options = self.candidates(slot, reqs);
        // every possible dependent of this package is settled, so its
        // requirements are final and only the newest fit can survive
        if self.topo.contains_key(&slot.0) {
            options.truncate(1);
        }
        let slot = slot.clone();
        for id in options {
            assign.insert(slot.clone(), id);
            self.search(assign)?;
            assign.remove(&slot);
        }
        Ok(())
    }
}

/// Kahn order over package names, dependents before dependencies.
fn topo_order(reg: &RegistryIndex) -> BTreeMap<String, usize> {
    let mut deps: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for p in reg.iter() {
        let e = deps.entry(p.name.as_str()).or_default();
        for d in &p.deps {
            e.insert(d.name.as_str());
        }
    }
    let mut dependents_left: BTreeMap<&str, usize> = deps.keys().map(|n| (*n, 0)).collect();
    for targets in deps.values() {
        for t in targets {
            if let Some(n) = dependents_left.get_mut(t) {
                *n += 1;
            }
        }
    }
    let mut queue: VecDeque<&str> = dependents_left.iter().filter(|(_, n)| **n == 0).map(|(k, _)| *k).collect();
    let mut order = BTreeMap::new();
    while let Some(name) = queue.pop_front() {
        order.insert(name.to_string(), order.len());
        for t in &deps[name] {
            if let Some(n) = dependents_left.get_mut(t) {
                *n -= 1;
                if *n == 0 {
                    queue.push_back(t);
                }
            }
        }
    }
    order
}

pub fn oracle_resolve(reg: &RegistryIndex, cfg: &VirtualPackConfig) -> Result<DependencyTree, OracleError> {
    oracle_resolve_with(reg, cfg, &OracleOptions::default())
}

pub fn oracle_resolve_with(
    reg: &RegistryIndex,
    cfg: &VirtualPackConfig,
    opts: &OracleOptions,
) -> Result<DependencyTree, OracleError> {
    let packages = reg.package_names().count();
    let versions = reg.package_names().map(|n| reg.versions(n).map_or(0, <[_]>::len)).max().unwrap_or(0);
    if packages > opts.max_packages || versions > opts.max_versions {
        return Err(OracleError::SizeCapExceeded { packages, versions });
    }
    let root = reg.find(&cfg.root.0, &cfg.root.1).ok_or(OracleError::UnknownRoot)?;
    let mut oracle = Oracle {
        reg,
        cfg,
        root,
        root_slot: (root.name.clone(), root.version.bucket()),
        topo: topo_order(reg),
        visited: 0,
        budget: opts.budget,
        solutions: Vec::new(),
        feature_error: None,
    };
    let mut assign = BTreeMap::new();
    oracle.search(&mut assign)?;

    let best = oracle
        .solutions
        .iter()
        .max_by(|a, b| {
            let va = a.iter().map(|(s, id)| (s, &reg.get(*id).unwrap().version));
            let vb = b.iter().map(|(s, id)| (s, &reg.get(*id).unwrap().version));
            va.cmp(vb)
        })
        .cloned();
    let Some(assign) = best else {
        return Err(oracle.feature_error.unwrap_or_else(|| {
            OracleError::UnsatisfiableRequirement(format!("no assignment for {}", root.label()))
        }));
    };
    let d = oracle.derive(&assign)?;
    let nodes = assign.iter().map(|(slot, id)| (*id, d.features[slot].clone())).collect();
    let edges = d
        .edges
        .iter()
        .map(|((a, b), targets)| {
            let target = if targets.iter().any(Option::is_none) {
                None
            } else {
                let mut uniq: Vec<CfgPredicate> = Vec::new();
                for t in targets.iter().flatten() {
                    if !uniq.contains(t) {
                        uniq.push(t.clone());
                    }
                }
                if uniq.len() == 1 { uniq.pop() } else { Some(CfgPredicate::Any(uniq)) }
            };
            ((assign[a], assign[b]), TreeEdge { target })
        })
        .collect();
    Ok(DependencyTree::new(root.id, nodes, edges))
}
