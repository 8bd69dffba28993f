//! Incremental worklist resolver. Each `(name, bucket)` slot holds the
//! demands placed on it by other nodes; processing a slot re-selects its
//! version, recomputes its features and pushes changed demands downstream.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::features::activate_features;
use super::{DependencyTree, ResolveError, TreeEdge, VirtualPackConfig};
use crate::predicate::CfgPredicate;
use crate::registry::{Bucket, PackageId, PackageVersion, RegistryIndex, VersionReq};

type SlotKey = (String, Bucket);

#[derive(Clone, Debug, PartialEq, Eq)]
struct Demand {
    req: VersionReq,
    features: BTreeSet<String>,
    default_features: bool,
    target: Option<CfgPredicate>,
}

#[derive(Debug)]
struct Node {
    id: PackageId,
    features: BTreeSet<String>,
    /// decl index -> (target slot, demand)
    outgoing: BTreeMap<usize, (usize, Demand)>,
}

#[derive(Debug)]
struct Slot {
    key: SlotKey,
    incoming: BTreeMap<(usize, usize), Demand>,
    node: Option<Node>,
}

struct Run<'a> {
    reg: &'a RegistryIndex,
    cfg: &'a VirtualPackConfig,
    root: &'a PackageVersion,
    slots: Vec<Slot>,
    index: HashMap<SlotKey, usize>,
    targets: HashMap<(PackageId, usize), usize>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl<'a> Run<'a> {
    fn slot(&mut self, key: SlotKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.slots.len();
        self.index.insert(key.clone(), i);
        self.slots.push(Slot { key, incoming: BTreeMap::new(), node: None });
        self.queued.push(false);
        i
    }

    fn push(&mut self, s: usize) {
        if !self.queued[s] {
            self.queued[s] = true;
            self.queue.push_back(s);
        }
    }

    /// Slot a declaration points into: the bucket of its newest match.
    fn target_slot(&mut self, pkg: &PackageVersion, idx: usize) -> Result<usize, ResolveError> {
        if let Some(&s) = self.targets.get(&(pkg.id, idx)) {
            return Ok(s);
        }
        let decl = &pkg.deps[idx];
        let best = self
            .reg
            .max_matching(&decl.name, &decl.req)
            .map_err(|_| ResolveError::MissingPackage(decl.name.clone()))?
            .ok_or_else(|| ResolveError::UnsatisfiableRequirement {
                name: decl.name.clone(),
                bucket: None,
                reqs: vec![decl.req.to_string()],
            })?;
        let s = self.slot((decl.name.clone(), best.version.bucket()));
        self.targets.insert((pkg.id, idx), s);
        Ok(s)
    }

    fn select(&self, s: usize) -> Result<&'a PackageVersion, ResolveError> {
        let slot = &self.slots[s];
        let is_root = slot.key.0 == self.root.name && slot.key.1 == self.root.version.bucket();
        let fits = |p: &PackageVersion| slot.incoming.values().all(|d| d.req.matches(&p.version));
        let chosen = if is_root {
            fits(self.root).then_some(self.root)
        } else {
            self.reg
                .versions(&slot.key.0)
                .unwrap_or_default()
                .iter()
                .rev()
                .filter(|p| p.version.bucket() == slot.key.1)
                .find(|p| fits(p))
        };
        chosen.ok_or_else(|| {
            let reqs: BTreeSet<String> = slot.incoming.values().map(|d| d.req.to_string()).collect();
            ResolveError::UnsatisfiableRequirement {
                name: slot.key.0.clone(),
                bucket: Some(slot.key.1),
                reqs: reqs.into_iter().collect(),
            }
        })
    }

    fn retract(&mut self, s: usize) {
        let Some(node) = self.slots[s].node.take() else { return };
        for (idx, (t, _)) in node.outgoing {
            self.slots[t].incoming.remove(&(s, idx));
            self.push(t);
        }
    }

    fn process(&mut self, s: usize, root_slot: usize) -> Result<(), ResolveError> {
        if s != root_slot && self.slots[s].incoming.is_empty() {
            self.retract(s);
            return Ok(());
        }
        let pkg = self.select(s)?;
        let mut requested: BTreeSet<&str> = BTreeSet::new();
        let mut defaults = false;
        for d in self.slots[s].incoming.values() {
            requested.extend(d.features.iter().map(String::as_str));
            defaults |= d.default_features;
        }
        let root_pfs;
        if s == root_slot {
            root_pfs = match &self.cfg.enabled_pfs {
                Some(pfs) => pfs.iter().cloned().collect::<Vec<_>>(),
                None => pkg.all_features(),
            };
            requested.extend(root_pfs.iter().map(String::as_str));
        }
        if defaults && pkg.features.contains_key("default") {
            requested.insert("default");
        }
        let act = activate_features(pkg, requested.iter().copied())?;

        let mut outgoing = BTreeMap::new();
        for (idx, decl) in pkg.deps.iter().enumerate() {
            if !self.cfg.admits(decl) || (decl.optional && !act.optional_deps.contains(&decl.name)) {
                continue;
            }
            let t = self.target_slot(pkg, idx)?;
            let mut features: BTreeSet<String> = decl.features.iter().cloned().collect();
            if let Some(extra) = act.dep_features.get(&decl.name) {
                features.extend(extra.iter().cloned());
            }
            let demand = Demand {
                req: decl.req.clone(),
                features,
                default_features: decl.default_features,
                target: decl.target.clone(),
            };
            outgoing.insert(idx, (t, demand));
        }

        let old = self.slots[s].node.take();
        let version_changed = old.as_ref().is_some_and(|n| n.id != pkg.id);
        let old_out = old.map(|n| n.outgoing).unwrap_or_default();
        for (idx, (t, _)) in &old_out {
            let keep = !version_changed && outgoing.get(idx).is_some_and(|(nt, _)| nt == t);
            if !keep {
                self.slots[*t].incoming.remove(&(s, *idx));
                self.push(*t);
            }
        }
        for (idx, (t, demand)) in &outgoing {
            let prev = self.slots[*t].incoming.insert((s, *idx), demand.clone());
            if prev.as_ref() != Some(demand) {
                self.push(*t);
            }
        }
        self.slots[s].node = Some(Node { id: pkg.id, features: act.features, outgoing });
        Ok(())
    }

    /// Drop nodes that only keep each other alive. Returns true if any were found.
    fn sweep(&mut self, root_slot: usize) -> bool {
        let mut seen = vec![false; self.slots.len()];
        let mut stack = vec![root_slot];
        seen[root_slot] = true;
        while let Some(s) = stack.pop() {
            if let Some(node) = &self.slots[s].node {
                for (t, _) in node.outgoing.values() {
                    if !seen[*t] {
                        seen[*t] = true;
                        stack.push(*t);
                    }
                }
            }
        }
        let zombies: Vec<usize> = (0..self.slots.len()).filter(|&s| !seen[s] && self.slots[s].node.is_some()).collect();
        for &s in &zombies {
            self.retract(s);
        }
        !zombies.is_empty()
    }
}

/// Number of declarations across every version of every package reachable by
/// name from `root`.
fn obligation_count(reg: &RegistryIndex, root: &str) -> usize {
    let mut seen = BTreeSet::from([root.to_string()]);
    let mut stack = vec![root.to_string()];
    let mut count = 0;
    while let Some(name) = stack.pop() {
        for p in reg.versions(&name).unwrap_or_default() {
            count += p.deps.len();
            for d in &p.deps {
                if seen.insert(d.name.clone()) {
                    stack.push(d.name.clone());
                }
            }
        }
    }
    count
}

/// Resolve one root with the default step cap.
pub fn resolve(reg: &RegistryIndex, cfg: &VirtualPackConfig) -> Result<DependencyTree, ResolveError> {
    resolve_with_cap(reg, cfg, None)
}

pub fn resolve_with_cap(
    reg: &RegistryIndex,
    cfg: &VirtualPackConfig,
    cap: Option<usize>,
) -> Result<DependencyTree, ResolveError> {
    let (name, version) = &cfg.root;
    let root = reg.find(name, version).ok_or_else(|| ResolveError::UnknownRoot(name.clone(), version.clone()))?;
    let cap = cap.unwrap_or_else(|| 10 * obligation_count(reg, name) + 10);
    let mut run = Run {
        reg,
        cfg,
        root,
        slots: Vec::new(),
        index: HashMap::new(),
        targets: HashMap::new(),
        queue: VecDeque::new(),
        queued: Vec::new(),
    };
    let root_slot = run.slot((root.name.clone(), root.version.bucket()));
    run.push(root_slot);
    let mut steps = 0;
    loop {
        while let Some(s) = run.queue.pop_front() {
            run.queued[s] = false;
            steps += 1;
            if steps > cap {
                return Err(ResolveError::NonConvergence { steps: cap });
            }
            run.process(s, root_slot)?;
        }
        if !run.sweep(root_slot) {
            break;
        }
    }

    let mut nodes = BTreeMap::new();
    let mut edges: BTreeMap<(PackageId, PackageId), TreeEdge> = BTreeMap::new();
    for slot in &run.slots {
        let Some(node) = &slot.node else { continue };
        nodes.insert(node.id, node.features.clone());
        for (t, demand) in node.outgoing.values() {
            let to = run.slots[*t].node.as_ref().expect("targets of live nodes are live").id;
            let entry = edges.entry((node.id, to)).or_insert_with(|| TreeEdge { target: demand.target.clone() });
            entry.target = merge_targets(entry.target.take(), demand.target.clone());
        }
    }
    Ok(DependencyTree::new(root.id, nodes, edges))
}

fn merge_targets(a: Option<CfgPredicate>, b: Option<CfgPredicate>) -> Option<CfgPredicate> {
    match (a, b) {
        (Some(a), Some(b)) if a == b => Some(a),
        (Some(CfgPredicate::Any(mut xs)), Some(b)) => {
            if !xs.contains(&b) {
                xs.push(b);
            }
            Some(CfgPredicate::Any(xs))
        }
        (Some(a), Some(b)) => Some(CfgPredicate::Any(vec![a, b])),
        _ => None,
    }
}
