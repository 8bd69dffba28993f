//! Compatible-compiler selection for packages that use unstable features.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::impact::{ImpactError, RufUsageSet};
use crate::lifetime::{LifetimeError, LifetimeStore, RufStatus};
use crate::predicate::{ruf_enabled, DepEdgeAttrs};
use crate::registry::{PackageId, SemVer};
use crate::resolver::{DependencyTree, Edg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictReason {
    Found,
    NoReleaseCoversAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RufCheck {
    pub status: RufStatus,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityVerdict {
    pub release: Option<SemVer>,
    pub per_ruf: BTreeMap<String, RufCheck>,
    pub reason: VerdictReason,
}

impl CompatibilityVerdict {
    pub fn is_found(&self) -> bool {
        self.reason == VerdictReason::Found
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes") + "\n"
    }
}

fn checks(rufs: &BTreeSet<String>, lifetimes: &LifetimeStore, at: &SemVer) -> BTreeMap<String, RufCheck> {
    rufs.iter()
        .map(|r| {
            let status = lifetimes.status_at(r, at).unwrap_or(RufStatus::Unknown);
            (r.clone(), RufCheck { status, ok: status.is_usable() })
        })
        .collect()
}

/// The release where every feature in `rufs` is usable and the most of them
/// are accepted; ties go to the newest release.
pub fn compatible_compiler(rufs: &BTreeSet<String>, lifetimes: &LifetimeStore, releases: &[SemVer]) -> CompatibilityVerdict {
    let mut sorted: Vec<&SemVer> = releases.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut best: Option<(usize, &SemVer, BTreeMap<String, RufCheck>)> = None;
    for &rel in &sorted {
        let per_ruf = checks(rufs, lifetimes, rel);
        if !per_ruf.values().all(|c| c.ok) {
            continue;
        }
        let accepted = per_ruf.values().filter(|c| c.status == RufStatus::Accepted).count();
        if best.as_ref().is_none_or(|(n, _, _)| accepted >= *n) {
            best = Some((accepted, rel, per_ruf));
        }
    }
    match best {
        Some((_, rel, per_ruf)) => CompatibilityVerdict { release: Some(rel.clone()), per_ruf, reason: VerdictReason::Found },
        None => CompatibilityVerdict {
            release: None,
            per_ruf: sorted.last().map(|newest| checks(rufs, lifetimes, newest)).unwrap_or_default(),
            reason: VerdictReason::NoReleaseCoversAll,
        },
    }
}

/// Features switched on anywhere in `tree`. The root's configurations see
/// `env`; each dependency sees its activated features plus `env`'s target
/// and build flags.
pub fn enabled_rufs(tree: &DependencyTree, t: &RufUsageSet, env: &DepEdgeAttrs) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (&id, features) in tree.nodes() {
        let node_env;
        let attrs = if id == tree.root() {
            env
        } else {
            node_env = DepEdgeAttrs {
                enabled_features: features.clone(),
                target_env: env.target_env.clone(),
                build_mode_flags: env.build_mode_flags.clone(),
            };
            &node_env
        };
        out.extend(t.configs_of(id).filter(|c| ruf_enabled(attrs, c)).map(|c| c.ruf().to_string()));
    }
    out
}

/// Features a resolved root ends up compiling with, read from the EDG.
pub fn root_enabled_rufs(edg: &Edg, t: &RufUsageSet, root: PackageId) -> Result<BTreeSet<String>, ImpactError> {
    let mut out = BTreeSet::new();
    match edg.root_attrs(root) {
        Some(attrs) => out.extend(t.configs_of(root).filter(|c| ruf_enabled(attrs, c)).map(|c| c.ruf().to_string())),
        None => out.extend(t.configs_of(root).map(|c| c.ruf().to_string())),
    }
    for ((a, b), e) in edg.edges().range((root, PackageId(0))..=(root, PackageId(u32::MAX))) {
        let mut configs = t.configs_of(*b).peekable();
        if configs.peek().is_none() {
            continue;
        }
        let attrs = e.attrs.as_ref().ok_or(ImpactError::MissingAttrs { root: *a, dep: *b })?;
        out.extend(configs.filter(|c| ruf_enabled(attrs, c)).map(|c| c.ruf().to_string()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RecoveryStats {
    pub failing: usize,
    pub recovered: usize,
}

/// How many resolved roots fail to build on `newest`, and how many of those
/// have a compatible older release.
pub fn recovery_rate(edg: &Edg, t: &RufUsageSet, lifetimes: &LifetimeStore, newest: &SemVer) -> Result<RecoveryStats, ImpactError> {
    lifetimes.release_index(newest)?;
    let mut stats = RecoveryStats::default();
    for root in edg.resolved_roots() {
        let rufs = root_enabled_rufs(edg, t, root)?;
        let fails = rufs
            .iter()
            .map(|r| lifetimes.status_at(r, newest))
            .collect::<Result<Vec<_>, LifetimeError>>()?
            .into_iter()
            .any(|s| !s.is_usable());
        if fails {
            stats.failing += 1;
            if compatible_compiler(&rufs, lifetimes, lifetimes.releases()).is_found() {
                stats.recovered += 1;
            }
        }
    }
    Ok(stats)
}
