//! Direct and transitive unstable-feature impact over an EDG.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::lifetime::{LifetimeError, LifetimeStore, RufStatus};
use crate::predicate::{ruf_enabled, RufConfiguration};
use crate::registry::{PackageId, RegistryIndex, SemVer};
use crate::resolver::Edg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImpactError {
    #[error("edge {root} -> {dep} into a configuration carrier has no attributes")]
    MissingAttrs { root: PackageId, dep: PackageId },
    #[error(transparent)]
    Lifetime(#[from] LifetimeError),
}

/// The set T: which package versions use which gated unstable features.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RufUsageSet {
    entries: Vec<(PackageId, RufConfiguration)>,
}

impl RufUsageSet {
    pub fn new(mut entries: Vec<(PackageId, RufConfiguration)>) -> Self {
        entries.sort();
        entries.dedup();
        Self { entries }
    }

    pub fn from_registry(reg: &RegistryIndex) -> Self {
        Self::new(reg.iter().flat_map(|p| p.ruf_configs.iter().map(|c| (p.id, c.clone()))).collect())
    }

    pub fn entries(&self) -> &[(PackageId, RufConfiguration)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn members(&self) -> BTreeSet<PackageId> {
        self.entries.iter().map(|(id, _)| *id).collect()
    }

    pub fn rufs(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|(_, c)| c.ruf()).collect()
    }

    pub fn configs_of(&self, id: PackageId) -> impl Iterator<Item = &RufConfiguration> {
        self.entries.iter().filter(move |(i, _)| *i == id).map(|(_, c)| c)
    }
}

pub fn direct_impact(t: &RufUsageSet, ruf: &str) -> BTreeSet<PackageId> {
    t.entries.iter().filter(|(_, c)| c.ruf() == ruf).map(|(id, _)| *id).collect()
}

fn impacted_by<'a, F>(edg: &Edg, t: &'a RufUsageSet, keep: F) -> Result<BTreeSet<PackageId>, ImpactError>
where
    F: Fn(&'a RufConfiguration) -> bool,
{
    let mut by_member: BTreeMap<PackageId, Vec<&RufConfiguration>> = BTreeMap::new();
    for (id, c) in &t.entries {
        if keep(c) {
            by_member.entry(*id).or_default().push(c);
        }
    }
    let mut out = BTreeSet::new();
    if by_member.is_empty() {
        return Ok(out);
    }
    for ((a, b), e) in edg.edges() {
        let Some(configs) = by_member.get(b) else { continue };
        let attrs = e.attrs.as_ref().ok_or(ImpactError::MissingAttrs { root: *a, dep: *b })?;
        if configs.iter().any(|c| ruf_enabled(attrs, c)) {
            out.insert(*a);
        }
    }
    Ok(out)
}

/// Roots whose trees contain a version with an enabled configuration of `ruf`.
pub fn transitive_impact(edg: &Edg, t: &RufUsageSet, ruf: &str) -> Result<BTreeSet<PackageId>, ImpactError> {
    impacted_by(edg, t, |c| c.ruf() == ruf)
}

/// As [`transitive_impact`], counting only always-on configurations.
pub fn unconditional_impact(edg: &Edg, t: &RufUsageSet, ruf: &str) -> Result<BTreeSet<PackageId>, ImpactError> {
    impacted_by(edg, t, |c| c.ruf() == ruf && c.is_unconditional())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ImpactRow {
    pub direct: usize,
    pub uncond: usize,
    pub cond: usize,
    pub total: usize,
}

#[derive(Default)]
struct RowSets {
    direct: BTreeSet<PackageId>,
    uncond: BTreeSet<PackageId>,
    cond: BTreeSet<PackageId>,
}

impl RowSets {
    fn absorb(&mut self, other: &RowSets) {
        self.direct.extend(&other.direct);
        self.uncond.extend(&other.uncond);
        self.cond.extend(&other.cond);
    }

    fn row(&self) -> ImpactRow {
        ImpactRow {
            direct: self.direct.len(),
            uncond: self.uncond.len(),
            cond: self.cond.len(),
            total: self.direct.union(&self.cond).count(),
        }
    }
}

/// Impact counts per feature status at one compiler release. Rows overlap;
/// the grand total counts each version once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImpactReport {
    pub at: SemVer,
    pub node_count: usize,
    pub rows: BTreeMap<RufStatus, ImpactRow>,
    pub total: ImpactRow,
}

pub fn impact_by_status(
    edg: &Edg,
    t: &RufUsageSet,
    lifetimes: &LifetimeStore,
    at: &SemVer,
) -> Result<ImpactReport, ImpactError> {
    lifetimes.release_index(at)?;
    let mut per_status: BTreeMap<RufStatus, RowSets> = RufStatus::ALL.iter().map(|s| (*s, RowSets::default())).collect();
    for ruf in t.rufs() {
        let status = lifetimes.status_at(ruf, at)?;
        let row = per_status.get_mut(&status).expect("every status has a row");
        row.direct.extend(direct_impact(t, ruf));
        row.uncond.extend(unconditional_impact(edg, t, ruf)?);
        row.cond.extend(transitive_impact(edg, t, ruf)?);
    }
    let mut all = RowSets::default();
    for sets in per_status.values() {
        all.absorb(sets);
    }
    Ok(ImpactReport {
        at: at.clone(),
        node_count: edg.node_count(),
        rows: per_status.iter().map(|(s, r)| (*s, r.row())).collect(),
        total: all.row(),
    })
}

impl ImpactReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Aligned table: status, direct, uncond, cond, total.
    pub fn to_text(&self) -> String {
        let pct = |n: usize| {
            if self.node_count == 0 {
                format!("{n}")
            } else {
                format!("{n} ({:.0}%)", 100.0 * n as f64 / self.node_count as f64)
            }
        };
        let mut table: Vec<[String; 5]> =
            vec![["RUF Type", "Direct Usage", "Uncond Impact", "Cond Impact", "Total"].map(String::from)];
        for (status, r) in &self.rows {
            table.push([status.to_string(), r.direct.to_string(), r.uncond.to_string(), r.cond.to_string(), pct(r.total)]);
        }
        let t = &self.total;
        table.push(["Total".to_string(), pct(t.direct), pct(t.uncond), pct(t.cond), pct(t.total)]);
        let widths: Vec<usize> = (0..5).map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
        let mut out = format!("RUF impact at {} over {} package versions\n", self.at, self.node_count);
        for row in &table {
            let mut line = format!("{:<w$}", row[0], w = widths[0]);
            for c in 1..5 {
                let _ = write!(line, "  {:>w$}", row[c], w = widths[c]);
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// T-members ranked by how many roots their own configurations reach.
pub fn find_super_spreaders(edg: &Edg, t: &RufUsageSet, k: usize) -> Result<Vec<(PackageId, usize)>, ImpactError> {
    let mut counts: BTreeMap<PackageId, BTreeSet<PackageId>> = t.members().into_iter().map(|m| (m, BTreeSet::new())).collect();
    for ((a, b), e) in edg.edges() {
        let Some(reached) = counts.get_mut(b) else { continue };
        let attrs = e.attrs.as_ref().ok_or(ImpactError::MissingAttrs { root: *a, dep: *b })?;
        if t.configs_of(*b).any(|c| ruf_enabled(attrs, c)) {
            reached.insert(*a);
        }
    }
    let mut ranked: Vec<(PackageId, usize)> = counts.into_iter().map(|(id, s)| (id, s.len())).collect();
    ranked.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    ranked.truncate(k);
    Ok(ranked)
}

pub fn super_spreaders_csv(reg: &RegistryIndex, ranked: &[(PackageId, usize)]) -> String {
    let mut out = String::from("id,package,version,impacted\n");
    for (id, n) in ranked {
        let (name, version) = reg.get(*id).map_or(("?".to_string(), "?".to_string()), |p| (p.name.clone(), p.version.to_string()));
        let _ = writeln!(out, "{id},{name},{version},{n}");
    }
    out
}
