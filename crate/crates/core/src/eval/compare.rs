use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::registry::{Bucket, PackageId, RegistryIndex, SemVer};
use crate::resolver::DependencyTree;

/// Right / Wrong / Over / Miss counts for one root.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeComparison {
    pub right: usize,
    pub wrong: usize,
    pub over: usize,
    pub miss: usize,
}

impl TreeComparison {
    pub fn new(right: usize, wrong: usize, over: usize, miss: usize) -> Self {
        Self { right, wrong, over, miss }
    }

    pub fn is_perfect(&self) -> bool {
        self.wrong + self.over + self.miss == 0
    }
}

fn dep_slots(reg: &RegistryIndex, tree: &DependencyTree) -> BTreeMap<(String, Bucket), SemVer> {
    tree.nodes()
        .keys()
        .filter(|id| **id != tree.root())
        .filter_map(|id| reg.get(*id))
        .map(|p| ((p.name.clone(), p.version.bucket()), p.version.clone()))
        .collect()
}

/// Slot-by-slot comparison of everything below the root.
pub fn compare_trees(
    reg: &RegistryIndex,
    candidate: &DependencyTree,
    oracle: &DependencyTree,
) -> Result<TreeComparison, EvalError> {
    if candidate.root() != oracle.root() {
        return Err(EvalError::RootMismatch { candidate: candidate.root(), oracle: oracle.root() });
    }
    let c = dep_slots(reg, candidate);
    let o = dep_slots(reg, oracle);
    let mut cmp = TreeComparison::default();
    for (slot, v) in &c {
        match o.get(slot) {
            Some(ov) if ov == v => cmp.right += 1,
            Some(_) => cmp.wrong += 1,
            None => cmp.over += 1,
        }
    }
    cmp.miss = o.keys().filter(|s| !c.contains_key(*s)).count();
    Ok(cmp)
}

/// The comparison for a root only one side managed to resolve.
pub fn one_sided(reg: &RegistryIndex, tree: &DependencyTree, candidate_side: bool) -> TreeComparison {
    let n = dep_slots(reg, tree).len();
    if candidate_side {
        TreeComparison::new(0, 0, n, 0)
    } else {
        TreeComparison::new(0, 0, 0, n)
    }
}

/// Versions both trees selected but with different activated features.
pub fn feature_mismatches(candidate: &DependencyTree, oracle: &DependencyTree) -> BTreeSet<PackageId> {
    candidate
        .nodes()
        .iter()
        .filter(|(id, f)| oracle.features(**id).is_some_and(|of| of != *f))
        .map(|(id, _)| *id)
        .collect()
}

/// Accuracy metrics over a set of roots; `None` where a ratio is undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n: usize,
    pub tree_accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(comparisons: &[TreeComparison]) -> Result<MetricsReport, EvalError> {
    if comparisons.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = comparisons.len();
    let perfect = comparisons.iter().filter(|c| c.is_perfect()).count();
    let r: usize = comparisons.iter().map(|c| c.right).sum();
    let w: usize = comparisons.iter().map(|c| c.wrong).sum();
    let o: usize = comparisons.iter().map(|c| c.over).sum();
    let m: usize = comparisons.iter().map(|c| c.miss).sum();
    let precision = ratio(r, r + w + o);
    let recall = ratio(r, r + m);
    let f1 = match (precision, recall) {
        (Some(p), Some(q)) if p + q > 0.0 => Some(2.0 * p * q / (p + q)),
        _ => None,
    };
    Ok(MetricsReport { n, tree_accuracy: perfect as f64 / n as f64, precision, recall, f1 })
}

impl MetricsReport {
    pub fn csv_header() -> &'static str {
        "dataset,tree_accuracy,precision,recall,f1\n"
    }

    pub fn csv_row(&self, dataset: &str) -> String {
        let f = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        format!("{dataset},{},{},{},{}\n", f(Some(self.tree_accuracy)), f(self.precision), f(self.recall), f(self.f1))
    }
}
