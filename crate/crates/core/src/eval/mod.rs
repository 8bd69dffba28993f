//! Resolver accuracy evaluation against a brute-force oracle.

mod compare;
mod generate;
mod oracle;

use rayon::prelude::*;
use thiserror::Error;

use crate::registry::{PackageId, RegistryIndex};
use crate::resolver::{DependencyTree, ResolveError, VirtualPackConfig};

pub use compare::{compare_trees, feature_mismatches, metrics, one_sided, MetricsReport, TreeComparison};
pub use generate::{generate_records, generate_registry, GenParams};
pub use oracle::{oracle_resolve, oracle_resolve_with, OracleError, OracleOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("comparing trees of different roots ({candidate} vs {oracle})")]
    RootMismatch { candidate: PackageId, oracle: PackageId },
    #[error("no comparisons to score")]
    EmptyInput,
}

/// How one root fared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootOutcome {
    pub root: PackageId,
    /// `None` when neither side resolved, or the oracle could not run.
    pub comparison: Option<TreeComparison>,
    pub feature_mismatches: Vec<PackageId>,
    pub resolver_error: Option<ResolveError>,
    pub oracle_error: Option<OracleError>,
}

/// Resolve every version of `reg` as a root with `resolver` and with the
/// oracle, and compare.
pub fn evaluate_registry<F>(reg: &RegistryIndex, resolver: &F, opts: &OracleOptions) -> Vec<RootOutcome>
where
    F: Fn(&RegistryIndex, &VirtualPackConfig) -> Result<DependencyTree, ResolveError> + Sync,
{
    let roots: Vec<PackageId> = reg.iter().map(|p| p.id).collect();
    roots
        .par_iter()
        .map(|&root| {
            let cfg = VirtualPackConfig::for_id(reg, root).expect("root from the registry");
            evaluate_root(reg, &cfg, root, resolver, opts)
        })
        .collect()
}

fn evaluate_root<F>(reg: &RegistryIndex, cfg: &VirtualPackConfig, root: PackageId, resolver: &F, opts: &OracleOptions) -> RootOutcome
where
    F: Fn(&RegistryIndex, &VirtualPackConfig) -> Result<DependencyTree, ResolveError>,
{
    let mine = resolver(reg, cfg);
    let theirs = oracle_resolve_with(reg, cfg, opts);
    let mut out = RootOutcome {
        root,
        comparison: None,
        feature_mismatches: Vec::new(),
        resolver_error: mine.as_ref().err().cloned(),
        oracle_error: theirs.as_ref().err().cloned(),
    };
    match (&mine, &theirs) {
        (Ok(a), Ok(b)) => {
            out.comparison = compare_trees(reg, a, b).ok();
            out.feature_mismatches = feature_mismatches(a, b).into_iter().collect();
        }
        (Err(_), Ok(b)) => out.comparison = Some(one_sided(reg, b, false)),
        (Ok(a), Err(OracleError::UnsatisfiableRequirement(_) | OracleError::Feature(_) | OracleError::MissingPackage(_))) => {
            out.comparison = Some(one_sided(reg, a, true));
        }
        _ => {}
    }
    out
}
