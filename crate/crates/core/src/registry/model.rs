use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::version::{SemVer, VersionReq};
use crate::predicate::{CfgPredicate, RufConfiguration};

/// Dense id of a package version within one registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PackageId(pub u32);

impl PackageId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PackageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepKind {
    Normal,
    Build,
    Dev,
}

impl fmt::Display for DepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepKind::Normal => "normal",
            DepKind::Build => "build",
            DepKind::Dev => "dev",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyDecl {
    pub name: String,
    pub req: VersionReq,
    pub kind: DepKind,
    pub optional: bool,
    /// `cfg(..)` platform gate; a bare target triple is kept as `target = "<triple>"`.
    pub target: Option<CfgPredicate>,
    pub features: Vec<String>,
    pub default_features: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureItem {
    Feature(String),
    OptionalDep(String),
    DepFeature { dep: String, feature: String, weak: bool },
}

impl FeatureItem {
    pub fn parse(text: &str) -> FeatureItem {
        if let Some(dep) = text.strip_prefix("dep:") {
            return FeatureItem::OptionalDep(dep.to_string());
        }
        match text.split_once('/') {
            Some((dep, feature)) => match dep.strip_suffix('?') {
                Some(dep) => FeatureItem::DepFeature { dep: dep.to_string(), feature: feature.to_string(), weak: true },
                None => FeatureItem::DepFeature { dep: dep.to_string(), feature: feature.to_string(), weak: false },
            },
            None => FeatureItem::Feature(text.to_string()),
        }
    }
}

impl fmt::Display for FeatureItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureItem::Feature(name) => f.write_str(name),
            FeatureItem::OptionalDep(dep) => write!(f, "dep:{dep}"),
            FeatureItem::DepFeature { dep, feature, weak: false } => write!(f, "{dep}/{feature}"),
            FeatureItem::DepFeature { dep, feature, weak: true } => write!(f, "{dep}?/{feature}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureDef {
    pub name: String,
    pub items: Vec<FeatureItem>,
}

#[derive(Clone, Debug)]
pub struct PackageVersion {
    pub id: PackageId,
    pub name: String,
    pub version: SemVer,
    pub deps: Vec<DependencyDecl>,
    pub features: BTreeMap<String, FeatureDef>,
    pub ruf_configs: Vec<RufConfiguration>,
}

impl PackageVersion {
    /// Optional deps that get an implicit same-named feature: those never
    /// referenced through `dep:` syntax.
    pub fn implicit_features(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .deps
            .iter()
            .filter(|d| d.optional && !self.features.contains_key(&d.name))
            .map(|d| d.name.as_str())
            .filter(|name| {
                !self
                    .features
                    .values()
                    .flat_map(|f| &f.items)
                    .any(|i| matches!(i, FeatureItem::OptionalDep(d) if d == name))
            })
            .collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    /// Every package feature, explicit and implicit.
    pub fn all_features(&self) -> Vec<String> {
        let mut all: Vec<String> = self.features.keys().cloned().collect();
        all.extend(self.implicit_features().into_iter().map(str::to_string));
        all.sort();
        all.dedup();
        all
    }

    pub fn has_optional_dep(&self, name: &str) -> bool {
        self.deps.iter().any(|d| d.optional && d.name == name)
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.name, self.version)
    }
}
