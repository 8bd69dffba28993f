use std::collections::{BTreeMap, BTreeSet};

use super::ResolveError;
use crate::registry::{FeatureItem, PackageVersion};

/// The result of enabling a set of features on one package version.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Activation {
    /// Closed under feature expansion, implicit features included.
    pub features: BTreeSet<String>,
    pub optional_deps: BTreeSet<String>,
    /// Features demanded on dependencies, keyed by dependency name.
    pub dep_features: BTreeMap<String, BTreeSet<String>>,
}

struct Expander<'a> {
    pkg: &'a PackageVersion,
    implicit: BTreeSet<&'a str>,
    out: Activation,
    on_stack: Vec<&'a str>,
    weak: Vec<(&'a str, &'a str)>,
}

impl<'a> Expander<'a> {
    fn unknown(&self, feature: &str) -> ResolveError {
        ResolveError::UnknownFeature { package: self.pkg.label(), feature: feature.to_string() }
    }

    fn activate_dep(&mut self, dep: &'a str) {
        self.out.optional_deps.insert(dep.to_string());
        if self.implicit.contains(dep) {
            self.out.features.insert(dep.to_string());
        }
    }

    fn expand(&mut self, name: &'a str) -> Result<(), ResolveError> {
        if self.on_stack.contains(&name) {
            return Err(ResolveError::FeatureCycle { package: self.pkg.label(), feature: name.to_string() });
        }
        if self.out.features.contains(name) && !self.implicit.contains(name) {
            return Ok(());
        }
        if let Some(&implicit) = self.implicit.get(name) {
            self.activate_dep(implicit);
            return Ok(());
        }
        let Some(def) = self.pkg.features.get(name) else {
            return Err(self.unknown(name));
        };
        self.out.features.insert(name.to_string());
        self.on_stack.push(name);
        for item in &def.items {
            match item {
                FeatureItem::Feature(f) => self.expand(f)?,
                FeatureItem::OptionalDep(dep) => self.activate_dep(dep),
                FeatureItem::DepFeature { dep, feature, weak: true } => self.weak.push((dep, feature)),
                FeatureItem::DepFeature { dep, feature, weak: false } => {
                    if self.pkg.has_optional_dep(dep) {
                        self.activate_dep(dep);
                    }
                    self.out.dep_features.entry(dep.clone()).or_default().insert(feature.clone());
                }
            }
        }
        self.on_stack.pop();
        Ok(())
    }
}

/// Enable `requested` on `pkg` and expand until closed.
pub fn activate_features<'a, I>(pkg: &PackageVersion, requested: I) -> Result<Activation, ResolveError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut ex = Expander {
        pkg,
        implicit: pkg.implicit_features().into_iter().collect(),
        out: Activation::default(),
        on_stack: Vec::new(),
        weak: Vec::new(),
    };
    for name in requested {
        ex.expand(name)?;
    }
    for (dep, feature) in std::mem::take(&mut ex.weak) {
        let required = pkg.deps.iter().any(|d| d.name == dep && !d.optional);
        if required || ex.out.optional_deps.contains(dep) {
            ex.out.dep_features.entry(dep.to_string()).or_default().insert(feature.to_string());
        }
    }
    Ok(ex.out)
}
