use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{DepKind, DependencyDecl, FeatureDef, FeatureItem, PackageId, PackageVersion};
use super::version::{SemVer, VersionReq};
use super::RegistryError;
use crate::predicate::{parse_predicate, Atom, CfgPredicate, RufConfiguration};

/// One line of a `<package>.jsonl` index file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub name: String,
    pub vers: String,
    pub deps: Vec<IndexDep>,
    pub features: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDep {
    pub name: String,
    pub req: String,
    pub kind: DepKind,
    pub optional: bool,
    pub target: Option<String>,
    pub features: Vec<String>,
    pub default_features: bool,
}

/// Where a record came from, for error messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordSource {
    pub file: String,
    pub line: usize,
}

impl RecordSource {
    pub fn new(file: impl Into<String>, line: usize) -> Self {
        Self { file: file.into(), line }
    }

    fn schema(&self, message: impl Into<String>) -> RegistryError {
        RegistryError::Schema { file: self.file.clone(), line: self.line, message: message.into() }
    }

    fn referential(&self, message: impl Into<String>) -> RegistryError {
        RegistryError::Referential { file: self.file.clone(), line: self.line, message: message.into() }
    }
}

fn parse_target(text: &str) -> Result<CfgPredicate, String> {
    let t = text.trim();
    match t.strip_prefix("cfg(").and_then(|r| r.strip_suffix(')')) {
        Some(inner) => parse_predicate(inner).map_err(|e| e.to_string()),
        None if !t.is_empty() && !t.contains(char::is_whitespace) => Ok(CfgPredicate::Atom(Atom::pair("target", t))),
        None => Err(format!("bad target `{text}`")),
    }
}

fn render_target(pred: &CfgPredicate) -> String {
    match pred {
        CfgPredicate::Atom(Atom { key, value: Some(triple) }) if key == "target" => triple.clone(),
        other => format!("cfg({other})"),
    }
}

fn decode(src: &RecordSource, rec: IndexRecord) -> Result<PackageVersion, RegistryError> {
    let version = SemVer::parse(&rec.vers).map_err(|e| src.schema(e.to_string()))?;
    let mut deps = Vec::with_capacity(rec.deps.len());
    for d in rec.deps {
        let req = VersionReq::parse(&d.req).map_err(|e| src.schema(format!("dependency `{}`: {e}", d.name)))?;
        if d.kind == DepKind::Dev && d.optional {
            return Err(src.schema(format!("dev-dependency `{}` cannot be optional", d.name)));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = d.features.iter().find(|f| !seen.insert(f.as_str())) {
            return Err(src.schema(format!("dependency `{}` requests feature `{dup}` twice", d.name)));
        }
        let target = d
            .target
            .as_deref()
            .map(parse_target)
            .transpose()
            .map_err(|e| src.schema(format!("dependency `{}`: {e}", d.name)))?;
        deps.push(DependencyDecl {
            name: d.name,
            req,
            kind: d.kind,
            optional: d.optional,
            target,
            features: d.features,
            default_features: d.default_features,
        });
    }
    let mut features = BTreeMap::new();
    for (name, items) in rec.features {
        let items: Vec<FeatureItem> = items.iter().map(|s| FeatureItem::parse(s)).collect();
        for item in &items {
            match item {
                FeatureItem::OptionalDep(dep) if !deps.iter().any(|d| d.optional && &d.name == dep) => {
                    return Err(src.referential(format!("feature `{name}` enables `dep:{dep}`, which is not an optional dependency")));
                }
                FeatureItem::DepFeature { dep, .. } if !deps.iter().any(|d| &d.name == dep) => {
                    return Err(src.referential(format!("feature `{name}` references undeclared dependency `{dep}`")));
                }
                _ => {}
            }
        }
        features.insert(name.clone(), FeatureDef { name, items });
    }
    Ok(PackageVersion { id: PackageId(0), name: rec.name, version, deps, features, ruf_configs: Vec::new() })
}

/// Immutable registry snapshot with dense ids in `(name, version)` order.
#[derive(Clone, Debug, Default)]
pub struct RegistryIndex {
    packages: BTreeMap<String, Vec<PackageVersion>>,
    ids: Vec<(String, usize)>,
}

impl RegistryIndex {
    pub fn from_records<I>(records: I) -> Result<Self, RegistryError>
    where
        I: IntoIterator<Item = (RecordSource, IndexRecord)>,
    {
        let mut packages: BTreeMap<String, Vec<(RecordSource, PackageVersion)>> = BTreeMap::new();
        for (src, rec) in records {
            let pv = decode(&src, rec)?;
            packages.entry(pv.name.clone()).or_default().push((src, pv));
        }
        let mut out = RegistryIndex::default();
        for (name, mut list) in packages {
            list.sort_by(|a, b| a.1.version.cmp(&b.1.version));
            for w in list.windows(2) {
                if w[0].1.version == w[1].1.version {
                    return Err(w[1].0.schema(format!("duplicate version {name} {}", w[1].1.version)));
                }
            }
            let mut versions = Vec::with_capacity(list.len());
            for (idx, (_, mut pv)) in list.into_iter().enumerate() {
                pv.id = PackageId(out.ids.len() as u32);
                out.ids.push((name.clone(), idx));
                versions.push(pv);
            }
            out.packages.insert(name, versions);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn package_names(&self) -> impl Iterator<Item = &str> {
        self.packages.keys().map(String::as_str)
    }

    pub fn get(&self, id: PackageId) -> Option<&PackageVersion> {
        let (name, idx) = self.ids.get(id.index())?;
        self.packages.get(name).map(|v| &v[*idx])
    }

    /// Version-sorted list for a package.
    pub fn versions(&self, name: &str) -> Option<&[PackageVersion]> {
        self.packages.get(name).map(Vec::as_slice)
    }

    pub fn find(&self, name: &str, version: &SemVer) -> Option<&PackageVersion> {
        let list = self.packages.get(name)?;
        list.binary_search_by(|p| p.version.cmp(version)).ok().map(|i| &list[i])
    }

    /// All versions in id order.
    pub fn iter(&self) -> impl Iterator<Item = &PackageVersion> {
        self.packages.values().flatten()
    }

    /// Highest version satisfying `req`.
    pub fn max_matching(&self, name: &str, req: &VersionReq) -> Result<Option<&PackageVersion>, RegistryError> {
        let list = self.packages.get(name).ok_or_else(|| RegistryError::UnknownPackage(name.to_string()))?;
        Ok(list.iter().rev().find(|p| req.matches(&p.version)))
    }

    pub fn attach_ruf_configs(&mut self, id: PackageId, configs: Vec<RufConfiguration>) -> bool {
        let Some((name, idx)) = self.ids.get(id.index()) else { return false };
        if let Some(list) = self.packages.get_mut(name) {
            list[*idx].ruf_configs = configs;
            return true;
        }
        false
    }

    pub fn to_records(&self, name: &str) -> Vec<IndexRecord> {
        self.versions(name).unwrap_or_default().iter().map(encode).collect()
    }

    /// Serialized index files keyed by package name.
    pub fn to_jsonl(&self) -> BTreeMap<String, String> {
        self.packages
            .keys()
            .map(|name| {
                let mut text = String::new();
                for rec in self.to_records(name) {
                    text.push_str(&serde_json::to_string(&rec).expect("index record serializes"));
                    text.push('\n');
                }
                (name.clone(), text)
            })
            .collect()
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), RegistryError> {
        let io = |e: std::io::Error| RegistryError::Io { path: dir.display().to_string(), message: e.to_string() };
        fs::create_dir_all(dir).map_err(io)?;
        for (name, text) in self.to_jsonl() {
            fs::write(dir.join(format!("{name}.jsonl")), text).map_err(io)?;
        }
        Ok(())
    }
}

fn encode(pv: &PackageVersion) -> IndexRecord {
    IndexRecord {
        name: pv.name.clone(),
        vers: pv.version.to_string(),
        deps: pv
            .deps
            .iter()
            .map(|d| IndexDep {
                name: d.name.clone(),
                req: d.req.to_string(),
                kind: d.kind,
                optional: d.optional,
                target: d.target.as_ref().map(render_target),
                features: d.features.clone(),
                default_features: d.default_features,
            })
            .collect(),
        features: pv
            .features
            .values()
            .map(|f| (f.name.clone(), f.items.iter().map(ToString::to_string).collect()))
            .collect(),
    }
}

/// Load a snapshot directory of `<package>.jsonl` files.
pub fn load_index(path: &Path) -> Result<RegistryIndex, RegistryError> {
    let io = |p: &Path, e: std::io::Error| RegistryError::Io { path: p.display().to_string(), message: e.to_string() };
    let mut files: Vec<_> = fs::read_dir(path)
        .map_err(|e| io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    let mut records = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file).map_err(|e| io(&file, e))?;
        let label = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = label.trim_end_matches(".jsonl").to_string();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let src = RecordSource::new(label.clone(), idx + 1);
            let rec: IndexRecord = serde_json::from_str(line).map_err(|e| src.schema(e.to_string()))?;
            if rec.name != stem {
                return Err(src.schema(format!("record for `{}` in file for `{stem}`", rec.name)));
            }
            records.push((src, rec));
        }
    }
    RegistryIndex::from_records(records)
}
