#![allow(dead_code)]

use std::collections::BTreeMap;

use rufscope::registry::{DepKind, IndexDep, IndexRecord, RecordSource, RegistryIndex, SemVer};
use rufscope::resolver::VirtualPackConfig;

/// Dependency shorthand: `"name req [opt] [build|dev] [nodefault] [feat=a,b] [target=cfg(..)]"`.
pub fn dep(spec: &str) -> IndexDep {
    let mut parts = spec.split_whitespace();
    let name = parts.next().unwrap().to_string();
    let req = parts.next().unwrap().to_string();
    let mut d = IndexDep {
        name,
        req,
        kind: DepKind::Normal,
        optional: false,
        target: None,
        features: vec![],
        default_features: true,
    };
    for p in parts {
        match p {
            "opt" => d.optional = true,
            "build" => d.kind = DepKind::Build,
            "dev" => d.kind = DepKind::Dev,
            "nodefault" => d.default_features = false,
            _ if p.starts_with("feat=") => d.features = p[5..].split(',').map(str::to_string).collect(),
            _ if p.starts_with("target=") => d.target = Some(p[7..].to_string()),
            _ => panic!("bad dep spec part {p}"),
        }
    }
    d
}

pub fn rec(name: &str, vers: &str, deps: &[&str], features: &[(&str, &[&str])]) -> IndexRecord {
    IndexRecord {
        name: name.into(),
        vers: vers.into(),
        deps: deps.iter().map(|s| dep(s)).collect(),
        features: features
            .iter()
            .map(|(n, items)| (n.to_string(), items.iter().map(|s| s.to_string()).collect()))
            .collect::<BTreeMap<_, _>>(),
    }
}

pub fn registry(records: Vec<IndexRecord>) -> RegistryIndex {
    RegistryIndex::from_records(records.into_iter().map(|r| (RecordSource::new("test", 1), r))).unwrap()
}

pub fn v(s: &str) -> SemVer {
    SemVer::parse(s).unwrap()
}

pub fn cfg(name: &str, vers: &str) -> VirtualPackConfig {
    VirtualPackConfig::new(name, v(vers))
}

pub fn id_of(reg: &RegistryIndex, name: &str, vers: &str) -> rufscope::registry::PackageId {
    reg.find(name, &v(vers)).unwrap_or_else(|| panic!("{name} {vers} missing")).id
}
