//! Seeded synthetic registries. Package `i` only depends on packages `j > i`
//! and features only reference lower-numbered features, so package and
//! feature graphs are acyclic.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::registry::{DepKind, IndexDep, IndexRecord, RecordSource, RegistryIndex, SemVer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub max_packages: usize,
    pub max_versions: usize,
    /// Expected explicit features per package, as a fraction of 4.
    pub feature_density: f64,
    pub optional_rate: f64,
    pub target_rate: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self { max_packages: 25, max_versions: 6, feature_density: 0.5, optional_rate: 0.25, target_rate: 0.15 }
    }
}

const TARGETS: &[&str] = &["cfg(unix)", "cfg(windows)", "cfg(target_os = \"linux\")", "cfg(not(unix))", "x86_64-pc-windows-msvc"];

struct Pkg {
    name: String,
    versions: Vec<SemVer>,
    features: Vec<String>,
}

fn version_grid(rng: &mut ChaCha8Rng, max: usize) -> Vec<SemVer> {
    let mut grid = Vec::new();
    for major in 0..3u64 {
        for minor in 0..3u64 {
            for patch in 0..3u64 {
                if major == 0 && minor == 0 && patch > 1 {
                    continue;
                }
                grid.push(SemVer::new(major, minor, patch));
            }
        }
    }
    let count = rng.gen_range(1..=max.max(1));
    let mut picked: Vec<SemVer> = grid.choose_multiple(rng, count).cloned().collect();
    picked.sort();
    picked
}

fn requirement(rng: &mut ChaCha8Rng, v: &SemVer) -> String {
    match rng.gen_range(0..10) {
        0..=3 => format!("^{v}"),
        4 => format!("{v}"),
        5 => format!("={v}"),
        6 => format!("~{v}"),
        7 => format!(">={v}, <{}.0.0", v.major() + 1),
        8 => format!("^{}.{}", v.major(), v.minor()),
        _ => format!(">={v}"),
    }
}

fn chance(rng: &mut ChaCha8Rng, p: f64) -> bool {
    rng.gen_bool(p.clamp(0.0, 1.0))
}

/// Generate a registry; the same seed and params always give the same index.
pub fn generate_registry(seed: u64, params: &GenParams) -> RegistryIndex {
    let records = generate_records(seed, params);
    RegistryIndex::from_records(records.into_iter().map(|r| (RecordSource::new("generated", 1), r)))
        .expect("generated records are valid")
}

pub fn generate_records(seed: u64, params: &GenParams) -> Vec<IndexRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=params.max_packages.max(1));
    let pkgs: Vec<Pkg> = (0..n)
        .map(|i| {
            let versions = version_grid(&mut rng, params.max_versions);
            let explicit = (0..4).filter(|_| chance(&mut rng, params.feature_density)).count();
            let mut features: Vec<String> = (0..explicit).map(|k| format!("f{k}")).collect();
            if chance(&mut rng, params.feature_density) {
                features.push("default".to_string());
            }
            Pkg { name: format!("p{i:02}"), versions, features }
        })
        .collect();

    let mut records = Vec::new();
    for (i, pkg) in pkgs.iter().enumerate() {
        for v in &pkg.versions {
            let mut deps = Vec::new();
            let mut names = BTreeSet::new();
            let fanout = if i + 1 < n { rng.gen_range(0..=3) } else { 0 };
            for _ in 0..fanout {
                let j = rng.gen_range(i + 1..n);
                if !names.insert(j) {
                    continue;
                }
                let target = &pkgs[j];
                let pinned = target.versions.choose(&mut rng).expect("at least one version");
                let kind = match rng.gen_range(0..20) {
                    0..=13 => DepKind::Normal,
                    14..=16 => DepKind::Build,
                    _ => DepKind::Dev,
                };
                let optional = kind != DepKind::Dev && chance(&mut rng, params.optional_rate);
                let requestable: Vec<&String> = target.features.iter().filter(|f| *f != "default").collect();
                let features: Vec<String> = requestable
                    .iter()
                    .filter(|_| chance(&mut rng, 0.3))
                    .map(|f| f.to_string())
                    .collect();
                deps.push(IndexDep {
                    name: target.name.clone(),
                    req: requirement(&mut rng, pinned),
                    kind,
                    optional,
                    target: chance(&mut rng, params.target_rate).then(|| TARGETS.choose(&mut rng).unwrap().to_string()),
                    features,
                    default_features: chance(&mut rng, 0.8),
                });
            }

            let mut feature_map: BTreeMap<String, Vec<String>> = BTreeMap::new();
            let explicit: Vec<&String> = pkg.features.iter().filter(|f| *f != "default").collect();
            for (k, name) in pkg.features.iter().enumerate() {
                let mut items = Vec::new();
                let lower: &[&String] = if name == "default" { &explicit } else { &explicit[..k.min(explicit.len())] };
                for f in lower {
                    if chance(&mut rng, 0.35) {
                        items.push(f.to_string());
                    }
                }
                for d in &deps {
                    if d.optional && chance(&mut rng, 0.3) {
                        items.push(if chance(&mut rng, 0.5) { format!("dep:{}", d.name) } else { d.name.clone() });
                    }
                    let dep_feats: Vec<&String> =
                        pkgs.iter().find(|p| p.name == d.name).unwrap().features.iter().filter(|f| *f != "default").collect();
                    if !dep_feats.is_empty() && chance(&mut rng, 0.15) {
                        let f = dep_feats.choose(&mut rng).unwrap();
                        let weak = d.optional && chance(&mut rng, 0.5);
                        items.push(format!("{}{}/{f}", d.name, if weak { "?" } else { "" }));
                    }
                }
                feature_map.insert(name.clone(), items);
            }
            // a bare optional-dep name only works as an implicit feature
            let dep_syntax: BTreeSet<String> = feature_map
                .values()
                .flatten()
                .filter_map(|s| s.strip_prefix("dep:").map(str::to_string))
                .collect();
            for items in feature_map.values_mut() {
                for item in items.iter_mut() {
                    if dep_syntax.contains(item.as_str()) {
                        *item = format!("dep:{item}");
                    }
                }
                let mut seen = BTreeSet::new();
                items.retain(|s| seen.insert(s.clone()));
            }

            records.push(IndexRecord { name: pkg.name.clone(), vers: v.to_string(), deps, features: feature_map });
        }
    }
    records
}
