//! Package source discovery and persisted configuration files.
//!
//! A package version's crate root is looked up as
//! `<name>-<version>/src/lib.rs`, `<name>-<version>/lib.rs` or
//! `<name>-<version>.rs` under the sources directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rufscope::predicate::RufConfiguration;
use rufscope::registry::{RegistryIndex, SemVer};

use crate::CliError;

/// Split `serde-1.0.3` style labels; names may contain dashes.
pub fn split_label(label: &str) -> Option<(String, SemVer)> {
    label
        .match_indices('-')
        .find_map(|(i, _)| SemVer::parse(&label[i + 1..]).ok().map(|v| (label[..i].to_string(), v)))
        .filter(|(name, _)| !name.is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceEntry {
    pub name: String,
    pub version: SemVer,
    pub root: PathBuf,
}

/// Every package version found under `dir`, sorted by name then version.
pub fn discover(dir: &Path) -> Result<Vec<SourceEntry>, CliError> {
    let read = fs::read_dir(dir).map_err(|e| CliError::NotFound(format!("{}: {e}", dir.display())))?;
    let mut found = BTreeMap::new();
    for entry in read {
        let entry = entry.map_err(|e| CliError::Internal(format!("{}: {e}", dir.display())))?;
        let path = entry.path();
        let file_name = entry.file_name().to_string_lossy().into_owned();
        let (label, root) = if path.is_dir() {
            let nested = path.join("src").join("lib.rs");
            (file_name.as_str(), if nested.exists() { nested } else { path.join("lib.rs") })
        } else if let Some(stem) = file_name.strip_suffix(".rs") {
            (stem, path.clone())
        } else {
            continue;
        };
        if let Some((name, version)) = split_label(label) {
            found.insert((name.clone(), version.clone()), SourceEntry { name, version, root });
        }
    }
    Ok(found.into_values().collect())
}

pub fn configs_to_jsonl(configs: &[RufConfiguration]) -> String {
    configs
        .iter()
        .map(|c| serde_json::to_string(c).expect("configuration serializes") + "\n")
        .collect()
}

pub type ConfigMap = BTreeMap<(String, SemVer), Vec<RufConfiguration>>;

/// Read a directory of `<name>-<version>.jsonl` files.
pub fn read_config_dir(dir: &Path) -> Result<ConfigMap, CliError> {
    let read = fs::read_dir(dir).map_err(|e| CliError::NotFound(format!("{}: {e}", dir.display())))?;
    let mut out = ConfigMap::new();
    for entry in read {
        let path = entry.map_err(|e| CliError::Internal(e.to_string()))?.path();
        let Some(stem) = path.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_suffix(".jsonl")) else {
            continue;
        };
        let Some(key) = split_label(stem) else {
            return Err(CliError::Usage(format!("{}: not a <name>-<version>.jsonl file", path.display())));
        };
        let text = fs::read_to_string(&path).map_err(|e| CliError::NotFound(format!("{}: {e}", path.display())))?;
        let mut configs = Vec::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let c: RufConfiguration = serde_json::from_str(line)
                .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), n + 1)))?;
            configs.push(c);
        }
        out.insert(key, configs);
    }
    Ok(out)
}

/// Attach configurations to registry versions; returns labels with no
/// matching version.
pub fn attach(reg: &mut RegistryIndex, configs: ConfigMap) -> Vec<String> {
    let mut unmatched = Vec::new();
    for ((name, version), list) in configs {
        match reg.find(&name, &version).map(|p| p.id) {
            Some(id) => {
                reg.attach_ruf_configs(id, list);
            }
            None => unmatched.push(format!("{name}-{version}")),
        }
    }
    unmatched
}
