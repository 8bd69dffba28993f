//! Release snapshots on disk: `<root>/<version>/lang_features.txt` plus
//! library sources under `<root>/<version>/lib/`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use walkdir::WalkDir;

use super::{lang, lib_attrs, CompilerRelease, Diagnostic, FeatureSite, LifetimeError};
use crate::registry::SemVer;

const LANG_FILE: &str = "lang_features.txt";

#[derive(Clone, Debug)]
pub struct ReleaseSnapshot {
    pub release: CompilerRelease,
    pub diagnostics: Vec<Diagnostic>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> LifetimeError {
    LifetimeError::Io { path: path.display().to_string(), message: e.to_string() }
}

fn is_test_file(rel: &Path) -> bool {
    rel.file_name().is_some_and(|n| n == "tests.rs" || n == "benches.rs")
        || rel.components().any(|c| matches!(c.as_os_str().to_str(), Some("tests" | "benches")))
}

/// Load one release directory.
pub fn load_release(dir: &Path, version: SemVer) -> Result<ReleaseSnapshot, LifetimeError> {
    let label = version.to_string();
    let mut diagnostics = Vec::new();
    let mut sites: Vec<FeatureSite> = Vec::new();

    let lang_path = dir.join(LANG_FILE);
    if lang_path.is_file() {
        let text = fs::read_to_string(&lang_path).map_err(|e| io_err(&lang_path, e))?;
        let scan = lang::scan(&text, &format!("{label}/{LANG_FILE}"))?;
        sites.extend(scan.sites);
        diagnostics.extend(scan.diagnostics);
    } else {
        diagnostics.push(Diagnostic::new(format!("{label}/{LANG_FILE}"), 0, "missing language feature table"));
    }

    let lang_count = sites.len();
    let lib_dir = dir.join("lib");
    if lib_dir.is_dir() {
        let mut lib_sites: BTreeMap<String, FeatureSite> = BTreeMap::new();
        let mut order = Vec::new();
        let entries = WalkDir::new(&lib_dir).sort_by_file_name().into_iter();
        for entry in entries {
            let entry = entry.map_err(|e| io_err(&lib_dir, e))?;
            let path = entry.path();
            let rel = path.strip_prefix(dir).unwrap_or(path);
            if !entry.file_type().is_file() || path.extension().is_none_or(|x| x != "rs") || is_test_file(rel) {
                continue;
            }
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let file = format!("{label}/{}", rel.display());
            let scan = lib_attrs::scan(&text, &file)?;
            diagnostics.extend(scan.diagnostics);
            for site in scan.sites {
                match lib_sites.get_mut(&site.name) {
                    Some(prev) if prev.status != site.status => {
                        diagnostics.push(Diagnostic::new(
                            &site.file,
                            site.line,
                            format!("feature `{}` is partially stabilized", site.name),
                        ));
                        if site.status == super::RufStatus::Accepted {
                            *prev = site;
                        }
                    }
                    Some(_) => {}
                    None => {
                        order.push(site.name.clone());
                        lib_sites.insert(site.name.clone(), site);
                    }
                }
            }
        }
        sites.extend(order.into_iter().filter_map(|n| lib_sites.remove(&n)));
    }

    let mut table = BTreeMap::new();
    let mut first_site: BTreeMap<&str, &FeatureSite> = BTreeMap::new();
    for (i, site) in sites.iter().enumerate() {
        if let Some(prev) = first_site.get(site.name.as_str()) {
            debug_assert!(i >= lang_count);
            return Err(LifetimeError::DuplicateDefinition {
                name: site.name.clone(),
                release: label,
                first: prev.location(),
                second: site.location(),
            });
        }
        first_site.insert(&site.name, site);
        table.insert(site.name.clone(), site.status);
    }
    diagnostics.sort();
    Ok(ReleaseSnapshot { release: CompilerRelease { version, table }, diagnostics })
}

/// Load every `<version>` directory under `root`. Directories whose name is
/// not a version are reported and skipped.
pub fn load_releases(root: &Path) -> Result<(Vec<CompilerRelease>, Vec<Diagnostic>), LifetimeError> {
    let mut dirs: Vec<_> = fs::read_dir(root)
        .map_err(|e| io_err(root, e))?
        .filter_map(Result::ok)
        .filter(|e| e.path().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    dirs.sort();
    let mut releases = Vec::new();
    let mut diagnostics = Vec::new();
    for name in dirs {
        match SemVer::parse(&name) {
            Ok(version) => {
                let snap = load_release(&root.join(&name), version)?;
                releases.push(snap.release);
                diagnostics.extend(snap.diagnostics);
            }
            Err(_) => diagnostics.push(Diagnostic::new(name, 0, "directory name is not a release version")),
        }
    }
    releases.sort_by(|a, b| a.version.cmp(&b.version));
    Ok((releases, diagnostics))
}
