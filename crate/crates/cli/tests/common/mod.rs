#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rufscope::lifetime::RufStatus;
use rufscope::registry::{DepKind, IndexDep, IndexRecord, RecordSource, RegistryIndex};
use rufscope_cli::{run, CliError, RunConfig, Streams};

/// `(name, version, [(dep, req)])`
pub type Spec<'a> = (&'a str, &'a str, &'a [(&'a str, &'a str)]);

pub fn write_registry(dir: &Path, records: &[Spec<'_>]) {
    let records = records.iter().map(|(name, vers, deps)| {
        let deps = deps
            .iter()
            .map(|(d, req)| IndexDep {
                name: d.to_string(),
                req: req.to_string(),
                kind: DepKind::Normal,
                optional: false,
                target: None,
                features: vec![],
                default_features: true,
            })
            .collect();
        (RecordSource::new("fixture", 1), IndexRecord { name: name.to_string(), vers: vers.to_string(), deps, features: Default::default() })
    });
    RegistryIndex::from_records(records).unwrap().write_dir(dir).unwrap();
}

/// A release snapshot with every feature in the language table.
pub fn write_release(root: &Path, version: &str, features: &[(&str, RufStatus)]) {
    let dir = root.join(version);
    fs::create_dir_all(&dir).unwrap();
    let mut text = String::from("declare_features! (\n");
    for (name, status) in features {
        let token = status.to_string().to_ascii_lowercase();
        text.push_str(&format!("    ({token}, {name}, \"1.0.0\", None, None),\n"));
    }
    text.push_str(");\n");
    fs::write(dir.join("lang_features.txt"), text).unwrap();
}

pub fn three_release_table(root: &Path) {
    use RufStatus::*;
    write_release(root, "1.50.0", &[("A", Active), ("B", Accepted), ("C", Active)]);
    write_release(root, "1.57.0", &[("A", Accepted), ("B", Accepted), ("C", Accepted)]);
    write_release(root, "1.63.0", &[("A", Removed), ("B", Accepted)]);
}

pub fn write_source(dir: &Path, label: &str, text: &str) {
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join(format!("{label}.rs")), text).unwrap();
}

pub struct Ran {
    pub code: u8,
    pub out: String,
    pub err: String,
}

pub fn call<F>(f: F) -> Ran
where
    F: FnOnce(&mut Streams<'_>) -> Result<u8, CliError>,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&mut Streams::new(&mut out, &mut err), f);
    Ran { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
}

impl Fixture {
    pub fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    pub fn config(&self) -> RunConfig {
        RunConfig {
            registry: Some(self.path("registry")),
            releases: Some(self.path("releases")),
            out: self.path("out"),
            ..RunConfig::default()
        }
    }

    pub fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }
}
