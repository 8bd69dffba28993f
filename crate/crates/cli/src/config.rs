use std::path::{Path, PathBuf};

use rufscope::registry::SemVer;
use serde::Deserialize;

use crate::CliError;

/// One layer of settings. Flags and the `--config` file each produce one;
/// flags win.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub registry: Option<PathBuf>,
    pub releases: Option<PathBuf>,
    pub sources: Option<PathBuf>,
    pub configs: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub at: Option<String>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub max_packages: Option<usize>,
    pub max_versions: Option<usize>,
    pub top: Option<usize>,
    pub json: Option<bool>,
}

impl ConfigLayer {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::NotFound(format!("config file {}: {e}", path.display())))?;
        let mut layer: ConfigLayer =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut layer.registry, &mut layer.releases, &mut layer.sources, &mut layer.configs, &mut layer.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(layer)
    }

    /// Fill unset fields from `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            registry: self.registry.or(lower.registry),
            releases: self.releases.or(lower.releases),
            sources: self.sources.or(lower.sources),
            configs: self.configs.or(lower.configs),
            out: self.out.or(lower.out),
            at: self.at.or(lower.at),
            workers: self.workers.or(lower.workers),
            seed: self.seed.or(lower.seed),
            seeds: self.seeds.or(lower.seeds),
            max_packages: self.max_packages.or(lower.max_packages),
            max_versions: self.max_versions.or(lower.max_versions),
            top: self.top.or(lower.top),
            json: self.json.or(lower.json),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub registry: Option<PathBuf>,
    pub releases: Option<PathBuf>,
    pub sources: Option<PathBuf>,
    /// Directory of `<name>-<version>.jsonl` files written by `extract`.
    pub configs: Option<PathBuf>,
    pub out: PathBuf,
    pub at: Option<SemVer>,
    pub workers: Option<usize>,
    pub seed: u64,
    pub seeds: usize,
    pub max_packages: usize,
    pub max_versions: usize,
    pub top: usize,
    pub json: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            registry: None,
            releases: None,
            sources: None,
            configs: None,
            out: PathBuf::from("rufscope-out"),
            at: None,
            workers: None,
            seed: 0,
            seeds: 200,
            max_packages: 25,
            max_versions: 6,
            top: 20,
            json: false,
        }
    }
}

impl RunConfig {
    pub fn from_layer(layer: ConfigLayer) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let at = layer
            .at
            .map(|s| SemVer::parse(&s).map_err(|e| CliError::Usage(format!("--at: {e}"))))
            .transpose()?;
        if layer.workers == Some(0) {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        Ok(RunConfig {
            registry: layer.registry,
            releases: layer.releases,
            sources: layer.sources,
            configs: layer.configs,
            out: layer.out.unwrap_or(d.out),
            at,
            workers: layer.workers,
            seed: layer.seed.unwrap_or(d.seed),
            seeds: layer.seeds.unwrap_or(d.seeds),
            max_packages: layer.max_packages.unwrap_or(d.max_packages),
            max_versions: layer.max_versions.unwrap_or(d.max_versions),
            top: layer.top.unwrap_or(d.top),
            json: layer.json.unwrap_or(d.json),
        })
    }

    /// Flags layered over an optional config file.
    pub fn resolve(flags: ConfigLayer, file: Option<&Path>) -> Result<Self, CliError> {
        let lower = file.map(ConfigLayer::load).transpose()?.unwrap_or_default();
        Self::from_layer(flags.over(lower))
    }

    pub(crate) fn required_dir(&self, path: &Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
        let p = path.as_ref().ok_or_else(|| CliError::Usage(format!("{flag} is required")))?;
        if !p.is_dir() {
            return Err(CliError::NotFound(format!("{flag} {}: no such directory", p.display())));
        }
        Ok(p.clone())
    }

    pub(crate) fn optional_dir(&self, path: &Option<PathBuf>, flag: &str) -> Result<Option<PathBuf>, CliError> {
        match path {
            None => Ok(None),
            Some(_) => self.required_dir(path, flag).map(Some),
        }
    }

    pub(crate) fn out_dir(&self) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Internal(format!("creating {}: {e}", self.out.display())))?;
        Ok(self.out.clone())
    }
}
