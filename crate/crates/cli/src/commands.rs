use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rufscope::eval::{evaluate_registry, generate_registry, metrics, GenParams, MetricsReport, OracleError, OracleOptions};
use rufscope::impact::{find_super_spreaders, impact_by_status, super_spreaders_csv, RufUsageSet};
use rufscope::lifetime::{abnormal_csv, build_lifetimes, load_releases, LifetimeError, LifetimeStore};
use rufscope::mitigation::{compatible_compiler, enabled_rufs};
use rufscope::predicate::{extract_ruf_configs, DepEdgeAttrs};
use rufscope::registry::{load_index, RegistryError, RegistryIndex, SemVer};
use rufscope::resolver::{default_host, generate_edg, resolve, DependencyTree, EdgOptions, ResolveError, VirtualPackConfig};
use serde::Serialize;

use crate::config::RunConfig;
use crate::sources::{attach, configs_to_jsonl, discover, read_config_dir, ConfigMap};
use crate::{CliError, Streams, EXIT_DIAGNOSTICS, EXIT_NO_COMPATIBLE, EXIT_OK};

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))
}

fn say(stream: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stream.write_all(text.as_bytes()).map_err(|e| CliError::Internal(format!("writing output: {e}")))
}

fn in_pool<T, F>(workers: Option<usize>, f: F) -> Result<T, CliError>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match workers {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Internal(format!("thread pool: {e}"))),
    }
}

fn lifetime_error(e: LifetimeError) -> CliError {
    match e {
        LifetimeError::Io { .. } => CliError::NotFound(e.to_string()),
        LifetimeError::NoReleases | LifetimeError::UnknownRelease(_) => CliError::Usage(e.to_string()),
        _ => CliError::Diagnostics(e.to_string()),
    }
}

fn registry_error(e: RegistryError) -> CliError {
    match e {
        RegistryError::Io { .. } => CliError::NotFound(e.to_string()),
        _ => CliError::Diagnostics(e.to_string()),
    }
}

fn load_store(cfg: &RunConfig, streams: &mut Streams<'_>) -> Result<LifetimeStore, CliError> {
    let dir = cfg.required_dir(&cfg.releases, "--releases")?;
    let (releases, diagnostics) = load_releases(&dir).map_err(lifetime_error)?;
    for d in &diagnostics {
        say(streams.err, &format!("warning: {d}\n"))?;
    }
    if releases.is_empty() {
        return Err(CliError::Usage(format!("no release directories under {}", dir.display())));
    }
    build_lifetimes(releases).map_err(lifetime_error)
}

#[derive(Serialize)]
struct LifetimeSummary<'a> {
    features: usize,
    releases: &'a [SemVer],
    abnormal: usize,
    diagnostics: usize,
}

pub fn cmd_lifetimes(cfg: &RunConfig, streams: &mut Streams<'_>) -> Result<u8, CliError> {
    let dir = cfg.required_dir(&cfg.releases, "--releases")?;
    let (releases, diagnostics) = load_releases(&dir).map_err(lifetime_error)?;
    if releases.is_empty() {
        return Err(CliError::Usage(format!("no release directories under {}", dir.display())));
    }
    let store = build_lifetimes(releases).map_err(lifetime_error)?;
    let abnormal = store.abnormal();
    let out = cfg.out_dir()?;
    write_file(&out, "lifetimes.csv", &store.to_csv())?;
    write_file(&out, "abnormal.csv", &abnormal_csv(&abnormal))?;
    let diag_text: String = diagnostics.iter().map(|d| format!("{d}\n")).collect();
    write_file(&out, "diagnostics.txt", &diag_text)?;
    for d in &diagnostics {
        say(streams.err, &format!("warning: {d}\n"))?;
    }

    if cfg.json {
        let summary = LifetimeSummary {
            features: store.len(),
            releases: store.releases(),
            abnormal: abnormal.len(),
            diagnostics: diagnostics.len(),
        };
        say(streams.out, &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"))?;
    } else {
        let mut text = format!(
            "{} features over {} releases, {} abnormal transitions, {} diagnostics\n",
            store.len(),
            store.releases().len(),
            abnormal.len(),
            diagnostics.len()
        );
        for t in &abnormal {
            let _ = writeln!(text, "  {:<32} {:<18} at {} ({} -> {})", t.name, t.kind, t.at, t.from, t.to);
        }
        say(streams.out, &text)?;
    }
    Ok(if diagnostics.is_empty() { EXIT_OK } else { EXIT_DIAGNOSTICS })
}

struct Extraction {
    configs: ConfigMap,
    scanned: usize,
    failures: Vec<String>,
}

fn extract_dir(dir: &Path) -> Result<Extraction, CliError> {
    let entries = discover(dir)?;
    let mut configs = ConfigMap::new();
    let mut failures = Vec::new();
    for entry in &entries {
        let label = format!("{}-{}", entry.name, entry.version);
        let scanned = fs::read_to_string(&entry.root)
            .map_err(|e| format!("unreadable: {e}"))
            .and_then(|text| extract_ruf_configs(&text).map_err(|e| e.to_string()));
        match scanned {
            Ok(list) => {
                configs.insert((entry.name.clone(), entry.version.clone()), list);
            }
            Err(message) => failures.push(format!("{label}: {message}")),
        }
    }
    Ok(Extraction { configs, scanned: entries.len(), failures })
}

pub fn cmd_extract(cfg: &RunConfig, streams: &mut Streams<'_>) -> Result<u8, CliError> {
    let dir = cfg.required_dir(&cfg.sources, "--sources")?;
    let ex = extract_dir(&dir)?;
    let out = cfg.out_dir()?;
    let config_dir = out.join("ruf_configs");
    fs::create_dir_all(&config_dir).map_err(|e| CliError::Internal(format!("creating {}: {e}", config_dir.display())))?;
    let mut with_rufs = 0;
    for ((name, version), list) in &ex.configs {
        with_rufs += usize::from(!list.is_empty());
        write_file(&config_dir, &format!("{name}-{version}.jsonl"), &configs_to_jsonl(list))?;
    }
    let failed: String = ex.failures.iter().map(|f| format!("{f}\n")).collect();
    write_file(&out, "extract_failures.txt", &failed)?;

    let coverage = if ex.scanned == 0 {
        "n/a".to_string()
    } else {
        format!("{:.1}%", 100.0 * (ex.scanned - ex.failures.len()) as f64 / ex.scanned as f64)
    };
    say(
        streams.out,
        &format!(
            "scanned {} package versions, {} failed, {} use unstable features (coverage {coverage})\n",
            ex.scanned,
            ex.failures.len(),
            with_rufs
        ),
    )?;
    for f in &ex.failures {
        say(streams.err, &format!("warning: {f}\n"))?;
    }
    Ok(EXIT_OK)
}

/// The registry with configurations from `--configs` and `--sources`
/// attached; sources win where both describe a version.
fn load_registry(cfg: &RunConfig, streams: &mut Streams<'_>) -> Result<RegistryIndex, CliError> {
    let dir = cfg.required_dir(&cfg.registry, "--registry")?;
    let config_dir = cfg.optional_dir(&cfg.configs, "--configs")?;
    let sources = cfg.optional_dir(&cfg.sources, "--sources")?;
    let mut reg = load_index(&dir).map_err(registry_error)?;
    let mut configs = ConfigMap::new();
    if let Some(d) = config_dir {
        configs.extend(read_config_dir(&d)?);
    }
    if let Some(d) = sources {
        let ex = extract_dir(&d)?;
        for f in &ex.failures {
            say(streams.err, &format!("warning: {f}\n"))?;
        }
        configs.extend(ex.configs);
    }
    for label in attach(&mut reg, configs) {
        say(streams.err, &format!("warning: {label} is not in the registry\n"))?;
    }
    Ok(reg)
}

pub fn cmd_analyze(cfg: &RunConfig, streams: &mut Streams<'_>) -> Result<u8, CliError> {
    let reg = load_registry(cfg, streams)?;
    let store = load_store(cfg, streams)?;
    let at = match &cfg.at {
        Some(v) => v.clone(),
        None => store.newest().expect("store has releases").clone(),
    };
    store.release_index(&at).map_err(lifetime_error)?;
    let out = cfg.out_dir()?;

    let cfgs: Vec<VirtualPackConfig> = reg.iter().filter_map(|p| VirtualPackConfig::for_id(&reg, p.id)).collect();
    let edg = in_pool(cfg.workers, || generate_edg(&reg, cfgs, &EdgOptions::default()))?;
    write_file(&out, "edg.csv", &edg.to_csv())?;
    write_file(&out, "unresolved.csv", &edg.unresolved_csv())?;
    for u in edg.unresolved() {
        let label = reg.get(u.id).map_or_else(|| u.id.to_string(), |p| p.label());
        say(streams.err, &format!("unresolved: {label}: {}\n", u.error))?;
    }
    if edg.resolved_roots().is_empty() {
        return Err(CliError::Usage("no package version resolved; the dependency graph is empty".into()));
    }

    let t = RufUsageSet::from_registry(&reg);
    let internal = |e: rufscope::impact::ImpactError| CliError::Internal(e.to_string());
    let report = impact_by_status(&edg, &t, &store, &at).map_err(internal)?;
    let ranked = find_super_spreaders(&edg, &t, cfg.top).map_err(internal)?;
    write_file(&out, "impact.json", &report.to_json())?;
    write_file(&out, "impact.txt", &report.to_text())?;
    write_file(&out, "super_spreaders.csv", &super_spreaders_csv(&reg, &ranked))?;
    say(streams.out, &if cfg.json { report.to_json() } else { report.to_text() })?;
    Ok(EXIT_OK)
}

pub fn cmd_mitigate(cfg: &RunConfig, streams: &mut Streams<'_>, package: &str, version: &str) -> Result<u8, CliError> {
    let version = SemVer::parse(version).map_err(|e| CliError::Usage(e.to_string()))?;
    let reg = load_registry(cfg, streams)?;
    let store = load_store(cfg, streams)?;
    let root = reg
        .find(package, &version)
        .ok_or_else(|| CliError::NotFound(format!("{package} {version} is not in the registry")))?;
    let tree = resolve(&reg, &VirtualPackConfig::for_id(&reg, root.id).expect("found in registry"))
        .map_err(|e| CliError::NotFound(format!("cannot resolve {}: {e}", root.label())))?;
    let env = DepEdgeAttrs {
        enabled_features: tree.features(root.id).cloned().unwrap_or_default(),
        target_env: default_host(),
        build_mode_flags: BTreeSet::new(),
    };
    let rufs = enabled_rufs(&tree, &RufUsageSet::from_registry(&reg), &env);
    let verdict = compatible_compiler(&rufs, &store, store.releases());
    say(streams.out, &verdict.to_json())?;
    Ok(if verdict.is_found() { EXIT_OK } else { EXIT_NO_COMPATIBLE })
}

pub fn cmd_eval(cfg: &RunConfig, streams: &mut Streams<'_>) -> Result<u8, CliError> {
    cmd_eval_with(cfg, streams, &resolve)
}

/// As [`cmd_eval`] with a substitute resolver under test.
pub fn cmd_eval_with<F>(cfg: &RunConfig, streams: &mut Streams<'_>, resolver: &F) -> Result<u8, CliError>
where
    F: Fn(&RegistryIndex, &VirtualPackConfig) -> Result<DependencyTree, ResolveError> + Sync,
{
    if cfg.seeds == 0 {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }
    let params = GenParams { max_packages: cfg.max_packages, max_versions: cfg.max_versions, ..GenParams::default() };
    let opts = OracleOptions::default();
    let mut comparisons = Vec::new();
    let mut per_seed = String::from("seed,roots,compared,imperfect,size_capped\n");
    for seed in cfg.seed..cfg.seed + cfg.seeds as u64 {
        let reg = generate_registry(seed, &params);
        let outcomes = in_pool(cfg.workers, || evaluate_registry(&reg, resolver, &opts))?;
        let capped = outcomes.iter().filter(|o| matches!(o.oracle_error, Some(OracleError::SizeCapExceeded { .. }))).count();
        if capped > 0 {
            say(streams.err, &format!("seed {seed}: oracle size cap exceeded for {capped} roots\n"))?;
        }
        let scored: Vec<_> = outcomes.iter().filter_map(|o| o.comparison).collect();
        let imperfect = scored.iter().filter(|c| !c.is_perfect()).count();
        let _ = writeln!(per_seed, "{seed},{},{},{imperfect},{capped}", outcomes.len(), scored.len());
        comparisons.extend(scored);
    }
    let report = metrics(&comparisons).map_err(|e| CliError::Usage(format!("nothing to evaluate: {e}")))?;
    let out = cfg.out_dir()?;
    write_file(&out, "metrics.csv", &format!("{}{}", MetricsReport::csv_header(), report.csv_row("synthetic")))?;
    write_file(&out, "eval_seeds.csv", &per_seed)?;
    if cfg.json {
        say(streams.out, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    } else {
        say(streams.out, &format!("{}{}", MetricsReport::csv_header(), report.csv_row("synthetic")))?;
    }
    Ok(if report.tree_accuracy == 1.0 { EXIT_OK } else { EXIT_DIAGNOSTICS })
}
