use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rufscope_cli::{
    cmd_analyze, cmd_eval, cmd_extract, cmd_lifetimes, cmd_mitigate, run, ConfigLayer, RunConfig, Streams, EXIT_USAGE,
};

#[derive(Parser)]
#[command(name = "rufscope", version, about = "Track unstable-feature usage and its impact across a package ecosystem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Build feature lifetimes from compiler release snapshots.
    Lifetimes,
    /// Scan package sources for unstable-feature attributes.
    Extract,
    /// Resolve the whole registry and report unstable-feature impact.
    Analyze,
    /// Find a compiler release that can build one package version.
    Mitigate { package: String, version: String },
    /// Score the resolver against the brute-force oracle on synthetic registries.
    Eval,
}

#[derive(Args)]
struct Flags {
    /// TOML file with defaults for any of the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Registry index directory, one `<name>` JSON-lines file per package.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Directory of `<version>/` compiler snapshots.
    #[arg(long, global = true)]
    releases: Option<PathBuf>,
    /// Package sources, `<name>-<version>/src/lib.rs` and friends.
    #[arg(long, global = true)]
    sources: Option<PathBuf>,
    /// Extracted configurations from a previous `extract` run.
    #[arg(long, global = true)]
    configs: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compiler release to report impact at; defaults to the newest.
    #[arg(long, global = true)]
    at: Option<String>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of synthetic registries for `eval`.
    #[arg(long, global = true)]
    seeds: Option<usize>,
    #[arg(long, global = true)]
    max_packages: Option<usize>,
    #[arg(long, global = true)]
    max_versions: Option<usize>,
    /// Super-spreaders to list.
    #[arg(long, global = true)]
    top: Option<usize>,
    #[arg(long, global = true)]
    json: bool,
}

impl Flags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            registry: self.registry.clone(),
            releases: self.releases.clone(),
            sources: self.sources.clone(),
            configs: self.configs.clone(),
            out: self.out.clone(),
            at: self.at.clone(),
            workers: self.workers,
            seed: self.seed,
            seeds: self.seeds,
            max_packages: self.max_packages,
            max_versions: self.max_versions,
            top: self.top,
            json: self.json.then_some(true),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    let mut streams = Streams::new(&mut stdout, &mut stderr);
    let code = run(&mut streams, |s| {
        let cfg = RunConfig::resolve(cli.flags.layer(), cli.flags.config.as_deref())?;
        match &cli.command {
            Command::Lifetimes => cmd_lifetimes(&cfg, s),
            Command::Extract => cmd_extract(&cfg, s),
            Command::Analyze => cmd_analyze(&cfg, s),
            Command::Mitigate { package, version } => cmd_mitigate(&cfg, s, package, version),
            Command::Eval => cmd_eval(&cfg, s),
        }
    });
    ExitCode::from(code)
}
