mod args;
mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{BoundArgs, Cli, Command, FrequencyArgs, ManifoldArgs, ProfileArgs, WitnessArgs};
use commands::{ConfigError, Rendered};
use config::{Overlay, RunConfig};
use pspectral::emit::Format;

fn thread_count(requested: Option<usize>) -> Result<Option<usize>> {
    let cap = match std::env::var("PSPECTRAL_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| ConfigError(format!("PSPECTRAL_THREADS={v:?} is not a count")))?),
        Err(_) => None,
    };
    Ok(match (requested, cap) {
        (Some(r), Some(c)) => Some(r.min(c)),
        (r, c) => r.or(c),
    }
    .map(|t| t.max(1)))
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| ConfigError(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    if let Some(t) = thread_count(cli.threads.or(cfg.threads))? {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("starting thread pool")?;
    }
    let format: Format = cli.format.as_deref().or(cfg.format.as_deref()).unwrap_or("csv").parse().map_err(|e| ConfigError(format!("{e}")))?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let command = match cli.command {
        Some(c) => c,
        None => match cfg.command.as_deref() {
            Some("bound") => Command::Bound(BoundArgs::default()),
            Some("profile") => Command::Profile(ProfileArgs::default()),
            Some("manifold") => Command::Manifold(ManifoldArgs::default()),
            Some("frequency") => Command::Frequency(FrequencyArgs::default()),
            Some("witness") => Command::Witness(WitnessArgs::default()),
            Some(other) => return Err(ConfigError(format!("unknown command {other:?}")).into()),
            None => return Err(ConfigError("no subcommand given on the command line or in the config".into()).into()),
        },
    };
    let rendered: Rendered = match command {
        Command::Bound(a) => commands::bound(config::BoundSettings::from(a).overlay(cfg.bound), format)?,
        Command::Profile(a) => commands::profile(config::ProfileSettings::from(a).overlay(cfg.profile), format)?,
        Command::Manifold(a) => commands::manifold(config::ManifoldSettings::from(a).overlay(cfg.manifold), format)?,
        Command::Frequency(a) => commands::frequency(config::FrequencySettings::from(a).overlay(cfg.frequency), seed, format)?,
        Command::Witness(a) => commands::witness(config::WitnessSettings::from(a).overlay(cfg.witness), format)?,
    };
    for (path, body) in &rendered.side_files {
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    match cli.output.or(cfg.output) {
        Some(path) => std::fs::write(&path, &rendered.body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(rendered.body.as_bytes()).context("writing stdout")?,
    }
    Ok(())
}

/// Exit code 3 for numerical failures inside the library, 2 for everything else.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<pspectral::Error>() {
            return if e.is_numerical() { (3, "numerical") } else { (2, "input") };
        }
        if cause.downcast_ref::<ConfigError>().is_some() {
            return (2, "config");
        }
    }
    (2, "io")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = classify(&err);
            let record = serde_json::json!({
                "status": "error",
                "kind": kind,
                "exit_code": code,
                "message": format!("{err:#}"),
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}
