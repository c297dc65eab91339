mod args;
mod commands;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use cyclofloc::inference::CalibrationCache;
use cyclofloc::pipeline::RunManifest;

fn seed_of(cmd: &Command) -> Option<u64> {
    Some(match cmd {
        Command::Simulate(a) => a.seed,
        Command::Measure(a) if a.d.is_none() => return None,
        Command::Measure(a) => a.seed,
        Command::Test(a) => a.seed,
        Command::Identify(a) => a.seed,
        Command::Fit(a) => a.seed,
        Command::Replicate(a) => a.seed,
    })
}

fn out_of(cmd: &Command) -> &std::path::Path {
    match cmd {
        Command::Simulate(a) => &a.output.out,
        Command::Measure(a) => &a.output.out,
        Command::Test(a) => &a.output.out,
        Command::Identify(a) => &a.output.out,
        Command::Fit(a) => &a.output.out,
        Command::Replicate(a) => &a.output.out,
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let cache = match (&cli.cache_dir, cli.no_cache) {
        (_, true) => CalibrationCache::disabled(),
        (Some(dir), false) => CalibrationCache::at(dir),
        (None, false) => CalibrationCache::from_env(),
    };

    let outcome = match &cli.command {
        Command::Simulate(a) => commands::simulate(a)?,
        Command::Measure(a) => commands::measure(a)?,
        Command::Test(a) => commands::test(a, &cache)?,
        Command::Identify(a) => commands::identify(a, &cache)?,
        Command::Fit(a) => commands::fit(a, &cache)?,
        Command::Replicate(a) => commands::replicate(a, &cache)?,
    };

    let params = serde_json::to_value(&cli.command)?;
    let name = params["command"].as_str().unwrap_or_default().to_string();
    let mut manifest = RunManifest::new(&name, seed_of(&cli.command), params);
    manifest.inputs = outcome.inputs;
    manifest.outputs = outcome.outputs;
    manifest.threads = Some(rayon::current_num_threads());
    manifest.write(&RunManifest::path_for(out_of(&cli.command)))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
