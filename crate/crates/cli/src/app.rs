//! Command-line front end. `main` only parses arguments and maps errors to
//! exit codes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use qrelay::analytics::simulate_hom;
use qrelay::protocols::ExperimentConfig;

use crate::emit::format_sig;
use crate::sweep::check_convergence;
use crate::{
    compare_rates, emit, emit_fig3, load_config, regression_check, run_sweep, CliError,
    EmitterRegistry, FixtureSet, PresetRegistry, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "qrelay",
    version,
    about = "Corrected versus direct entanglement distribution"
)]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration (implies `--preset custom`).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Photon cap per source; must be at least 4.
    #[arg(long, global = true, value_name = "N")]
    nmax: Option<u32>,
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Output format; `sweep` writes every format when omitted.
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the corrected and direct channels over a loss × η grid.
    Sweep {
        #[arg(long, value_delimiter = ',', value_name = "L,...")]
        losses: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', value_name = "ETA,...")]
        etas: Option<Vec<f64>>,
        /// Rerun with two more photons per source and fail on drift.
        #[arg(long)]
        convergence: bool,
    },
    /// Compare fixture density matrices with the reported concurrences.
    Check {
        /// Directory holding the fixture files; the shipped set otherwise.
        #[arg(long, value_name = "DIR")]
        fixtures: Option<PathBuf>,
    },
    /// HOM visibilities implied by the configured overlaps.
    Hom,
    /// Model herald probabilities against the published rates.
    Rates {
        #[arg(long, value_name = "DIR")]
        fixtures: Option<PathBuf>,
    },
}

fn resolve_config(common: &Common) -> Result<ExperimentConfig, CliError> {
    let file = common.config.as_deref().map(load_config).transpose()?;
    let name = match (&common.preset, &file) {
        (Some(p), _) => p.as_str(),
        (None, Some(_)) => "custom",
        (None, None) => "measured",
    };
    let mut config = PresetRegistry::with_builtins().resolve(name, file.as_ref())?;
    if let Some(n) = common.nmax {
        config.n_max = n;
        config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(config)
}

fn fixtures(dir: Option<&Path>) -> Result<FixtureSet, CliError> {
    match dir {
        Some(d) => FixtureSet::load_dir(d),
        None => Ok(FixtureSet::builtin()),
    }
}

fn sweep(
    common: &Common,
    losses: Option<Vec<f64>>,
    etas: Option<Vec<f64>>,
    convergence: bool,
) -> Result<(), CliError> {
    let registry = EmitterRegistry::with_builtins();
    let formats = match &common.format {
        Some(f) => vec![registry.get(f)?],
        None => registry
            .names()
            .into_iter()
            .map(|n| registry.get(n))
            .collect::<Result<_, _>>()?,
    };
    let mut spec = SweepSpec::new(resolve_config(common)?);
    if let Some(l) = losses {
        spec.losses = l;
    }
    if let Some(e) = etas {
        spec.etas = e;
    }
    let rows = run_sweep(&spec, common.jobs)?;
    if convergence {
        let change = check_convergence(&spec, &rows, common.jobs)?;
        println!(
            "largest concurrence change at n_max + 2: {}",
            format_sig(change)
        );
    }
    std::fs::create_dir_all(&common.out).map_err(|source| CliError::Write {
        path: common.out.clone(),
        source,
    })?;
    for e in formats {
        println!("{}", emit(&rows, e, &common.out)?.display());
    }
    for p in emit_fig3(&rows, &common.out)? {
        println!("{}", p.display());
    }
    info!("{} rows", rows.len());
    Ok(())
}

fn check(dir: Option<&Path>) -> Result<(), CliError> {
    let report = regression_check(&fixtures(dir)?)?;
    for c in &report.comparisons {
        println!(
            "{:<20} computed {:.5}  reported {} ± {}  {}",
            c.name,
            c.computed,
            c.reported,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    report.into_result().map(|_| ())
}

fn hom(common: &Common) -> Result<(), CliError> {
    let config = resolve_config(common)?;
    for (stage, xi) in [("amplifier", config.xi_ha), ("swap", config.xi_es)] {
        let r = simulate_hom(xi)?;
        println!(
            "{stage:<9} xi {}  coincidence {} (baseline {})  visibility {}",
            format_sig(xi),
            format_sig(r.coincidence_min),
            format_sig(r.coincidence_baseline),
            format_sig(r.visibility()?)
        );
    }
    Ok(())
}

fn rates(common: &Common, dir: Option<&Path>) -> Result<(), CliError> {
    let config = resolve_config(common)?;
    let table = fixtures(dir)?
        .rates
        .ok_or_else(|| CliError::Config("no rate fixture found".to_string()))?;
    let rows = compare_rates(&config, &table)?;
    if common.format.as_deref() == Some("json") {
        let text =
            serde_json::to_string_pretty(&rows).map_err(|e| CliError::Numerical(e.to_string()))?;
        println!("{text}");
        return Ok(());
    }
    println!("loss eta p_ready p_ready_reported p_sent p_sent_reported operation_ratio");
    for r in &rows {
        println!(
            "{} {} {} {} {} {} {}",
            format_sig(r.loss),
            format_sig(r.eta),
            format_sig(r.model.p_channel_ready),
            format_sig(r.reported_ready),
            format_sig(r.model.p_state_sent),
            format_sig(r.reported_sent),
            format_sig(r.model.operation_ratio())
        );
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep {
            losses,
            etas,
            convergence,
        } => sweep(&cli.common, losses, etas, convergence),
        Command::Check { fixtures } => check(fixtures.as_deref()),
        Command::Hom => hom(&cli.common),
        Command::Rates { fixtures } => rates(&cli.common, fixtures.as_deref()),
    }
}
