//! `pidcmp`: condition comparisons, grid sweeps and context-sensitivity
//! classification from CSV recordings.
//!
//! Every subcommand accepts `--config FILE`, a JSON object whose keys are
//! the long flag names in snake case (`"omit_silent": true`,
//! `"basal_ranges": "0-100,0-150"`). Flags given on the command line take
//! precedence over the file; switches are on if either turns them on.
//!
//! Exit status: 0 on success, 2 when the report carries warnings (skipped
//! units or cells, tests that could not be run), 1 on fatal errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pidcmp::analysis::{self, CcsSpec, ConditionsConfig, Family, SweepSpec, Warning};
use pidcmp::ingest::{self, BinningConfig, LevelRange, OutputCategories};
use pidcmp::{report, Method};
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "pidcmp", version, about = "Partial information decompositions of neural recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Paired control/treatment comparison over recorded units.
    Conditions(ConditionsArgs),
    /// Decompositions over sub-ranges of a simulated input grid.
    Sweep(SweepArgs),
    /// Cooperative context-sensitivity classification of grid cells.
    Ccs(CcsArgs),
}

#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConditionsArgs {
    /// Trial CSV: unit_id,condition,bin_index,mean_basal,mean_apical,spike_count.
    #[arg(long)]
    trials: Option<PathBuf>,
    /// Equal-frequency bins per input [default: 4].
    #[arg(long)]
    bins: Option<usize>,
    /// Output categories, e.g. "0,1,2+" [default: 0,1,2+].
    #[arg(long)]
    outputs: Option<String>,
    /// "all" or a comma-separated list of ibroja, idep, iccs, ipm, isx [default: all].
    #[arg(long)]
    methods: Option<String>,
    /// Test families corrected together: "uia", "components", both, or "none" [default: uia].
    #[arg(long)]
    families: Option<String>,
    /// Drop trials without spikes before analysis.
    #[arg(long)]
    #[serde(default)]
    omit_silent: bool,
    /// Also write pointwise ledgers.
    #[arg(long)]
    #[serde(default)]
    ledger: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file supplying any of the above.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SweepArgs {
    /// Grid CSV: n_basal,n_apical,spike_count.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Comma-separated basal ranges, e.g. "0-100,0-110".
    #[arg(long)]
    basal_ranges: Option<String>,
    /// Comma-separated apical ranges.
    #[arg(long)]
    apical_ranges: Option<String>,
    /// Output categories [default: 0,1-2,3-4].
    #[arg(long)]
    outputs: Option<String>,
    /// "all" or a comma-separated list of methods [default: all].
    #[arg(long)]
    methods: Option<String>,
    /// Report components in bits instead of fractions of the joint mutual information.
    #[arg(long)]
    #[serde(default)]
    bits: bool,
    /// Also write pointwise ledgers.
    #[arg(long)]
    #[serde(default)]
    ledger: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file supplying any of the above.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CcsArgs {
    /// Grid CSV: n_basal,n_apical,spike_count.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// JSON spec: basal_ranges, apical_ranges, output_categories, methods and optional thresholds.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file supplying any of the above.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    path.map_or_else(|| Ok(T::default()), read_json)
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.with_context(|| format!("--{flag} is required (on the command line or in --config)"))
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Method::ALL.to_vec());
    }
    let methods = s.split(',').map(str::parse).collect::<pidcmp::Result<Vec<Method>>>()?;
    if methods.is_empty() {
        bail!("no methods given");
    }
    Ok(methods)
}

fn parse_families(s: &str) -> Result<Vec<Family>> {
    if s.trim().eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    Ok(s.split(',').map(str::parse).collect::<pidcmp::Result<Vec<Family>>>()?)
}

fn parse_ranges(s: &str) -> Result<Vec<LevelRange>> {
    Ok(s.split(',').map(str::parse).collect::<pidcmp::Result<Vec<LevelRange>>>()?)
}

fn report_warnings(warnings: &[Warning]) -> ExitCode {
    for w in warnings {
        eprintln!("warning: {}: {}", w.subject, w.message);
    }
    if warnings.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn conditions(cli: ConditionsArgs) -> Result<ExitCode> {
    let file: ConditionsArgs = load_config(cli.config.as_deref())?;
    let trials = required(cli.trials.or(file.trials), "trials")?;
    let out = required(cli.out.or(file.out), "out")?;
    let outputs: OutputCategories = cli
        .outputs
        .or(file.outputs)
        .unwrap_or_else(|| "0,1,2+".into())
        .parse()?;
    let cfg = ConditionsConfig {
        binning: BinningConfig::new(cli.bins.or(file.bins).unwrap_or(4), outputs)?,
        methods: parse_methods(cli.methods.or(file.methods).as_deref().unwrap_or("all"))?,
        omit_silent: cli.omit_silent || file.omit_silent,
        families: parse_families(cli.families.or(file.families).as_deref().unwrap_or("uia"))?,
    };
    let records = ingest::read_trials(&trials).with_context(|| format!("reading {}", trials.display()))?;
    let r = analysis::run_conditions(&records, &cfg, cli.ledger || file.ledger)?;
    report::write_conditions(&r, &out).with_context(|| format!("writing {}", out.display()))?;
    print!("{}", report::conditions_summary(&r));
    Ok(report_warnings(&r.warnings))
}

fn sweep(cli: SweepArgs) -> Result<ExitCode> {
    let file: SweepArgs = load_config(cli.config.as_deref())?;
    let grid = required(cli.grid.or(file.grid), "grid")?;
    let out = required(cli.out.or(file.out), "out")?;
    let spec = SweepSpec {
        basal_ranges: parse_ranges(&required(cli.basal_ranges.or(file.basal_ranges), "basal-ranges")?)?,
        apical_ranges: parse_ranges(&required(cli.apical_ranges.or(file.apical_ranges), "apical-ranges")?)?,
        output_categories: cli
            .outputs
            .or(file.outputs)
            .unwrap_or_else(|| "0,1-2,3-4".into())
            .parse()?,
        methods: parse_methods(cli.methods.or(file.methods).as_deref().unwrap_or("all"))?,
        normalize: !(cli.bits || file.bits),
    };
    let records = ingest::read_grid(&grid).with_context(|| format!("reading {}", grid.display()))?;
    let r = analysis::run_sweep(&records, &spec, cli.ledger || file.ledger)?;
    report::write_sweep(&r, &out).with_context(|| format!("writing {}", out.display()))?;
    print!("{}", report::sweep_summary(&r));
    Ok(report_warnings(&r.warnings))
}

fn ccs(cli: CcsArgs) -> Result<ExitCode> {
    let file: CcsArgs = load_config(cli.config.as_deref())?;
    let grid = required(cli.grid.or(file.grid), "grid")?;
    let spec_path = required(cli.spec.or(file.spec), "spec")?;
    let out = required(cli.out.or(file.out), "out")?;
    let spec: CcsSpec = read_json(&spec_path)?;
    let records = ingest::read_grid(&grid).with_context(|| format!("reading {}", grid.display()))?;
    let r = analysis::classify_ccs(&records, &spec)?;
    report::write_ccs(&r, &out).with_context(|| format!("writing {}", out.display()))?;
    print!("{}", report::ccs_summary(&r));
    Ok(report_warnings(&r.warnings))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Conditions(a) => conditions(a),
        Command::Sweep(a) => sweep(a),
        Command::Ccs(a) => ccs(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
