//! Command-line driver: `simulate`, `sweep` and `validate`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_db, Axis, ConfigFile, Manifest, SvmSettings, SweepSettings};
use crate::estimators::EstimatorKind;
use crate::harness::{
    results_csv, run_scenario, sweep, validate_grid, validate_grid_csv, Scenario, SweepPoint,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ofdm-lssvm", version, about = "Pilot-aided OFDM channel estimation under impulse noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario.
    Simulate(CommonArgs),
    /// Run a scenario at several SNR or SIR levels.
    Sweep(SweepArgs),
    /// Grid-search the LS-SVM hyperparameters on held-out pilots.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML) or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
    /// Comma-separated subset of ls-linear, ls-svm, oracle.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Option<Vec<EstimatorKind>>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// snr_db or sir_db.
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Comma-separated levels in dB, e.g. `-10,-5,0,5,10`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_db)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    Sweep,
    Validate,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
            Self::Validate => "validate",
        }
    }
}

/// Parsed command line, before merging with the scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: CommandKind,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub axis: Option<Axis>,
    pub values: Option<Vec<f64>>,
    pub estimators: Option<Vec<EstimatorKind>>,
    pub frames: Option<usize>,
    pub quiet: bool,
}

impl From<Cli> for CliConfig {
    fn from(cli: Cli) -> Self {
        let (command, common, axis, values) = match cli.command {
            Command::Simulate(c) => (CommandKind::Simulate, c, None, None),
            Command::Validate(c) => (CommandKind::Validate, c, None, None),
            Command::Sweep(s) => (CommandKind::Sweep, s.common, s.axis, s.values),
        };
        Self {
            command,
            config_path: common.config,
            output_dir: common.output,
            seed: common.seed,
            axis,
            values,
            estimators: common.estimators,
            frames: common.frames,
            quiet: common.quiet,
        }
    }
}

impl clap::ValueEnum for EstimatorKind {
    fn value_variants<'a>() -> &'a [Self] {
        &EstimatorKind::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.as_str()))
    }
}

impl clap::ValueEnum for Axis {
    fn value_variants<'a>() -> &'a [Self] {
        &[Axis::SnrDb, Axis::SirDb]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.as_str()))
    }
}

/// Loads the scenario named by `cli` and applies its flag overrides.
pub fn resolve(cli: &CliConfig) -> Result<ConfigFile> {
    let mut cfg = match &cli.config_path {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(frames) = cli.frames {
        cfg.run.frames = frames;
    }
    if let Some(est) = &cli.estimators {
        cfg.run.estimators = est.clone();
    }
    if cli.command == CommandKind::Sweep {
        let axis = cli
            .axis
            .or(cfg.sweep.as_ref().map(|s| s.axis))
            .ok_or_else(|| Error::config("sweep.axis", "no sweep axis given (use --axis or sweep.axis)"))?;
        let values = cli
            .values
            .clone()
            .or(cfg.sweep.as_ref().map(|s| s.values.clone()))
            .ok_or_else(|| Error::config("sweep.values", "no sweep values given (use --values or sweep.values)"))?;
        cfg.sweep = Some(SweepSettings { axis, values });
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `argv` (program name first) and resolves the scenario.
pub fn parse_and_validate<I, T>(argv: I) -> Result<(CliConfig, ConfigFile)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Usage(e.to_string()))?;
    let cli = CliConfig::from(cli);
    let cfg = resolve(&cli)?;
    Ok((cli, cfg))
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub written: Vec<PathBuf>,
    /// Failed sweep points, one description each.
    pub failures: Vec<String>,
}

fn write(dir: &Path, name: &str, contents: &str, report: &mut Report) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    report.written.push(path);
    Ok(())
}

fn log(cli: &CliConfig, msg: impl AsRef<str>) {
    if !cli.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

/// Executes a resolved command and writes its outputs.
pub fn execute(cli: &CliConfig, cfg: &ConfigFile) -> Result<Report> {
    std::fs::create_dir_all(&cli.output_dir).map_err(|source| Error::Io {
        path: cli.output_dir.clone(),
        source,
    })?;
    let scenario = Scenario::from_config(cfg);
    let mut report = Report::default();
    let mut manifest_cfg = cfg.clone();
    match cli.command {
        CommandKind::Simulate => {
            let point = SweepPoint::single(run_scenario(&scenario));
            summarize(cli, &point);
            if let Err(e) = &point.outcome {
                report.failures.push(e.to_string());
            }
            write(&cli.output_dir, "results.csv", &results_csv(&[point]), &mut report)?;
        }
        CommandKind::Sweep => {
            let sw = cfg.sweep.as_ref().expect("resolve fills the sweep section");
            let points = sweep(&scenario, sw.axis, &sw.values)?;
            for p in &points {
                summarize(cli, p);
                if let Err(e) = &p.outcome {
                    report.failures.push(format!("{} = {}: {e}", sw.axis, p.value));
                }
            }
            write(&cli.output_dir, "results.csv", &results_csv(&points), &mut report)?;
        }
        CommandKind::Validate => {
            let r = validate_grid(&scenario, &cfg.validate)?;
            log(
                cli,
                format!(
                    "best gamma={} c={} rbf_sigma={} held-out mse={:.4e}",
                    r.best.gamma, r.best.c, r.best.rbf_sigma, r.best_mse
                ),
            );
            write(&cli.output_dir, "validate_grid.csv", &validate_grid_csv(&r), &mut report)?;
            manifest_cfg.svm = SvmSettings::fixed(&r.best);
        }
    }
    let manifest = Manifest::new(cli.command.as_str(), manifest_cfg);
    write(&cli.output_dir, "manifest.json", &manifest.to_json(), &mut report)?;
    Ok(report)
}

fn summarize(cli: &CliConfig, p: &SweepPoint) {
    let label = match p.axis {
        Some(a) => format!("{a} = {}", p.value),
        None => "run".to_string(),
    };
    match &p.outcome {
        Ok(r) => {
            let parts: Vec<String> = r
                .estimators
                .iter()
                .map(|e| format!("{} ber={:.3e} mse={:.3e}", e.kind, e.ber(), e.mse()))
                .collect();
            log(
                cli,
                format!(
                    "{label}: {} (snr {:.2} dB, sir {:.2} dB, {:.1} s)",
                    parts.join(", "),
                    r.measured_snr_db,
                    r.measured_sir_db,
                    r.wall_time.as_secs_f64()
                ),
            );
        }
        Err(e) => log(cli, format!("{label}: failed: {e}")),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => CliConfig::from(c),
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&cli, &cfg) {
        Ok(report) if report.failures.is_empty() => 0,
        Ok(report) => {
            eprintln!("{} run(s) failed:", report.failures.len());
            for f in &report.failures {
                eprintln!("  {f}");
            }
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("ofdm-lssvm".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn seed_override() {
        let (cli, cfg) = parse_and_validate(argv("simulate --seed 7 --frames 3")).unwrap();
        assert_eq!(cli.command, CommandKind::Simulate);
        assert_eq!(cfg.run.seed, 7);
        assert_eq!(cfg.run.frames, 3);
    }

    #[test]
    fn sweep_values_accept_negative_levels() {
        let (cli, cfg) = parse_and_validate(argv("sweep --axis sir_db --values -10,-5,0,5,10")).unwrap();
        assert_eq!(cli.values.as_deref(), Some(&[-10.0, -5.0, 0.0, 5.0, 10.0][..]));
        let sw = cfg.sweep.unwrap();
        assert_eq!(sw.axis, Axis::SirDb);
        assert_eq!(sw.values.len(), 5);
    }

    #[test]
    fn sweep_needs_an_axis() {
        match parse_and_validate(argv("sweep --values 1,2")) {
            Err(Error::Config { key, .. }) => assert_eq!(key.as_deref(), Some("sweep.axis")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn estimator_names_are_checked() {
        let (_, cfg) = parse_and_validate(argv("simulate --estimators oracle,ls-svm")).unwrap();
        assert_eq!(cfg.run.estimators, vec![EstimatorKind::Oracle, EstimatorKind::LsSvm]);
        assert!(matches!(
            parse_and_validate(argv("simulate --estimators ls")),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn missing_config_names_the_path() {
        let err = parse_and_validate(argv("simulate --config /nonexistent/eva.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/eva.toml"), "{err}");
    }
}
