use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ssus::complexity::comparison_table;
use ssus::harness::{
    oracle_check, run_monte_carlo, sweep, ExperimentConfig, OutputFormat, RunOutput,
};
use ssus::selectors::Algorithm;
use ssus::Error;

/// Monte Carlo evaluation of MU-MIMO uplink user selection.
#[derive(Debug, Parser)]
#[command(name = "ssus-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config file (flat `key = value` format).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides `run.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trials per scenario; overrides `run.trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Output format: csv or json.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<OutputFormat>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Record per-selection wall time (makes output run-dependent).
    #[arg(long, global = true)]
    wall_time: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo run over a single scenario.
    Mc,
    /// Cross product of the configured grid.
    Sweep,
    /// Normalised complexity-model table.
    Cost(CostArgs),
    /// Compare heuristics against the exhaustive optimum on small instances.
    OracleCheck,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[arg(long, default_value_t = 100)]
    users: u64,
    #[arg(long, default_value_t = 1)]
    bases: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
    antennas: Vec<u64>,
    /// Streams per row are `M / streams_divisor`.
    #[arg(long, default_value_t = 2)]
    streams_divisor: u64,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
            code: 1,
        }
    }
}

fn base_config(cli: &Cli, fallback: ExperimentConfig) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => fallback,
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(out) = &cli.out {
        cfg.output_path = Some(out.clone());
    }
    cfg.wall_time |= cli.wall_time;
    cfg.validate()?;
    Ok(cfg)
}

fn write_output(text: &str, path: Option<&PathBuf>) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn emit_run(out: &RunOutput, cfg: &ExperimentConfig) -> Result<(), Error> {
    for row in &out.report.rows {
        if let Some(reason) = &row.skipped {
            eprintln!(
                "skipped: scenario {} {}: {reason}",
                row.scenario_id, row.algorithm
            );
        }
    }
    write_output(&out.report.render(cfg.format)?, cfg.output_path.as_ref())
}

fn render_table<T: serde::Serialize>(
    rows: &[T],
    headers: &[&str],
    record: impl Fn(&T) -> Vec<String>,
    format: OutputFormat,
) -> Result<String, Error> {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows)
            .map(|s| s + "\n")
            .map_err(|e| Error::Format(e.to_string())),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| Error::Format(e.to_string());
            w.write_record(headers).map_err(err)?;
            for r in rows {
                w.write_record(record(r)).map_err(err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
        }
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn oracle_defaults() -> ExperimentConfig {
    ExperimentConfig {
        antennas: vec![4],
        users: vec![10],
        p0_dbm: vec![-90.0],
        trials: 200,
        algorithms: vec![
            Algorithm::Ssus,
            Algorithm::Sus,
            Algorithm::Gzf,
            Algorithm::McorePlus,
            Algorithm::Random,
        ],
        ..ExperimentConfig::default()
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Mc => {
            let cfg = base_config(cli, ExperimentConfig::single_default())?;
            emit_run(&run_monte_carlo(&cfg, cli.workers)?, &cfg)?;
        }
        Command::Sweep => {
            let cfg = base_config(cli, ExperimentConfig::default())?;
            emit_run(&sweep(&cfg, cli.workers)?, &cfg)?;
        }
        Command::Cost(args) => {
            let rows =
                comparison_table(args.users, args.bases, &args.antennas, args.streams_divisor)?;
            let text = render_table(
                &rows,
                &["method", "U", "M", "K", "L", "cost", "relative"],
                |r| {
                    let q = &r.query;
                    vec![
                        q.method.name().to_string(),
                        q.users.to_string(),
                        q.antennas.to_string(),
                        q.streams.to_string(),
                        q.bases.to_string(),
                        r.cost.to_string(),
                        ssus::harness::report::fmt_num(r.relative),
                    ]
                },
                cli.format.unwrap_or(OutputFormat::Csv),
            )?;
            write_output(&text, cli.out.as_ref())?;
        }
        Command::OracleCheck => {
            let cfg = base_config(cli, oracle_defaults())?;
            let rows = oracle_check(&cfg, cli.workers)?;
            let fmt = |x: Option<f64>| opt(x.map(ssus::harness::report::fmt_num));
            let text = render_table(
                &rows,
                &[
                    "scenario_id",
                    "algorithm",
                    "M",
                    "U",
                    "L",
                    "alpha",
                    "trials",
                    "mean_ratio",
                    "min_ratio",
                    "violations",
                ],
                |r| {
                    vec![
                        r.scenario_id.to_string(),
                        r.algorithm.name().to_string(),
                        r.antennas.to_string(),
                        r.users.to_string(),
                        opt(r.bases),
                        fmt(r.alpha),
                        r.trials.to_string(),
                        fmt(r.mean_ratio),
                        fmt(r.min_ratio),
                        r.violations.to_string(),
                    ]
                },
                cfg.format,
            )?;
            write_output(&text, cfg.output_path.as_ref())?;
            let violations: usize = rows.iter().map(|r| r.violations).sum();
            if violations > 0 {
                return Err(Failure {
                    kind: "oracle_violation",
                    message: format!("{violations} trial(s) scored above the exhaustive optimum"),
                    code: 3,
                });
            }
        }
    }
    Ok(())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("error[usage]: {}", one_line(first));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, one_line(&f.message));
            ExitCode::from(f.code)
        }
    }
}
