use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use phylomemy::config::{BuildConfig, Lambdas};
use phylomemy::corpus::{parse_date, CorpusFormat, PeriodUnit};
use phylomemy::fields::{ClusteringMode, Symmetrization};
use phylomemy::inspect;
use phylomemy::matching::MatchPolicy;
use phylomemy::pipeline::run_build;
use phylomemy::PhyloExport;

#[derive(Parser)]
#[command(
    name = "phylomemy",
    version,
    about = "Reconstruct and project phylomemies from timestamped corpora"
)]
struct Cli {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full reconstruction and write the export(s).
    Build(BuildArgs),
    /// Summarize an export, a branch (by id) or a term (by label).
    Inspect {
        export: PathBuf,
        query: Option<String>,
    },
    /// Check a config file without building anything.
    Validate { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Unit {
    Week,
    Month,
    Year,
}

#[derive(Clone, Copy, ValueEnum)]
enum Clustering {
    Cliques,
    Itemsets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Best,
    AllAboveFloor,
}

#[derive(Clone, Copy, ValueEnum)]
enum Symmetry {
    Max,
    Min,
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct BuildArgs {
    /// TOML config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    rootlist: Option<PathBuf>,
    #[arg(long, value_enum)]
    period_unit: Option<Unit>,
    #[arg(long)]
    period_length: Option<u32>,
    /// First period start, YYYY-MM-DD.
    #[arg(long)]
    period_origin: Option<String>,
    #[arg(long)]
    edge_threshold: Option<f64>,
    #[arg(long, value_enum)]
    symmetrization: Option<Symmetry>,
    #[arg(long, value_enum)]
    clustering: Option<Clustering>,
    /// Minimum support for itemset clustering.
    #[arg(long, default_value_t = 2)]
    min_support: u32,
    #[arg(long)]
    keep_singletons: bool,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, value_enum)]
    policy: Option<Policy>,
    /// Level of observation; repeat for one export per value.
    #[arg(short, long = "lambda")]
    lambdas: Vec<f64>,
    #[arg(short = 'k', long)]
    min_periods: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write similarity graphs, kinship links and the rise trace.
    #[arg(long)]
    diagnostics: bool,
}

impl BuildArgs {
    fn into_config(self) -> Result<BuildConfig> {
        let mut config = match &self.config {
            Some(path) => BuildConfig::load(path)?,
            None => {
                let (Some(corpus), Some(rootlist), Some(output)) =
                    (&self.corpus, &self.rootlist, &self.output)
                else {
                    bail!("without --config, --corpus, --rootlist and --output are required");
                };
                BuildConfig::new(corpus, rootlist, output)
            }
        };
        if let Some(p) = self.corpus {
            config.corpus.path = p;
        }
        if let Some(p) = self.rootlist {
            config.corpus.rootlist = p;
        }
        if let Some(f) = self.format {
            config.corpus.format = match f {
                Format::Csv => CorpusFormat::Csv,
                Format::Jsonl => CorpusFormat::Jsonl,
            };
        }
        if let Some(u) = self.period_unit {
            config.periods.unit = match u {
                Unit::Week => PeriodUnit::Week,
                Unit::Month => PeriodUnit::Month,
                Unit::Year => PeriodUnit::Year,
            };
        }
        if let Some(n) = self.period_length {
            config.periods.length = n;
        }
        if let Some(d) = &self.period_origin {
            let Some(date) = parse_date(d) else {
                bail!("--period-origin is not a YYYY-MM-DD date: {d}");
            };
            config.periods.origin = Some(date);
        }
        if let Some(t) = self.edge_threshold {
            config.fields.edge_threshold = t;
        }
        if let Some(s) = self.symmetrization {
            config.fields.symmetrization = match s {
                Symmetry::Max => Symmetrization::Max,
                Symmetry::Min => Symmetrization::Min,
            };
        }
        if let Some(c) = self.clustering {
            config.fields.clustering = match c {
                Clustering::Cliques => ClusteringMode::Cliques,
                Clustering::Itemsets => ClusteringMode::Itemsets {
                    min_support: self.min_support,
                },
            };
        }
        if self.keep_singletons {
            config.fields.keep_singletons = true;
        }
        if let Some(w) = self.window {
            config.matching.window = w;
        }
        if let Some(p) = self.policy {
            config.matching.policy = match p {
                Policy::Best => MatchPolicy::Best,
                Policy::AllAboveFloor => MatchPolicy::AllAboveFloor,
            };
        }
        match self.lambdas.len() {
            0 => {}
            1 => config.sea_level.lambda = Lambdas::One(self.lambdas[0]),
            _ => config.sea_level.lambda = Lambdas::Many(self.lambdas),
        }
        if let Some(k) = self.min_periods {
            config.projection.min_periods = k;
        }
        if let Some(o) = self.output {
            config.output.path = o;
        }
        if self.diagnostics {
            config.output.diagnostics = true;
        }
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build(args) => {
            let config = args.into_config()?;
            for path in run_build(&config)? {
                println!("{}", path.display());
            }
        }
        Command::Inspect { export, query } => {
            let export = PhyloExport::read(&export)
                .with_context(|| format!("reading {}", export.display()))?;
            let report = match query {
                Some(q) => inspect::inspect(&export, &q)?,
                None => inspect::summary(&export),
            };
            print!("{report}");
        }
        Command::Validate { config } => {
            let problems = match BuildConfig::load(&config) {
                Ok(c) => c.problems(),
                Err(e) => vec![e.to_string()],
            };
            if problems.is_empty() {
                println!("ok");
            } else {
                for p in &problems {
                    println!("error: {p}");
                }
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
