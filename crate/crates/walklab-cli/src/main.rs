//! Command-line entry point: seeded, reproducible experiment runs.
//!
//! Progress goes to stderr; the JSON result document goes to stdout and to
//! files under --out together with a manifest carrying content digests.
//! Every run requires an explicit --seed. The worker count (--workers or
//! WALKLAB_WORKERS) never affects results, only wall-clock time.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use walklab::harness::{
    run, EmitFormat, Experiment, ExperimentConfig, GraphSource, HarnessError, MetricKind,
};
use walklab::relations::SweepMetric;

#[derive(Parser)]
#[command(name = "walklab", version, about = "Graph-process laboratory: random walks, push broadcast, percolation and the relations between them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Master seed; all per-operation seeds derive from it.
    #[arg(long)]
    seed: u64,
    /// Output directory for results.json, results.csv and the manifest.
    #[arg(long, default_value = "walklab-out")]
    out: PathBuf,
    /// Result file format ("json" always written; "csv" adds results.csv).
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Worker-pool size override (WALKLAB_WORKERS also works). Results do
    /// not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Trial count applied to every estimator class in this run.
    #[arg(long)]
    trials: Option<u64>,
    /// Cover/blanket trials (overrides --trials for that class).
    #[arg(long)]
    cov_trials: Option<u64>,
    /// Broadcast trials.
    #[arg(long)]
    broadcast_trials: Option<u64>,
    /// Percolation trials.
    #[arg(long)]
    fpp_trials: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph family spec, e.g. "cycle:n=64" or "random-regular:d=3,n=64".
    #[arg(long, conflicts_with = "graph_file")]
    graph: Option<String>,
    /// Edge-list file ("n m" header then one "u v" line per edge).
    #[arg(long)]
    graph_file: Option<PathBuf>,
}

impl GraphArgs {
    fn source(&self) -> Result<GraphSource, String> {
        match (&self.graph, &self.graph_file) {
            (Some(spec), None) => Ok(GraphSource::Spec(spec.clone())),
            (None, Some(path)) => Ok(GraphSource::File(path.clone())),
            _ => Err("exactly one of --graph or --graph-file is required".into()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge-list file.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run one estimator or exact computation on one graph.
    Metric {
        /// cov | bla | rba | rba-pair | seq-pair | hit | ufpp | dfpp |
        /// commute | resistance | gap | mix | quotient-r | bounds
        #[arg(long)]
        metric: String,
        #[command(flatten)]
        graph: GraphArgs,
        /// Source vertex for pair metrics.
        #[arg(long)]
        source: Option<u32>,
        /// Target vertex for pair metrics.
        #[arg(long)]
        target: Option<u32>,
        /// Tail mass p for broadcast quantiles (reports the (1-p)-quantile).
        #[arg(long)]
        quantile: Option<f64>,
        /// L1 tolerance for the mixing-time metric (default 1/e).
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check one relation from the catalog on one graph.
    Check {
        /// Relation tag, e.g. thm2, cor12, lemma7.
        #[arg(long)]
        tag: String,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Log-log scaling sweep of a metric across sizes of one family.
    Sweep {
        /// Family spec without its size argument, e.g. "cycle" or
        /// "random-regular:d=8".
        #[arg(long)]
        family: String,
        /// Comma-separated sizes, at least 4, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u32>,
        /// cov | rba | gap-inverse | ratio
        #[arg(long)]
        metric: String,
        /// Divide out (ln n)^k before the corrected exponent fit.
        #[arg(long, default_value_t = 0)]
        polylog: u32,
        /// Also emit two-column plot data plus a gnuplot stub.
        #[arg(long)]
        plot_data: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The eight-family comparison table (cover, broadcast, spectral gap).
    Figure2 {
        /// Desk-scale size the families are instantiated near.
        #[arg(long, default_value_t = 64)]
        size: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Quotient R(G) vs degree for the torus circulant family at fixed n,
    /// with analytic bound curves; emits plot data.
    Landscape {
        #[arg(long)]
        n: u32,
        /// Comma-separated degrees.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn build_config(
    experiment: Experiment,
    common: &CommonArgs,
    extra_emit: &[EmitFormat],
) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(experiment, common.seed, &common.out);
    if let Some(t) = common.trials {
        config.cov_trials = t;
        config.broadcast_trials = t;
        config.fpp_trials = t;
    }
    if let Some(t) = common.cov_trials {
        config.cov_trials = t;
    }
    if let Some(t) = common.broadcast_trials {
        config.broadcast_trials = t;
    }
    if let Some(t) = common.fpp_trials {
        config.fpp_trials = t;
    }
    if common.format == FormatArg::Csv {
        config.emit.push(EmitFormat::Csv);
    }
    config.emit.extend_from_slice(extra_emit);
    config.workers = common.workers.or_else(|| {
        std::env::var("WALKLAB_WORKERS").ok().and_then(|w| w.parse().ok())
    });
    config
}

fn config_error(message: String) -> HarnessError {
    HarnessError::Config(message)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(cli);
    match result {
        Ok(document) => {
            println!("{}", serde_json::to_string_pretty(&document).expect("document serializes"));
            ExitCode::SUCCESS
        }
        Err(err) => {
            let record = serde_json::json!({
                "schema_version": walklab::harness::SCHEMA_VERSION,
                "error": { "kind": err.kind(), "message": err.to_string() },
            });
            println!("{}", serde_json::to_string_pretty(&record).expect("error serializes"));
            eprintln!("error: {err}");
            match err.kind() {
                "config" => ExitCode::from(2),
                "budget" => ExitCode::from(3),
                "io" => ExitCode::from(4),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<serde_json::Value, HarnessError> {
    let (config,) = match cli.command {
        Command::Gen { graph, common } => {
            let source = graph.source().map_err(config_error)?;
            (build_config(Experiment::Gen { graph: source }, &common, &[]),)
        }
        Command::Metric { metric, graph, source, target, quantile, eps, common } => {
            let kind = MetricKind::parse(&metric)
                .ok_or_else(|| config_error(format!("unknown metric '{metric}'")))?;
            let graph = graph.source().map_err(config_error)?;
            (
                build_config(
                    Experiment::Metric { metric: kind, graph, source, target, quantile, eps },
                    &common,
                    &[],
                ),
            )
        }
        Command::Check { tag, graph, common } => {
            let graph = graph.source().map_err(config_error)?;
            (build_config(Experiment::Check { tag, graph }, &common, &[]),)
        }
        Command::Sweep { family, sizes, metric, polylog, plot_data, common } => {
            let metric = SweepMetric::parse(&metric)
                .ok_or_else(|| config_error(format!("unknown sweep metric '{metric}'")))?;
            let extra = if plot_data { vec![EmitFormat::PlotData] } else { vec![] };
            (
                build_config(
                    Experiment::Sweep { family, sizes, metric, polylog_correction: polylog },
                    &common,
                    &extra,
                ),
            )
        }
        Command::Figure2 { size, common } => {
            (build_config(Experiment::Figure2 { desk_n: size }, &common, &[]),)
        }
        Command::Landscape { n, degrees, common } => (
            build_config(
                Experiment::Landscape { n, degrees },
                &common,
                &[EmitFormat::PlotData],
            ),
        ),
    };
    let (_manifest, document) = run(&config)?;
    Ok(document)
}
