//! Reproducible experiment runner behind the CLI: validates a configuration,
//! executes the experiment inside an optional fixed-size worker pool, writes
//! results and a manifest with content digests, and returns the JSON result
//! document.
//!
//! Output files are written atomically (temp file + rename). Re-running the
//! same configuration reproduces byte-identical result files regardless of
//! the worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::broadcast::{estimate_rba, pairwise_rba, pairwise_seq};
use crate::exact::{bound_table, effective_resistance, ExactError, TransitionKernel};
use crate::graph::{Graph, GraphError, GraphSpec, Vertex};
use crate::percolation::estimate_fpp;
use crate::relations::{
    check_relation, figure2_table, quotient_r, scaling_sweep, Budget, RelationError, ScalingFit,
    SweepMetric, FIGURE2_CSV_HEADER, RELATION_CSV_HEADER, SWEEP_CSV_HEADER,
};
use crate::rng::derive_seed;
use crate::stats::StatsError;
use crate::walk::{estimate_blanket_time, estimate_cover_time, estimate_hitting_time, StartPolicy};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("no data to emit: {0}")]
    NoData(String),
}

impl HarnessError {
    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config",
            HarnessError::Io { .. } => "io",
            HarnessError::Relation(RelationError::InsufficientBudget { .. }) => "budget",
            HarnessError::Relation(_) => "relation",
            HarnessError::Graph(_) => "graph",
            HarnessError::Exact(_) => "exact",
            HarnessError::Stats(_) => "stats",
            HarnessError::NoData(_) => "no-data",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmitFormat {
    Json,
    Csv,
    PlotData,
}

/// Where the experiment's graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphSource {
    Spec(String),
    File(PathBuf),
}

impl GraphSource {
    fn load(&self, seed: u64) -> Result<Graph, HarnessError> {
        match self {
            GraphSource::Spec(s) => Ok(GraphSpec::parse(s)?.generate(seed)?),
            GraphSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|source| HarnessError::Io { path: path.clone(), source })?;
                Ok(Graph::from_edge_list(&text)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Cov,
    Blanket,
    Rba,
    RbaPair,
    SeqPair,
    Hit,
    Ufpp,
    Dfpp,
    Commute,
    Resistance,
    Gap,
    Mixing,
    QuotientR,
    Bounds,
}

impl MetricKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "cov" => MetricKind::Cov,
            "bla" | "blanket" => MetricKind::Blanket,
            "rba" => MetricKind::Rba,
            "rba-pair" => MetricKind::RbaPair,
            "seq-pair" => MetricKind::SeqPair,
            "hit" => MetricKind::Hit,
            "ufpp" => MetricKind::Ufpp,
            "dfpp" => MetricKind::Dfpp,
            "commute" => MetricKind::Commute,
            "resistance" => MetricKind::Resistance,
            "gap" => MetricKind::Gap,
            "mix" | "mixing" => MetricKind::Mixing,
            "quotient-r" => MetricKind::QuotientR,
            "bounds" => MetricKind::Bounds,
            _ => return None,
        })
    }

    fn needs_pair(&self) -> bool {
        matches!(
            self,
            MetricKind::RbaPair
                | MetricKind::SeqPair
                | MetricKind::Hit
                | MetricKind::Ufpp
                | MetricKind::Dfpp
                | MetricKind::Commute
                | MetricKind::Resistance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Experiment {
    /// Write a generated graph to an edge-list file.
    Gen { graph: GraphSource },
    /// One estimator or exact quantity on one graph.
    Metric {
        metric: MetricKind,
        graph: GraphSource,
        source: Option<Vertex>,
        target: Option<Vertex>,
        /// Tail mass for broadcast quantiles.
        quantile: Option<f64>,
        /// Tolerance for the mixing-time metric.
        eps: Option<f64>,
    },
    /// One relation-catalog check on one graph.
    Check { tag: String, graph: GraphSource },
    /// Log-log scaling sweep of one metric over sizes of a family.
    Sweep {
        family: String,
        sizes: Vec<u32>,
        metric: SweepMetric,
        polylog_correction: u32,
    },
    /// The per-family comparison table at a desk size.
    Figure2 { desk_n: u32 },
    /// Quotient R(G) versus degree for the torus circulant family at fixed
    /// n, with the analytic bound curves alongside.
    Landscape { n: u32, degrees: Vec<u32> },
}

/// A validated, fully explicit experiment description. The master seed is
/// mandatory: there is no nondeterministic default anywhere.
///
/// `out_dir` and `workers` are runtime details, not experiment identity:
/// they are excluded from the serialized config echo so result files stay
/// byte-identical across directories and worker counts. The manifest records
/// them separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub master_seed: u64,
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub emit: Vec<EmitFormat>,
    #[serde(skip)]
    pub workers: Option<usize>,
    pub cov_trials: u64,
    pub broadcast_trials: u64,
    pub fpp_trials: u64,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, master_seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        let budget = Budget::desk(master_seed);
        ExperimentConfig {
            experiment,
            master_seed,
            out_dir: out_dir.into(),
            emit: vec![EmitFormat::Json],
            workers: None,
            cov_trials: budget.cov_trials,
            broadcast_trials: budget.broadcast_trials,
            fpp_trials: budget.fpp_trials,
        }
    }

    fn budget(&self) -> Budget {
        Budget {
            cov_trials: self.cov_trials,
            broadcast_trials: self.broadcast_trials,
            fpp_trials: self.fpp_trials,
            master_seed: self.master_seed,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        for (name, v) in [
            ("cov_trials", self.cov_trials),
            ("broadcast_trials", self.broadcast_trials),
            ("fpp_trials", self.fpp_trials),
        ] {
            if v < 2 {
                return Err(HarnessError::Config(format!("{name} must be at least 2, got {v}")));
            }
        }
        match &self.experiment {
            Experiment::Sweep { sizes, .. } if sizes.len() < 4 => Err(HarnessError::Config(
                "sweep needs at least 4 sizes".into(),
            )),
            Experiment::Landscape { degrees, .. } if degrees.is_empty() => {
                Err(HarnessError::NoData("landscape needs at least one degree".into()))
            }
            Experiment::Metric { metric, source, target, .. } => {
                if metric.needs_pair() && (source.is_none() || target.is_none()) {
                    return Err(HarnessError::Config(format!(
                        "metric {metric:?} needs --source and --target"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of one run: configuration echo, version, timing, per-operation
/// seeds and emitted files with content digests. Everything except
/// `duration_ms` is reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub artifact_version: String,
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
    pub duration_ms: u64,
    pub op_seeds: BTreeMap<String, u64>,
    pub files: Vec<FileDigest>,
}

struct RunOutput {
    result: serde_json::Value,
    csv: Option<(String, Vec<String>)>, // (header, rows)
    plot: Vec<(String, String)>,        // (file name, contents)
    extra_files: Vec<(String, String)>, // e.g. generated graphs
    op_seeds: BTreeMap<String, u64>,
}

/// Execute an experiment: validate, run inside the requested worker pool,
/// write result files plus manifest, and return the manifest with the JSON
/// result document.
pub fn run(config: &ExperimentConfig) -> Result<(RunManifest, serde_json::Value), HarnessError> {
    config.validate()?;
    let started = std::time::Instant::now();

    let output = match config.workers {
        Some(workers) => {
            if workers == 0 {
                return Err(HarnessError::Config("workers must be positive".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
            pool.install(|| execute(config))?
        }
        None => execute(config)?,
    };

    std::fs::create_dir_all(&config.out_dir)
        .map_err(|source| HarnessError::Io { path: config.out_dir.clone(), source })?;

    let document = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "result": output.result,
    });
    let mut files = Vec::new();
    let json_bytes = serde_json::to_string_pretty(&document).expect("result serializes") + "\n";
    files.push(write_atomic(&config.out_dir, "results.json", json_bytes.as_bytes())?);

    if config.emit.contains(&EmitFormat::Csv) {
        if let Some((header, rows)) = &output.csv {
            let mut csv = String::from(header.as_str());
            csv.push('\n');
            for row in rows {
                csv.push_str(row);
                csv.push('\n');
            }
            files.push(write_atomic(&config.out_dir, "results.csv", csv.as_bytes())?);
        }
    }
    if config.emit.contains(&EmitFormat::PlotData) {
        if output.plot.is_empty() {
            return Err(HarnessError::NoData("experiment produced no plottable data".into()));
        }
        for (name, contents) in &output.plot {
            files.push(write_atomic(&config.out_dir, name, contents.as_bytes())?);
        }
    }
    for (name, contents) in &output.extra_files {
        files.push(write_atomic(&config.out_dir, name, contents.as_bytes())?);
    }

    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION.to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        out_dir: config.out_dir.clone(),
        workers: config.workers,
        duration_ms: started.elapsed().as_millis() as u64,
        op_seeds: output.op_seeds,
        files,
    };
    let manifest_bytes =
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_atomic(&config.out_dir, "manifest.json", manifest_bytes.as_bytes())?;

    Ok((manifest, document))
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<FileDigest, HarnessError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let io_err = |source| HarnessError::Io { path: path.clone(), source };
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, &path).map_err(io_err)?;
    let sha256 = hex_digest(bytes);
    Ok(FileDigest { path: name.to_string(), sha256 })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

fn execute(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let budget = config.budget();
    let mut op_seeds = BTreeMap::new();
    let mut seed_for = |tag: &str| {
        let s = derive_seed(config.master_seed, tag);
        op_seeds.insert(tag.to_string(), s);
        s
    };

    match &config.experiment {
        Experiment::Gen { graph } => {
            let seed = seed_for("gen");
            let g = graph.load(seed)?;
            eprintln!("generated {} (n={}, m={})", g.family_tag(), g.n(), g.m());
            let result = serde_json::json!({
                "family": g.family_tag(),
                "n": g.n(),
                "m": g.m(),
                "min_degree": g.min_degree(),
                "max_degree": g.max_degree(),
                "file": "graph.edges",
            });
            Ok(RunOutput {
                result,
                csv: None,
                plot: Vec::new(),
                extra_files: vec![("graph.edges".into(), g.to_edge_list())],
                op_seeds,
            })
        }
        Experiment::Metric { metric, graph, source, target, quantile, eps } => {
            let seed = seed_for("graph");
            let g = graph.load(seed)?;
            let result = run_metric(&g, *metric, *source, *target, *quantile, *eps, &budget, &mut seed_for)?;
            Ok(RunOutput { result, csv: None, plot: Vec::new(), extra_files: Vec::new(), op_seeds })
        }
        Experiment::Check { tag, graph } => {
            let seed = seed_for("graph");
            let g = graph.load(seed)?;
            eprintln!("checking {tag} on {}", g.family_tag());
            let report = check_relation(tag, &g, &budget)?;
            let row = report.to_csv_row();
            Ok(RunOutput {
                result: serde_json::to_value(&report).expect("report serializes"),
                csv: Some((RELATION_CSV_HEADER.to_string(), vec![row])),
                plot: Vec::new(),
                extra_files: Vec::new(),
                op_seeds,
            })
        }
        Experiment::Sweep { family, sizes, metric, polylog_correction } => {
            eprintln!("sweeping {} over {:?}", family, sizes);
            let fit = scaling_sweep(family, sizes, *metric, &budget, *polylog_correction)?;
            let plot = plot_files_for_sweep(&fit);
            Ok(RunOutput {
                result: serde_json::to_value(&fit).expect("fit serializes"),
                csv: Some((SWEEP_CSV_HEADER.to_string(), fit.to_csv_rows())),
                plot,
                extra_files: Vec::new(),
                op_seeds,
            })
        }
        Experiment::Figure2 { desk_n } => {
            eprintln!("building the family table at n ~ {desk_n}");
            let report = figure2_table(&budget, *desk_n)?;
            Ok(RunOutput {
                result: serde_json::to_value(&report).expect("report serializes"),
                csv: Some((FIGURE2_CSV_HEADER.to_string(), report.to_csv_rows())),
                plot: Vec::new(),
                extra_files: Vec::new(),
                op_seeds,
            })
        }
        Experiment::Landscape { n, degrees } => {
            let mut points = Vec::new();
            for &d in degrees {
                let spec = GraphSpec::HararyTorus { degree: d, n: *n };
                let seed = seed_for(&format!("landscape-d{d}"));
                let g = spec.generate(seed)?;
                eprintln!("landscape point d={d}");
                let r = quotient_r(&g, &budget)?;
                let nf = f64::from(*n);
                let delta = f64::from(g.min_degree());
                let lower = delta * delta / (nf * nf.ln());
                let upper = (g.m() as f64 / delta) * nf.ln();
                points.push(serde_json::json!({
                    "degree": d,
                    "quotient": r,
                    "lower_bound_curve": lower,
                    "upper_bound_curve": upper,
                }));
            }
            let dat: String = points
                .iter()
                .map(|p| {
                    format!(
                        "{} {} {} {}\n",
                        p["degree"],
                        p["quotient"]["mean"],
                        p["lower_bound_curve"],
                        p["upper_bound_curve"]
                    )
                })
                .collect();
            let plot = vec![
                ("landscape.dat".to_string(), dat),
                (
                    "plot-landscape.gnuplot".to_string(),
                    "# columns: degree, measured quotient R, lower bound curve, upper bound curve\n\
                     set logscale xy\nset xlabel 'degree'\nset ylabel 'R(G)'\n\
                     plot 'landscape.dat' u 1:2 w lp t 'measured', \\\n     'landscape.dat' u 1:3 w l t 'lower curve', \\\n     'landscape.dat' u 1:4 w l t 'upper curve'\n"
                        .to_string(),
                ),
            ];
            Ok(RunOutput {
                result: serde_json::json!({"n": n, "points": points}),
                csv: None,
                plot,
                extra_files: Vec::new(),
                op_seeds,
            })
        }
    }
}

fn plot_files_for_sweep(fit: &ScalingFit) -> Vec<(String, String)> {
    let dat_name = format!("sweep-{}-{}.dat", fit.family.replace(':', "_"), fit.metric.name());
    let dat: String = fit
        .sizes
        .iter()
        .zip(&fit.values)
        .map(|(n, v)| format!("{n} {v}\n"))
        .collect();
    let script = format!(
        "# columns: n, {}\nset logscale xy\nset xlabel 'n'\nset ylabel '{}'\n\
         plot '{dat_name}' u 1:2 w lp t '{} (slope {:.3})'\n",
        fit.metric.name(),
        fit.metric.name(),
        fit.family,
        fit.exponent,
    );
    vec![(dat_name, dat), ("plot-sweep.gnuplot".to_string(), script)]
}

#[allow(clippy::too_many_arguments)]
fn run_metric(
    g: &Graph,
    metric: MetricKind,
    source: Option<Vertex>,
    target: Option<Vertex>,
    quantile: Option<f64>,
    eps: Option<f64>,
    budget: &Budget,
    seed_for: &mut dyn FnMut(&str) -> u64,
) -> Result<serde_json::Value, HarnessError> {
    let check_vertex = |v: Vertex| -> Result<Vertex, HarnessError> {
        if v < g.n() {
            Ok(v)
        } else {
            Err(HarnessError::Config(format!("vertex {v} out of range (n = {})", g.n())))
        }
    };
    let pair = || -> Result<(Vertex, Vertex), HarnessError> {
        let s = check_vertex(source.expect("validated"))?;
        let t = check_vertex(target.expect("validated"))?;
        if s == t {
            return Err(HarnessError::Config("source and target must differ".into()));
        }
        Ok((s, t))
    };
    eprintln!("metric {metric:?} on {}", g.family_tag());
    fn val<T: Serialize>(x: T) -> serde_json::Value {
        serde_json::to_value(x).expect("metric result serializes")
    }
    let value = match metric {
        MetricKind::Cov => val(estimate_cover_time(
            g,
            budget.cov_trials,
            seed_for("metric-cov"),
            StartPolicy::WorstCaseScan,
        )),
        MetricKind::Blanket => val(estimate_blanket_time(
            g,
            budget.cov_trials,
            seed_for("metric-bla"),
            StartPolicy::WorstCaseScan,
        )),
        MetricKind::Rba => val(estimate_rba(
            g,
            budget.broadcast_trials,
            seed_for("metric-rba"),
            StartPolicy::WorstCaseScan,
            quantile,
        )?),
        MetricKind::RbaPair => {
            let (s, t) = pair()?;
            val(pairwise_rba(g, s, t, budget.broadcast_trials, seed_for("metric-rba-pair"), quantile)?)
        }
        MetricKind::SeqPair => {
            let (s, t) = pair()?;
            val(pairwise_seq(g, s, t, budget.broadcast_trials, seed_for("metric-seq-pair")))
        }
        MetricKind::Hit => {
            let (s, t) = pair()?;
            val(estimate_hitting_time(g, s, t, budget.cov_trials, seed_for("metric-hit")))
        }
        MetricKind::Ufpp | MetricKind::Dfpp => {
            let (s, t) = pair()?;
            let directed = metric == MetricKind::Dfpp;
            val(estimate_fpp(g, s, t, directed, budget.fpp_trials, seed_for("metric-fpp")))
        }
        MetricKind::Commute => {
            let (s, t) = pair()?;
            let kernel = TransitionKernel::plain(g)?;
            serde_json::json!({"commute": kernel.commute_time(s, t)?})
        }
        MetricKind::Resistance => {
            let (s, t) = pair()?;
            serde_json::json!({"resistance": effective_resistance(g, s, t)?})
        }
        MetricKind::Gap => {
            let kernel = TransitionKernel::plain(g)?;
            val(kernel.spectral())
        }
        MetricKind::Mixing => {
            let kernel =
                if g.is_bipartite() { TransitionKernel::lazy(g)? } else { TransitionKernel::plain(g)? };
            let eps = eps.unwrap_or((-1.0f64).exp());
            val(kernel.mixing_time(eps)?)
        }
        MetricKind::QuotientR => val(quotient_r(g, budget)?),
        MetricKind::Bounds => {
            let kernel =
                if g.is_bipartite() { TransitionKernel::lazy(g)? } else { TransitionKernel::plain(g)? };
            let far = g.eccentricity(0).1;
            val(bound_table(g, &kernel, &[(0, far)])?)
        }
    };
    Ok(value)
}
