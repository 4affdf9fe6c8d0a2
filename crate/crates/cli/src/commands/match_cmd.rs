use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use neugn_graph_core::{LabeledGraph, Match};
use neugn_match_engine::{enumerate, EngineConfig, EnumerationStats, RankingMode};
use neugn_neural_nav::{load_model, ModelParams};

use crate::common::{load_graph_arg, parse_mode, parse_termination, CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Data graph file
    #[arg(long)]
    pub graph: PathBuf,
    /// Query set directory (from gen-queries)
    #[arg(long)]
    pub queries: PathBuf,
    /// Ranking mode: baseline, neugn, or oracle
    #[arg(long, default_value = "baseline")]
    pub mode: String,
    /// Navigator model file (required for --mode neugn)
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Navigation depth cap
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Termination policy: all, first, time:<s>, count:<n>
    #[arg(long, default_value = "all")]
    pub terminate: String,
    /// Per-query metrics CSV (stdout when omitted)
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Directory for per-query match dumps
    #[arg(long)]
    pub matches: Option<PathBuf>,
    /// Disable frontier-batched navigator evaluation
    #[arg(long, default_value_t = false)]
    pub no_batch: bool,
    /// Worker threads across queries (1 = reproducible serial mode)
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

pub fn run(args: Args) -> CliResult {
    let mode = parse_mode(&args.mode)?;
    let termination = parse_termination(&args.terminate)?;
    if mode == RankingMode::Neural && args.model.is_none() {
        return Err(CliError::usage("--mode neugn requires --model"));
    }
    if args.jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }

    let mut manifest = RunManifest::start("match");
    let graph = load_graph_arg(&args.graph)?;
    let set = neugn_graph_core::load_query_set(&args.queries)?;
    let model = match &args.model {
        Some(path) => Some(load_model(path)?),
        None => None,
    };
    if let Some(model) = &model {
        if model.hp.vocab != graph.vertex_count() {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "model vocabulary {} does not match graph vertex count {}",
                model.hp.vocab,
                graph.vertex_count()
            )));
        }
    }

    let cfg = EngineConfig {
        mode,
        navigation_depth: args.depth,
        termination,
        batch_navigation: !args.no_batch,
    };
    let collect = args.matches.is_some();
    let runs = run_query_set(&set.queries, &graph, &cfg, model.as_ref(), collect, args.jobs)?;

    let mut csv = String::new();
    csv.push_str(METRICS_HEADER);
    csv.push('\n');
    for (query_id, run) in runs.iter().enumerate() {
        csv.push_str(&metrics_row(query_id, mode, &run.stats));
        csv.push('\n');
    }
    match &args.metrics {
        Some(path) => {
            fs::write(path, &csv)?;
            manifest.record("metrics", path.display());
        }
        None => print!("{csv}"),
    }

    if let Some(dir) = &args.matches {
        fs::create_dir_all(dir)?;
        for (query_id, run) in runs.iter().enumerate() {
            let dump = run.matches.as_ref().expect("collected matches");
            write_match_dump(dump, &dir.join(format!("matches_{query_id}.txt")))?;
        }
        manifest.record("matches", dir.display());
    }

    if let Some(path) = &args.metrics {
        manifest.record("graph", args.graph.display());
        manifest.record("queries", args.queries.display());
        manifest.record("mode", mode.as_str());
        manifest.record("depth", args.depth);
        manifest.record("terminate", &args.terminate);
        manifest.record("batch", !args.no_batch);
        manifest.record("jobs", args.jobs);
        if let Some(model) = &args.model {
            manifest.record("model", model.display());
        }
        manifest.write(&path.with_extension("manifest"))?;
    }
    Ok(())
}

pub(crate) const METRICS_HEADER: &str =
    "query_id,mode,fms,total_steps,matches,elapsed_ms,nav_calls,nav_ms";

pub(crate) fn metrics_row(query_id: usize, mode: RankingMode, stats: &EnumerationStats) -> String {
    format!(
        "{},{},{},{},{},{:.3},{},{:.3}",
        query_id,
        mode.as_str(),
        stats.fms_or_total(),
        stats.total_extensions,
        stats.matches_found,
        stats.elapsed.as_secs_f64() * 1e3,
        stats.nav_calls,
        stats.nav_time.as_secs_f64() * 1e3,
    )
}

pub(crate) struct QueryRun {
    pub stats: EnumerationStats,
    pub matches: Option<Vec<Match>>,
}

/// Runs every query against the shared graph and model. Rows come back in
/// query order regardless of the worker count.
pub(crate) fn run_query_set(
    queries: &[LabeledGraph],
    graph: &LabeledGraph,
    cfg: &EngineConfig,
    model: Option<&ModelParams>,
    collect_matches: bool,
    jobs: usize,
) -> Result<Vec<QueryRun>, CliError> {
    let run_one = |query: &LabeledGraph| -> Result<QueryRun, neugn_match_engine::EngineError> {
        let (matches, stats) = enumerate(query, graph, cfg, model)?;
        Ok(QueryRun {
            stats,
            matches: collect_matches.then_some(matches),
        })
    };
    if jobs <= 1 {
        return queries
            .iter()
            .map(|q| run_one(q).map_err(CliError::from))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Runtime(e.into()))?;
    let results: Vec<Result<QueryRun, neugn_match_engine::EngineError>> = pool.install(|| {
        use rayon::prelude::*;
        queries.par_iter().map(run_one).collect()
    });
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

fn write_match_dump(matches: &[Match], path: &Path) -> std::io::Result<()> {
    let mut out = fs::File::create(path)?;
    for m in matches {
        let pairs: Vec<String> = m.pairs().iter().map(|(u, v)| format!("{u}:{v}")).collect();
        writeln!(out, "M {}", pairs.join(" "))?;
    }
    Ok(())
}
