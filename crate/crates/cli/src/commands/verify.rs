use std::collections::BTreeSet;
use std::path::PathBuf;

use neugn_graph_core::{brute_force_enumerate, Match, DEFAULT_ORACLE_CAP};
use neugn_match_engine::{enumerate, EngineConfig, RankingMode};
use neugn_neural_nav::{load_model, Hyperparams, ModelParams};

use crate::common::{load_graph_arg, parse_mode, CliError, CliResult};

#[derive(clap::Args)]
pub struct Args {
    /// Data graph file
    #[arg(long)]
    pub graph: PathBuf,
    /// Query set directory
    #[arg(long)]
    pub queries: PathBuf,
    /// Comma-separated modes to verify
    #[arg(long, default_value = "baseline,neugn,oracle")]
    pub modes: String,
    /// Navigator model; a seeded random-initialized model is used when
    /// omitted (ordering quality is irrelevant to the equivalence check)
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: Args) -> CliResult {
    let modes: Vec<RankingMode> = args
        .modes
        .split(',')
        .map(|m| parse_mode(m.trim()))
        .collect::<Result<_, _>>()?;
    if modes.is_empty() {
        return Err(CliError::usage("no modes to verify"));
    }

    let graph = load_graph_arg(&args.graph)?;
    let set = neugn_graph_core::load_query_set(&args.queries)?;
    let model: Option<ModelParams> = if modes.contains(&RankingMode::Neural) {
        Some(match &args.model {
            Some(path) => load_model(path)?,
            None => ModelParams::init(
                Hyperparams::desk(graph.vertex_count(), graph.label_count().max(1)),
                args.seed,
            )?,
        })
    } else {
        None
    };

    let mut verified = 0usize;
    let mut skipped = 0usize;
    for (query_id, query) in set.queries.iter().enumerate() {
        if query.vertex_count() > DEFAULT_ORACLE_CAP {
            eprintln!(
                "warning: query {query_id} has {} vertices, above the oracle cap {DEFAULT_ORACLE_CAP}; skipped",
                query.vertex_count()
            );
            skipped += 1;
            continue;
        }
        let expected = brute_force_enumerate(query, &graph)?;
        for &mode in &modes {
            let cfg = EngineConfig {
                mode,
                navigation_depth: args.depth,
                ..EngineConfig::default()
            };
            let model_ref = (mode == RankingMode::Neural).then(|| model.as_ref().unwrap());
            let (matches, _) = enumerate(query, &graph, &cfg, model_ref)?;
            let got: BTreeSet<Vec<(usize, usize)>> = matches.iter().map(Match::canonical).collect();
            if got != expected {
                let missing = expected.difference(&got).next();
                let extra = got.difference(&expected).next();
                let detail = match (missing, extra) {
                    (Some(m), _) => format!("missing match {m:?}"),
                    (None, Some(e)) => format!("spurious match {e:?}"),
                    (None, None) => unreachable!("sets differ"),
                };
                return Err(CliError::Runtime(anyhow::anyhow!(
                    "query {query_id}, mode {}: engine disagrees with the reference matcher ({detail}; {} vs {} matches)",
                    mode.as_str(),
                    got.len(),
                    expected.len()
                )));
            }
        }
        verified += 1;
    }

    println!(
        "{verified}/{} queries equivalent across {:?} ({skipped} skipped)",
        set.queries.len(),
        modes.iter().map(|m| m.as_str()).collect::<Vec<_>>()
    );
    Ok(())
}
