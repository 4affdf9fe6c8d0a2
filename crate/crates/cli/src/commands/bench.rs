use std::fs;
use std::path::PathBuf;

use neugn_match_engine::{EngineConfig, RankingMode, Termination};
use neugn_neural_nav::load_model;

use crate::commands::match_cmd::{metrics_row, run_query_set, QueryRun};
use crate::common::{load_graph_arg, median, parse_termination, CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Data graph file
    #[arg(long)]
    pub graph: PathBuf,
    /// Query set directory
    #[arg(long)]
    pub queries: PathBuf,
    /// Navigator model for the neugn side
    #[arg(long)]
    pub model: PathBuf,
    /// Comma-separated navigation depth caps, e.g. 0,2,4,8
    #[arg(long)]
    pub depth_sweep: Option<String>,
    /// Single navigation depth when no sweep is given
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// first (FMS comparison) or time:<s> (adds matches-per-second medians)
    #[arg(long, default_value = "first")]
    pub terminate: String,
    /// Also run the brute-force extendability oracle as a third mode
    #[arg(long, default_value_t = false)]
    pub with_oracle: bool,
    /// Report file (stdout when omitted); raw rows go to <report>.raw.csv
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Worker threads across queries
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

pub fn run(args: Args) -> CliResult {
    let termination = parse_termination(&args.terminate)?;
    let time_budgeted = matches!(termination, Termination::TimeBudget(_));
    if !time_budgeted && termination != Termination::FirstMatch {
        return Err(CliError::usage("--terminate must be `first` or `time:<s>` for bench"));
    }
    let depths: Vec<usize> = match &args.depth_sweep {
        Some(spec) => spec
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::usage(format!("invalid depth `{d}` in sweep")))
            })
            .collect::<Result<_, _>>()?,
        None => vec![args.depth],
    };
    if depths.is_empty() {
        return Err(CliError::usage("empty depth sweep"));
    }

    let mut manifest = RunManifest::start("bench");
    let graph = load_graph_arg(&args.graph)?;
    let set = neugn_graph_core::load_query_set(&args.queries)?;
    if set.queries.is_empty() {
        return Err(CliError::usage("query set is empty"));
    }
    let model = load_model(&args.model)?;

    let mut report = String::new();
    let mut raw = String::new();
    raw.push_str("depth,");
    raw.push_str(crate::commands::match_cmd::METRICS_HEADER);
    raw.push('\n');

    let mut modes = vec![RankingMode::Baseline, RankingMode::Neural];
    if args.with_oracle {
        modes.push(RankingMode::Oracle);
    }

    for &depth in &depths {
        let mut fms_by_mode: Vec<(RankingMode, Vec<f64>, Vec<f64>)> = Vec::new();
        for &mode in &modes {
            let cfg = EngineConfig {
                mode,
                navigation_depth: depth,
                termination,
                batch_navigation: true,
            };
            let model_ref = (mode == RankingMode::Neural).then_some(&model);
            let runs: Vec<QueryRun> =
                run_query_set(&set.queries, &graph, &cfg, model_ref, false, args.jobs)?;
            for (query_id, run) in runs.iter().enumerate() {
                raw.push_str(&format!("{depth},{}\n", metrics_row(query_id, mode, &run.stats)));
            }
            let fms: Vec<f64> = runs.iter().map(|r| r.stats.fms_or_total() as f64).collect();
            let mps: Vec<f64> = runs
                .iter()
                .map(|r| {
                    let secs = r.stats.elapsed.as_secs_f64();
                    if secs > 0.0 {
                        r.stats.matches_found as f64 / secs
                    } else {
                        0.0
                    }
                })
                .collect();
            fms_by_mode.push((mode, fms, mps));
        }

        let median_of = |mode: RankingMode, pick_mps: bool| -> f64 {
            let (_, fms, mps) = fms_by_mode.iter().find(|(m, _, _)| *m == mode).unwrap();
            let mut values = if pick_mps { mps.clone() } else { fms.clone() };
            median(&mut values)
        };
        let base_fms = median_of(RankingMode::Baseline, false);
        let neugn_fms = median_of(RankingMode::Neural, false);
        let improvement = if base_fms > 0.0 {
            100.0 * (base_fms - neugn_fms) / base_fms
        } else {
            0.0
        };
        report.push_str(&format!(
            "depth={depth} baseline_median_fms={base_fms} neugn_median_fms={neugn_fms} improvement_pct={improvement:.1}"
        ));
        if args.with_oracle {
            report.push_str(&format!(" oracle_median_fms={}", median_of(RankingMode::Oracle, false)));
        }
        if time_budgeted {
            report.push_str(&format!(
                " baseline_median_mps={:.1} neugn_median_mps={:.1}",
                median_of(RankingMode::Baseline, true),
                median_of(RankingMode::Neural, true)
            ));
        }
        report.push('\n');
    }

    match &args.report {
        Some(path) => {
            fs::write(path, &report)?;
            let raw_path = path.with_extension("raw.csv");
            fs::write(&raw_path, &raw)?;
            manifest.record("graph", args.graph.display());
            manifest.record("queries", args.queries.display());
            manifest.record("model", args.model.display());
            manifest.record("depths", depths.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","));
            manifest.record("terminate", &args.terminate);
            manifest.record("report", path.display());
            manifest.record("raw", raw_path.display());
            manifest.record("jobs", args.jobs);
            manifest.write(&path.with_extension("manifest"))?;
            print!("{report}");
        }
        None => print!("{report}"),
    }
    Ok(())
}
