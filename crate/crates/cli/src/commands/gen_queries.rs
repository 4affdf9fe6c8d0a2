use std::path::PathBuf;

use neugn_graph_core::{generate_query_set, save_query_set};

use crate::common::{load_graph_arg, CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Data graph file
    #[arg(long)]
    pub graph: PathBuf,
    /// Output directory for query_<k>.graph files
    #[arg(long)]
    pub out: PathBuf,
    /// Number of queries to sample
    #[arg(long)]
    pub count: usize,
    /// Vertices per query
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: Args) -> CliResult {
    if args.count == 0 || args.size == 0 {
        return Err(CliError::usage("--count and --size must be at least 1"));
    }
    let mut manifest = RunManifest::start("gen-queries");
    let graph = load_graph_arg(&args.graph)?;
    let source = args.graph.display().to_string();
    let set = generate_query_set(&graph, args.count, args.size, args.seed, source.clone())?;
    save_query_set(&set, &args.out)?;

    manifest.record("graph", &source);
    manifest.record("out", args.out.display());
    manifest.record("count", args.count);
    manifest.record("size", args.size);
    manifest.record("seed", args.seed);
    manifest.write(&args.out.join("run_manifest.txt"))?;
    println!(
        "wrote {} queries of size {} to {}",
        args.count,
        args.size,
        args.out.display()
    );
    Ok(())
}
