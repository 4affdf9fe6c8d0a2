use std::fs;
use std::io::Write;
use std::path::PathBuf;

use neugn_neural_nav::save_model;
use neugn_trainer::{train, write_log_csv, TrainError, TrainingConfig};

use crate::common::{load_graph_arg, CliError, CliResult, Profile};
use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Data graph file
    #[arg(long)]
    pub graph: PathBuf,
    /// Output model file
    #[arg(long)]
    pub out: PathBuf,
    /// Training log CSV (defaults to <out>.log.csv)
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Hyperparameter bundle (NEUGN_PROFILE overrides the default `desk`)
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Epochs (profile default: paper 1000, desk 200)
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Batch size (profile default: paper 128, desk 16)
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, default_value_t = 5e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.999)]
    pub lr_decay: f64,
    #[arg(long, default_value_t = 5)]
    pub walk_min: usize,
    #[arg(long, default_value_t = 19)]
    pub walk_max: usize,
    #[arg(long, default_value_t = 0.5)]
    pub mask_ratio: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Checkpoint cadence in epochs (0 disables)
    #[arg(long, default_value_t = 0)]
    pub checkpoint_every: usize,
    /// Directory for checkpoints (defaults next to the model file)
    #[arg(long)]
    pub checkpoint_dir: Option<PathBuf>,
    /// Train the navigator only, leaving the query extractor at init
    #[arg(long, default_value_t = false)]
    pub freeze_extractor: bool,
    /// Print per-epoch progress
    #[arg(long, default_value_t = false)]
    pub quiet: bool,
}

pub fn run(args: Args) -> CliResult {
    let profile = Profile::resolve(args.profile)?;
    let cfg = TrainingConfig {
        epochs: args.epochs.unwrap_or_else(|| profile.default_epochs()),
        batch_size: args.batch_size.unwrap_or_else(|| profile.default_batch_size()),
        learning_rate: args.lr,
        lr_decay: args.lr_decay,
        walk_min: args.walk_min,
        walk_max: args.walk_max,
        mask_ratio: args.mask_ratio,
        seed: args.seed,
        checkpoint_every: args.checkpoint_every,
        freeze_extractor: args.freeze_extractor,
    };
    if let Err(TrainError::Config(message)) = cfg.validate() {
        return Err(CliError::usage(message));
    }

    let mut manifest = RunManifest::start("train");
    let graph = load_graph_arg(&args.graph)?;
    let hp = profile.hyperparams(graph.vertex_count(), graph.label_count().max(1));

    let checkpoint_dir = if cfg.checkpoint_every > 0 {
        Some(args.checkpoint_dir.clone().unwrap_or_else(|| {
            args.out
                .parent()
                .map(|p| p.join("checkpoints"))
                .unwrap_or_else(|| PathBuf::from("checkpoints"))
        }))
    } else {
        None
    };

    let quiet = args.quiet;
    let outcome = train(&graph, hp, &cfg, checkpoint_dir.as_deref(), |stats| {
        if !quiet {
            eprintln!(
                "epoch {} loss {:.4} lr {:.6} top1 {:.3} mrr {:.3} ({:.1}s)",
                stats.epoch, stats.mean_loss, stats.lr, stats.top1, stats.mrr, stats.seconds
            );
        }
    })
    .map_err(|e| match e {
        TrainError::Config(message) => CliError::usage(message),
        other => CliError::Runtime(other.into()),
    })?;

    save_model(&outcome.params, &args.out)?;
    let log_path = args
        .log
        .clone()
        .unwrap_or_else(|| args.out.with_extension("log.csv"));
    let mut log_file = fs::File::create(&log_path)?;
    write_log_csv(&outcome.log, &mut log_file)?;
    log_file.flush()?;

    manifest.record("graph", args.graph.display());
    manifest.record("model", args.out.display());
    manifest.record("log", log_path.display());
    manifest.record("profile", profile.as_str());
    manifest.record("epochs", cfg.epochs);
    manifest.record("batch_size", cfg.batch_size);
    manifest.record("lr", cfg.learning_rate);
    manifest.record("lr_decay", cfg.lr_decay);
    manifest.record("walk_min", cfg.walk_min);
    manifest.record("walk_max", cfg.walk_max);
    manifest.record("mask_ratio", cfg.mask_ratio);
    manifest.record("seed", cfg.seed);
    manifest.record("checkpoint_every", cfg.checkpoint_every);
    manifest.record("freeze_extractor", cfg.freeze_extractor);
    manifest.write(&args.out.with_extension("manifest"))?;

    let last = outcome.log.last().expect("at least one epoch");
    println!(
        "trained {} epochs; final loss {:.4}, held-out top1 {:.3}; model at {}",
        last.epoch,
        last.mean_loss,
        last.top1,
        args.out.display()
    );
    Ok(())
}
