use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use neugn_graph_core::LabeledGraph;
use neugn_neural_nav::{pipeline, save_with_extras, Hyperparams, ModelParams};

use crate::adam::Adam;
use crate::eval::evaluate;
use crate::samples::{SampleGenerator, TrainingSample};
use crate::TrainError;

#[derive(Debug, Clone)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Per-epoch exponential decay factor gamma.
    pub lr_decay: f64,
    pub walk_min: usize,
    pub walk_max: usize,
    /// Upper bound on the masked fraction of a sampled subgraph.
    pub mask_ratio: f64,
    pub seed: u64,
    /// Checkpoint every this many epochs; 0 disables checkpoints.
    pub checkpoint_every: usize,
    pub freeze_extractor: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            epochs: 1000,
            batch_size: 128,
            learning_rate: 5e-4,
            lr_decay: 0.999,
            walk_min: 5,
            walk_max: 19,
            mask_ratio: 0.5,
            seed: 0,
            checkpoint_every: 0,
            freeze_extractor: false,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::Config("batch size must be at least 1".into()));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(TrainError::Config("lr decay must be in (0, 1]".into()));
        }
        if self.walk_min == 0 || self.walk_min > self.walk_max {
            return Err(TrainError::Config("walk range must satisfy 1 <= min <= max".into()));
        }
        if !(self.mask_ratio > 0.0 && self.mask_ratio <= 1.0) {
            return Err(TrainError::Config("mask ratio must be in (0, 1]".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(TrainError::Config("learning rate must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub lr: f64,
    pub top1: f64,
    pub mrr: f64,
    pub seconds: f64,
}

pub struct TrainOutcome {
    pub params: ModelParams,
    pub log: Vec<EpochStats>,
}

/// Full training run on a data graph: per epoch, one freshly sampled masked
/// instance per (non-held-out) anchor vertex, Adam over shuffled batches,
/// exponential learning-rate decay, and per-epoch held-out evaluation.
///
/// The held-out anchors (about 10%, chosen by seeded hash) are fixed across
/// epochs and their evaluation samples are generated once.
pub fn train(
    graph: &LabeledGraph,
    hp: Hyperparams,
    cfg: &TrainingConfig,
    checkpoint_dir: Option<&Path>,
    on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if hp.vocab != graph.vertex_count() {
        return Err(TrainError::Config(format!(
            "model vocabulary {} does not match graph vertex count {}",
            hp.vocab,
            graph.vertex_count()
        )));
    }
    if hp.label_vocab < graph.label_count() {
        return Err(TrainError::Config(format!(
            "model label vocabulary {} is smaller than the graph's {}",
            hp.label_vocab,
            graph.label_count()
        )));
    }

    let n = graph.vertex_count();
    let mut held_out: Vec<usize> = (0..n).filter(|&v| is_held_out(cfg.seed, v)).collect();
    if held_out.is_empty() && n >= 2 {
        let forced = (0..n).min_by_key(|&v| anchor_hash(cfg.seed, v)).unwrap();
        held_out.push(forced);
    }
    let held_out_set: Vec<bool> = {
        let mut mask = vec![false; n];
        for &v in &held_out {
            mask[v] = true;
        }
        mask
    };
    let train_anchors: Vec<usize> = (0..n).filter(|&v| !held_out_set[v]).collect();

    let generator = SampleGenerator::new(graph, &hp, cfg);
    let mut eval_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xE7A1_C0DE);
    let eval_samples: Vec<TrainingSample> = held_out
        .iter()
        .map(|&anchor| generator.sample(anchor, &mut eval_rng))
        .collect::<Result<_, _>>()?;

    let params = ModelParams::init(hp, cfg.seed)?;
    run_training(
        params,
        cfg,
        |_, rng| {
            train_anchors
                .iter()
                .map(|&anchor| generator.sample(anchor, rng))
                .collect()
        },
        &eval_samples,
        checkpoint_dir,
        on_epoch,
    )
}

/// Training over a fixed sample set (reused every epoch, shuffled); the
/// evaluation metrics are computed on the same samples.
pub fn train_on_samples(
    samples: &[TrainingSample],
    hp: Hyperparams,
    cfg: &TrainingConfig,
    on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(TrainError::Config("no training samples".into()));
    }
    let params = ModelParams::init(hp, cfg.seed)?;
    run_training(
        params,
        cfg,
        |_, _| Ok(samples.to_vec()),
        samples,
        None,
        on_epoch,
    )
}

fn run_training(
    mut params: ModelParams,
    cfg: &TrainingConfig,
    mut provide_samples: impl FnMut(usize, &mut ChaCha8Rng) -> Result<Vec<TrainingSample>, TrainError>,
    eval_samples: &[TrainingSample],
    checkpoint_dir: Option<&Path>,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome, TrainError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(&params);
    let mut grads = params.zeros_like();
    let mut log = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        let started = Instant::now();
        let lr = cfg.learning_rate * cfg.lr_decay.powi(epoch as i32 - 1);
        let samples = provide_samples(epoch, &mut rng)?;
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for (batch_id, chunk) in order.chunks(cfg.batch_size).enumerate() {
            grads.visit_mut(|_, t| t.fill(0.0));
            let mut batch_loss = 0.0;
            for &idx in chunk {
                let sample = &samples[idx];
                batch_loss += pipeline::loss_and_gradients(
                    &sample.query,
                    &sample.sequence,
                    sample.target,
                    &params,
                    cfg.freeze_extractor,
                    &mut grads,
                )?;
            }
            if !batch_loss.is_finite() {
                return Err(TrainError::Diverged { epoch, batch: batch_id });
            }
            loss_sum += batch_loss;
            grads.visit_mut(|_, t| t.scale(1.0 / chunk.len() as f64));
            adam.step(&mut params, &grads, lr);
        }

        let (top1, mrr) = match evaluate(&params, eval_samples) {
            Ok(metrics) => (metrics.top1, metrics.mrr),
            Err(TrainError::EmptyEvaluation) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        let stats = EpochStats {
            epoch,
            mean_loss: loss_sum / samples.len() as f64,
            lr,
            top1,
            mrr,
            seconds: started.elapsed().as_secs_f64(),
        };
        on_epoch(&stats);
        log.push(stats);

        if cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0 {
            if let Some(dir) = checkpoint_dir {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("checkpoint_epoch{epoch}.bin"));
                save_with_extras(&params, &adam.state_tensors(), path)?;
            }
        }
    }

    Ok(TrainOutcome { params, log })
}

/// Training log CSV: `epoch,mean_loss,lr,top1,mrr,seconds`.
pub fn write_log_csv(log: &[EpochStats], writer: &mut impl Write) -> std::io::Result<()> {
    writeln!(writer, "epoch,mean_loss,lr,top1,mrr,seconds")?;
    for row in log {
        writeln!(
            writer,
            "{},{},{},{},{},{:.3}",
            row.epoch, row.mean_loss, row.lr, row.top1, row.mrr, row.seconds
        )?;
    }
    Ok(())
}

fn anchor_hash(seed: u64, vertex: usize) -> u64 {
    splitmix64(seed ^ (vertex as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// About 10% of anchors, stable in (seed, vertex).
fn is_held_out(seed: u64, vertex: usize) -> bool {
    anchor_hash(seed, vertex) % 10 == 0
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
