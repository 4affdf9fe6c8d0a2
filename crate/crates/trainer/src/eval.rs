use neugn_neural_nav::{pipeline, ModelParams, LOG_EPSILON};

use crate::samples::TrainingSample;
use crate::TrainError;

/// Cross-entropy of the target under a predicted distribution, floored so a
/// zero probability reports a large finite loss.
pub fn mng_loss(probs: &[f64], target: usize) -> f64 {
    -(probs[target].max(LOG_EPSILON)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalMetrics {
    pub top1: f64,
    pub mrr: f64,
}

/// Top-1 accuracy and mean reciprocal rank over held-out samples. Rank ties
/// resolve in favor of the smaller vertex id, so a tied target ranked behind
/// a smaller-id vertex counts as that lower rank.
pub fn evaluate(
    params: &ModelParams,
    samples: &[TrainingSample],
) -> Result<EvalMetrics, TrainError> {
    if samples.is_empty() {
        return Err(TrainError::EmptyEvaluation);
    }
    let mut hits = 0usize;
    let mut reciprocal_sum = 0.0;
    for sample in samples {
        let probs = pipeline::predict(&sample.query, &sample.sequence, params)?;
        let rank = rank_of(&probs, sample.target);
        if rank == 1 {
            hits += 1;
        }
        reciprocal_sum += 1.0 / rank as f64;
    }
    Ok(EvalMetrics {
        top1: hits as f64 / samples.len() as f64,
        mrr: reciprocal_sum / samples.len() as f64,
    })
}

pub(crate) fn rank_of(probs: &[f64], target: usize) -> usize {
    let pt = probs[target];
    let mut rank = 1;
    for (v, &p) in probs.iter().enumerate() {
        if p > pt || (p == pt && v < target) {
            rank += 1;
        }
    }
    rank
}
