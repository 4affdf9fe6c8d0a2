use neugn_euler_serialize::MaskedNodeSequence;
use neugn_graph_core::LabeledGraph;

use crate::navigator::{assemble_input, navigator_backward, navigator_probs, LOG_EPSILON};
use crate::params::ModelParams;
use crate::qs_extract::{qs_backward, qs_extract};
use crate::NavError;

/// Full forward pass: extractor signal, input assembly, decoder, prediction.
pub fn predict(
    query: &LabeledGraph,
    seq: &MaskedNodeSequence,
    params: &ModelParams,
) -> Result<Vec<f64>, NavError> {
    let (signal, _) = qs_extract(query, params)?;
    let input = assemble_input(seq, &signal, params)?;
    navigator_probs(&input, params)
}

/// Cross-entropy loss of the target vertex under the full pipeline; forward
/// only, used by training diagnostics and by the finite-difference checks.
pub fn loss(
    query: &LabeledGraph,
    seq: &MaskedNodeSequence,
    target: usize,
    params: &ModelParams,
) -> Result<f64, NavError> {
    let probs = predict(query, seq, params)?;
    if target >= probs.len() {
        return Err(NavError::VertexOutOfRange { vertex: target, vocab: probs.len() });
    }
    Ok(-(probs[target].max(LOG_EPSILON)).ln())
}

/// Loss plus gradients for every parameter tensor, accumulated into `grads`.
/// The extractor trains jointly through the signal row unless
/// `freeze_extractor` is set.
pub fn loss_and_gradients(
    query: &LabeledGraph,
    seq: &MaskedNodeSequence,
    target: usize,
    params: &ModelParams,
    freeze_extractor: bool,
    grads: &mut ModelParams,
) -> Result<f64, NavError> {
    let (signal, qs_trace) = qs_extract(query, params)?;
    let input = assemble_input(seq, &signal, params)?;
    let (loss, d_signal) = navigator_backward(&input, params, target, grads)?;
    if !freeze_extractor {
        qs_backward(&qs_trace, &d_signal, params, grads);
    }
    Ok(loss)
}
