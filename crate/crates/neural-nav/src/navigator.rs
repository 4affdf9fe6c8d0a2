use neugn_euler_serialize::{MaskedNodeSequence, Token};

use crate::params::{DecoderLayerParams, ModelParams};
use crate::tensor::{dot, softmax_in_place, Tensor};
use crate::NavError;

const LN_EPS: f64 = 1e-5;

/// Floor applied inside -log P[t] so a collapsed probability reports a large
/// finite loss instead of infinity.
pub const LOG_EPSILON: f64 = 1e-12;

/// Decoder input: the stacked embedding matrix plus the table rows each
/// sequence slot was drawn from (needed to scatter gradients back).
#[derive(Debug, Clone)]
pub struct AssembledInput {
    pub x: Tensor,
    token_rows: Vec<usize>,
    pos_rows: Vec<usize>,
}

impl AssembledInput {
    pub fn seq_len(&self) -> usize {
        self.x.rows()
    }
}

/// Builds the decoder input: row 0 is the navigation signal, row 1 the
/// anchor class token (token embedding of CLS plus the reserved position
/// row), rows 2.. are token embedding + node position embedding. Sequence
/// position embeddings are added to every row.
pub fn assemble_input(
    seq: &MaskedNodeSequence,
    signal: &[f64],
    params: &ModelParams,
) -> Result<AssembledInput, NavError> {
    let hp = &params.hp;
    if signal.len() != hp.dim {
        return Err(NavError::Shape(format!(
            "signal has dimension {}, model expects {}",
            signal.len(),
            hp.dim
        )));
    }
    let rows = seq.len() + 2;
    if rows > hp.max_len {
        return Err(NavError::SequenceTooLong {
            len: rows,
            max: hp.max_len,
        });
    }

    let mut token_rows = Vec::with_capacity(rows);
    let mut pos_rows = Vec::with_capacity(rows);
    token_rows.push(usize::MAX); // signal row draws from no table
    pos_rows.push(usize::MAX);
    token_rows.push(hp.cls_token());
    pos_rows.push(hp.anchor_position());
    for (token, &pos) in seq.tokens.iter().zip(&seq.position_ids) {
        let token_row = match *token {
            Token::Pad => hp.pad_token(),
            Token::Cls => hp.cls_token(),
            Token::Vertex(v) => {
                if v >= hp.vocab {
                    return Err(NavError::VertexOutOfRange { vertex: v, vocab: hp.vocab });
                }
                v
            }
        };
        if pos >= hp.window {
            return Err(NavError::PositionOutOfRange { position: pos, window: hp.window });
        }
        token_rows.push(token_row);
        pos_rows.push(pos);
    }

    let mut x = Tensor::zeros(&[rows, hp.dim]);
    x.row_mut(0).copy_from_slice(signal);
    for r in 1..rows {
        let row = x.row_mut(r);
        row.copy_from_slice(params.nav.token_embed.row(token_rows[r]));
        for (a, b) in row.iter_mut().zip(params.nav.pos_embed.row(pos_rows[r])) {
            *a += b;
        }
    }
    for r in 0..rows {
        let row = x.row_mut(r);
        for (a, b) in row.iter_mut().zip(params.nav.seq_embed.row(r)) {
            *a += b;
        }
    }
    Ok(AssembledInput { x, token_rows, pos_rows })
}

#[derive(Debug, Clone)]
struct LnTrace {
    xhat: Tensor,
    inv_std: Vec<f64>,
}

#[derive(Debug, Clone)]
struct LayerTrace {
    input: Tensor,
    q: Tensor,
    k: Tensor,
    v: Tensor,
    attn: Vec<Tensor>,
    heads_out: Tensor,
    ln1: LnTrace,
    h_att: Tensor,
    ffn_pre: Tensor,
    ffn_act: Tensor,
    ln2: LnTrace,
    output: Tensor,
}

/// Everything the backward pass needs from one forward evaluation.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    layers: Vec<LayerTrace>,
    h_cls: Vec<f64>,
    probs: Vec<f64>,
}

impl ForwardTrace {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Runs the decoder stack and prediction head; returns the distribution over
/// the data-graph vertex vocabulary and the trace for backprop.
pub fn navigator_forward(
    input: &AssembledInput,
    params: &ModelParams,
) -> Result<(Vec<f64>, ForwardTrace), NavError> {
    let hp = &params.hp;
    let mut h = input.x.clone();
    let mut layers = Vec::with_capacity(hp.layers);
    for layer in &params.nav.layers {
        let trace = decoder_layer_forward(&h, layer, hp.heads);
        h = trace.output.clone();
        layers.push(trace);
    }

    let h_cls = h.row(1).to_vec();
    let mut logits = vec![0.0; hp.vocab];
    for (t, logit) in logits.iter_mut().enumerate() {
        *logit = dot(params.nav.out_weight.row(t), &h_cls) + params.nav.out_bias.data()[t];
    }
    softmax_in_place(&mut logits);
    let probs = logits;
    debug_assert!(probs.iter().all(|p| p.is_finite() && *p >= 0.0));
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-6);

    Ok((probs.clone(), ForwardTrace { layers, h_cls, probs }))
}

/// Distribution only, when no backward pass will follow.
pub fn navigator_probs(input: &AssembledInput, params: &ModelParams) -> Result<Vec<f64>, NavError> {
    navigator_forward(input, params).map(|(p, _)| p)
}

/// Evaluates a batch of assembled inputs in one grouped pass, preserving the
/// exact per-sequence arithmetic of `navigator_forward`.
pub fn navigator_forward_batch(
    inputs: &[AssembledInput],
    params: &ModelParams,
) -> Result<Vec<Vec<f64>>, NavError> {
    inputs.iter().map(|x| navigator_probs(x, params)).collect()
}

fn decoder_layer_forward(input: &Tensor, layer: &DecoderLayerParams, heads: usize) -> LayerTrace {
    let s = input.rows();
    let d = input.cols();
    let head_dim = d / heads;
    let scale = 1.0 / (head_dim as f64).sqrt();

    let q = input.matmul(&layer.attn_query);
    let k = input.matmul(&layer.attn_key);
    let v = input.matmul(&layer.attn_value);

    let mut attn = Vec::with_capacity(heads);
    let mut heads_out = Tensor::zeros(&[s, d]);
    for h in 0..heads {
        let lo = h * head_dim;
        let hi = lo + head_dim;
        let mut weights = Tensor::zeros(&[s, s]);
        for i in 0..s {
            let qi = &q.row(i)[lo..hi];
            let row = weights.row_mut(i);
            for (j, w) in row.iter_mut().enumerate() {
                *w = dot(qi, &k.row(j)[lo..hi]) * scale;
            }
            softmax_in_place(row);
        }
        for i in 0..s {
            let w_row = weights.row(i);
            let out = &mut heads_out.row_mut(i)[lo..hi];
            for (j, &w) in w_row.iter().enumerate() {
                let vj = &v.row(j)[lo..hi];
                for (o, &val) in out.iter_mut().zip(vj) {
                    *o += w * val;
                }
            }
        }
        attn.push(weights);
    }

    let mut res1 = heads_out.matmul(&layer.attn_out);
    res1.add_assign(input);
    let (h_att, ln1) = layer_norm(&res1, &layer.ln1_gain, &layer.ln1_bias);

    let mut ffn_pre = h_att.matmul(&layer.ffn_in);
    for i in 0..s {
        for (a, b) in ffn_pre.row_mut(i).iter_mut().zip(layer.ffn_in_bias.data()) {
            *a += b;
        }
    }
    let mut ffn_act = ffn_pre.clone();
    for x in ffn_act.data_mut() {
        *x = gelu(*x);
    }
    let mut res2 = ffn_act.matmul(&layer.ffn_out);
    for i in 0..s {
        for (a, b) in res2.row_mut(i).iter_mut().zip(layer.ffn_out_bias.data()) {
            *a += b;
        }
    }
    res2.add_assign(&h_att);
    let (output, ln2) = layer_norm(&res2, &layer.ln2_gain, &layer.ln2_bias);

    LayerTrace {
        input: input.clone(),
        q,
        k,
        v,
        attn,
        heads_out,
        ln1,
        h_att,
        ffn_pre,
        ffn_act,
        ln2,
        output,
    }
}

/// Loss and gradients of -log P[target] with respect to every parameter
/// tensor, plus the gradient flowing into the navigation signal (row 0),
/// which the caller feeds into the extractor's backward pass.
///
/// Gradients accumulate into `grads`, which must be `params.zeros_like()`
/// shaped.
pub fn navigator_backward(
    input: &AssembledInput,
    params: &ModelParams,
    target: usize,
    grads: &mut ModelParams,
) -> Result<(f64, Vec<f64>), NavError> {
    let hp = &params.hp;
    if target >= hp.vocab {
        return Err(NavError::VertexOutOfRange { vertex: target, vocab: hp.vocab });
    }
    let (probs, trace) = navigator_forward(input, params)?;
    let loss = -(probs[target].max(LOG_EPSILON)).ln();

    // d logits = P - onehot(target)
    let mut d_logits = probs;
    d_logits[target] -= 1.0;

    // prediction head
    let mut d_h = Tensor::zeros(&[input.seq_len(), hp.dim]);
    {
        let d_h_cls = d_h.row_mut(1);
        for (t, &g) in d_logits.iter().enumerate() {
            grads.nav.out_bias.data_mut()[t] += g;
            let w_row = params.nav.out_weight.row(t);
            let gw_row = grads.nav.out_weight.row_mut(t);
            for c in 0..hp.dim {
                gw_row[c] += g * trace.h_cls[c];
                d_h_cls[c] += g * w_row[c];
            }
        }
    }

    // decoder stack
    for (layer_idx, layer_trace) in trace.layers.iter().enumerate().rev() {
        let layer = &params.nav.layers[layer_idx];
        d_h = decoder_layer_backward(
            layer_trace,
            layer,
            hp.heads,
            &d_h,
            &mut grads.nav.layers[layer_idx],
        );
    }

    // scatter into the embedding tables; row 0 belongs to the signal
    let d_signal = d_h.row(0).to_vec();
    for r in 1..input.seq_len() {
        let g_row = d_h.row(r);
        add_into(grads.nav.token_embed.row_mut(input.token_rows[r]), g_row);
        add_into(grads.nav.pos_embed.row_mut(input.pos_rows[r]), g_row);
    }
    for r in 0..input.seq_len() {
        add_into(grads.nav.seq_embed.row_mut(r), d_h.row(r));
    }

    Ok((loss, d_signal))
}

fn decoder_layer_backward(
    trace: &LayerTrace,
    layer: &DecoderLayerParams,
    heads: usize,
    d_out: &Tensor,
    grads: &mut DecoderLayerParams,
) -> Tensor {
    let s = trace.input.rows();
    let d = trace.input.cols();
    let head_dim = d / heads;
    let scale = 1.0 / (head_dim as f64).sqrt();

    // second layer norm
    let d_res2 = layer_norm_backward(
        d_out,
        &trace.ln2,
        &layer.ln2_gain,
        &mut grads.ln2_gain,
        &mut grads.ln2_bias,
    );

    // FFN branch: res2 = ffn_out(gelu(ffn_in(h_att))) + h_att
    let mut d_h_att = d_res2.clone();
    for i in 0..s {
        add_into(grads.ffn_out_bias.data_mut(), d_res2.row(i));
    }
    trace.ffn_act.matmul_at_into(&d_res2, &mut grads.ffn_out);
    let mut d_pre = d_res2.matmul_bt(&layer.ffn_out);
    for (g, &x) in d_pre.data_mut().iter_mut().zip(trace.ffn_pre.data()) {
        *g *= gelu_grad(x);
    }
    for i in 0..s {
        add_into(grads.ffn_in_bias.data_mut(), d_pre.row(i));
    }
    trace.h_att.matmul_at_into(&d_pre, &mut grads.ffn_in);
    d_h_att.add_assign(&d_pre.matmul_bt(&layer.ffn_in));

    // first layer norm
    let d_res1 = layer_norm_backward(
        &d_h_att,
        &trace.ln1,
        &layer.ln1_gain,
        &mut grads.ln1_gain,
        &mut grads.ln1_bias,
    );

    // attention branch: res1 = heads_out x Wo + input
    let mut d_input = d_res1.clone();
    trace.heads_out.matmul_at_into(&d_res1, &mut grads.attn_out);
    let d_heads = d_res1.matmul_bt(&layer.attn_out);

    let mut d_q = Tensor::zeros(&[s, d]);
    let mut d_k = Tensor::zeros(&[s, d]);
    let mut d_v = Tensor::zeros(&[s, d]);
    for h in 0..heads {
        let lo = h * head_dim;
        let hi = lo + head_dim;
        let weights = &trace.attn[h];
        // d attention weights and dV
        let mut d_weights = Tensor::zeros(&[s, s]);
        for i in 0..s {
            let d_ctx = &d_heads.row(i)[lo..hi];
            let w_row = weights.row(i);
            let dw_row = d_weights.row_mut(i);
            for j in 0..s {
                dw_row[j] = dot(d_ctx, &trace.v.row(j)[lo..hi]);
                let dv = &mut d_v.row_mut(j)[lo..hi];
                let w = w_row[j];
                for (o, &g) in dv.iter_mut().zip(d_ctx) {
                    *o += w * g;
                }
            }
        }
        // softmax backward per row, then scores -> q, k
        for i in 0..s {
            let w_row = weights.row(i);
            let dw_row = d_weights.row_mut(i);
            let inner = dot(dw_row, w_row);
            for (g, &w) in dw_row.iter_mut().zip(w_row) {
                *g = w * (*g - inner);
            }
            let qi = &trace.q.row(i)[lo..hi];
            for j in 0..s {
                let g = dw_row[j] * scale;
                if g == 0.0 {
                    continue;
                }
                let kj = &trace.k.row(j)[lo..hi];
                let dqi = &mut d_q.row_mut(i)[lo..hi];
                for (o, &x) in dqi.iter_mut().zip(kj) {
                    *o += g * x;
                }
                let dkj = &mut d_k.row_mut(j)[lo..hi];
                for (o, &x) in dkj.iter_mut().zip(qi) {
                    *o += g * x;
                }
            }
        }
    }

    trace.input.matmul_at_into(&d_q, &mut grads.attn_query);
    trace.input.matmul_at_into(&d_k, &mut grads.attn_key);
    trace.input.matmul_at_into(&d_v, &mut grads.attn_value);
    d_input.add_assign(&d_q.matmul_bt(&layer.attn_query));
    d_input.add_assign(&d_k.matmul_bt(&layer.attn_key));
    d_input.add_assign(&d_v.matmul_bt(&layer.attn_value));
    d_input
}

fn layer_norm(x: &Tensor, gain: &Tensor, bias: &Tensor) -> (Tensor, LnTrace) {
    let (rows, cols) = (x.rows(), x.cols());
    let mut out = Tensor::zeros(&[rows, cols]);
    let mut xhat = Tensor::zeros(&[rows, cols]);
    let mut inv_std = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = x.row(r);
        let mean = row.iter().sum::<f64>() / cols as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / cols as f64;
        let istd = 1.0 / (var + LN_EPS).sqrt();
        inv_std.push(istd);
        let xh_row = xhat.row_mut(r);
        for (c, &v) in row.iter().enumerate() {
            xh_row[c] = (v - mean) * istd;
        }
        let out_row = out.row_mut(r);
        for c in 0..cols {
            out_row[c] = gain.data()[c] * xh_row[c] + bias.data()[c];
        }
    }
    (out, LnTrace { xhat, inv_std })
}

fn layer_norm_backward(
    d_out: &Tensor,
    trace: &LnTrace,
    gain: &Tensor,
    d_gain: &mut Tensor,
    d_bias: &mut Tensor,
) -> Tensor {
    let (rows, cols) = (d_out.rows(), d_out.cols());
    let mut d_x = Tensor::zeros(&[rows, cols]);
    for r in 0..rows {
        let dy = d_out.row(r);
        let xhat = trace.xhat.row(r);
        for c in 0..cols {
            d_gain.data_mut()[c] += dy[c] * xhat[c];
            d_bias.data_mut()[c] += dy[c];
        }
        let istd = trace.inv_std[r];
        let n = cols as f64;
        let mut sum_dxhat = 0.0;
        let mut sum_dxhat_xhat = 0.0;
        for c in 0..cols {
            let dxhat = dy[c] * gain.data()[c];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat[c];
        }
        let dx_row = d_x.row_mut(r);
        for c in 0..cols {
            let dxhat = dy[c] * gain.data()[c];
            dx_row[c] = istd * (dxhat - sum_dxhat / n - xhat[c] * sum_dxhat_xhat / n);
        }
    }
    d_x
}

const GELU_C: f64 = 0.044715;

fn gelu(x: f64) -> f64 {
    let alpha = (2.0 / std::f64::consts::PI).sqrt();
    0.5 * x * (1.0 + (alpha * (x + GELU_C * x * x * x)).tanh())
}

fn gelu_grad(x: f64) -> f64 {
    let alpha = (2.0 / std::f64::consts::PI).sqrt();
    let u = alpha * (x + GELU_C * x * x * x);
    let t = u.tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * alpha * (1.0 + 3.0 * GELU_C * x * x)
}

fn add_into(target: &mut [f64], source: &[f64]) {
    for (a, b) in target.iter_mut().zip(source) {
        *a += b;
    }
}
