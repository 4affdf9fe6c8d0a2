use neugn_graph_core::LabeledGraph;

use crate::params::ModelParams;
use crate::tensor::Tensor;
use crate::NavError;

/// Saved forward state of the extractor, enough to backpropagate a gradient
/// arriving at the pooled signal.
#[derive(Debug, Clone)]
pub struct QsTrace {
    labels: Vec<usize>,
    /// Sparse rows of the normalized adjacency with self-loops.
    norm_adj: Vec<Vec<(usize, f64)>>,
    /// Layer inputs H^(0) .. H^(L) (the last entry is the final node matrix).
    hidden: Vec<Tensor>,
    /// Aggregated inputs (norm_adj x H) per layer, cached for weight grads.
    aggregated: Vec<Tensor>,
    /// Pre-activation (aggregated x W) per layer.
    preact: Vec<Tensor>,
    /// Per output coordinate, the node whose value won the max-pool.
    argmax: Vec<usize>,
}

impl QsTrace {
    /// Final per-node representation matrix (the max-pool input).
    pub fn final_hidden(&self) -> &Tensor {
        self.hidden.last().expect("at least the embedding layer")
    }
}

/// Encodes the query structure into the navigation signal: label embeddings,
/// `gcn_layers` rounds of normalized message passing with ReLU, then a
/// coordinate-wise max-pool over node representations.
pub fn qs_extract(
    query: &LabeledGraph,
    params: &ModelParams,
) -> Result<(Vec<f64>, QsTrace), NavError> {
    let hp = &params.hp;
    let n = query.vertex_count();
    if n == 0 {
        return Err(NavError::Shape("query graph is empty".into()));
    }
    for v in 0..n {
        if query.label(v) >= hp.label_vocab {
            return Err(NavError::LabelOutOfRange {
                label: query.label(v),
                vocab: hp.label_vocab,
            });
        }
    }

    // normalized adjacency with self-loops: (d+1)^(-1/2) on both sides
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| 1.0 / ((query.degree(v) + 1) as f64).sqrt())
        .collect();
    let norm_adj: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|v| {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(query.degree(v) + 1);
            row.push((v, inv_sqrt[v] * inv_sqrt[v]));
            for &w in query.neighbors(v) {
                row.push((w, inv_sqrt[v] * inv_sqrt[w]));
            }
            row.sort_unstable_by_key(|&(w, _)| w);
            row
        })
        .collect();

    let labels: Vec<usize> = (0..n).map(|v| query.label(v)).collect();
    let mut h = Tensor::zeros(&[n, hp.dim]);
    for v in 0..n {
        h.row_mut(v).copy_from_slice(params.qs.label_embed.row(labels[v]));
    }

    let mut hidden = vec![h];
    let mut aggregated = Vec::with_capacity(hp.gcn_layers);
    let mut preact = Vec::with_capacity(hp.gcn_layers);
    for weight in &params.qs.gcn_weights {
        let input = hidden.last().unwrap();
        let agg = sparse_matmul(&norm_adj, input, hp.dim);
        let pre = agg.matmul(weight);
        let mut next = pre.clone();
        for v in next.data_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        aggregated.push(agg);
        preact.push(pre);
        hidden.push(next);
    }

    let final_h = hidden.last().unwrap();
    let mut signal = vec![f64::NEG_INFINITY; hp.dim];
    let mut argmax = vec![0usize; hp.dim];
    for v in 0..n {
        for (c, &x) in final_h.row(v).iter().enumerate() {
            if x > signal[c] {
                signal[c] = x;
                argmax[c] = v;
            }
        }
    }
    debug_assert!(signal.iter().all(|v| v.is_finite()));

    Ok((
        signal,
        QsTrace {
            labels,
            norm_adj,
            hidden,
            aggregated,
            preact,
            argmax,
        },
    ))
}

/// Backpropagates a gradient on the pooled signal into the extractor's
/// parameter gradients (accumulated into `grads`).
pub fn qs_backward(trace: &QsTrace, d_signal: &[f64], params: &ModelParams, grads: &mut ModelParams) {
    let hp = &params.hp;
    let n = trace.labels.len();
    let mut d_hidden = Tensor::zeros(&[n, hp.dim]);
    for (c, &g) in d_signal.iter().enumerate() {
        let v = trace.argmax[c];
        d_hidden.row_mut(v)[c] = g;
    }

    for layer in (0..hp.gcn_layers).rev() {
        // through ReLU
        let mut d_pre = d_hidden;
        for (g, &p) in d_pre.data_mut().iter_mut().zip(trace.preact[layer].data()) {
            if p <= 0.0 {
                *g = 0.0;
            }
        }
        // dW += aggregated^T x d_pre
        trace.aggregated[layer].matmul_at_into(&d_pre, &mut grads.qs.gcn_weights[layer]);
        // d_agg = d_pre x W^T, then back through the (symmetric) propagation
        let d_agg = d_pre.matmul_bt(&params.qs.gcn_weights[layer]);
        d_hidden = sparse_matmul(&trace.norm_adj, &d_agg, hp.dim);
    }

    for v in 0..n {
        let row = grads.qs.label_embed.row_mut(trace.labels[v]);
        for (a, b) in row.iter_mut().zip(d_hidden.row(v)) {
            *a += b;
        }
    }
}

fn sparse_matmul(rows: &[Vec<(usize, f64)>], dense: &Tensor, dim: usize) -> Tensor {
    let n = rows.len();
    let mut out = Tensor::zeros(&[n, dim]);
    for (v, row) in rows.iter().enumerate() {
        let out_row = out.row_mut(v);
        for &(w, coeff) in row {
            for (o, &x) in out_row.iter_mut().zip(dense.row(w)) {
                *o += coeff * x;
            }
        }
    }
    out
}
