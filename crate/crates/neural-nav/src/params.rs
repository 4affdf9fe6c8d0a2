use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::{dot, Tensor};
use crate::NavError;

/// Model architecture and capacity settings. `vocab` is the data-graph vertex
/// count |V_n|; the token table additionally holds PAD and CLS rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hyperparams {
    pub dim: usize,
    pub layers: usize,
    pub heads: usize,
    pub ffn_dim: usize,
    /// Node-position index window N for cyclic re-indexing.
    pub window: usize,
    /// Data-graph vertex count |V_n|; also the prediction vocabulary.
    pub vocab: usize,
    /// Label vocabulary |Sigma| for the query structure extractor.
    pub label_vocab: usize,
    /// Maximum assembled sequence rows (signal + anchor + tokens).
    pub max_len: usize,
    pub gcn_layers: usize,
}

impl Hyperparams {
    /// Full-scale profile: d=256, 4 decoder layers, 8 heads, FFN 1024.
    pub fn paper(vocab: usize, label_vocab: usize) -> Self {
        Hyperparams {
            dim: 256,
            layers: 4,
            heads: 8,
            ffn_dim: 1024,
            window: 64,
            vocab,
            label_vocab,
            max_len: 256,
            gcn_layers: 2,
        }
    }

    /// Small profile for tests and CPU-only runs: d=32, 2 layers, 2 heads.
    pub fn desk(vocab: usize, label_vocab: usize) -> Self {
        Hyperparams {
            dim: 32,
            layers: 2,
            heads: 2,
            ffn_dim: 64,
            window: 64,
            vocab,
            label_vocab,
            max_len: 192,
            gcn_layers: 2,
        }
    }

    pub fn validate(&self) -> Result<(), NavError> {
        if self.dim == 0
            || self.layers == 0
            || self.heads == 0
            || self.ffn_dim == 0
            || self.window == 0
            || self.vocab == 0
            || self.label_vocab == 0
            || self.max_len < 3
            || self.gcn_layers == 0
        {
            return Err(NavError::Shape("hyperparameters must be positive".into()));
        }
        if self.dim % self.heads != 0 {
            return Err(NavError::Shape(format!(
                "dim {} is not divisible by heads {}",
                self.dim, self.heads
            )));
        }
        Ok(())
    }

    pub const fn pad_token(&self) -> usize {
        self.vocab
    }

    pub const fn cls_token(&self) -> usize {
        self.vocab + 1
    }

    /// Row of the position table reserved for the prediction anchor.
    pub const fn anchor_position(&self) -> usize {
        self.window
    }
}

/// Query structure extractor: label embedding plus GCN layer weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QsExtractorParams {
    pub label_embed: Tensor,
    pub gcn_weights: Vec<Tensor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderLayerParams {
    pub attn_query: Tensor,
    pub attn_key: Tensor,
    pub attn_value: Tensor,
    pub attn_out: Tensor,
    pub ln1_gain: Tensor,
    pub ln1_bias: Tensor,
    pub ffn_in: Tensor,
    pub ffn_in_bias: Tensor,
    pub ffn_out: Tensor,
    pub ffn_out_bias: Tensor,
    pub ln2_gain: Tensor,
    pub ln2_bias: Tensor,
}

/// Generative navigator: embedding tables, decoder stack, output head.
///
/// `pos_embed` has window+1 rows: the cyclic position ids plus one reserved
/// row used as the anchor class token's position embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigatorParams {
    pub token_embed: Tensor,
    pub pos_embed: Tensor,
    pub seq_embed: Tensor,
    pub layers: Vec<DecoderLayerParams>,
    pub out_weight: Tensor,
    pub out_bias: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub hp: Hyperparams,
    pub qs: QsExtractorParams,
    pub nav: NavigatorParams,
}

impl ModelParams {
    /// Fresh parameters, deterministic in the seed.
    pub fn init(hp: Hyperparams, seed: u64) -> Result<Self, NavError> {
        hp.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = hp.dim;
        let embed_std = EMBED_STD;
        let qs = QsExtractorParams {
            label_embed: normal(&mut rng, &[hp.label_vocab, d], embed_std),
            gcn_weights: (0..hp.gcn_layers)
                .map(|_| normal(&mut rng, &[d, d], xavier(d, d)))
                .collect(),
        };
        let layers = (0..hp.layers)
            .map(|_| DecoderLayerParams {
                attn_query: normal(&mut rng, &[d, d], xavier(d, d)),
                attn_key: normal(&mut rng, &[d, d], xavier(d, d)),
                attn_value: normal(&mut rng, &[d, d], xavier(d, d)),
                attn_out: normal(&mut rng, &[d, d], 0.1 * xavier(d, d)),
                ln1_gain: Tensor::filled(&[d], 1.0),
                ln1_bias: Tensor::zeros(&[d]),
                ffn_in: normal(&mut rng, &[d, hp.ffn_dim], xavier(d, hp.ffn_dim)),
                ffn_in_bias: Tensor::zeros(&[hp.ffn_dim]),
                ffn_out: normal(&mut rng, &[hp.ffn_dim, d], xavier(hp.ffn_dim, d)),
                ffn_out_bias: Tensor::zeros(&[d]),
                ln2_gain: Tensor::filled(&[d], 1.0),
                ln2_bias: Tensor::zeros(&[d]),
            })
            .collect();
        let nav = NavigatorParams {
            token_embed: normal(&mut rng, &[hp.vocab + 2, d], embed_std),
            pos_embed: orthogonal(&mut rng, &[hp.window + 1, d], POS_EMBED_GAIN),
            seq_embed: normal(&mut rng, &[hp.max_len, d], embed_std),
            layers,
            out_weight: normal(&mut rng, &[hp.vocab, d], xavier(d, hp.vocab)),
            out_bias: Tensor::zeros(&[hp.vocab]),
        };
        Ok(ModelParams { hp, qs, nav })
    }

    /// Same structure with every tensor zeroed; the gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        let mut clone = self.clone();
        clone.visit_mut(|_, t| t.fill(0.0));
        clone
    }

    /// Visits every parameter tensor in a fixed order shared by the
    /// optimizer, the serializer, and the gradient checks.
    pub fn visit(&self, mut f: impl FnMut(&str, &Tensor)) {
        f("qs.label_embed", &self.qs.label_embed);
        for (i, w) in self.qs.gcn_weights.iter().enumerate() {
            f(&format!("qs.gcn.{i}"), w);
        }
        f("nav.token_embed", &self.nav.token_embed);
        f("nav.pos_embed", &self.nav.pos_embed);
        f("nav.seq_embed", &self.nav.seq_embed);
        for (i, layer) in self.nav.layers.iter().enumerate() {
            f(&format!("nav.layer{i}.attn_query"), &layer.attn_query);
            f(&format!("nav.layer{i}.attn_key"), &layer.attn_key);
            f(&format!("nav.layer{i}.attn_value"), &layer.attn_value);
            f(&format!("nav.layer{i}.attn_out"), &layer.attn_out);
            f(&format!("nav.layer{i}.ln1_gain"), &layer.ln1_gain);
            f(&format!("nav.layer{i}.ln1_bias"), &layer.ln1_bias);
            f(&format!("nav.layer{i}.ffn_in"), &layer.ffn_in);
            f(&format!("nav.layer{i}.ffn_in_bias"), &layer.ffn_in_bias);
            f(&format!("nav.layer{i}.ffn_out"), &layer.ffn_out);
            f(&format!("nav.layer{i}.ffn_out_bias"), &layer.ffn_out_bias);
            f(&format!("nav.layer{i}.ln2_gain"), &layer.ln2_gain);
            f(&format!("nav.layer{i}.ln2_bias"), &layer.ln2_bias);
        }
        f("nav.out_weight", &self.nav.out_weight);
        f("nav.out_bias", &self.nav.out_bias);
    }

    pub fn visit_mut(&mut self, mut f: impl FnMut(&str, &mut Tensor)) {
        f("qs.label_embed", &mut self.qs.label_embed);
        for (i, w) in self.qs.gcn_weights.iter_mut().enumerate() {
            f(&format!("qs.gcn.{i}"), w);
        }
        f("nav.token_embed", &mut self.nav.token_embed);
        f("nav.pos_embed", &mut self.nav.pos_embed);
        f("nav.seq_embed", &mut self.nav.seq_embed);
        for (i, layer) in self.nav.layers.iter_mut().enumerate() {
            f(&format!("nav.layer{i}.attn_query"), &mut layer.attn_query);
            f(&format!("nav.layer{i}.attn_key"), &mut layer.attn_key);
            f(&format!("nav.layer{i}.attn_value"), &mut layer.attn_value);
            f(&format!("nav.layer{i}.attn_out"), &mut layer.attn_out);
            f(&format!("nav.layer{i}.ln1_gain"), &mut layer.ln1_gain);
            f(&format!("nav.layer{i}.ln1_bias"), &mut layer.ln1_bias);
            f(&format!("nav.layer{i}.ffn_in"), &mut layer.ffn_in);
            f(&format!("nav.layer{i}.ffn_in_bias"), &mut layer.ffn_in_bias);
            f(&format!("nav.layer{i}.ffn_out"), &mut layer.ffn_out);
            f(&format!("nav.layer{i}.ffn_out_bias"), &mut layer.ffn_out_bias);
            f(&format!("nav.layer{i}.ln2_gain"), &mut layer.ln2_gain);
            f(&format!("nav.layer{i}.ln2_bias"), &mut layer.ln2_bias);
        }
        f("nav.out_weight", &mut self.nav.out_weight);
        f("nav.out_bias", &mut self.nav.out_bias);
    }

    pub fn tensor_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.visit(|name, _| names.push(name.to_string()));
        names
    }

    pub fn tensor(&self, name: &str) -> Option<Tensor> {
        let mut found = None;
        self.visit(|n, t| {
            if n == name {
                found = Some(t.clone());
            }
        });
        found
    }

    pub fn with_tensor_mut<R>(&mut self, name: &str, f: impl FnOnce(&mut Tensor) -> R) -> Option<R> {
        let mut f = Some(f);
        let mut out = None;
        self.visit_mut(|n, t| {
            if n == name {
                if let Some(f) = f.take() {
                    out = Some(f(t));
                }
            }
        });
        out
    }

    /// Accumulates `other` (same structure) into self, scaled.
    pub fn accumulate(&mut self, other: &Self, scale: f64) {
        let mut others = Vec::new();
        other.visit(|_, t| others.push(t.clone()));
        let mut i = 0;
        self.visit_mut(|_, t| {
            for (a, b) in t.data_mut().iter_mut().zip(others[i].data()) {
                *a += scale * b;
            }
            i += 1;
        });
    }

    pub fn all_finite(&self) -> bool {
        let mut ok = true;
        self.visit(|_, t| ok &= t.all_finite());
        ok
    }
}

fn xavier(fan_in: usize, fan_out: usize) -> f64 {
    (2.0 / (fan_in + fan_out) as f64).sqrt()
}

fn normal(rng: &mut impl Rng, shape: &[usize], std: f64) -> Tensor {
    let len = shape.iter().product();
    let data = (0..len).map(|_| std * standard_normal(rng)).collect();
    Tensor::from_vec(shape, data)
}

/// Box-Muller; two uniforms per draw keeps the stream layout simple.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Init scale of the token/label/sequence embedding tables. Token identity
/// must carry enough energy through the attention mixtures for the anchor
/// readout to separate vertices early in training.
const EMBED_STD: f64 = 0.25;

/// Scale of the orthogonal position rows. Unit-norm rows would swamp the
/// token embeddings in the additive input; a modest gain keeps the rows
/// exactly orthogonal while letting token identity carry weight.
const POS_EMBED_GAIN: f64 = 0.1;

/// Rows are orthogonalized in blocks of `cols` by modified Gram-Schmidt and
/// scaled to `gain`, so any window of up to `cols` consecutive rows is
/// pairwise orthogonal.
fn orthogonal(rng: &mut impl Rng, shape: &[usize], gain: f64) -> Tensor {
    let (rows, cols) = (shape[0], shape[1]);
    let mut out = Tensor::zeros(shape);
    let mut block: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for r in 0..rows {
        if r % cols == 0 {
            block.clear();
        }
        let mut v: Vec<f64> = (0..cols).map(|_| standard_normal(rng)).collect();
        loop {
            for prev in &block {
                let coeff = dot(&v, prev);
                for (a, b) in v.iter_mut().zip(prev) {
                    *a -= coeff * b;
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-8 {
                for a in v.iter_mut() {
                    *a /= norm;
                }
                break;
            }
            // degenerate draw; resample
            v = (0..cols).map(|_| standard_normal(rng)).collect();
        }
        out.row_mut(r).copy_from_slice(&v);
        block.push(v.clone());
        let row = out.row_mut(r);
        for a in row.iter_mut() {
            *a *= gain;
        }
    }
    out
}
