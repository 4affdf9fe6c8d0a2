use rand::seq::SliceRandom;
use rand::Rng;

use neugn_euler_serialize::{build_masked_sequence, cyclic_reindex, euler_path, eulerize};
use neugn_euler_serialize::MaskedNodeSequence;
use neugn_graph_core::{random_walk_sample, LabeledGraph};
use neugn_neural_nav::Hyperparams;

use crate::train::TrainingConfig;
use crate::TrainError;

/// One masked-node-generation instance: the masked sequence, the sampled
/// subgraph it came from (input to the structure extractor), and the true
/// data-graph vertex behind the class tokens. `mapping[q]` is the data
/// vertex behind subgraph vertex `q`.
#[derive(Debug, Clone)]
pub struct TrainingSample {
    pub sequence: MaskedNodeSequence,
    pub query: LabeledGraph,
    pub mapping: Vec<usize>,
    pub target: usize,
    pub anchor: usize,
}

/// Per-graph sampler with cached component sizes, so walk sizes can be
/// clipped without re-running BFS for every anchor.
pub struct SampleGenerator<'g> {
    graph: &'g LabeledGraph,
    component_size: Vec<usize>,
    walk_min: usize,
    walk_max: usize,
    mask_ratio: f64,
    window: usize,
    max_tokens: usize,
}

impl<'g> SampleGenerator<'g> {
    pub fn new(graph: &'g LabeledGraph, hp: &Hyperparams, cfg: &TrainingConfig) -> Self {
        let mut component_size = vec![0usize; graph.vertex_count()];
        for v in 0..graph.vertex_count() {
            if component_size[v] == 0 {
                let component = graph.component_of(v);
                for &w in &component {
                    component_size[w] = component.len();
                }
            }
        }
        SampleGenerator {
            graph,
            component_size,
            walk_min: cfg.walk_min,
            walk_max: cfg.walk_max,
            mask_ratio: cfg.mask_ratio,
            window: hp.window,
            max_tokens: hp.max_len.saturating_sub(2),
        }
    }

    /// Samples one training instance anchored at `anchor`: random-walk
    /// subgraph, Euler serialization, random cyclic offset, then masking.
    /// An anchor whose component is smaller than the walk range degrades to
    /// a smaller (possibly single-token) sample instead of failing.
    pub fn sample(&self, anchor: usize, rng: &mut impl Rng) -> Result<TrainingSample, TrainError> {
        let available = self.component_size[anchor];
        let mut size = rng
            .random_range(self.walk_min..=self.walk_max)
            .min(available)
            .max(1);
        loop {
            let (query, mapping) = random_walk_sample(self.graph, anchor, size, rng)?;
            let path = euler_path(&eulerize(&query)?);
            if path.nodes.len() > self.max_tokens && size > 1 {
                // serialized walk too long for the model; retry smaller
                size -= 1;
                continue;
            }
            let offset = rng.random_range(0..self.window);
            let indexed = cyclic_reindex(&path, offset, self.window)?;

            let n = query.vertex_count();
            let max_masked = ((self.mask_ratio * n as f64).ceil() as usize).max(1);
            let mask_count = rng.random_range(1..=max_masked);
            let mut vertices: Vec<usize> = (0..n).collect();
            vertices.shuffle(rng);
            let masked = &vertices[..mask_count];
            let target_vertex = masked[rng.random_range(0..mask_count)];

            let mut assignment: Vec<Option<usize>> = mapping.iter().map(|&v| Some(v)).collect();
            for &m in masked {
                assignment[m] = None;
            }
            let sequence = build_masked_sequence(&indexed, &assignment, Some(target_vertex))?;
            return Ok(TrainingSample {
                sequence,
                query,
                target: mapping[target_vertex],
                mapping,
                anchor,
            });
        }
    }
}

/// One sample per data-graph vertex, in anchor order.
pub fn generate_epoch_samples(
    graph: &LabeledGraph,
    hp: &Hyperparams,
    cfg: &TrainingConfig,
    rng: &mut impl Rng,
) -> Result<Vec<TrainingSample>, TrainError> {
    let generator = SampleGenerator::new(graph, hp, cfg);
    (0..graph.vertex_count())
        .map(|anchor| generator.sample(anchor, rng))
        .collect()
}
