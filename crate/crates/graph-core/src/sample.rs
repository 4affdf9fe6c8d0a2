use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::LabeledGraph;

/// A batch of sampled query graphs plus the seed and data-graph identifier
/// they were derived from.
#[derive(Debug, Clone)]
pub struct QuerySet {
    pub queries: Vec<LabeledGraph>,
    pub seed: u64,
    pub source: String,
}

/// Random-walks from `start` until `target_distinct` distinct vertices have
/// been visited, then returns the induced subgraph over the visited set,
/// renumbered 0..k-1, plus the mapping new id -> original id.
pub fn random_walk_sample(
    graph: &LabeledGraph,
    start: usize,
    target_distinct: usize,
    rng: &mut impl Rng,
) -> Result<(LabeledGraph, Vec<usize>), GraphError> {
    if target_distinct == 0 {
        return Err(GraphError::Sampling("target size must be at least 1".into()));
    }
    let component = graph.component_of(start);
    if component.len() < target_distinct {
        return Err(GraphError::Sampling(format!(
            "component of vertex {start} has {} vertices, fewer than requested {target_distinct}",
            component.len()
        )));
    }

    let mut visited = vec![false; graph.vertex_count()];
    let mut picked = Vec::with_capacity(target_distinct);
    visited[start] = true;
    picked.push(start);
    let mut current = start;
    // Cover time on a connected graph is O(V*E); this bound is never hit in
    // practice but keeps the walk total.
    let max_steps = 8 * graph.vertex_count() * (graph.edge_count() + 1) + 64;
    let mut steps = 0usize;
    while picked.len() < target_distinct && steps < max_steps {
        let neighbors = graph.neighbors(current);
        current = neighbors[rng.random_range(0..neighbors.len())];
        if !visited[current] {
            visited[current] = true;
            picked.push(current);
        }
        steps += 1;
    }
    // Fallback: complete deterministically from the BFS frontier of the
    // visited set. The component pre-check guarantees enough vertices exist.
    if picked.len() < target_distinct {
        for &v in &component {
            if !visited[v] {
                visited[v] = true;
                picked.push(v);
                if picked.len() == target_distinct {
                    break;
                }
            }
        }
    }

    let (sub, mapping) = graph.induced_subgraph(&picked);
    debug_assert!(sub.is_connected());
    Ok((sub, mapping))
}

/// Samples `count` connected induced subgraphs of `graph` with exactly `size`
/// vertices each, from uniformly chosen start vertices. Deterministic given
/// the seed.
pub fn generate_query_set(
    graph: &LabeledGraph,
    count: usize,
    size: usize,
    seed: u64,
    source: impl Into<String>,
) -> Result<QuerySet, GraphError> {
    if count == 0 || size == 0 {
        return Err(GraphError::Generation("count and size must be at least 1".into()));
    }
    if graph.vertex_count() == 0 {
        return Err(GraphError::Generation("data graph is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries = Vec::with_capacity(count);
    const RETRY_BUDGET: usize = 1000;
    for k in 0..count {
        let mut sampled = None;
        for _ in 0..RETRY_BUDGET {
            let start = rng.random_range(0..graph.vertex_count());
            match random_walk_sample(graph, start, size, &mut rng) {
                Ok((q, _)) => {
                    sampled = Some(q);
                    break;
                }
                Err(GraphError::Sampling(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        match sampled {
            Some(q) => queries.push(q),
            None => {
                return Err(GraphError::Generation(format!(
                    "query {k}: no component with {size} vertices found after {RETRY_BUDGET} tries"
                )))
            }
        }
    }
    Ok(QuerySet {
        queries,
        seed,
        source: source.into(),
    })
}
