use std::cmp::Reverse;

use neugn_graph_core::LabeledGraph;

use crate::filter::CandidateSets;
use crate::EngineError;

/// A permutation of the query vertices; every prefix induces a connected
/// subgraph of the query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingOrder {
    order: Vec<usize>,
    index_of: Vec<usize>,
}

impl MatchingOrder {
    pub fn vertices(&self) -> &[usize] {
        &self.order
    }

    pub fn at(&self, depth: usize) -> usize {
        self.order[depth]
    }

    pub fn index_of(&self, query_vertex: usize) -> usize {
        self.index_of[query_vertex]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Greedy connected order: start at the vertex with the fewest candidates
/// (ties: higher degree, then smaller id), then repeatedly append the
/// prefix-adjacent vertex with the fewest candidates under the same rule.
pub fn generate_order(
    query: &LabeledGraph,
    candidates: &CandidateSets,
) -> Result<MatchingOrder, EngineError> {
    let n = query.vertex_count();
    if n == 0 || !query.is_connected() {
        return Err(EngineError::DisconnectedQuery);
    }
    let key = |u: usize| (candidates.len(u), Reverse(query.degree(u)), u);

    let start = (0..n).min_by_key(|&u| key(u)).unwrap();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut adjacent = vec![false; n];
    order.push(start);
    placed[start] = true;
    for &w in query.neighbors(start) {
        adjacent[w] = true;
    }
    while order.len() < n {
        let next = (0..n)
            .filter(|&u| !placed[u] && adjacent[u])
            .min_by_key(|&u| key(u))
            .expect("connected query always has a frontier vertex");
        order.push(next);
        placed[next] = true;
        for &w in query.neighbors(next) {
            if !placed[w] {
                adjacent[w] = true;
            }
        }
    }

    let mut index_of = vec![0usize; n];
    for (i, &u) in order.iter().enumerate() {
        index_of[u] = i;
    }
    Ok(MatchingOrder { order, index_of })
}
