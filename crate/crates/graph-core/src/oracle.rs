use std::collections::BTreeSet;

use crate::error::GraphError;
use crate::graph::{LabeledGraph, Match};

/// Queries above this size are refused by the brute-force oracle.
pub const DEFAULT_ORACLE_CAP: usize = 8;

/// Canonical, order-independent set of matches.
pub type MatchSet = BTreeSet<Vec<(usize, usize)>>;

/// True iff `m` is an injective, label-preserving, edge-preserving assignment
/// covering every query vertex exactly once.
pub fn verify_match(query: &LabeledGraph, data: &LabeledGraph, m: &Match) -> bool {
    let n = query.vertex_count();
    if m.len() != n {
        return false;
    }
    let mut image = vec![usize::MAX; n];
    for &(u, v) in m.pairs() {
        if u >= n || v >= data.vertex_count() || image[u] != usize::MAX {
            return false;
        }
        image[u] = v;
    }
    // injectivity
    let mut sorted = image.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    // labels
    for u in 0..n {
        if query.label(u) != data.label(image[u]) {
            return false;
        }
    }
    // edge preservation
    for (u, w) in query.edges() {
        if !data.has_edge(image[u], image[w]) {
            return false;
        }
    }
    true
}

/// Enumerates every match of `query` in `data` by unpruned depth-first search
/// over label-compatible assignments, in fixed query-vertex id order.
///
/// Intentionally small-scale: refuses queries above `DEFAULT_ORACLE_CAP`.
pub fn brute_force_enumerate(
    query: &LabeledGraph,
    data: &LabeledGraph,
) -> Result<MatchSet, GraphError> {
    brute_force_enumerate_with_cap(query, data, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_enumerate_with_cap(
    query: &LabeledGraph,
    data: &LabeledGraph,
    cap: usize,
) -> Result<MatchSet, GraphError> {
    let n = query.vertex_count();
    if n > cap {
        return Err(GraphError::OracleCap { size: n, cap });
    }
    let mut out = MatchSet::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; data.vertex_count()];
    extend(query, data, 0, &mut image, &mut used, &mut out);
    Ok(out)
}

fn extend(
    query: &LabeledGraph,
    data: &LabeledGraph,
    depth: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut MatchSet,
) {
    let n = query.vertex_count();
    if depth == n {
        out.insert((0..n).map(|u| (u, image[u])).collect());
        return;
    }
    for v in 0..data.vertex_count() {
        if used[v] || data.label(v) != query.label(depth) {
            continue;
        }
        // every query edge to an already-assigned vertex must be preserved
        let consistent = query
            .neighbors(depth)
            .iter()
            .filter(|&&u| u < depth)
            .all(|&u| data.has_edge(image[u], v));
        if !consistent {
            continue;
        }
        image[depth] = v;
        used[v] = true;
        extend(query, data, depth + 1, image, used, out);
        used[v] = false;
        image[depth] = usize::MAX;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(labels: &[usize], edges: &[(usize, usize)]) -> LabeledGraph {
        LabeledGraph::new(labels.to_vec(), edges).unwrap()
    }

    #[test]
    fn single_vertex_query_matches_by_label() {
        let q = graph(&[3], &[]);
        let g = graph(&[3, 4], &[(0, 1)]);
        let matches = brute_force_enumerate(&q, &g).unwrap();
        assert_eq!(matches, MatchSet::from([vec![(0, 0)]]));
    }

    #[test]
    fn triangle_on_triangle_has_six_matches() {
        let tri = graph(&[0, 0, 0], &[(0, 1), (1, 2), (0, 2)]);
        let matches = brute_force_enumerate(&tri, &tri).unwrap();
        assert_eq!(matches.len(), 6);
    }

    #[test]
    fn labeled_edge_on_path() {
        // q: edge with labels 1-2; g: path 0(1)-1(2)-2(1)
        let q = graph(&[1, 2], &[(0, 1)]);
        let g = graph(&[1, 2, 1], &[(0, 1), (1, 2)]);
        let matches = brute_force_enumerate(&q, &g).unwrap();
        let expected = MatchSet::from([vec![(0, 0), (1, 1)], vec![(0, 2), (1, 1)]]);
        assert_eq!(matches, expected);
    }

    #[test]
    fn oracle_refuses_large_queries() {
        let labels = vec![0; 9];
        let edges: Vec<_> = (0..8).map(|i| (i, i + 1)).collect();
        let q = graph(&labels, &edges);
        assert!(brute_force_enumerate(&q, &q).is_err());
    }

    #[test]
    fn verify_rejects_non_injective() {
        let q = graph(&[0, 0], &[]);
        let g = graph(&[0, 0], &[]);
        assert!(!verify_match(&q, &g, &Match::new(vec![(0, 1), (1, 1)])));
        assert!(verify_match(&q, &g, &Match::new(vec![(0, 1), (1, 0)])));
    }

    #[test]
    fn verify_accepts_identity() {
        let g = graph(&[0, 1, 2], &[(0, 1), (1, 2)]);
        let identity = Match::new((0..3).map(|v| (v, v)).collect());
        assert!(verify_match(&g, &g, &identity));
    }

    #[test]
    fn all_oracle_matches_verify() {
        let q = graph(&[0, 1, 0], &[(0, 1), (1, 2)]);
        let g = graph(&[0, 1, 0, 1], &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        for pairs in brute_force_enumerate(&q, &g).unwrap() {
            assert!(verify_match(&q, &g, &Match::new(pairs)));
        }
    }
}
